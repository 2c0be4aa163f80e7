#include "rp/dataset.hpp"

#include <zlib.h>

#include <cstring>
#include <memory>
#include <stdexcept>

#include "rp/errors.hpp"

namespace rp {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

struct GzCloser {
    void operator()(gzFile f) const {
        if (f) gzclose(f);
    }
};
using GzHandle = std::unique_ptr<gzFile_s, GzCloser>;

// gzopen reads both gzip-compressed and plain files, which gives us the
// transparent .gz handling in one code path.
GzHandle open_idx(const std::string& path) {
    GzHandle f(gzopen(path.c_str(), "rb"));
    if (!f) throw IoError("cannot open '" + path + "'");
    return f;
}

void read_exact(gzFile f, void* buf, std::size_t n, const std::string& path) {
    const int got = gzread(f, buf, static_cast<unsigned>(n));
    if (got < 0 || static_cast<std::size_t>(got) != n) {
        throw IoError("truncated IDX file '" + path + "'");
    }
}

std::uint32_t read_u32_be(gzFile f, const std::string& path) {
    unsigned char b[4];
    read_exact(f, b, 4, path);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

} // namespace

std::vector<Vector> load_idx_images(const std::string& path) {
    GzHandle f = open_idx(path);
    const std::uint32_t magic = read_u32_be(f.get(), path);
    if (magic != kImagesMagic) {
        throw IoError("bad IDX image magic number in '" + path + "' (got " +
                      std::to_string(magic) + ", want 2051)");
    }
    const std::uint32_t count = read_u32_be(f.get(), path);
    const std::uint32_t rows = read_u32_be(f.get(), path);
    const std::uint32_t cols = read_u32_be(f.get(), path);
    if (rows == 0 || cols == 0 || rows > 4096 || cols > 4096) {
        throw IoError("IDX image dimension mismatch in '" + path + "': " +
                      std::to_string(rows) + "x" + std::to_string(cols));
    }
    const std::size_t dim = std::size_t(rows) * cols;
    std::vector<Vector> images;
    images.reserve(count);
    std::vector<unsigned char> raw(dim);
    for (std::uint32_t i = 0; i < count; ++i) {
        read_exact(f.get(), raw.data(), dim, path);
        Vector img(dim);
        for (std::size_t j = 0; j < dim; ++j) img[j] = raw[j] / 255.0;
        images.push_back(std::move(img));
    }
    return images;
}

std::vector<int> load_idx_labels(const std::string& path) {
    GzHandle f = open_idx(path);
    const std::uint32_t magic = read_u32_be(f.get(), path);
    if (magic != kLabelsMagic) {
        throw IoError("bad IDX label magic number in '" + path + "' (got " +
                      std::to_string(magic) + ", want 2049)");
    }
    const std::uint32_t count = read_u32_be(f.get(), path);
    std::vector<unsigned char> raw(count);
    if (count > 0) read_exact(f.get(), raw.data(), count, path);
    std::vector<int> labels(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        if (raw[i] > 9) {
            throw IoError("invalid label " + std::to_string(int(raw[i])) + " at index " +
                          std::to_string(i) + " in '" + path + "'");
        }
        labels[i] = raw[i];
    }
    return labels;
}

LabeledSet load_labeled_set(const std::string& images_path, const std::string& labels_path) {
    LabeledSet set;
    set.images = load_idx_images(images_path);
    set.labels = load_idx_labels(labels_path);
    if (set.images.size() != set.labels.size()) {
        throw IoError("image/label count mismatch: " + std::to_string(set.images.size()) +
                      " images vs " + std::to_string(set.labels.size()) + " labels");
    }
    return set;
}

LabeledSet LabeledSet::head(std::size_t n) const {
    if (n == 0 || n >= count()) return *this;
    LabeledSet out;
    out.images.assign(images.begin(), images.begin() + n);
    out.labels.assign(labels.begin(), labels.begin() + n);
    return out;
}

EpochOrder epoch_order(std::size_t count, std::uint64_t epoch, const Rng& run_rng) {
    if (count == 0) throw std::invalid_argument("epoch_order: count must be > 0");
    EpochOrder eo;
    eo.epoch = epoch;
    eo.order.resize(count);
    for (std::size_t i = 0; i < count; ++i) eo.order[i] = static_cast<std::uint32_t>(i);
    // Permutation streams live at child indices 2^32 + epoch; small indices
    // are reserved for net init, action sampling and similar fixed consumers.
    Rng rng = run_rng.child((std::uint64_t(1) << 32) + epoch);
    for (std::size_t i = count - 1; i > 0; --i) {
        const std::size_t j = rng.uniform_below(i + 1);
        std::swap(eo.order[i], eo.order[j]);
    }
    return eo;
}

Parity parity_label(int label) {
    if (label < 0 || label > 9) {
        throw std::out_of_range("parity_label: label " + std::to_string(label) + " not in 0..9");
    }
    return (label % 2 == 1) ? Parity::Odd : Parity::Even;
}

} // namespace rp
