#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "helpers.hpp"
#include "rp/dataset.hpp"
#include "rp/errors.hpp"

using namespace rp;
using namespace rptest;

namespace {

void write_gzip(const std::string& path, const std::string& bytes) {
    gzFile f = gzopen(path.c_str(), "wb");
    REQUIRE(f != nullptr);
    REQUIRE(gzwrite(f, bytes.data(), unsigned(bytes.size())) == int(bytes.size()));
    gzclose(f);
}

} // namespace

TEST_CASE("idx image loading normalizes endpoints") {
    TempDir tmp("idx");
    const std::vector<std::vector<std::uint8_t>> imgs{{0, 255, 128, 64}};
    write_file(tmp.file("img.idx"), idx3_bytes(imgs, 2, 2));

    const auto loaded = load_idx_images(tmp.file("img.idx"));
    REQUIRE(loaded.size() == 1);
    REQUIRE(loaded[0].size() == 4);
    CHECK(loaded[0][0] == 0.0);
    CHECK(loaded[0][1] == 1.0);
    CHECK(loaded[0][2] == doctest::Approx(128.0 / 255.0));
}

TEST_CASE("idx loading errors are distinct") {
    TempDir tmp("idxerr");

    std::string bad_magic = idx3_bytes({{1, 2, 3, 4}}, 2, 2);
    bad_magic[3] = 0x07;
    write_file(tmp.file("bad_magic.idx"), bad_magic);
    CHECK_THROWS_WITH_AS(load_idx_images(tmp.file("bad_magic.idx")),
                         doctest::Contains("magic"), IoError);

    std::string truncated = idx3_bytes({{1, 2, 3, 4}}, 2, 2);
    truncated.resize(truncated.size() - 2);
    write_file(tmp.file("trunc.idx"), truncated);
    CHECK_THROWS_WITH_AS(load_idx_images(tmp.file("trunc.idx")),
                         doctest::Contains("truncated"), IoError);

    write_file(tmp.file("empty.idx"), "");
    CHECK_THROWS_AS(load_idx_labels(tmp.file("empty.idx")), IoError);

    write_file(tmp.file("badlabel.idx"), idx1_bytes({3, 11}));
    CHECK_THROWS_WITH_AS(load_idx_labels(tmp.file("badlabel.idx")),
                         doctest::Contains("invalid label"), IoError);

    CHECK_THROWS_AS(load_idx_images(tmp.file("missing.idx")), IoError);
}

TEST_CASE("gzip-compressed idx files load transparently") {
    TempDir tmp("idxgz");
    const std::vector<std::vector<std::uint8_t>> imgs{{10, 20, 30, 40}, {50, 60, 70, 80}};
    const std::string raw = idx3_bytes(imgs, 2, 2);
    write_file(tmp.file("plain.idx"), raw);
    write_gzip(tmp.file("zipped.idx.gz"), raw);

    const auto a = load_idx_images(tmp.file("plain.idx"));
    const auto b = load_idx_images(tmp.file("zipped.idx.gz"));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("ingestion is lossless: re-serializing recovers the source bytes") {
    // Every byte value must round-trip through /255 and back.
    for (int byte = 0; byte <= 255; ++byte) {
        const double v = byte / 255.0;
        CHECK(int(std::lround(v * 255.0)) == byte);
    }

    TempDir tmp("idxrt");
    std::vector<std::vector<std::uint8_t>> imgs(100, std::vector<std::uint8_t>(9));
    std::uint8_t fill = 0;
    for (auto& img : imgs) {
        for (auto& px : img) px = fill++;
    }
    const std::string file_bytes = idx3_bytes(imgs, 3, 3);
    write_file(tmp.file("rt.idx"), file_bytes);

    const auto loaded = load_idx_images(tmp.file("rt.idx"));
    REQUIRE(loaded.size() == 100);
    std::string reserialized;
    for (const auto& img : loaded) {
        for (double v : img) reserialized.push_back(char(std::lround(v * 255.0)));
    }
    CHECK(reserialized == file_bytes.substr(16)); // skip the 16-byte header
}

TEST_CASE("epoch_order basics") {
    const Rng rng(5);
    const EpochOrder one = epoch_order(1, 0, rng);
    CHECK(one.order == std::vector<std::uint32_t>{0});

    const EpochOrder a = epoch_order(100, 7, rng);
    const EpochOrder b = epoch_order(100, 7, rng);
    CHECK(a.order == b.order);

    const EpochOrder c = epoch_order(100, 8, rng);
    CHECK(a.order != c.order);

    CHECK_THROWS_AS(epoch_order(0, 0, rng), std::invalid_argument);
}

TEST_CASE("epoch_order is always a permutation") {
    Rng meta(99);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::uint64_t seed = meta.next_u64();
        const std::uint64_t epoch = meta.uniform_below(1000);
        const std::size_t count = 1 + meta.uniform_below(60);
        EpochOrder eo = epoch_order(count, epoch, Rng(seed));
        std::sort(eo.order.begin(), eo.order.end());
        for (std::size_t i = 0; i < count; ++i) REQUIRE(eo.order[i] == i);
    }
}

TEST_CASE("parity_label definition") {
    CHECK(parity_label(3) == Parity::Odd);
    CHECK(parity_label(0) == Parity::Even);
    int odd_count = 0;
    for (int d = 0; d <= 9; ++d) {
        if (parity_label(d) == Parity::Odd) ++odd_count;
    }
    CHECK(odd_count == 5);
    CHECK_THROWS_AS(parity_label(10), std::out_of_range);
    CHECK_THROWS_AS(parity_label(-1), std::out_of_range);
}

TEST_CASE("LabeledSet::head takes a prefix") {
    const LabeledSet set = synthetic_set(20, 8, 10, 1);
    const LabeledSet h = set.head(5);
    CHECK(h.count() == 5);
    CHECK(h.images[4] == set.images[4]);
    CHECK(set.head(0).count() == 20);
    CHECK(set.head(50).count() == 20);
}

TEST_CASE("real MNIST files load with the documented shapes") {
    const std::string dir = mnist_dir();
    if (dir.empty()) {
        MESSAGE("MNIST files not found; set REWARD_PROBE_DATA_DIR to run this case");
        return;
    }
    const auto train = load_labeled_set(dir + "/train-images-idx3-ubyte",
                                        dir + "/train-labels-idx1-ubyte");
    CHECK(train.count() == 60000);
    CHECK(train.images[0].size() == 784);

    const auto test_labels = load_idx_labels(dir + "/t10k-labels-idx1-ubyte");
    CHECK(test_labels.size() == 10000);

    std::array<int, 10> histogram{};
    for (int l : train.labels) histogram[std::size_t(l)]++;
    for (int c = 0; c < 10; ++c) CHECK(histogram[std::size_t(c)] > 0);

    for (const auto& img : train.images) {
        REQUIRE(img.size() == 784);
    }
    double lo = 1.0, hi = 0.0;
    for (double v : train.images[0]) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo >= 0.0);
    CHECK(hi <= 1.0);
}
