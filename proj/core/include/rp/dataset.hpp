#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rp/ndmath.hpp"

namespace rp {

// MNIST-style labeled collection. Images are flat row-major vectors with
// pixels scaled to [0,1]; labels are class indices 0..9.
struct LabeledSet {
    std::vector<Vector> images;
    std::vector<int> labels;

    std::size_t count() const { return images.size(); }

    // First n samples (n == 0 or n >= count returns a full copy).
    LabeledSet head(std::size_t n) const;
};

enum class Parity { Even = 0, Odd = 1 };

// Reads an IDX3 image file (raw or gzip, detected by magic). Pixels are
// divided by 255. Throws IoError with a distinct message for a wrong magic
// number, a truncated file, or a dimension mismatch.
std::vector<Vector> load_idx_images(const std::string& path);

// Reads an IDX1 label file; every label must be in 0..9.
std::vector<int> load_idx_labels(const std::string& path);

// Loads and pairs both files; counts must agree.
LabeledSet load_labeled_set(const std::string& images_path, const std::string& labels_path);

// Uniform random permutation of 0..count-1 drawn via Fisher-Yates from a
// stream derived from the run seed and the epoch index.
struct EpochOrder {
    std::uint64_t epoch = 0;
    std::vector<std::uint32_t> order;
};

EpochOrder epoch_order(std::size_t count, std::uint64_t epoch, const Rng& run_rng);

// Odd iff label is one of {1,3,5,7,9}; throws std::out_of_range otherwise.
Parity parity_label(int label);

} // namespace rp
