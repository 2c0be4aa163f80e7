#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace rp {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }
};

// Deterministic seeded generator: xoshiro256** state initialized from the
// seed with splitmix64. Same seed and call sequence produce the same stream
// on every platform; nothing here depends on the C++ standard library's
// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform in [0, 1), 53 significant bits.
    double uniform();

    // Uniform in [lo, hi).
    double uniform(double lo, double hi);

    // Unbiased integer in [0, bound) via rejection sampling; bound > 0.
    std::uint64_t uniform_below(std::uint64_t bound);

    // Independent child stream, derived from this generator's original seed
    // and the stream index only (not from the current position). Used to give
    // net init, epoch permutations, action sampling, ... disjoint streams.
    Rng child(std::uint64_t stream) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_;
};

// out = w * x + b. Throws std::invalid_argument with both shapes on mismatch.
void affine_forward_into(const Vector& x, const Matrix& w, const Vector& b, Vector& out);
Vector affine_forward(const Vector& x, const Matrix& w, const Vector& b);

// Elementwise max(x, slope * x); slope in (0, 1).
Vector leaky_relu(const Vector& x, double slope);
// Derivative: 1 for x > 0, slope for x < 0, 1 at exactly 0.
Vector leaky_relu_grad(const Vector& x, double slope);

inline double leaky_relu_scalar(double x, double slope) { return x > 0.0 ? x : slope * x; }
inline double leaky_relu_grad_scalar(double x, double slope) { return x >= 0.0 ? 1.0 : slope; }

// Numerically stable softmax (max subtraction). Output sums to 1.
void softmax_into(const Vector& z, Vector& out);
Vector softmax(const Vector& z);

// Inverse-CDF draw over a single uniform. p must be nonnegative and sum to 1
// within 1e-9; otherwise throws std::invalid_argument.
std::size_t sample_categorical(const Vector& p, Rng& rng);

// Dot product with four fixed partial accumulators. The split keeps the
// summation order defined (bit-reproducible per build) while letting the
// compiler vectorize.
double dot(const double* a, const double* b, std::size_t n);

// Solves a * x = b by Gaussian elimination with partial pivoting; a is
// consumed. Throws std::runtime_error on a (numerically) singular system.
Vector solve_linear(Matrix a, Vector b);

// True if every entry is finite.
bool all_finite(const Vector& v);
bool all_finite(const Matrix& m);

} // namespace rp
