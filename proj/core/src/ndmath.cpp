#include "rp/ndmath.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rp {

namespace {

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t x = seed;
    for (auto& s : state_) s = splitmix64(x);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl64(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl64(state_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: bound must be > 0");
    const std::uint64_t threshold = (~bound + 1) % bound; // 2^64 mod bound
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) return r % bound;
    }
}

Rng Rng::child(std::uint64_t stream) const {
    std::uint64_t x = seed_ ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
    return Rng(splitmix64(x));
}

double dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        s0 += a[j] * b[j];
        s1 += a[j + 1] * b[j + 1];
        s2 += a[j + 2] * b[j + 2];
        s3 += a[j + 3] * b[j + 3];
    }
    double tail = 0.0;
    for (; j < n; ++j) tail += a[j] * b[j];
    return ((s0 + s1) + (s2 + s3)) + tail;
}

void affine_forward_into(const Vector& x, const Matrix& w, const Vector& b, Vector& out) {
    if (w.cols != x.size() || w.rows != b.size()) {
        throw std::invalid_argument(
            "affine_forward: shape mismatch, w is " + std::to_string(w.rows) + "x" +
            std::to_string(w.cols) + ", x has dim " + std::to_string(x.size()) +
            ", b has dim " + std::to_string(b.size()));
    }
    out.resize(w.rows);
    for (std::size_t i = 0; i < w.rows; ++i) {
        out[i] = dot(w.row(i), x.data(), w.cols) + b[i];
    }
}

Vector affine_forward(const Vector& x, const Matrix& w, const Vector& b) {
    Vector out;
    affine_forward_into(x, w, b, out);
    return out;
}

Vector leaky_relu(const Vector& x, double slope) {
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = leaky_relu_scalar(x[i], slope);
    return out;
}

Vector leaky_relu_grad(const Vector& x, double slope) {
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = leaky_relu_grad_scalar(x[i], slope);
    return out;
}

void softmax_into(const Vector& z, Vector& out) {
    out.resize(z.size());
    double zmax = z[0];
    for (double v : z) zmax = std::max(zmax, v);
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        out[i] = std::exp(z[i] - zmax);
        sum += out[i];
    }
    for (auto& p : out) p /= sum;
}

Vector softmax(const Vector& z) {
    Vector out;
    softmax_into(z, out);
    return out;
}

std::size_t sample_categorical(const Vector& p, Rng& rng) {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw std::invalid_argument("sample_categorical: negative or NaN probability");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("sample_categorical: probabilities sum to " + std::to_string(sum));
    }
    const double u = rng.uniform();
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) last_positive = i;
        cum += p[i];
        if (u < cum) return i;
    }
    // u landed in the tail rounding gap; the draw belongs to the last
    // positive-mass bucket.
    return last_positive;
}

Vector solve_linear(Matrix a, Vector b) {
    if (a.rows != a.cols || a.rows != b.size()) {
        throw std::invalid_argument("solve_linear: need square system matching b");
    }
    const std::size_t n = a.rows;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(a(r, col));
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best < 1e-300) throw std::runtime_error("solve_linear: singular system");
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(pivot, j), a(col, j));
            std::swap(b[pivot], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            b[r] -= f * b[col];
        }
    }
    Vector x(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
        double acc = b[ri];
        for (std::size_t j = ri + 1; j < n; ++j) acc -= a(ri, j) * x[j];
        x[ri] = acc / a(ri, ri);
    }
    return x;
}

bool all_finite(const Vector& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

bool all_finite(const Matrix& m) {
    for (double x : m.data)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace rp
