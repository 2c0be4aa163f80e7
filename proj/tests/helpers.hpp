#pragma once

#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "rp/dataset.hpp"
#include "rp/envsim.hpp"
#include "rp/ndmath.hpp"

namespace rptest {

// Scratch directory under the system temp root, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        for (int k = 0;; ++k) {
            auto candidate = base / (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(k));
            std::error_code ec;
            if (std::filesystem::create_directories(candidate, ec)) {
                path_ = candidate;
                break;
            }
        }
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

// Dataset root for the real MNIST files: $REWARD_PROBE_DATA_DIR, else the
// conventional local path; empty when neither provides the files.
inline std::string mnist_dir() {
    auto has_files = [](const std::string& dir) {
        return std::filesystem::exists(std::filesystem::path(dir) / "train-images-idx3-ubyte") &&
               std::filesystem::exists(std::filesystem::path(dir) / "train-labels-idx1-ubyte");
    };
    if (const char* env = std::getenv("REWARD_PROBE_DATA_DIR"); env && *env && has_files(env)) {
        return env;
    }
    const std::string fallback = "/root/data/mnist";
    if (has_files(fallback)) return fallback;
    return {};
}

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), std::streamsize(bytes.size()));
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void append_u32_be(std::string& s, std::uint32_t v) {
    s.push_back(char((v >> 24) & 0xFF));
    s.push_back(char((v >> 16) & 0xFF));
    s.push_back(char((v >> 8) & 0xFF));
    s.push_back(char(v & 0xFF));
}

// Serialized IDX3 image payload.
inline std::string idx3_bytes(const std::vector<std::vector<std::uint8_t>>& images,
                              std::uint32_t rows, std::uint32_t cols) {
    std::string s;
    append_u32_be(s, 0x00000803);
    append_u32_be(s, std::uint32_t(images.size()));
    append_u32_be(s, rows);
    append_u32_be(s, cols);
    for (const auto& img : images) s.append(img.begin(), img.end());
    return s;
}

inline std::string idx1_bytes(const std::vector<std::uint8_t>& labels) {
    std::string s;
    append_u32_be(s, 0x00000801);
    append_u32_be(s, std::uint32_t(labels.size()));
    s.append(labels.begin(), labels.end());
    return s;
}

// Small synthetic labeled set: images carry weak label-dependent structure so
// nets can actually fit them.
inline rp::LabeledSet synthetic_set(std::size_t count, std::size_t dim, int classes,
                                    std::uint64_t seed) {
    rp::LabeledSet set;
    rp::Rng rng(seed);
    set.images.reserve(count);
    set.labels.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const int label = int(rng.uniform_below(std::uint64_t(classes)));
        rp::Vector img(dim);
        for (std::size_t j = 0; j < dim; ++j) img[j] = rng.uniform() * 0.2;
        // A couple of label-keyed bright pixels make the classes separable.
        img[std::size_t(label) % dim] = 1.0;
        img[(std::size_t(label) * 7 + 3) % dim] = 0.9;
        set.images.push_back(std::move(img));
        set.labels.push_back(label);
    }
    return set;
}

// Random small MDP with every state reachable: kernels mix a random
// distribution with a uniform component.
inline rp::FiniteMdp random_mdp(std::uint64_t seed, int max_states = 6, int max_actions = 3,
                                double gamma = 0.9) {
    rp::Rng rng(seed);
    rp::FiniteMdp mdp;
    mdp.num_states = 2 + int(rng.uniform_below(std::uint64_t(max_states - 1)));
    mdp.num_actions = 1 + int(rng.uniform_below(std::uint64_t(max_actions)));
    mdp.gamma = gamma * (0.3 + 0.7 * rng.uniform());
    mdp.terminal.assign(mdp.num_states, 0);
    mdp.policy = rp::Matrix(mdp.num_states, mdp.num_actions);
    mdp.kernel.assign(mdp.num_states, {});
    for (int s = 0; s < mdp.num_states; ++s) {
        mdp.kernel[s].resize(mdp.num_actions);
        double norm = 0.0;
        for (int a = 0; a < mdp.num_actions; ++a) {
            mdp.policy(s, a) = 0.2 + rng.uniform();
            norm += mdp.policy(s, a);
        }
        double acc = 0.0;
        for (int a = 0; a < mdp.num_actions; ++a) {
            mdp.policy(s, a) /= norm;
            acc += mdp.policy(s, a);
        }
        mdp.policy(s, mdp.num_actions - 1) += 1.0 - acc; // exact row sum

        for (int a = 0; a < mdp.num_actions; ++a) {
            double total = 0.0;
            std::vector<double> weights(mdp.num_states);
            for (int s2 = 0; s2 < mdp.num_states; ++s2) {
                weights[s2] = 0.05 + rng.uniform();
                total += weights[s2];
            }
            double wacc = 0.0;
            for (int s2 = 0; s2 < mdp.num_states; ++s2) {
                double p = weights[s2] / total;
                if (s2 == mdp.num_states - 1) p = 1.0 - wacc;
                wacc += p;
                mdp.kernel[s][a].push_back(
                    rp::MdpArc{p, s2, rng.uniform(-1.0, 1.0)});
            }
        }
    }
    mdp.validate();
    return mdp;
}

} // namespace rptest
