#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rp/dataset.hpp"
#include "rp/nets.hpp"

namespace rp {

// Frozen features from one checkpoint, paired with the 10-class digit labels
// regardless of the task the checkpoint was trained on.
struct FeatureSet {
    std::vector<Vector> features;
    std::vector<int> labels;
    std::string source; // which checkpoint / task produced these

    std::size_t count() const { return features.size(); }
    std::size_t dim() const { return features.empty() ? 0 : features[0].size(); }
};

// One representation per image via the trunk; the net is never mutated.
FeatureSet extract_features(const ActorCriticNet& net, const LabeledSet& data,
                            const std::string& source_tag);

// Raw pixels as features: the reference floor for a linear classifier.
FeatureSet raw_pixel_features(const LabeledSet& data);

struct ProbeConfig {
    double eta = 1e-2;
    std::uint64_t max_epochs = 200;
    int plateau_window = 5;
    double plateau_rel_improvement = 1e-4;
    std::uint64_t seed = 0;
};

struct LinearProbe {
    Matrix weights; // 10 x feature dim
    Vector bias;    // 10
};

struct ProbeFitResult {
    LinearProbe probe;
    std::uint64_t epochs = 0;
    double final_train_accuracy = 0.0;
};

// Multinomial logistic regression by per-sample SGD over permuted epochs,
// zero-initialized, features used raw. Stops when the best online epoch
// accuracy improved by less than plateau_rel_improvement (relatively) over
// the last plateau_window epochs, or at max_epochs.
ProbeFitResult fit_probe(const FeatureSet& train, const ProbeConfig& cfg);

// Fraction of argmax-correct predictions.
double probe_accuracy(const LinearProbe& probe, const FeatureSet& data);

} // namespace rp
