#include "rp/probe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rp/errors.hpp"

namespace rp {

FeatureSet extract_features(const ActorCriticNet& net, const LabeledSet& data,
                            const std::string& source_tag) {
    FeatureSet fs;
    fs.source = source_tag;
    fs.features.reserve(data.count());
    fs.labels = data.labels;
    for (const auto& img : data.images) fs.features.push_back(extract_representation(net, img));
    return fs;
}

FeatureSet raw_pixel_features(const LabeledSet& data) {
    FeatureSet fs;
    fs.source = "raw-pixels";
    fs.features = data.images;
    fs.labels = data.labels;
    return fs;
}

namespace {

int probe_argmax(const LinearProbe& probe, const Vector& f, Vector& logits) {
    affine_forward_into(f, probe.weights, probe.bias, logits);
    int best = 0;
    for (std::size_t a = 1; a < logits.size(); ++a) {
        if (logits[a] > logits[best]) best = int(a);
    }
    return best;
}

} // namespace

ProbeFitResult fit_probe(const FeatureSet& train, const ProbeConfig& cfg) {
    if (train.count() == 0) throw std::invalid_argument("fit_probe: empty feature set");
    const std::size_t dim = train.dim();
    constexpr std::size_t kClasses = 10;

    ProbeFitResult res;
    res.probe.weights = Matrix(kClasses, dim);
    res.probe.bias.assign(kClasses, 0.0);

    const Rng run_rng(cfg.seed);
    Vector logits, probs;
    std::vector<double> epoch_acc;

    for (std::uint64_t e = 0; e < cfg.max_epochs; ++e) {
        const EpochOrder order = epoch_order(train.count(), e, run_rng);
        std::uint64_t correct = 0;
        for (const std::uint32_t idx : order.order) {
            const Vector& f = train.features[idx];
            const int label = train.labels[idx];
            affine_forward_into(f, res.probe.weights, res.probe.bias, logits);
            softmax_into(logits, probs);
            int best = 0;
            for (std::size_t a = 1; a < kClasses; ++a) {
                if (logits[a] > logits[best]) best = int(a);
            }
            if (best == label) ++correct;
            // Cross-entropy descent step.
            for (std::size_t a = 0; a < kClasses; ++a) {
                const double d = probs[a] - (int(a) == label ? 1.0 : 0.0);
                if (d == 0.0) continue;
                const double step = cfg.eta * d;
                double* row = res.probe.weights.row(a);
                for (std::size_t j = 0; j < dim; ++j) row[j] -= step * f[j];
                res.probe.bias[a] -= step;
            }
        }
        if (!all_finite(res.probe.weights) || !all_finite(res.probe.bias)) {
            throw DivergenceError("probe diverged at epoch " + std::to_string(e + 1));
        }

        epoch_acc.push_back(double(correct) / double(train.count()));
        res.epochs = e + 1;
        res.final_train_accuracy = epoch_acc.back();

        const int w = cfg.plateau_window;
        if (w > 0 && epoch_acc.size() > std::size_t(w)) {
            const double now = *std::max_element(epoch_acc.end() - w, epoch_acc.end());
            const double before =
                *std::max_element(epoch_acc.begin(), epoch_acc.end() - w);
            if (now - before < cfg.plateau_rel_improvement * std::max(before, 1e-12)) break;
        }
    }
    return res;
}

double probe_accuracy(const LinearProbe& probe, const FeatureSet& data) {
    if (data.count() == 0) throw std::invalid_argument("probe_accuracy: empty feature set");
    if (data.dim() != probe.weights.cols) {
        throw ConfigError("probe/feature width mismatch: probe expects " +
                          std::to_string(probe.weights.cols) + ", features have " +
                          std::to_string(data.dim()));
    }
    Vector logits;
    std::size_t correct = 0;
    for (std::size_t k = 0; k < data.count(); ++k) {
        if (probe_argmax(probe, data.features[k], logits) == data.labels[k]) ++correct;
    }
    return double(correct) / double(data.count());
}

} // namespace rp
