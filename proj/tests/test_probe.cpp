#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rp/checkpoint.hpp"
#include "rp/errors.hpp"
#include "rp/probe.hpp"

using namespace rp;
using namespace rptest;

namespace {

// Two linearly separated clusters labeled 0 and 1.
FeatureSet separable_features(std::size_t per_class, std::size_t dim, std::uint64_t seed) {
    FeatureSet fs;
    fs.source = "toy";
    Rng rng(seed);
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const int label = int(i % 2);
        Vector f(dim);
        for (auto& v : f) v = rng.uniform(-0.05, 0.05);
        f[0] += label == 0 ? 1.0 : -1.0;
        fs.features.push_back(std::move(f));
        fs.labels.push_back(label);
    }
    return fs;
}

} // namespace

TEST_CASE("fit_probe reaches 100% on disjoint clusters") {
    const FeatureSet train = separable_features(50, 6, 3);
    ProbeConfig cfg;
    cfg.seed = 5;
    const ProbeFitResult res = fit_probe(train, cfg);
    CHECK(res.final_train_accuracy == 1.0);
    CHECK(probe_accuracy(res.probe, train) == 1.0);
    CHECK(res.epochs < cfg.max_epochs); // the plateau rule fired
}

TEST_CASE("fit_probe is deterministic") {
    const FeatureSet train = separable_features(30, 4, 7);
    ProbeConfig cfg;
    cfg.seed = 11;
    const ProbeFitResult a = fit_probe(train, cfg);
    const ProbeFitResult b = fit_probe(train, cfg);
    CHECK(a.epochs == b.epochs);
    CHECK(a.probe.weights.data == b.probe.weights.data);
    CHECK(a.probe.bias == b.probe.bias);
}

TEST_CASE("a random probe scores at chance on balanced random features") {
    Rng rng(13);
    FeatureSet data;
    data.source = "noise";
    for (int i = 0; i < 5000; ++i) {
        Vector f(8);
        for (auto& v : f) v = rng.uniform(-1.0, 1.0);
        data.features.push_back(std::move(f));
        data.labels.push_back(i % 10);
    }
    LinearProbe probe;
    probe.weights = Matrix(10, 8);
    for (auto& w : probe.weights.data) w = rng.uniform(-1.0, 1.0);
    probe.bias.assign(10, 0.0);
    const double acc = probe_accuracy(probe, data);
    CHECK(acc > 0.05);
    CHECK(acc < 0.15);
}

TEST_CASE("extract_features: shape, determinism, zero-image sanity") {
    const NetConfig cfg{12, 9, 0.01, false};
    const ActorCriticNet net = init_net(21, 10, cfg);
    LabeledSet data = synthetic_set(40, 12, 10, 23);
    data.images[0].assign(12, 0.0); // zero image

    const FeatureSet a = extract_features(net, data, "ckpt-a");
    const FeatureSet b = extract_features(net, data, "ckpt-a");
    CHECK(a.count() == 40);
    CHECK(a.dim() == 9);
    CHECK(a.labels == data.labels);
    for (std::size_t i = 0; i < a.count(); ++i) CHECK(a.features[i] == b.features[i]);

    // Zero biases at init: the zero image maps to the zero representation.
    for (double v : a.features[0]) CHECK(v == 0.0);
}

TEST_CASE("probe_accuracy rejects width mismatches") {
    const FeatureSet train = separable_features(10, 6, 3);
    LinearProbe probe;
    probe.weights = Matrix(10, 4);
    probe.bias.assign(10, 0.0);
    CHECK_THROWS_AS(probe_accuracy(probe, train), ConfigError);
}

TEST_CASE("probing leaves the checkpoint bytes untouched") {
    TempDir tmp("freeze");
    const NetConfig cfg{12, 9, 0.01, false};
    const ActorCriticNet net = init_net(31, 10, cfg);
    const std::string path = tmp.file("frozen.rpnet");
    save_checkpoint(path, net);
    const std::string before = read_file(path);

    const ActorCriticNet loaded = load_checkpoint(path);
    const LabeledSet data = synthetic_set(64, 12, 10, 29);
    const FeatureSet features = extract_features(loaded, data, path);
    ProbeConfig pcfg;
    pcfg.max_epochs = 10;
    const ProbeFitResult res = fit_probe(features, pcfg);
    probe_accuracy(res.probe, features);

    CHECK(read_file(path) == before);
}

TEST_CASE("probe on training features typically bounds held-out accuracy") {
    // Soft report per the probe contract: log, do not assert.
    const FeatureSet train = separable_features(40, 5, 41);
    const FeatureSet held = separable_features(40, 5, 43);
    ProbeConfig cfg;
    const ProbeFitResult res = fit_probe(train, cfg);
    MESSAGE("train accuracy ", probe_accuracy(res.probe, train), ", held-out ",
            probe_accuracy(res.probe, held));
}
