#include <benchmark/benchmark.h>

#include "rp/envsim.hpp"
#include "rp/nets.hpp"
#include "rp/trainer.hpp"

using namespace rp;

namespace {

Vector random_state(std::size_t dim, Rng& rng) {
    Vector x(dim);
    for (auto& v : x) v = rng.uniform();
    return x;
}

void BM_Softmax(benchmark::State& state) {
    Rng rng(1);
    Vector z(10), out;
    for (auto& v : z) v = rng.uniform(-5.0, 5.0);
    for (auto _ : state) {
        softmax_into(z, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_Softmax);

void BM_TrunkForward(benchmark::State& state) {
    Rng rng(2);
    const ActorCriticNet net = init_net(1, 10);
    const Vector x = random_state(784, rng);
    ForwardTrace trace;
    for (auto _ : state) {
        forward_into(net, x, trace);
        benchmark::DoNotOptimize(trace.value);
    }
}
BENCHMARK(BM_TrunkForward);

void BM_ValueForward(benchmark::State& state) {
    Rng rng(3);
    const ActorCriticNet net = init_net(1, 10);
    const Vector x = random_state(784, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(value_forward(net, x));
    }
}
BENCHMARK(BM_ValueForward);

void BM_ActorCriticStep(benchmark::State& state) {
    Rng rng(4);
    ActorCriticNet net = init_net(1, 10);
    const Vector x = random_state(784, rng);
    TrainConfig cfg;
    ForwardTrace trace;
    for (auto _ : state) {
        forward_into(net, x, trace);
        TdTransition t{&trace, 3, 1.0, 0.5, false};
        actor_critic_step(net, t, cfg);
    }
}
BENCHMARK(BM_ActorCriticStep);

void BM_SupervisedStep(benchmark::State& state) {
    Rng rng(5);
    ActorCriticNet net = init_net(1, 10);
    const Vector x = random_state(784, rng);
    ForwardTrace trace;
    GradientSet grads = make_gradient_set(net);
    for (auto _ : state) {
        const double loss = supervised_forward_backward_into(net, x, 7, trace, grads);
        apply_update(net, grads, -1e-3);
        benchmark::DoNotOptimize(loss);
    }
}
BENCHMARK(BM_SupervisedStep);

void BM_EpochOrder60k(benchmark::State& state) {
    const Rng rng(6);
    std::uint64_t epoch = 0;
    for (auto _ : state) {
        const EpochOrder order = epoch_order(60000, epoch++, rng);
        benchmark::DoNotOptimize(order.order.data());
    }
}
BENCHMARK(BM_EpochOrder60k);

void BM_BellmanSolve(benchmark::State& state) {
    FiniteMdp mdp;
    mdp.num_states = 6;
    mdp.num_actions = 3;
    mdp.gamma = 0.9;
    mdp.terminal.assign(6, 0);
    mdp.policy = Matrix(6, 3);
    mdp.kernel.assign(6, {});
    Rng rng(7);
    for (int s = 0; s < 6; ++s) {
        mdp.kernel[s].resize(3);
        for (int a = 0; a < 3; ++a) {
            mdp.policy(s, a) = 1.0 / 3.0;
            double acc = 0.0;
            for (int s2 = 0; s2 < 6; ++s2) {
                double p = (s2 == 5) ? 1.0 - acc : 1.0 / 6.0;
                acc += p;
                mdp.kernel[s][a].push_back(MdpArc{p, s2, rng.uniform(-1.0, 1.0)});
            }
        }
    }
    for (auto _ : state) {
        const Vector v = bellman_solve(mdp);
        benchmark::DoNotOptimize(v.data());
    }
}
BENCHMARK(BM_BellmanSolve);

} // namespace

BENCHMARK_MAIN();
