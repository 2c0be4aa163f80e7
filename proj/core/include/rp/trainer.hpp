#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rp/envsim.hpp"
#include "rp/metrics.hpp"
#include "rp/nets.hpp"

namespace rp {

enum class StopMetric { Online, Frozen };

struct TrainConfig {
    double eta_pi = 1e-3; // policy learning step (also the supervised lr)
    double eta_v = 1e-3;  // value learning step
    double gamma = 0.9;
    double target_train_error = 0.004;
    StopMetric stop_metric = StopMetric::Online;
    std::uint64_t max_epochs = 1200;
    std::uint64_t seed = 0;
    RewardSchedule schedule;
    TaskMode task = TaskMode::Digits;
    NetConfig net;
    // Epochs between test-set evaluations; 0 evaluates only at the end.
    std::uint64_t test_eval_period = 0;

    void validate() const; // throws ConfigError
};

// TD error of Eq. delta = R + gamma * V(S') - V(S), with V(S') taken as 0 on
// terminal transitions.
double td_error(double reward, double v_next, double v_current, double gamma, bool terminal);

// One sampled transition: the forward trace at S_t carries the state, the
// policy distribution the action was drawn from, and V(S_t).
struct TdTransition {
    const ForwardTrace* trace = nullptr;
    int action = 0;
    double reward = 0.0;
    double v_next = 0.0; // V(S_{t+1}) under pre-update weights; ignored when terminal
    bool terminal = false;
};

// Applies one actor-critic update in place:
//   value blocks  += eta_v  * delta * grad V(S_t)
//   policy blocks += eta_pi * delta * grad log pi(A_t|S_t)
// with the shared trunk receiving both contributions summed within the step.
// Throws DivergenceError on a non-finite TD error.
void actor_critic_step(ActorCriticNet& net, const TdTransition& transition,
                       const TrainConfig& cfg);

struct TrainResult {
    ActorCriticNet net;
    std::vector<MetricsRecord> history;
    LabelLedger ledger;
    bool reached_target = false;
    std::uint64_t epochs_completed = 0;
    std::optional<double> final_test_error;
};

// Called after each completed epoch with the fresh record and the current
// parameters (checkpointing, CSV streaming, progress display).
using EpochObserver = std::function<void(const MetricsRecord&, const ActorCriticNet&)>;

// Policy-gradient actor-critic over the environment's reward stream. The
// agent sees observations, rewards and terminal flags only; every label read
// happens inside env and is ledgered there.
TrainResult train_rl(const TrainConfig& cfg, ClassifyEnv& env, const LabeledSet& train,
                     const LabeledSet* test, const EpochObserver& observer = {});

// Per-sample cross-entropy SGD on the same architecture. Consumes labels
// directly; the returned ledger counts one agent-side read per training
// visit. Stops at 0% frozen training error or max_epochs.
TrainResult train_supervised(const TrainConfig& cfg, const LabeledSet& train,
                             const LabeledSet* test, const EpochObserver& observer = {});

// Frozen argmax error rate over a labeled set (no sampling).
double evaluate(const ActorCriticNet& net, const LabeledSet& data,
                TaskMode task = TaskMode::Digits);

// Tabular TD(0) oracle pieces.
struct TabularTdConfig {
    double gamma = 0.9;
    // Per-state step size alpha_n(s) = alpha_c / (alpha_c + visits(s)). Small
    // alpha_c keeps the late-stage noise near the 1/n averaging floor.
    double alpha_c = 2.0;
    std::uint64_t max_steps = 2'000'000;
    // Teleport to a uniform non-terminal state this often (and on terminal
    // arrival) so every state keeps getting visits.
    std::uint64_t restart_period = 32;
};

// V(s) += alpha * [reward + gamma * V(s') - V(s)]; terminal s' contributes 0.
void tabular_td_update(Vector& values, int s, int s_next, double reward, bool terminal,
                       double alpha, double gamma);

// Runs sampled TD(0) under the MDP's policy with decaying per-state steps.
Vector tabular_td_evaluate(const FiniteMdp& mdp, const TabularTdConfig& cfg, Rng& rng);

} // namespace rp
