#include "rp/trainer.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rp/errors.hpp"

namespace rp {

void TrainConfig::validate() const {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must be in [0,1)");
    if (!(eta_pi >= 0.0) || !(eta_v >= 0.0)) throw ConfigError("learning steps must be >= 0");
    if (!(target_train_error >= 0.0 && target_train_error < 1.0)) {
        throw ConfigError("target_train_error must be in [0,1)");
    }
    if (max_epochs == 0) throw ConfigError("max_epochs must be > 0");
    if (schedule.n_consecutive < 1) throw ConfigError("n_consecutive must be >= 1");
    if (!(net.leaky_slope > 0.0 && net.leaky_slope < 1.0)) {
        throw ConfigError("leaky_slope must be in (0,1)");
    }
    if (net.input_dim == 0 || net.trunk_dim == 0) throw ConfigError("net dimensions must be > 0");
}

double td_error(double reward, double v_next, double v_current, double gamma, bool terminal) {
    return reward + (terminal ? 0.0 : gamma * v_next) - v_current;
}

namespace {

// Shared fused step: ascends s_pi * log pi(action|s) and s_v * V(s) in one
// pass, with a single rank-1 trunk update carrying both contributions. The
// trunk direction is evaluated at the pre-update head weights, matching the
// composable grad_* / apply_update route.
void fused_actor_critic_update(ActorCriticNet& net, const ForwardTrace& trace, int action,
                               double s_pi, double s_v, Vector& scratch_pre) {
    const std::size_t tdim = net.cfg.trunk_dim;
    const std::size_t acts = net.num_actions;
    if (acts > 16) throw std::invalid_argument("fused update supports at most 16 actions");

    // Logit-level policy gradient, scaled: s_pi * (onehot(action) - probs).
    // Stack-local; action counts are 10 or 2.
    double d_logits[16];
    for (std::size_t a = 0; a < acts; ++a) d_logits[a] = -s_pi * trace.probs[a];
    d_logits[action] += s_pi;

    const double gv = net.cfg.linear_value_output
                          ? s_v
                          : s_v * leaky_relu_grad_scalar(trace.value_pre, net.cfg.leaky_slope);

    // Combined trunk pre-activation direction, before the heads move.
    scratch_pre.resize(tdim);
    for (std::size_t i = 0; i < tdim; ++i) {
        double acc = gv * net.w_value[i];
        for (std::size_t a = 0; a < acts; ++a) acc += d_logits[a] * net.w_policy(a, i);
        scratch_pre[i] = acc * leaky_relu_grad_scalar(trace.trunk_pre[i], net.cfg.leaky_slope);
    }

    // Heads.
    for (std::size_t a = 0; a < acts; ++a) {
        const double ga = d_logits[a];
        if (ga == 0.0) continue;
        double* row = net.w_policy.row(a);
        const double* r = trace.representation.data();
        for (std::size_t i = 0; i < tdim; ++i) row[i] += ga * r[i];
        net.b_policy[a] += ga;
    }
    if (gv != 0.0) {
        const double* r = trace.representation.data();
        for (std::size_t i = 0; i < tdim; ++i) net.w_value[i] += gv * r[i];
        net.b_value += gv;
    }

    // Trunk rank-1 update from the combined direction.
    const double* x = trace.input.data();
    const std::size_t xdim = net.cfg.input_dim;
    for (std::size_t i = 0; i < tdim; ++i) {
        const double ci = scratch_pre[i];
        if (ci == 0.0) continue;
        double* row = net.w_trunk.row(i);
        for (std::size_t j = 0; j < xdim; ++j) row[j] += ci * x[j];
        net.b_trunk[i] += ci;
    }
}

void check_params_finite(const ActorCriticNet& net, const std::string& context) {
    if (!all_finite(net.w_trunk) || !all_finite(net.b_trunk) || !all_finite(net.w_policy) ||
        !all_finite(net.b_policy) || !all_finite(net.w_value) || !std::isfinite(net.b_value)) {
        throw DivergenceError("non-finite parameters " + context);
    }
}

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int argmax_action(const Vector& logits) {
    int best = 0;
    for (std::size_t a = 1; a < logits.size(); ++a) {
        if (logits[a] > logits[best]) best = int(a);
    }
    return best;
}

int proper_action_for(TaskMode task, int label) {
    return task == TaskMode::Parity ? (parity_label(label) == Parity::Odd ? kActionPick : kActionPass)
                                    : label;
}

} // namespace

void actor_critic_step(ActorCriticNet& net, const TdTransition& t, const TrainConfig& cfg) {
    const double delta =
        td_error(t.reward, t.v_next, t.trace->value, cfg.gamma, t.terminal);
    if (!std::isfinite(delta)) {
        throw DivergenceError("non-finite TD error (reward " + std::to_string(t.reward) +
                              ", v " + std::to_string(t.trace->value) + ")");
    }
    Vector scratch;
    fused_actor_critic_update(net, *t.trace, t.action, cfg.eta_pi * delta, cfg.eta_v * delta,
                              scratch);
}

double evaluate(const ActorCriticNet& net, const LabeledSet& data, TaskMode task) {
    // Argmax over logits equals argmax over softmax probabilities.
    Vector pre, logits;
    std::size_t wrong = 0;
    for (std::size_t k = 0; k < data.count(); ++k) {
        affine_forward_into(data.images[k], net.w_trunk, net.b_trunk, pre);
        for (auto& v : pre) v = leaky_relu_scalar(v, net.cfg.leaky_slope);
        affine_forward_into(pre, net.w_policy, net.b_policy, logits);
        if (argmax_action(logits) != proper_action_for(task, data.labels[k])) ++wrong;
    }
    return double(wrong) / double(data.count());
}

TrainResult train_rl(const TrainConfig& cfg, ClassifyEnv& env, const LabeledSet& train,
                     const LabeledSet* test, const EpochObserver& observer) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    TrainResult res;
    res.net = init_net(cfg.seed, std::size_t(env.action_count()), cfg.net);
    Rng action_rng = Rng(cfg.seed).child(2); // stream 2: action sampling

    ForwardTrace trace;
    Vector scratch;
    const Vector* obs = &env.reset();
    forward_into(res.net, *obs, trace);

    std::uint64_t epoch = env.epoch();
    std::uint64_t epoch_steps = 0, epoch_errors = 0;
    std::uint64_t episodes_done = 0;
    double episodes_return_sum = 0.0;
    double episode_return = 0.0;

    for (;;) {
        if (!std::isfinite(trace.value) || !all_finite(trace.logits)) {
            throw DivergenceError("non-finite value or logits at epoch " + std::to_string(epoch) +
                                  ", step " + std::to_string(env.steps_taken()));
        }
        const int action = int(sample_categorical(trace.probs, action_rng));
        const StepOutcome out = env.step(action);

        ++epoch_steps;
        if (out.reward == cfg.schedule.r_error) ++epoch_errors;
        episode_return += out.reward;

        const double v_next = out.terminal ? 0.0 : value_forward(res.net, *out.next_state);
        const double delta = td_error(out.reward, v_next, trace.value, cfg.gamma, out.terminal);
        if (!std::isfinite(delta)) {
            throw DivergenceError("non-finite TD error at epoch " + std::to_string(epoch) +
                                  ", step " + std::to_string(env.steps_taken()));
        }
        fused_actor_critic_update(res.net, trace, action, cfg.eta_pi * delta, cfg.eta_v * delta,
                                  scratch);

        if (out.terminal) {
            ++episodes_done;
            episodes_return_sum += episode_return;
            episode_return = 0.0;
            obs = &env.reset();
        } else {
            obs = out.next_state;
        }

        if (env.epoch() != epoch) {
            // The epoch the just-acted-on stream belonged to is complete.
            check_params_finite(res.net, "after epoch " + std::to_string(epoch));
            MetricsRecord rec;
            rec.epoch = epoch + 1; // 1-based in logs
            rec.train_error_online = double(epoch_errors) / double(epoch_steps);
            rec.pr_proper_action = 1.0 - rec.train_error_online;
            rec.train_error_frozen = evaluate(res.net, train, env.mode());
            rec.mean_return = episodes_done ? episodes_return_sum / double(episodes_done) : 0.0;
            rec.steps = env.steps_taken();
            rec.seconds = elapsed_seconds(t0);
            res.epochs_completed = rec.epoch;

            const double stop_value = cfg.stop_metric == StopMetric::Online
                                          ? rec.train_error_online
                                          : rec.train_error_frozen;
            const bool hit_target = stop_value <= cfg.target_train_error;
            const bool last = hit_target || rec.epoch >= cfg.max_epochs;
            if (test && (last || (cfg.test_eval_period > 0 && rec.epoch % cfg.test_eval_period == 0))) {
                rec.test_error = evaluate(res.net, *test, env.mode());
            }
            res.history.push_back(rec);
            if (observer) observer(rec, res.net);
            if (last) {
                res.reached_target = hit_target;
                res.final_test_error = rec.test_error;
                break;
            }
            epoch = env.epoch();
            epoch_steps = epoch_errors = 0;
            episodes_done = 0;
            episodes_return_sum = 0.0;
        }

        forward_into(res.net, *obs, trace);
    }

    res.ledger = env.ledger();
    return res;
}

TrainResult train_supervised(const TrainConfig& cfg, const LabeledSet& train,
                             const LabeledSet* test, const EpochObserver& observer) {
    cfg.validate();
    if (train.count() == 0) throw std::invalid_argument("train_supervised: empty dataset");
    const auto t0 = std::chrono::steady_clock::now();

    TrainResult res;
    res.net = init_net(cfg.seed, 10, cfg.net);
    const Rng run_rng(cfg.seed);

    ForwardTrace trace;
    Vector scratch;
    std::uint64_t cumulative_steps = 0;

    for (std::uint64_t e = 0; e < cfg.max_epochs; ++e) {
        const EpochOrder order = epoch_order(train.count(), e, run_rng);
        std::uint64_t wrong_online = 0;
        for (const std::uint32_t idx : order.order) {
            const Vector& x = train.images[idx];
            const int label = train.labels[idx];
            ++res.ledger.agent_label_reads; // the supervised learner consumes the label

            forward_into(res.net, x, trace);
            if (!std::isfinite(trace.value) || !std::isfinite(trace.logits[0])) {
                throw DivergenceError("non-finite activations at epoch " + std::to_string(e + 1));
            }
            if (argmax_action(trace.logits) != label) ++wrong_online;
            // Cross-entropy descent == log-likelihood ascent on the label.
            fused_actor_critic_update(res.net, trace, label, cfg.eta_pi, 0.0, scratch);
            ++cumulative_steps;
        }
        check_params_finite(res.net, "after epoch " + std::to_string(e + 1));

        MetricsRecord rec;
        rec.epoch = e + 1;
        rec.train_error_online = double(wrong_online) / double(train.count());
        rec.pr_proper_action = 1.0 - rec.train_error_online;
        rec.train_error_frozen = evaluate(res.net, train, TaskMode::Digits);
        rec.mean_return = 0.0; // no episodes in the supervised loop
        rec.steps = cumulative_steps;
        rec.seconds = elapsed_seconds(t0);
        res.epochs_completed = rec.epoch;

        const bool hit_target = rec.train_error_frozen == 0.0;
        const bool last = hit_target || rec.epoch >= cfg.max_epochs;
        if (test && (last || (cfg.test_eval_period > 0 && rec.epoch % cfg.test_eval_period == 0))) {
            rec.test_error = evaluate(res.net, *test, TaskMode::Digits);
        }
        res.history.push_back(rec);
        if (observer) observer(rec, res.net);
        if (last) {
            res.reached_target = hit_target;
            res.final_test_error = rec.test_error;
            break;
        }
    }
    return res;
}

void tabular_td_update(Vector& values, int s, int s_next, double reward, bool terminal,
                       double alpha, double gamma) {
    const double bootstrap = terminal ? 0.0 : values[s_next];
    values[s] += alpha * (reward + gamma * bootstrap - values[s]);
}

Vector tabular_td_evaluate(const FiniteMdp& mdp, const TabularTdConfig& cfg, Rng& rng) {
    mdp.validate();
    const int n = mdp.num_states;
    Vector values(n, 0.0);
    std::vector<std::uint64_t> visits(n, 0);

    std::vector<int> nonterminal;
    for (int s = 0; s < n; ++s)
        if (!mdp.terminal[s]) nonterminal.push_back(s);
    if (nonterminal.empty()) return values;

    auto teleport = [&]() {
        return nonterminal[rng.uniform_below(nonterminal.size())];
    };

    int s = teleport();
    for (std::uint64_t t = 0; t < cfg.max_steps; ++t) {
        // Draw a ~ pi(.|s), then (s', r) from the kernel.
        double u = rng.uniform();
        int a = mdp.num_actions - 1;
        double cum = 0.0;
        for (int k = 0; k < mdp.num_actions; ++k) {
            cum += mdp.policy(s, k);
            if (u < cum) {
                a = k;
                break;
            }
        }
        u = rng.uniform();
        cum = 0.0;
        const auto& arcs = mdp.kernel[s][a];
        const MdpArc* arc = &arcs.back();
        for (const auto& c : arcs) {
            cum += c.prob;
            if (u < cum) {
                arc = &c;
                break;
            }
        }

        const double alpha = cfg.alpha_c / (cfg.alpha_c + double(visits[s]));
        ++visits[s];
        const bool next_terminal = mdp.terminal[arc->next_state] != 0;
        tabular_td_update(values, s, arc->next_state, arc->reward, next_terminal, alpha, cfg.gamma);

        if (next_terminal || (cfg.restart_period > 0 && (t + 1) % cfg.restart_period == 0)) {
            s = teleport();
        } else {
            s = arc->next_state;
        }
    }
    return values;
}

} // namespace rp
