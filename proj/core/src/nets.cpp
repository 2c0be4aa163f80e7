#include "rp/nets.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rp/errors.hpp"

namespace rp {

namespace {

void fill_uniform(Matrix& m, double bound, Rng& rng) {
    for (auto& w : m.data) w = rng.uniform(-bound, bound);
}

// d_trunk_pre -> trunk blocks: w_trunk = outer(d_trunk_pre, x), b_trunk = d_trunk_pre.
void trunk_blocks_into(const Vector& d_trunk_pre, const Vector& x, GradientSet& out) {
    for (std::size_t i = 0; i < d_trunk_pre.size(); ++i) {
        const double gi = d_trunk_pre[i];
        double* row = out.w_trunk.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) row[j] = gi * x[j];
    }
    out.b_trunk = d_trunk_pre;
}

} // namespace

ActorCriticNet init_net(std::uint64_t seed, std::size_t num_actions, NetConfig cfg) {
    if (num_actions < 2) throw std::invalid_argument("init_net: need at least 2 actions");
    if (!(cfg.leaky_slope > 0.0 && cfg.leaky_slope < 1.0)) {
        throw std::invalid_argument("init_net: leaky_slope must be in (0,1)");
    }
    ActorCriticNet net;
    net.cfg = cfg;
    net.num_actions = num_actions;
    net.init_seed = seed;
    net.w_trunk = Matrix(cfg.trunk_dim, cfg.input_dim);
    net.b_trunk.assign(cfg.trunk_dim, 0.0);
    net.w_policy = Matrix(num_actions, cfg.trunk_dim);
    net.b_policy.assign(num_actions, 0.0);
    net.w_value.assign(cfg.trunk_dim, 0.0);
    net.b_value = 0.0;

    Rng rng = Rng(seed).child(1); // stream 1: parameter init
    fill_uniform(net.w_trunk, std::sqrt(6.0 / double(cfg.input_dim)), rng);
    fill_uniform(net.w_policy, std::sqrt(6.0 / double(cfg.trunk_dim)), rng);
    const double vb = std::sqrt(6.0 / double(cfg.trunk_dim));
    for (auto& w : net.w_value) w = rng.uniform(-vb, vb);
    return net;
}

void forward_into(const ActorCriticNet& net, const Vector& state, ForwardTrace& trace) {
    if (state.size() != net.cfg.input_dim) {
        throw std::invalid_argument("forward: state dim " + std::to_string(state.size()) +
                                    " != input dim " + std::to_string(net.cfg.input_dim));
    }
    trace.input = state;
    affine_forward_into(state, net.w_trunk, net.b_trunk, trace.trunk_pre);
    trace.representation.resize(net.cfg.trunk_dim);
    for (std::size_t i = 0; i < trace.trunk_pre.size(); ++i) {
        trace.representation[i] = leaky_relu_scalar(trace.trunk_pre[i], net.cfg.leaky_slope);
    }
    affine_forward_into(trace.representation, net.w_policy, net.b_policy, trace.logits);
    softmax_into(trace.logits, trace.probs);
    trace.value_pre = dot(net.w_value.data(), trace.representation.data(), net.cfg.trunk_dim) +
                      net.b_value;
    trace.value = net.cfg.linear_value_output
                      ? trace.value_pre
                      : leaky_relu_scalar(trace.value_pre, net.cfg.leaky_slope);
}

ForwardTrace forward(const ActorCriticNet& net, const Vector& state) {
    ForwardTrace trace;
    forward_into(net, state, trace);
    return trace;
}

double value_forward(const ActorCriticNet& net, const Vector& state) {
    if (state.size() != net.cfg.input_dim) {
        throw std::invalid_argument("value_forward: state dim mismatch");
    }
    double pre = net.b_value;
    // One fused pass: representation entries feed the value dot product
    // without materializing the policy head.
    for (std::size_t i = 0; i < net.cfg.trunk_dim; ++i) {
        const double t = dot(net.w_trunk.row(i), state.data(), net.cfg.input_dim) + net.b_trunk[i];
        pre += net.w_value[i] * leaky_relu_scalar(t, net.cfg.leaky_slope);
    }
    return net.cfg.linear_value_output ? pre : leaky_relu_scalar(pre, net.cfg.leaky_slope);
}

GradientSet make_gradient_set(const ActorCriticNet& net) {
    GradientSet g;
    g.w_trunk = Matrix(net.cfg.trunk_dim, net.cfg.input_dim);
    g.b_trunk.assign(net.cfg.trunk_dim, 0.0);
    g.w_policy = Matrix(net.num_actions, net.cfg.trunk_dim);
    g.b_policy.assign(net.num_actions, 0.0);
    g.w_value.assign(net.cfg.trunk_dim, 0.0);
    g.b_value = 0.0;
    return g;
}

void grad_value_into(const ActorCriticNet& net, const ForwardTrace& trace, GradientSet& out) {
    const double gv = net.cfg.linear_value_output
                          ? 1.0
                          : leaky_relu_grad_scalar(trace.value_pre, net.cfg.leaky_slope);
    for (std::size_t i = 0; i < net.cfg.trunk_dim; ++i) out.w_value[i] = gv * trace.representation[i];
    out.b_value = gv;

    Vector d_trunk_pre(net.cfg.trunk_dim);
    for (std::size_t i = 0; i < net.cfg.trunk_dim; ++i) {
        d_trunk_pre[i] = gv * net.w_value[i] *
                         leaky_relu_grad_scalar(trace.trunk_pre[i], net.cfg.leaky_slope);
    }
    trunk_blocks_into(d_trunk_pre, trace.input, out);

    out.w_policy.data.assign(out.w_policy.data.size(), 0.0);
    out.b_policy.assign(out.b_policy.size(), 0.0);
}

GradientSet grad_value(const ActorCriticNet& net, const ForwardTrace& trace) {
    GradientSet g = make_gradient_set(net);
    grad_value_into(net, trace, g);
    return g;
}

void grad_log_policy_into(const ActorCriticNet& net, const ForwardTrace& trace, int action,
                          GradientSet& out) {
    if (action < 0 || std::size_t(action) >= net.num_actions) {
        throw std::invalid_argument("grad_log_policy: action out of range");
    }
    // d log pi / d logits = onehot(action) - probs
    Vector d_logits(net.num_actions);
    for (std::size_t a = 0; a < net.num_actions; ++a) d_logits[a] = -trace.probs[a];
    d_logits[action] += 1.0;

    for (std::size_t a = 0; a < net.num_actions; ++a) {
        const double ga = d_logits[a];
        double* row = out.w_policy.row(a);
        for (std::size_t i = 0; i < net.cfg.trunk_dim; ++i) row[i] = ga * trace.representation[i];
    }
    out.b_policy = d_logits;

    Vector d_repr(net.cfg.trunk_dim, 0.0);
    for (std::size_t a = 0; a < net.num_actions; ++a) {
        const double ga = d_logits[a];
        const double* row = net.w_policy.row(a);
        for (std::size_t i = 0; i < net.cfg.trunk_dim; ++i) d_repr[i] += ga * row[i];
    }
    Vector d_trunk_pre(net.cfg.trunk_dim);
    for (std::size_t i = 0; i < net.cfg.trunk_dim; ++i) {
        d_trunk_pre[i] = d_repr[i] * leaky_relu_grad_scalar(trace.trunk_pre[i], net.cfg.leaky_slope);
    }
    trunk_blocks_into(d_trunk_pre, trace.input, out);

    out.w_value.assign(out.w_value.size(), 0.0);
    out.b_value = 0.0;
}

GradientSet grad_log_policy(const ActorCriticNet& net, const ForwardTrace& trace, int action) {
    GradientSet g = make_gradient_set(net);
    grad_log_policy_into(net, trace, action, g);
    return g;
}

void apply_update(ActorCriticNet& net, const GradientSet& grads, double scale) {
    if (!std::isfinite(scale)) {
        throw DivergenceError("apply_update: non-finite scale " + std::to_string(scale));
    }
    if (!all_finite(grads.w_trunk) || !all_finite(grads.b_trunk) || !all_finite(grads.w_policy) ||
        !all_finite(grads.b_policy) || !all_finite(grads.w_value) || !std::isfinite(grads.b_value)) {
        throw DivergenceError("apply_update: non-finite gradient block");
    }
    for (std::size_t k = 0; k < net.w_trunk.data.size(); ++k) {
        net.w_trunk.data[k] += scale * grads.w_trunk.data[k];
    }
    for (std::size_t k = 0; k < net.b_trunk.size(); ++k) net.b_trunk[k] += scale * grads.b_trunk[k];
    for (std::size_t k = 0; k < net.w_policy.data.size(); ++k) {
        net.w_policy.data[k] += scale * grads.w_policy.data[k];
    }
    for (std::size_t k = 0; k < net.b_policy.size(); ++k) {
        net.b_policy[k] += scale * grads.b_policy[k];
    }
    for (std::size_t k = 0; k < net.w_value.size(); ++k) net.w_value[k] += scale * grads.w_value[k];
    net.b_value += scale * grads.b_value;

    if (!all_finite(net.w_trunk) || !all_finite(net.w_policy)) {
        throw DivergenceError("apply_update: parameters became non-finite");
    }
}

double supervised_forward_backward_into(const ActorCriticNet& net, const Vector& state, int label,
                                        ForwardTrace& trace, GradientSet& out) {
    if (label < 0 || std::size_t(label) >= net.num_actions) {
        throw std::invalid_argument("supervised_forward_backward: label out of range");
    }
    forward_into(net, state, trace);
    const double loss = -std::log(trace.probs[label]);
    // Descent gradient of the cross-entropy is the negated score at the
    // correct class, so reuse the log-policy backward and flip the sign.
    grad_log_policy_into(net, trace, label, out);
    for (auto& g : out.w_trunk.data) g = -g;
    for (auto& g : out.b_trunk) g = -g;
    for (auto& g : out.w_policy.data) g = -g;
    for (auto& g : out.b_policy) g = -g;
    return loss;
}

std::pair<double, GradientSet> supervised_forward_backward(const ActorCriticNet& net,
                                                           const Vector& state, int label) {
    ForwardTrace trace;
    GradientSet g = make_gradient_set(net);
    const double loss = supervised_forward_backward_into(net, state, label, trace, g);
    return {loss, std::move(g)};
}

Vector extract_representation(const ActorCriticNet& net, const Vector& state) {
    if (state.size() != net.cfg.input_dim) {
        throw std::invalid_argument("extract_representation: state dim mismatch");
    }
    Vector pre;
    affine_forward_into(state, net.w_trunk, net.b_trunk, pre);
    for (auto& v : pre) v = leaky_relu_scalar(v, net.cfg.leaky_slope);
    return pre;
}

} // namespace rp
