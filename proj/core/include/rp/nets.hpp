#pragma once

#include <cstdint>
#include <utility>

#include "rp/ndmath.hpp"

namespace rp {

struct NetConfig {
    std::size_t input_dim = 784;
    std::size_t trunk_dim = 300;
    double leaky_slope = 0.01;
    // The value output passes through Leaky ReLU like the hidden layer; set
    // true for a plain linear value output instead.
    bool linear_value_output = false;
};

// Two-headed net: one shared trunk, a softmax policy head (10 actions, or 2
// in parity mode) and a scalar value head.
struct ActorCriticNet {
    NetConfig cfg;
    std::size_t num_actions = 10;

    Matrix w_trunk;  // trunk_dim x input_dim
    Vector b_trunk;  // trunk_dim
    Matrix w_policy; // num_actions x trunk_dim
    Vector b_policy; // num_actions
    Vector w_value;  // trunk_dim
    double b_value = 0.0;

    std::uint64_t init_seed = 0;
};

// Weights uniform in [-sqrt(6/fan_in), +sqrt(6/fan_in)) per block, biases
// zero. Parity mode nets pass num_actions = 2.
ActorCriticNet init_net(std::uint64_t seed, std::size_t num_actions, NetConfig cfg = {});

// Everything the backward passes need, including a copy of the input.
struct ForwardTrace {
    Vector input;
    Vector trunk_pre;
    Vector representation;
    Vector logits;
    Vector probs;
    double value_pre = 0.0;
    double value = 0.0;
};

void forward_into(const ActorCriticNet& net, const Vector& state, ForwardTrace& trace);
ForwardTrace forward(const ActorCriticNet& net, const Vector& state);

// Trunk + value head only; used for the V(S_{t+1}) bootstrap where the policy
// head is not needed.
double value_forward(const ActorCriticNet& net, const Vector& state);

// Gradient blocks shaped exactly like the parameter blocks.
struct GradientSet {
    Matrix w_trunk;
    Vector b_trunk;
    Matrix w_policy;
    Vector b_policy;
    Vector w_value;
    double b_value = 0.0;
};

GradientSet make_gradient_set(const ActorCriticNet& net);

// dV/dtheta for the value head and shared trunk; policy blocks are zero.
// The semi-gradient convention is structural: this only ever sees the trace
// at S_t, so no path through V(S_{t+1}) exists.
void grad_value_into(const ActorCriticNet& net, const ForwardTrace& trace, GradientSet& out);
GradientSet grad_value(const ActorCriticNet& net, const ForwardTrace& trace);

// d log pi(action|s) / dtheta for the policy head and shared trunk; value
// blocks are zero. At the logit level this is onehot(action) - probs.
void grad_log_policy_into(const ActorCriticNet& net, const ForwardTrace& trace, int action,
                          GradientSet& out);
GradientSet grad_log_policy(const ActorCriticNet& net, const ForwardTrace& trace, int action);

// theta += scale * gradient for every block (ascent form; the caller folds
// the learning rate and TD error sign into scale). Throws DivergenceError on
// non-finite scale, gradients, or resulting parameters.
void apply_update(ActorCriticNet& net, const GradientSet& grads, double scale);

// Softmax cross-entropy -log pi(label|s) and its gradient over policy head +
// trunk (descent semantics; value blocks zero). Returns the loss.
double supervised_forward_backward_into(const ActorCriticNet& net, const Vector& state, int label,
                                        ForwardTrace& trace, GradientSet& out);
std::pair<double, GradientSet> supervised_forward_backward(const ActorCriticNet& net,
                                                           const Vector& state, int label);

// The 300-dim trunk output for a state; pure read.
Vector extract_representation(const ActorCriticNet& net, const Vector& state);

} // namespace rp
