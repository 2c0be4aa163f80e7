#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rp/dataset.hpp"
#include "rp/ndmath.hpp"

namespace rp {

// Reward constants and episode rule. An episode ends with r_terminal after
// n_consecutive correct predictions in a row. Errors pay r_error and reset
// the streak; whether they also end the episode is a switch.
struct RewardSchedule {
    double r_correct = 1.0;
    double r_terminal = 10.0;
    double r_error = -5.0;
    int n_consecutive = 5;
    bool error_terminates = false; // alternative episode rule
    bool terminal_stacks = false;  // terminal step pays r_correct + r_terminal
};

enum class TaskMode { Digits, Parity };

// Parity-mode action alphabet: Pass on even digits, Pick on odd ones.
inline constexpr int kActionPass = 0;
inline constexpr int kActionPick = 1;

// Counts who consulted ground-truth labels. The environment reads one label
// per step to assign the reward; the agent-facing surface carries no labels
// at all, so agent_label_reads can only be driven by the supervised loop.
struct LabelLedger {
    std::uint64_t env_label_reads = 0;
    std::uint64_t agent_label_reads = 0;
};

struct StepOutcome {
    double reward = 0.0;
    bool terminal = false;
    // Next observation, or nullptr on a terminal step. Points into the
    // environment's dataset and stays valid until the next reset/step.
    const Vector* next_state = nullptr;
};

// Classification-as-RL environment. Presents images from the per-epoch
// permuted training stream and rewards actions against its private labels.
//
// Stream semantics: the cursor walks the permutation and presents each index
// exactly once per epoch; presentation happens in reset() and as the
// next_state of a non-terminal step(). Terminal steps present nothing, so a
// partial episode's stream position carries into the following reset. When
// the permutation is exhausted the epoch counter ticks and a fresh
// permutation starts; a dangling episode simply continues across the
// boundary.
class ClassifyEnv {
public:
    ClassifyEnv(const LabeledSet& data, RewardSchedule schedule, TaskMode mode, const Rng& run_rng);

    // Starts (or restarts) an episode: zeroes the success streak and presents
    // the next observation from the stream.
    const Vector& reset();

    // Acts on the currently presented observation. Exactly one private label
    // read per call. Throws std::logic_error if called after a terminal step
    // without an intervening reset().
    StepOutcome step(int action);

    int action_count() const { return mode_ == TaskMode::Parity ? 2 : 10; }
    TaskMode mode() const { return mode_; }

    const LabelLedger& ledger() const { return ledger_; }

    // Epoch index of the observation currently awaiting an action.
    std::uint64_t epoch() const { return current_epoch_; }
    std::uint64_t steps_taken() const { return steps_; }
    std::size_t stream_size() const { return data_->count(); }

private:
    const Vector& present_next();
    bool action_correct(int action, int label) const;

    const LabeledSet* data_;
    RewardSchedule schedule_;
    TaskMode mode_;
    Rng run_rng_;

    EpochOrder order_;
    std::size_t cursor_ = 0;          // next unpresented slot in order_
    std::uint64_t stream_epoch_ = 0;  // epoch the cursor is in
    std::uint64_t current_epoch_ = 0; // epoch of the presented observation
    std::size_t current_index_ = 0;   // dataset index of the presented observation

    int streak_ = 0;
    bool has_observation_ = false;
    std::uint64_t steps_ = 0;
    LabelLedger ledger_;
};

// Discounted return of a reward sequence: sum_i gamma^i * rewards[i],
// evaluated with the recursion G_t = R_{t+1} + gamma * G_{t+1}.
double monte_carlo_return(const std::vector<double>& rewards, double gamma);

// Explicit small MDP used as a verification oracle for the TD machinery.
struct MdpArc {
    double prob = 0.0;
    int next_state = 0;
    double reward = 0.0;
};

struct FiniteMdp {
    int num_states = 0;
    int num_actions = 0;
    double gamma = 0.0;
    // kernel[s][a] lists (prob, next_state, reward); probs sum to 1 per (s,a).
    std::vector<std::vector<std::vector<MdpArc>>> kernel;
    Matrix policy;                      // num_states x num_actions, rows sum to 1
    std::vector<std::uint8_t> terminal; // terminal states are forced absorbing

    // Probability checks; throws std::invalid_argument on violation.
    void validate() const;

    static FiniteMdp from_json_file(const std::string& path);
    static FiniteMdp from_json_text(const std::string& text);
};

// Exact state values of the policy: solves V = r_pi + gamma * P_pi * V by a
// direct linear solve. Terminal states get V = 0.
Vector bellman_solve(const FiniteMdp& mdp);

// Max-norm residual of the Bellman equation at v.
double bellman_residual(const FiniteMdp& mdp, const Vector& v);

// Samples one episode under the MDP's policy: rewards in visit order,
// stopping at a terminal state or after max_steps.
std::vector<double> sample_episode(const FiniteMdp& mdp, int start_state, Rng& rng,
                                   std::size_t max_steps);

} // namespace rp
