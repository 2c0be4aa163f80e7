#include "rp/envsim.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "rp/errors.hpp"

namespace rp {

ClassifyEnv::ClassifyEnv(const LabeledSet& data, RewardSchedule schedule, TaskMode mode,
                         const Rng& run_rng)
    : data_(&data), schedule_(schedule), mode_(mode), run_rng_(run_rng) {
    if (data.count() == 0) throw std::invalid_argument("ClassifyEnv: empty dataset");
    if (schedule.n_consecutive < 1) {
        throw std::invalid_argument("ClassifyEnv: n_consecutive must be >= 1");
    }
    order_ = epoch_order(data.count(), 0, run_rng_);
}

const Vector& ClassifyEnv::present_next() {
    if (cursor_ >= order_.order.size()) {
        ++stream_epoch_;
        order_ = epoch_order(data_->count(), stream_epoch_, run_rng_);
        cursor_ = 0;
    }
    current_index_ = order_.order[cursor_];
    current_epoch_ = stream_epoch_;
    ++cursor_;
    has_observation_ = true;
    return data_->images[current_index_];
}

const Vector& ClassifyEnv::reset() {
    streak_ = 0;
    return present_next();
}

bool ClassifyEnv::action_correct(int action, int label) const {
    if (mode_ == TaskMode::Parity) {
        return (action == kActionPick) == (parity_label(label) == Parity::Odd);
    }
    return action == label;
}

StepOutcome ClassifyEnv::step(int action) {
    if (!has_observation_) {
        throw std::logic_error("ClassifyEnv::step called after a terminal step without reset");
    }
    if (action < 0 || action >= action_count()) {
        throw std::invalid_argument("ClassifyEnv::step: action " + std::to_string(action) +
                                    " outside alphabet of size " + std::to_string(action_count()));
    }

    // The one and only private label read for this step.
    const int label = data_->labels[current_index_];
    ++ledger_.env_label_reads;
    ++steps_;

    StepOutcome out;
    if (action_correct(action, label)) {
        ++streak_;
        if (streak_ >= schedule_.n_consecutive) {
            out.reward = schedule_.terminal_stacks ? schedule_.r_correct + schedule_.r_terminal
                                                   : schedule_.r_terminal;
            out.terminal = true;
        } else {
            out.reward = schedule_.r_correct;
        }
    } else {
        streak_ = 0;
        out.reward = schedule_.r_error;
        out.terminal = schedule_.error_terminates;
    }

    if (out.terminal) {
        has_observation_ = false;
        out.next_state = nullptr;
    } else {
        out.next_state = &present_next();
    }
    return out;
}

double monte_carlo_return(const std::vector<double>& rewards, double gamma) {
    double g = 0.0;
    for (std::size_t i = rewards.size(); i-- > 0;) g = rewards[i] + gamma * g;
    return g;
}

void FiniteMdp::validate() const {
    if (num_states <= 0 || num_actions <= 0) {
        throw std::invalid_argument("FiniteMdp: need at least one state and action");
    }
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("FiniteMdp: gamma must be in [0,1)");
    }
    if (policy.rows != std::size_t(num_states) || policy.cols != std::size_t(num_actions)) {
        throw std::invalid_argument("FiniteMdp: policy shape mismatch");
    }
    if (kernel.size() != std::size_t(num_states)) {
        throw std::invalid_argument("FiniteMdp: kernel state count mismatch");
    }
    for (int s = 0; s < num_states; ++s) {
        double prow = 0.0;
        for (int a = 0; a < num_actions; ++a) prow += policy(s, a);
        if (std::abs(prow - 1.0) > 1e-12) {
            throw std::invalid_argument("FiniteMdp: policy row " + std::to_string(s) +
                                        " sums to " + std::to_string(prow));
        }
        if (kernel[s].size() != std::size_t(num_actions)) {
            throw std::invalid_argument("FiniteMdp: kernel action count mismatch at state " +
                                        std::to_string(s));
        }
        if (terminal.size() == std::size_t(num_states) && terminal[s]) continue;
        for (int a = 0; a < num_actions; ++a) {
            double psum = 0.0;
            for (const auto& arc : kernel[s][a]) {
                if (arc.next_state < 0 || arc.next_state >= num_states) {
                    throw std::invalid_argument("FiniteMdp: arc target out of range");
                }
                psum += arc.prob;
            }
            if (std::abs(psum - 1.0) > 1e-12) {
                throw std::invalid_argument("FiniteMdp: kernel probs at (s=" + std::to_string(s) +
                                            ",a=" + std::to_string(a) + ") sum to " +
                                            std::to_string(psum));
            }
        }
    }
}

FiniteMdp FiniteMdp::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("MDP JSON parse error: ") + e.what());
    }
    FiniteMdp mdp;
    try {
        mdp.num_states = j.at("states").get<int>();
        mdp.num_actions = j.at("actions").get<int>();
        mdp.gamma = j.at("gamma").get<double>();
        mdp.terminal.assign(mdp.num_states, 0);
        if (j.contains("terminal")) {
            for (int s : j["terminal"].get<std::vector<int>>()) mdp.terminal.at(s) = 1;
        }
        mdp.policy = Matrix(mdp.num_states, mdp.num_actions);
        const auto& pol = j.at("policy");
        for (int s = 0; s < mdp.num_states; ++s)
            for (int a = 0; a < mdp.num_actions; ++a)
                mdp.policy(s, a) = pol.at(s).at(a).get<double>();
        mdp.kernel.assign(mdp.num_states, {});
        for (auto& row : mdp.kernel) row.resize(mdp.num_actions);
        for (const auto& t : j.at("transitions")) {
            const int s = t.at("s").get<int>();
            const int a = t.at("a").get<int>();
            for (const auto& arc : t.at("to")) {
                mdp.kernel.at(s).at(a).push_back(MdpArc{arc.at("p").get<double>(),
                                                        arc.at("s2").get<int>(),
                                                        arc.at("r").get<double>()});
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("MDP JSON field error: ") + e.what());
    }
    mdp.validate();
    return mdp;
}

FiniteMdp FiniteMdp::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open MDP fixture '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

Vector bellman_solve(const FiniteMdp& mdp) {
    mdp.validate();
    const int n = mdp.num_states;
    // Assemble (I - gamma * P_pi) V = r_pi with terminal states absorbing at 0.
    Matrix a(n, n);
    Vector r(n, 0.0);
    for (int s = 0; s < n; ++s) {
        a(s, s) = 1.0;
        if (mdp.terminal[s]) continue;
        for (int act = 0; act < mdp.num_actions; ++act) {
            const double pa = mdp.policy(s, act);
            if (pa == 0.0) continue;
            for (const auto& arc : mdp.kernel[s][act]) {
                r[s] += pa * arc.prob * arc.reward;
                a(s, arc.next_state) -= mdp.gamma * pa * arc.prob;
            }
        }
    }
    Vector v = solve_linear(std::move(a), std::move(r));
    const double resid = bellman_residual(mdp, v);
    if (resid > 1e-10) {
        throw std::runtime_error("bellman_solve: residual " + std::to_string(resid));
    }
    return v;
}

double bellman_residual(const FiniteMdp& mdp, const Vector& v) {
    double worst = 0.0;
    for (int s = 0; s < mdp.num_states; ++s) {
        double rhs = 0.0;
        if (!mdp.terminal[s]) {
            for (int a = 0; a < mdp.num_actions; ++a) {
                const double pa = mdp.policy(s, a);
                if (pa == 0.0) continue;
                for (const auto& arc : mdp.kernel[s][a]) {
                    const double vnext = mdp.terminal[arc.next_state] ? 0.0 : v[arc.next_state];
                    rhs += pa * arc.prob * (arc.reward + mdp.gamma * vnext);
                }
            }
        }
        worst = std::max(worst, std::abs(v[s] - rhs));
    }
    return worst;
}

std::vector<double> sample_episode(const FiniteMdp& mdp, int start_state, Rng& rng,
                                   std::size_t max_steps) {
    std::vector<double> rewards;
    int s = start_state;
    for (std::size_t t = 0; t < max_steps; ++t) {
        if (mdp.terminal[s]) break;
        // Draw an action from the policy row, then an arc from the kernel.
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
        const MdpArc* chosen = &arcs.back();
        for (const auto& arc : arcs) {
            cum += arc.prob;
            if (u < cum) {
                chosen = &arc;
                break;
            }
        }
        rewards.push_back(chosen->reward);
        s = chosen->next_state;
    }
    return rewards;
}

} // namespace rp
