#include "dira/scheduler.hpp"

#include <stdexcept>

namespace dira {

namespace {

int greedy_pick(const Eigen::VectorXd& q) {
    int best = 0;
    for (int i = 1; i < q.size(); ++i) {
        if (q(i) > q(best)) best = i;  // strict: ties keep the lowest index
    }
    return best;
}

}  // namespace

SelectionResult select_action(const Eigen::VectorXd& x, const QNetwork& net, int num_subsystems,
                              int num_channels, double epsilon, Rng& rng,
                              const SelectionOptions& opts) {
    if (num_subsystems < 1 || num_channels < 1) {
        throw std::runtime_error("select_action: bad dimensions");
    }
    const int width = code_width(num_subsystems);
    RepresentationVector h(num_channels, width);
    if (x.size() + h.flat().size() != net.input_dim) {
        throw std::runtime_error("select_action: network input width mismatch");
    }

    SelectionResult out;
    out.action.reserve(num_channels);
    out.states.reserve(num_channels);
    out.component_actions.reserve(num_channels);
    out.explored = !opts.per_component_exploration && rng.uniform() < epsilon;

    for (int j = 0; j < num_channels; ++j) {
        out.states.push_back(encode_input(x, h));
        const bool explore = opts.per_component_exploration
                                 ? rng.uniform() < epsilon
                                 : out.explored;
        int pick;
        if (explore) {
            pick = static_cast<int>(rng.uniform_index(num_subsystems));
        } else {
            pick = greedy_pick(net.forward(out.states.back(), opts.exec));
        }
        out.component_actions.push_back(pick);
        out.action.push_back(pick + 1);
        h.assign_next(pick + 1);
    }
    return out;
}

double compute_reward(const PlantModel& plant, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& u_applied, double scale, double* raw_cost) {
    if (scale <= 0.0) throw std::runtime_error("compute_reward: scale must be positive");
    const double g = stage_cost(plant, x, u_applied);
    if (raw_cost) *raw_cost = -g;
    return -g / scale;
}

void store_selection_history(ReplayBuffer& buf, const SelectionResult& sel, double reward,
                             const Eigen::VectorXd& x_next, StorageMode mode, bool terminal) {
    const int m = static_cast<int>(sel.states.size());
    if (m == 0 || sel.component_actions.size() != sel.states.size()) {
        throw std::runtime_error("store_selection_history: malformed selection");
    }
    const int width_bits = static_cast<int>(sel.states[0].size() - x_next.size());
    Eigen::VectorXd reset_state(sel.states[0].size());
    reset_state << x_next, Eigen::VectorXd::Zero(width_bits);

    for (int j = 0; j < m; ++j) {
        Transition t;
        t.state = sel.states[j];
        t.action = sel.component_actions[j];
        if (mode == StorageMode::Literal || j == m - 1) {
            t.reward = reward;
            t.next_state = reset_state;
            t.terminal = terminal;
        } else {
            t.reward = 0.0;
            t.next_state = sel.states[j + 1];
            t.terminal = false;
        }
        buf.push(std::move(t));
    }
}

std::vector<std::vector<int>> enumerate_joint_actions(int num_subsystems, int num_channels,
                                                      long cap) {
    if (num_subsystems < 1 || num_channels < 1) {
        throw std::runtime_error("enumerate_joint_actions: bad dimensions");
    }
    double total_d = 1.0;
    for (int j = 0; j < num_channels; ++j) total_d *= num_subsystems;
    if (total_d > static_cast<double>(cap)) {
        throw std::runtime_error("enumerate_joint_actions: action space exceeds cap");
    }
    const long total = static_cast<long>(total_d);
    std::vector<std::vector<int>> out;
    out.reserve(total);
    std::vector<int> current(num_channels, 1);
    for (long idx = 0; idx < total; ++idx) {
        out.push_back(current);
        for (int j = num_channels - 1; j >= 0; --j) {
            if (current[j] < num_subsystems) {
                ++current[j];
                break;
            }
            current[j] = 1;
        }
    }
    return out;
}

}  // namespace dira
