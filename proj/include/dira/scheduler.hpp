#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dira/encoding.hpp"
#include "dira/plant.hpp"
#include "dira/qnet.hpp"
#include "dira/replay.hpp"

namespace dira {

// One scheduling decision: the joint channel-to-subsystem assignment plus the
// intermediate states the network saw while building it.
struct SelectionResult {
    std::vector<int> action;                  // per channel, subsystem 1..N
    std::vector<Eigen::VectorXd> states;      // encoded (x, h) before each pick
    std::vector<int> component_actions;       // 0-based picks, length M
    bool explored = false;                    // step-level exploration coin
};

struct SelectionOptions {
    bool per_component_exploration = false;  // flip the coin per channel instead
    kernels::Exec exec = kernels::Exec::Serial;
};

// Builds the joint action one channel at a time. The plant state stays frozen
// while the representation vector grows; each pick is either greedy in the
// network's Q-values (ties to the lowest subsystem index) or uniformly random,
// decided by one epsilon coin for the whole step (default) or one per channel.
SelectionResult select_action(const Eigen::VectorXd& x, const QNetwork& net, int num_subsystems,
                              int num_channels, double epsilon, Rng& rng,
                              const SelectionOptions& opts = {});

// r = -g(x, u_applied) / scale. The unscaled value is returned through raw_cost
// when requested (for cost reporting).
double compute_reward(const PlantModel& plant, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& u_applied, double scale,
                      double* raw_cost = nullptr);

enum class StorageMode { Literal, Chained };

// Turns one step's selection into M replay transitions sharing the step reward.
// Literal mode: every intermediate state jumps to (x_next, empty h) with reward r.
// Chained mode: intermediate j feeds intermediate j+1 with reward 0; only the
// last transition carries r and the (x_next, empty h) successor.
void store_selection_history(ReplayBuffer& buf, const SelectionResult& sel,
                             double reward, const Eigen::VectorXd& x_next,
                             StorageMode mode, bool terminal = false);

// All N^M joint actions in lexicographic order; refuses above the cap.
std::vector<std::vector<int>> enumerate_joint_actions(int num_subsystems, int num_channels,
                                                      long cap = 1000000);

}  // namespace dira
