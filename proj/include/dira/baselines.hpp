#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dira/plant.hpp"
#include "dira/rng.hpp"

namespace dira {

// Per-subsystem scheduling weights proportional to max(spectral radius of the
// diagonal block, 0.1), normalized to sum 1.
std::vector<double> stability_weights(const PlantModel& plant);

// One draw from a discrete distribution given by `weights` (need not be
// normalized).
int sample_weighted(const std::vector<double>& weights, Rng& rng);

std::vector<int> uniform_random_action(int num_subsystems, int num_channels, Rng& rng);

std::vector<int> stability_weighted_action(const std::vector<double>& weights,
                                           int num_channels, Rng& rng);

// Analytic per-subsystem closure probabilities when every channel picks
// subsystem i independently with probability pick[i] and delivers with its
// average success rate: q_i = 1 - prod_j (1 - pick_i * s_j).
Eigen::VectorXd analytic_closure_probs(const std::vector<double>& pick,
                                       const Eigen::VectorXd& channel_success);

// Expected one-step objective of a schedule with closure probabilities q:
//   x'Wx + E{u_d' R u_d} + E{(Ax + B_d u)' K (Ax + B_d u)}
// where u is the one-step look-ahead candidate control for q and the
// expectation runs over independent per-subsystem delivery masks.
double schedule_objective(const PlantModel& plant, const Eigen::MatrixXd& k_mat,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& q);

// Exhaustive minimizer of schedule_objective over all joint actions
// (channel -> subsystem, 1-based). Ties resolve to the earliest action in
// lexicographic enumeration order.
std::vector<int> oracle_greedy_action(const PlantModel& plant, const Eigen::VectorXd& x,
                                      const Eigen::MatrixXd& k_mat,
                                      const Eigen::VectorXd& channel_success,
                                      long cap = 1000000);

// Classical LQR feedback gain for the loss-free plant; u = -L x.
Eigen::MatrixXd perfect_comm_gain(const PlantModel& plant);

}  // namespace dira
