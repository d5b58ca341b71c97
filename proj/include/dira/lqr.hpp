#pragma once

#include <Eigen/Dense>
#include <deque>
#include <vector>

#include "dira/plant.hpp"

namespace dira {

// E{B_delta} for independent per-subsystem delivery probabilities q:
// B with each column block i scaled by q_i.
Eigen::MatrixXd expected_b(const PlantModel& plant, const Eigen::VectorXd& q);

// E{B_delta' K B_delta}. Because delta_i is Bernoulli, the diagonal blocks use
// q_i (delta^2 = delta) while off-diagonal blocks use q_i q_j.
Eigen::MatrixXd expected_bkb(const PlantModel& plant, const Eigen::MatrixXd& K,
                             const Eigen::VectorXd& q);

// One backward Riccati step under random packet loss:
//   K = A'K+A + W - A'K+ E{B} (R + E{B'K+B})^-1 E{B}' K+ A
// The result is symmetrized to suppress round-off drift.
Eigen::MatrixXd riccati_iterate(const PlantModel& plant, const Eigen::MatrixXd& K_next,
                                const Eigen::VectorXd& q);

enum class RiccatiStatus { Converged, IterationLimit, Diverged };

struct RiccatiSolution {
    Eigen::MatrixXd K;
    double residual = 0.0;
    int iterations = 0;
    RiccatiStatus status = RiccatiStatus::Converged;
};

struct RiccatiOptions {
    double tolerance = 1e-9;   // max-norm change between iterates
    int max_iterations = 10000;
    double blowup_norm = 1e12;  // declare divergence past this max-norm
};

// Fixed-point iteration from K = W. Divergence is reported, not thrown, so the
// caller can fall back to a finite-horizon solution.
RiccatiSolution solve_steady_state(const PlantModel& plant, const Eigen::VectorXd& q,
                                   const RiccatiOptions& opts = {});

// T backward steps from K = W; the cost matrix for the first stage is returned.
Eigen::MatrixXd finite_horizon_k(const PlantModel& plant, const Eigen::VectorXd& q, int horizon);

// Spectral radius of Gamma*A with Gamma = diag(sqrt(1-q_i) I_{n_i}).
// Values below 1 guarantee the steady-state iteration converges.
double steady_state_margin(const PlantModel& plant, const Eigen::VectorXd& q);

// u = -(R + E{B'KB})^-1 E{B}' K A x for the delivery probabilities implied by
// the schedule, with input slices of unscheduled subsystems forced to zero.
Eigen::VectorXd candidate_controls(const PlantModel& plant, const Eigen::MatrixXd& K,
                                   const Eigen::VectorXd& q, const Eigen::VectorXd& x);

// Per-subsystem delivery probability implied by a joint schedule: subsystem i
// succeeds when any assigned channel does, q_i = 1 - prod_j (1 - s_j).
// Unscheduled subsystems get q_i = 0.
Eigen::VectorXd closure_probs_for_action(int num_subsystems, const std::vector<int>& action,
                                         const Eigen::VectorXd& channel_success);

// Windowed empirical success estimates with a half/half prior. Tracks one rate
// per stream (channels or subsystems), window length D, estimate 0.5 until the
// first observation arrives.
class SuccessRateEstimator {
public:
    SuccessRateEstimator(int num_streams, int window);

    void record(int stream, bool success);
    double estimate(int stream) const;
    Eigen::VectorXd estimates() const;
    void set_window(int window);
    int window() const { return window_; }

private:
    int window_;
    std::vector<std::deque<bool>> history_;
};

}  // namespace dira
