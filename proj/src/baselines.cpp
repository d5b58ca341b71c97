#include "dira/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "dira/lqr.hpp"
#include "dira/scheduler.hpp"

namespace dira {

std::vector<double> stability_weights(const PlantModel& plant) {
    const int n_sub = plant.num_subsystems();
    std::vector<double> weights(n_sub);
    double total = 0.0;
    for (int i = 0; i < n_sub; ++i) {
        const Eigen::MatrixXd block = plant.state_block(i, i);
        const double radius = block.eigenvalues().cwiseAbs().maxCoeff();
        weights[i] = std::max(radius, 0.1);
        total += weights[i];
    }
    for (double& w : weights) w /= total;
    return weights;
}

int sample_weighted(const std::vector<double>& weights, Rng& rng) {
    if (weights.empty()) throw std::invalid_argument("sample_weighted: empty weights");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0) throw std::invalid_argument("sample_weighted: negative weight");
        total += w;
    }
    if (total <= 0) throw std::invalid_argument("sample_weighted: zero total weight");
    const double draw = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (draw < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
}

std::vector<int> uniform_random_action(int num_subsystems, int num_channels, Rng& rng) {
    std::vector<int> action(num_channels);
    for (int j = 0; j < num_channels; ++j) {
        action[j] = static_cast<int>(rng.uniform_index(num_subsystems)) + 1;
    }
    return action;
}

std::vector<int> stability_weighted_action(const std::vector<double>& weights,
                                           int num_channels, Rng& rng) {
    std::vector<int> action(num_channels);
    for (int j = 0; j < num_channels; ++j) {
        action[j] = sample_weighted(weights, rng) + 1;
    }
    return action;
}

Eigen::VectorXd analytic_closure_probs(const std::vector<double>& pick,
                                       const Eigen::VectorXd& channel_success) {
    Eigen::VectorXd q(static_cast<Eigen::Index>(pick.size()));
    for (std::size_t i = 0; i < pick.size(); ++i) {
        double miss = 1.0;
        for (Eigen::Index j = 0; j < channel_success.size(); ++j) {
            miss *= 1.0 - pick[i] * channel_success[j];
        }
        q[static_cast<Eigen::Index>(i)] = 1.0 - miss;
    }
    return q;
}

namespace {

// E{Delta R Delta} for the block-diagonal delivery mask: block (i,j) scaled by
// q_i when i = j and q_i q_j otherwise.
Eigen::MatrixXd closure_scaled_r(const PlantModel& plant, const Eigen::VectorXd& q) {
    Eigen::MatrixXd out = plant.R;
    const int n_sub = plant.num_subsystems();
    for (int i = 0; i < n_sub; ++i) {
        for (int j = 0; j < n_sub; ++j) {
            const double scale = (i == j) ? q[i] : q[i] * q[j];
            out.block(plant.input_offset(i), plant.input_offset(j),
                      plant.input_dims[i], plant.input_dims[j]) *= scale;
        }
    }
    return out;
}

}  // namespace

double schedule_objective(const PlantModel& plant, const Eigen::MatrixXd& k_mat,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& q) {
    const Eigen::VectorXd u = candidate_controls(plant, k_mat, q, x);
    const Eigen::VectorXd ax = plant.A * x;
    double value = x.dot(plant.W * x);
    value += u.dot(closure_scaled_r(plant, q) * u);
    value += ax.dot(k_mat * ax);
    value += 2.0 * ax.dot(k_mat * (expected_b(plant, q) * u));
    value += u.dot(expected_bkb(plant, k_mat, q) * u);
    return value;
}

std::vector<int> oracle_greedy_action(const PlantModel& plant, const Eigen::VectorXd& x,
                                      const Eigen::MatrixXd& k_mat,
                                      const Eigen::VectorXd& channel_success, long cap) {
    const int n_sub = plant.num_subsystems();
    const int n_chan = static_cast<int>(channel_success.size());
    const auto actions = enumerate_joint_actions(n_sub, n_chan, cap);
    std::vector<int> best;
    double best_value = 0.0;
    for (const auto& action : actions) {
        const Eigen::VectorXd q = closure_probs_for_action(n_sub, action, channel_success);
        const double value = schedule_objective(plant, k_mat, x, q);
        const double tie_slack = 1e-12 * std::max(1.0, std::abs(best_value));
        if (best.empty() || value < best_value - tie_slack) {
            best = action;
            best_value = value;
        }
    }
    return best;
}

Eigen::MatrixXd perfect_comm_gain(const PlantModel& plant) {
    const Eigen::VectorXd q = Eigen::VectorXd::Ones(plant.num_subsystems());
    const RiccatiSolution sol = solve_steady_state(plant, q);
    if (sol.status != RiccatiStatus::Converged) {
        throw std::runtime_error("perfect_comm_gain: Riccati recursion did not converge");
    }
    const Eigen::MatrixXd btk = plant.B.transpose() * sol.K;
    return (plant.R + btk * plant.B).ldlt().solve(btk * plant.A);
}

}  // namespace dira
