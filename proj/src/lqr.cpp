#include "dira/lqr.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace dira {

Eigen::MatrixXd expected_b(const PlantModel& plant, const Eigen::VectorXd& q) {
    if (q.size() != plant.num_subsystems()) {
        throw std::runtime_error("expected_b: q length mismatch");
    }
    Eigen::MatrixXd out = plant.B;
    for (int i = 0; i < plant.num_subsystems(); ++i) {
        out.middleCols(plant.input_offset(i), plant.input_dims[i]) *= q(i);
    }
    return out;
}

Eigen::MatrixXd expected_bkb(const PlantModel& plant, const Eigen::MatrixXd& K,
                             const Eigen::VectorXd& q) {
    if (q.size() != plant.num_subsystems()) {
        throw std::runtime_error("expected_bkb: q length mismatch");
    }
    const Eigen::MatrixXd full = plant.B.transpose() * K * plant.B;
    Eigen::MatrixXd out(full.rows(), full.cols());
    const int num = plant.num_subsystems();
    for (int i = 0; i < num; ++i) {
        for (int j = 0; j < num; ++j) {
            const double coeff = (i == j) ? q(i) : q(i) * q(j);
            out.block(plant.input_offset(i), plant.input_offset(j), plant.input_dims[i],
                      plant.input_dims[j]) =
                coeff * full.block(plant.input_offset(i), plant.input_offset(j),
                                   plant.input_dims[i], plant.input_dims[j]);
        }
    }
    return out;
}

Eigen::MatrixXd riccati_iterate(const PlantModel& plant, const Eigen::MatrixXd& K_next,
                                const Eigen::VectorXd& q) {
    const Eigen::MatrixXd eb = expected_b(plant, q);
    const Eigen::MatrixXd gram = plant.R + expected_bkb(plant, K_next, q);
    const Eigen::MatrixXd cross = eb.transpose() * K_next * plant.A;  // m x n
    const Eigen::MatrixXd gain = gram.ldlt().solve(cross);
    Eigen::MatrixXd K =
        plant.A.transpose() * K_next * plant.A + plant.W - cross.transpose() * gain;
    return 0.5 * (K + K.transpose());
}

RiccatiSolution solve_steady_state(const PlantModel& plant, const Eigen::VectorXd& q,
                                   const RiccatiOptions& opts) {
    RiccatiSolution sol;
    Eigen::MatrixXd K = plant.W;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        Eigen::MatrixXd next = riccati_iterate(plant, K, q);
        const double delta = (next - K).cwiseAbs().maxCoeff();
        K = std::move(next);
        sol.iterations = it;
        if (!K.allFinite() || K.cwiseAbs().maxCoeff() > opts.blowup_norm) {
            sol.K = K;
            sol.residual = delta;
            sol.status = RiccatiStatus::Diverged;
            return sol;
        }
        if (delta < opts.tolerance) {
            sol.K = K;
            sol.residual = delta;
            sol.status = RiccatiStatus::Converged;
            return sol;
        }
        sol.residual = delta;
    }
    sol.K = K;
    sol.status = RiccatiStatus::IterationLimit;
    return sol;
}

Eigen::MatrixXd finite_horizon_k(const PlantModel& plant, const Eigen::VectorXd& q, int horizon) {
    Eigen::MatrixXd K = plant.W;
    for (int t = 0; t < horizon; ++t) {
        K = riccati_iterate(plant, K, q);
    }
    return K;
}

double steady_state_margin(const PlantModel& plant, const Eigen::VectorXd& q) {
    Eigen::VectorXd gamma(plant.state_dim());
    for (int i = 0; i < plant.num_subsystems(); ++i) {
        gamma.segment(plant.state_offset(i), plant.state_dims[i])
            .setConstant(std::sqrt(std::max(0.0, 1.0 - q(i))));
    }
    const Eigen::MatrixXd scaled = gamma.asDiagonal() * plant.A;
    return scaled.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::VectorXd candidate_controls(const PlantModel& plant, const Eigen::MatrixXd& K,
                                   const Eigen::VectorXd& q, const Eigen::VectorXd& x) {
    const Eigen::MatrixXd eb = expected_b(plant, q);
    const Eigen::MatrixXd gram = plant.R + expected_bkb(plant, K, q);
    Eigen::VectorXd u = -gram.ldlt().solve(eb.transpose() * K * plant.A * x);
    for (int i = 0; i < plant.num_subsystems(); ++i) {
        if (q(i) == 0.0) {
            u.segment(plant.input_offset(i), plant.input_dims[i]).setZero();
        }
    }
    return u;
}

Eigen::VectorXd closure_probs_for_action(int num_subsystems, const std::vector<int>& action,
                                         const Eigen::VectorXd& channel_success) {
    if (static_cast<Eigen::Index>(action.size()) != channel_success.size()) {
        throw std::runtime_error("closure_probs_for_action: action/success length mismatch");
    }
    Eigen::VectorXd fail = Eigen::VectorXd::Ones(num_subsystems);
    std::vector<bool> scheduled(num_subsystems, false);
    for (std::size_t j = 0; j < action.size(); ++j) {
        const int target = action[j] - 1;  // schedules are 1-based
        if (target < 0 || target >= num_subsystems) {
            throw std::runtime_error("closure_probs_for_action: schedule entry out of range");
        }
        scheduled[target] = true;
        fail(target) *= 1.0 - channel_success(j);
    }
    Eigen::VectorXd q(num_subsystems);
    for (int i = 0; i < num_subsystems; ++i) {
        q(i) = scheduled[i] ? 1.0 - fail(i) : 0.0;
    }
    return q;
}

SuccessRateEstimator::SuccessRateEstimator(int num_streams, int window)
    : window_(window), history_(num_streams) {
    if (num_streams <= 0 || window <= 0) {
        throw std::runtime_error("SuccessRateEstimator: need positive streams and window");
    }
}

void SuccessRateEstimator::record(int stream, bool success) {
    auto& h = history_.at(stream);
    h.push_back(success);
    while (static_cast<int>(h.size()) > window_) h.pop_front();
}

double SuccessRateEstimator::estimate(int stream) const {
    const auto& h = history_.at(stream);
    if (h.empty()) return 0.5;
    int hits = 0;
    for (bool b : h) hits += b ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(h.size());
}

Eigen::VectorXd SuccessRateEstimator::estimates() const {
    Eigen::VectorXd out(history_.size());
    for (std::size_t i = 0; i < history_.size(); ++i) out(i) = estimate(static_cast<int>(i));
    return out;
}

void SuccessRateEstimator::set_window(int window) {
    if (window <= 0) throw std::runtime_error("SuccessRateEstimator: window must be positive");
    window_ = window;
    for (auto& h : history_) {
        while (static_cast<int>(h.size()) > window_) h.pop_front();
    }
}

}  // namespace dira
