#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dira/qnet.hpp"
#include "dira/replay.hpp"

namespace dira {

struct AdamConfig {
    double learning_rate = 1e-6;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double grad_clip = 0.0;  // 0 disables clipping; otherwise max L2 norm
};

struct AdamState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    long t = 0;

    explicit AdamState(Eigen::Index n)
        : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}
};

// Standard bias-corrected Adam update, in place on params.
void adam_step(Eigen::VectorXd& params, AdamState& state, const AdamConfig& cfg,
               const Eigen::VectorXd& grad);

// y_j = r_j + gamma * max_a Q_target(s'_j, a); terminal transitions use y_j = r_j.
Eigen::VectorXd bellman_targets(const std::vector<const Transition*>& batch,
                                const QNetwork& target_net, double gamma,
                                kernels::Exec exec = kernels::Exec::Serial);

// One minibatch update of the squared Bellman loss; returns the loss. Throws
// on non-finite loss or gradient so the harness can abort the run cleanly.
double train_step(QNetwork& net, AdamState& adam, const AdamConfig& cfg,
                  const std::vector<const Transition*>& batch, const Eigen::VectorXd& targets,
                  kernels::Exec exec = kernels::Exec::Serial);

// theta_target <- (1 - tau) theta_target + tau theta
void soft_update(QNetwork& target, const QNetwork& net, double tau);

struct EpsilonSchedule {
    double value = 1.0;
    double floor = 0.001;
    double rate = 0.99995;

    void step() { value = std::max(floor, rate * value); }
};

}  // namespace dira
