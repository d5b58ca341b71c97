#pragma once

#include <Eigen/Dense>
#include <string>

#include "dira/kernels.hpp"
#include "dira/rng.hpp"

namespace dira {

// One-hidden-layer rectifier network with a linear output head. Parameters
// live in a single flat vector [w1 | b1 | w2 | b2] (weight matrices row-major)
// so the optimizer and target-network blending can treat them uniformly.
struct QNetwork {
    int input_dim = 0;
    int hidden_dim = 0;
    int output_dim = 0;
    Eigen::VectorXd params;

    static QNetwork create(int input, int hidden, int output, Rng& rng);
    static QNetwork zeros(int input, int hidden, int output);

    Eigen::Index param_count() const { return params.size(); }

    double* w1() { return params.data(); }
    const double* w1() const { return params.data(); }
    double* b1() { return params.data() + w1_count(); }
    const double* b1() const { return params.data() + w1_count(); }
    double* w2() { return params.data() + w1_count() + hidden_dim; }
    const double* w2() const { return params.data() + w1_count() + hidden_dim; }
    double* b2() { return params.data() + w1_count() + hidden_dim + w2_count(); }
    const double* b2() const { return params.data() + w1_count() + hidden_dim + w2_count(); }

    Eigen::Index w1_count() const {
        return static_cast<Eigen::Index>(hidden_dim) * input_dim;
    }
    Eigen::Index w2_count() const {
        return static_cast<Eigen::Index>(output_dim) * hidden_dim;
    }

    Eigen::VectorXd forward(const Eigen::VectorXd& input,
                            kernels::Exec exec = kernels::Exec::Serial) const;

    void save(const std::string& path) const;
    static QNetwork load(const std::string& path);
};

// Batch activations kept around for the backward pass.
struct ForwardCache {
    RowMat x;   // batch x input
    RowMat z1;  // batch x hidden, pre-activation
    RowMat h;   // batch x hidden
    RowMat q;   // batch x output
};

void forward_batch(const QNetwork& net, const RowMat& x, ForwardCache& cache,
                   kernels::Exec exec);

// Mean squared error over the taken actions only:
//   loss = (1/batch) sum_j (q[j, action_j] - target_j)^2.
// Fills grad (same layout as params) and returns the loss. Gradient flows
// through the taken action's output alone; targets are constants.
double bellman_loss_backward(const QNetwork& net, const ForwardCache& cache,
                             const std::vector<int>& actions, const Eigen::VectorXd& targets,
                             Eigen::VectorXd& grad, kernels::Exec exec);

}  // namespace dira
