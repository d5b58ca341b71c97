#include "dira/dqn.hpp"

#include <cmath>
#include <stdexcept>

namespace dira {

void adam_step(Eigen::VectorXd& params, AdamState& state, const AdamConfig& cfg,
               const Eigen::VectorXd& grad) {
    if (params.size() != grad.size() || params.size() != state.m.size()) {
        throw std::runtime_error("adam_step: size mismatch");
    }
    Eigen::VectorXd g = grad;
    if (cfg.grad_clip > 0.0) {
        const double norm = g.norm();
        if (norm > cfg.grad_clip) g *= cfg.grad_clip / norm;
    }
    state.t += 1;
    state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * g;
    state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    const Eigen::ArrayXd m_hat = state.m.array() / bc1;
    const Eigen::ArrayXd v_hat = state.v.array() / bc2;
    params.array() -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
}

Eigen::VectorXd bellman_targets(const std::vector<const Transition*>& batch,
                                const QNetwork& target_net, double gamma, kernels::Exec exec) {
    const int rows = static_cast<int>(batch.size());
    RowMat next(rows, target_net.input_dim);
    for (int r = 0; r < rows; ++r) next.row(r) = batch[r]->next_state.transpose();
    ForwardCache cache;
    forward_batch(target_net, next, cache, exec);
    Eigen::VectorXd y(rows);
    for (int r = 0; r < rows; ++r) {
        if (batch[r]->terminal) {
            y(r) = batch[r]->reward;
        } else {
            y(r) = batch[r]->reward + gamma * cache.q.row(r).maxCoeff();
        }
    }
    return y;
}

double train_step(QNetwork& net, AdamState& adam, const AdamConfig& cfg,
                  const std::vector<const Transition*>& batch, const Eigen::VectorXd& targets,
                  kernels::Exec exec) {
    const int rows = static_cast<int>(batch.size());
    if (rows == 0) throw std::runtime_error("train_step: empty batch");
    RowMat x(rows, net.input_dim);
    std::vector<int> actions(rows);
    for (int r = 0; r < rows; ++r) {
        x.row(r) = batch[r]->state.transpose();
        actions[r] = batch[r]->action;
    }
    ForwardCache cache;
    forward_batch(net, x, cache, exec);
    Eigen::VectorXd grad;
    const double loss = bellman_loss_backward(net, cache, actions, targets, grad, exec);
    if (!std::isfinite(loss) || !grad.allFinite()) {
        throw std::runtime_error("train_step: non-finite loss or gradient");
    }
    adam_step(net.params, adam, cfg, grad);
    if (!net.params.allFinite()) {
        throw std::runtime_error("train_step: non-finite parameters after update");
    }
    return loss;
}

void soft_update(QNetwork& target, const QNetwork& net, double tau) {
    if (target.param_count() != net.param_count()) {
        throw std::runtime_error("soft_update: parameter count mismatch");
    }
    target.params = (1.0 - tau) * target.params + tau * net.params;
}

}  // namespace dira
