#include "dira/qnet.hpp"

#include <cmath>
#include <stdexcept>

#include "dira/matrix_io.hpp"

namespace dira {

QNetwork QNetwork::zeros(int input, int hidden, int output) {
    if (input <= 0 || hidden <= 0 || output <= 0) {
        throw std::runtime_error("QNetwork: dimensions must be positive");
    }
    QNetwork net;
    net.input_dim = input;
    net.hidden_dim = hidden;
    net.output_dim = output;
    const Eigen::Index total = static_cast<Eigen::Index>(hidden) * input + hidden +
                               static_cast<Eigen::Index>(output) * hidden + output;
    net.params = Eigen::VectorXd::Zero(total);
    return net;
}

QNetwork QNetwork::create(int input, int hidden, int output, Rng& rng) {
    QNetwork net = zeros(input, hidden, output);
    // Scaled-uniform fan-in init keeps rectifier pre-activations O(1); the
    // output head starts near zero so early Q-values are near zero.
    const double limit1 = std::sqrt(6.0 / input);
    double* w1 = net.w1();
    for (Eigen::Index i = 0; i < net.w1_count(); ++i) w1[i] = rng.uniform(-limit1, limit1);
    double* w2 = net.w2();
    for (Eigen::Index i = 0; i < net.w2_count(); ++i) w2[i] = rng.uniform(-1e-3, 1e-3);
    return net;
}

Eigen::VectorXd QNetwork::forward(const Eigen::VectorXd& input, kernels::Exec exec) const {
    if (input.size() != input_dim) throw std::runtime_error("QNetwork: input width mismatch");
    Eigen::VectorXd z1(hidden_dim), h(hidden_dim), q(output_dim);
    kernels::affine_forward(exec, input.data(), w1(), b1(), z1.data(), 1, input_dim, hidden_dim);
    kernels::relu(exec, z1.data(), h.data(), hidden_dim);
    kernels::affine_forward(exec, h.data(), w2(), b2(), q.data(), 1, hidden_dim, output_dim);
    return q;
}

void forward_batch(const QNetwork& net, const RowMat& x, ForwardCache& cache,
                   kernels::Exec exec) {
    if (x.cols() != net.input_dim) throw std::runtime_error("forward_batch: width mismatch");
    const int rows = static_cast<int>(x.rows());
    cache.x = x;
    cache.z1.resize(rows, net.hidden_dim);
    cache.h.resize(rows, net.hidden_dim);
    cache.q.resize(rows, net.output_dim);
    kernels::affine_forward(exec, cache.x.data(), net.w1(), net.b1(), cache.z1.data(), rows,
                            net.input_dim, net.hidden_dim);
    kernels::relu(exec, cache.z1.data(), cache.h.data(),
                  static_cast<std::ptrdiff_t>(rows) * net.hidden_dim);
    kernels::affine_forward(exec, cache.h.data(), net.w2(), net.b2(), cache.q.data(), rows,
                            net.hidden_dim, net.output_dim);
}

double bellman_loss_backward(const QNetwork& net, const ForwardCache& cache,
                             const std::vector<int>& actions, const Eigen::VectorXd& targets,
                             Eigen::VectorXd& grad, kernels::Exec exec) {
    const int rows = static_cast<int>(cache.q.rows());
    if (static_cast<int>(actions.size()) != rows || targets.size() != rows || rows == 0) {
        throw std::runtime_error("bellman_loss_backward: batch size mismatch");
    }
    RowMat dq = RowMat::Zero(rows, net.output_dim);
    double loss = 0.0;
    for (int r = 0; r < rows; ++r) {
        const int a = actions[r];
        if (a < 0 || a >= net.output_dim) {
            throw std::runtime_error("bellman_loss_backward: action out of range");
        }
        const double diff = cache.q(r, a) - targets(r);
        loss += diff * diff;
        dq(r, a) = 2.0 * diff / rows;
    }
    loss /= rows;

    grad.resize(net.param_count());
    RowMat dh(rows, net.hidden_dim), dz1(rows, net.hidden_dim);
    double* g_w1 = grad.data();
    double* g_b1 = grad.data() + net.w1_count();
    double* g_w2 = grad.data() + net.w1_count() + net.hidden_dim;
    double* g_b2 = grad.data() + net.w1_count() + net.hidden_dim + net.w2_count();

    kernels::affine_backward(exec, cache.h.data(), net.w2(), dq.data(), dh.data(), g_w2, g_b2,
                             rows, net.hidden_dim, net.output_dim);
    kernels::relu_backward(exec, cache.z1.data(), dh.data(), dz1.data(),
                           static_cast<std::ptrdiff_t>(rows) * net.hidden_dim);
    RowMat dx(rows, net.input_dim);  // unused, but the kernel fills it
    kernels::affine_backward(exec, cache.x.data(), net.w1(), dz1.data(), dx.data(), g_w1, g_b1,
                             rows, net.input_dim, net.hidden_dim);
    return loss;
}

void QNetwork::save(const std::string& path) const {
    io::Archive a;
    a.put_ints("qnet_dims", {input_dim, hidden_dim, output_dim});
    a.put_vector("qnet_params", params);
    a.save(path);
}

QNetwork QNetwork::load(const std::string& path) {
    io::Archive a = io::Archive::load_file(path);
    const auto dims = a.get_ints("qnet_dims");
    if (dims.size() != 3) throw std::runtime_error("QNetwork::load: bad dimension record");
    QNetwork net = zeros(static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                         static_cast<int>(dims[2]));
    Eigen::VectorXd p = a.get_vector("qnet_params");
    if (p.size() != net.param_count()) throw std::runtime_error("QNetwork::load: size mismatch");
    net.params = std::move(p);
    return net;
}

}  // namespace dira
