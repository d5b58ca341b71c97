#include "dira/channel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace dira {

void MarkovChannel::validate() const {
    const int k = num_states();
    if (T.cols() != k || p.size() != k || e.size() != k) {
        throw std::runtime_error("channel: inconsistent dimensions");
    }
    for (int r = 0; r < k; ++r) {
        if (std::abs(T.row(r).sum() - 1.0) > 1e-12) {
            throw std::runtime_error("channel: row " + std::to_string(r) + " of T does not sum to 1");
        }
        if (T.row(r).minCoeff() < 0.0) throw std::runtime_error("channel: negative entry in T");
    }
    if (p.minCoeff() < 0.0 || std::abs(p.sum() - 1.0) > 1e-10) {
        throw std::runtime_error("channel: p is not a probability vector");
    }
    if ((p.transpose() * T - p.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
        throw std::runtime_error("channel: p is not stationary for T");
    }
    if (e.minCoeff() < 0.0 || e.maxCoeff() > 1.0) {
        throw std::runtime_error("channel: dropout probabilities outside [0,1]");
    }
}

int step_channel(const MarkovChannel& ch, int state, Rng& rng) {
    if (state < 0 || state >= ch.num_states()) {
        throw std::runtime_error("step_channel: state out of range");
    }
    const double u = rng.uniform();
    double acc = 0.0;
    for (int next = 0; next < ch.num_states(); ++next) {
        acc += ch.T(state, next);
        if (u < acc) return next;
    }
    return ch.num_states() - 1;  // guard against trailing round-off
}

int sample_transmission(const MarkovChannel& ch, int state, Rng& rng) {
    if (state < 0 || state >= ch.num_states()) {
        throw std::runtime_error("sample_transmission: state out of range");
    }
    return rng.bernoulli(ch.e(state)) ? 0 : 1;
}

int sample_initial_state(const MarkovChannel& ch, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (int s = 0; s < ch.num_states(); ++s) {
        acc += ch.p(s);
        if (u < acc) return s;
    }
    return ch.num_states() - 1;
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& T) {
    const Eigen::Index k = T.rows();
    if (T.cols() != k || k == 0) throw std::runtime_error("stationary_distribution: T not square");

    // Ergodicity: exactly one eigenvalue on the unit circle (the trivial 1).
    const auto eigs = T.eigenvalues();
    int on_circle = 0;
    for (Eigen::Index i = 0; i < k; ++i) {
        if (std::abs(std::abs(eigs(i)) - 1.0) < 1e-9) ++on_circle;
    }
    if (on_circle != 1) {
        throw std::runtime_error("stationary_distribution: chain is not ergodic");
    }

    // Solve p'(T - I) = 0 with the normalization sum(p) = 1 appended.
    Eigen::MatrixXd lhs(k + 1, k);
    lhs.topRows(k) = T.transpose() - Eigen::MatrixXd::Identity(k, k);
    lhs.row(k).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
    rhs(k) = 1.0;
    Eigen::VectorXd p = lhs.colPivHouseholderQr().solve(rhs);
    if (p.minCoeff() < -1e-12) {
        throw std::runtime_error("stationary_distribution: negative component in solution");
    }
    return p.cwiseMax(0.0) / p.cwiseMax(0.0).sum();
}

double average_success(const MarkovChannel& ch) {
    return ch.p.dot(Eigen::VectorXd::Ones(ch.e.size()) - ch.e);
}

MarkovChannel gilbert_elliot(double avg_success, const GilbertElliotConfig& cfg) {
    if (avg_success <= 0.0 || avg_success >= 1.0) {
        throw std::runtime_error("gilbert_elliot: average success must lie in (0,1)");
    }
    if (cfg.mean_good_sojourn < 1.0 || cfg.burstiness < 1.0) {
        throw std::runtime_error("gilbert_elliot: mean sojourns must be >= 1 step");
    }
    // Leave probability = 1 / expected sojourn length.
    const double g = 1.0 / cfg.mean_good_sojourn;  // good -> bad
    const double b = 1.0 / cfg.burstiness;         // bad -> good
    const double p_good = b / (g + b);
    const double p_bad = g / (g + b);
    // p_good (1 - e_g) + p_bad (1 - e_b) = avg_success, solved for e_b.
    const double e_bad = 1.0 - (avg_success - p_good * (1.0 - cfg.good_dropout)) / p_bad;
    if (e_bad < 0.0 || e_bad > 1.0) {
        throw std::runtime_error("gilbert_elliot: target average success infeasible");
    }
    MarkovChannel ch;
    ch.T.resize(2, 2);
    ch.T << 1.0 - g, g, b, 1.0 - b;
    ch.p.resize(2);
    ch.p << p_good, p_bad;
    ch.e.resize(2);
    ch.e << cfg.good_dropout, e_bad;
    ch.label = "gilbert-elliot";
    ch.validate();
    return ch;
}

std::vector<MarkovChannel> default_channel_set(int num_channels) {
    if (num_channels <= 0) throw std::runtime_error("default_channel_set: need at least 1 channel");
    std::vector<MarkovChannel> out;
    const int reliable = (num_channels + 2) / 3;
    for (int j = 0; j < num_channels; ++j) {
        MarkovChannel ch = gilbert_elliot(j < reliable ? 0.99 : 0.93);
        ch.label = j < reliable ? "type-1" : "type-2";
        out.push_back(std::move(ch));
    }
    return out;
}

}  // namespace dira
