#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dira/rng.hpp"

namespace dira {

// Finite-state Markov fading channel. State d drops a packet with probability
// e(d); the state advances by row d of the transition matrix T each step.
struct MarkovChannel {
    Eigen::MatrixXd T;
    Eigen::VectorXd p;  // stationary distribution of T
    Eigen::VectorXd e;  // per-state dropout probability
    std::string label;

    int num_states() const { return static_cast<int>(T.rows()); }
    void validate() const;
};

int step_channel(const MarkovChannel& ch, int state, Rng& rng);

// Returns 1 on successful delivery, 0 on dropout.
int sample_transmission(const MarkovChannel& ch, int state, Rng& rng);

int sample_initial_state(const MarkovChannel& ch, Rng& rng);

// Unique stationary vector of an ergodic row-stochastic matrix; throws when
// the chain has no unique stationary distribution.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& T);

double average_success(const MarkovChannel& ch);

struct GilbertElliotConfig {
    double good_dropout = 0.001;
    double mean_good_sojourn = 20.0;  // expected steps spent in the good state
    double burstiness = 4.0;          // expected steps spent in the bad state
};

// Two-state Gilbert-Elliot channel hitting the requested average success rate.
// The bad-state dropout is solved from the stationary weights; an out-of-range
// solution means the target is infeasible and construction throws.
MarkovChannel gilbert_elliot(double avg_success, const GilbertElliotConfig& cfg = {});

// Standard experiment mix: M channels, the first ceil(M/3) of the
// high-reliability type (0.99 average success), the rest 0.93.
std::vector<MarkovChannel> default_channel_set(int num_channels);

}  // namespace dira
