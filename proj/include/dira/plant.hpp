#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dira/matrix_io.hpp"
#include "dira/rng.hpp"

namespace dira {

// N coupled linear subsystems sharing one discrete-time update
//   x+ = A x + B u + w,   w ~ N(0, Sigma_w)
// with block-diagonal B: subsystem i owns state slice n_i and input slice m_i.
// Inputs that fail to arrive are replaced by zero for that whole subsystem.
struct PlantModel {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd W;        // state cost weight
    Eigen::MatrixXd R;        // input cost weight
    Eigen::MatrixXd sigma_w;  // process noise covariance
    std::vector<int> state_dims;
    std::vector<int> input_dims;

    int num_subsystems() const { return static_cast<int>(state_dims.size()); }
    int state_dim() const { return static_cast<int>(A.rows()); }
    int input_dim() const { return static_cast<int>(B.cols()); }

    int state_offset(int i) const;
    int input_offset(int i) const;

    Eigen::MatrixXd state_block(int i, int j) const;  // A block (i,j)
    Eigen::MatrixXd input_block(int i) const;         // B^i, the diagonal block of B

    void validate() const;  // dimension and symmetry checks, throws on failure
};

// Applies per-subsystem dropouts: u_i is zeroed when delivered[i] is false.
Eigen::VectorXd apply_dropouts(const PlantModel& plant, const Eigen::VectorXd& u,
                               const std::vector<bool>& delivered);

// x+ = A x + B u_delivered + w
Eigen::VectorXd plant_step(const PlantModel& plant, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& u_delivered, const Eigen::VectorXd& w);

// g(x,u) = x'Wx + u'Ru
double stage_cost(const PlantModel& plant, const Eigen::VectorXd& x, const Eigen::VectorXd& u);

// Draws w ~ N(0, Sigma_w) using a precomputed square root factor S with S S' = Sigma_w.
Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& sigma);
Eigen::VectorXd sample_noise(const Eigen::MatrixXd& sqrt_sigma, Rng& rng);

// Kalman rank tests via SVD with tolerance sigma_max * n * eps * 100.
bool check_controllability(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);
bool check_observability(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C);

struct PlantGenConfig {
    int num_subsystems = 8;
    int states_per_subsystem = 2;
    int inputs_per_subsystem = 1;
    double coupling_probability = 0.25;
    double coupling_scale = 0.05;
    double noise_std = 0.1;
    double stable_radius_min = 0.4;
    double stable_radius_max = 0.95;
    double unstable_mode_min = 1.0;
    double unstable_mode_max = 1.5;
    double input_gain_min = 0.5;
    double input_gain_max = 1.5;
    bool normalize_cost = true;
    int max_retries = 50;
};

// Random coupled-subsystem plant: ceil(N/2) subsystems stable, the rest with one
// unstable mode, sparse directed coupling, controllable per-subsystem pairs.
// When normalize_cost is set, W and R are jointly rescaled so the ideal
// steady-state cost trace(K Sigma_w) equals the number of subsystems.
PlantModel generate_random_ncs(const PlantGenConfig& cfg, Rng& rng);

void save_plant(const PlantModel& plant, const std::string& path);
PlantModel load_plant(const std::string& path);

}  // namespace dira
