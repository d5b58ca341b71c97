#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dira/lqr.hpp"
#include "dira/plant.hpp"

namespace dira {

namespace {

Eigen::Matrix2d rotation(double theta) {
    Eigen::Matrix2d r;
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

// Spectral radius < 1: scaled rotation, both eigenvalue moduli equal.
Eigen::Matrix2d stable_block(const PlantGenConfig& cfg, Rng& rng) {
    const double radius = rng.uniform(cfg.stable_radius_min, cfg.stable_radius_max);
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return radius * rotation(theta);
}

// One real eigenvalue outside the unit circle, one inside, in a random
// (non-orthogonal in general, here orthogonal) eigenbasis.
Eigen::Matrix2d unstable_block(const PlantGenConfig& cfg, Rng& rng) {
    const double lam_u = rng.uniform(cfg.unstable_mode_min, cfg.unstable_mode_max);
    const double lam_s = rng.uniform(0.2, 0.8);
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const Eigen::Matrix2d v = rotation(theta);
    return v * Eigen::Vector2d(lam_u, lam_s).asDiagonal() * v.transpose();
}

double spectral_radius(const Eigen::MatrixXd& m) {
    return m.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

PlantModel generate_random_ncs(const PlantGenConfig& cfg, Rng& rng) {
    const int N = cfg.num_subsystems;
    const int ns = cfg.states_per_subsystem;
    const int ms = cfg.inputs_per_subsystem;
    if (N <= 0 || ns != 2 || ms != 1) {
        throw std::runtime_error("generate_random_ncs: only 2-state/1-input subsystems supported");
    }
    const int n = N * ns;
    const int m = N * ms;
    const int num_stable = (N + 1) / 2;

    for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
        PlantModel plant;
        plant.state_dims.assign(N, ns);
        plant.input_dims.assign(N, ms);
        plant.A = Eigen::MatrixXd::Zero(n, n);
        plant.B = Eigen::MatrixXd::Zero(n, m);

        for (int i = 0; i < N; ++i) {
            const Eigen::Matrix2d blk =
                (i < num_stable) ? stable_block(cfg, rng) : unstable_block(cfg, rng);
            plant.A.block(i * ns, i * ns, ns, ns) = blk;
            for (int r = 0; r < ns; ++r) {
                plant.B(i * ns + r, i) = rng.uniform(cfg.input_gain_min, cfg.input_gain_max);
            }
        }
        // weak directed coupling on an Erdos-Renyi graph
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < N; ++j) {
                if (i == j) continue;
                if (rng.uniform() < cfg.coupling_probability) {
                    for (int r = 0; r < ns; ++r) {
                        for (int c = 0; c < ns; ++c) {
                            plant.A(i * ns + r, j * ns + c) =
                                rng.uniform(-cfg.coupling_scale, cfg.coupling_scale);
                        }
                    }
                }
            }
        }

        plant.W = Eigen::MatrixXd::Identity(n, n);
        plant.R = Eigen::MatrixXd::Identity(m, m);
        plant.sigma_w = cfg.noise_std * cfg.noise_std * Eigen::MatrixXd::Identity(n, n);

        bool structure_ok = true;
        for (int i = 0; i < N && structure_ok; ++i) {
            const double rho = spectral_radius(plant.A.block(i * ns, i * ns, ns, ns));
            if (i < num_stable) {
                structure_ok = rho < 1.0;
            } else {
                structure_ok = rho > 1.0 && rho < 1.5;
            }
        }
        if (!structure_ok) continue;
        if (!check_controllability(plant.A, plant.B)) continue;
        if (!check_observability(plant.A, matrix_sqrt_psd(plant.W))) continue;

        if (cfg.normalize_cost) {
            // Scale W and R together so the ideal-network steady-state cost
            // trace(K Sigma_w) equals N. Joint scaling leaves the optimal
            // policy unchanged because the Riccati map is homogeneous in (W,R).
            RiccatiSolution ideal =
                solve_steady_state(plant, Eigen::VectorXd::Ones(N));
            if (ideal.status != RiccatiStatus::Converged) continue;
            const double cost = (ideal.K * plant.sigma_w).trace();
            if (cost <= 0.0) continue;
            const double scale = static_cast<double>(N) / cost;
            plant.W *= scale;
            plant.R *= scale;
        }

        plant.validate();
        return plant;
    }
    throw std::runtime_error("generate_random_ncs: retries exhausted without a valid plant");
}

}  // namespace dira
