#include "dira/plant.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dira {

int PlantModel::state_offset(int i) const {
    return std::accumulate(state_dims.begin(), state_dims.begin() + i, 0);
}

int PlantModel::input_offset(int i) const {
    return std::accumulate(input_dims.begin(), input_dims.begin() + i, 0);
}

Eigen::MatrixXd PlantModel::state_block(int i, int j) const {
    return A.block(state_offset(i), state_offset(j), state_dims[i], state_dims[j]);
}

Eigen::MatrixXd PlantModel::input_block(int i) const {
    return B.block(state_offset(i), input_offset(i), state_dims[i], input_dims[i]);
}

void PlantModel::validate() const {
    const int n = std::accumulate(state_dims.begin(), state_dims.end(), 0);
    const int m = std::accumulate(input_dims.begin(), input_dims.end(), 0);
    if (state_dims.size() != input_dims.size()) {
        throw std::runtime_error("plant: state_dims and input_dims length mismatch");
    }
    if (A.rows() != n || A.cols() != n) throw std::runtime_error("plant: A is not n x n");
    if (B.rows() != n || B.cols() != m) throw std::runtime_error("plant: B is not n x m");
    if (W.rows() != n || W.cols() != n) throw std::runtime_error("plant: W is not n x n");
    if (R.rows() != m || R.cols() != m) throw std::runtime_error("plant: R is not m x m");
    if (sigma_w.rows() != n || sigma_w.cols() != n) {
        throw std::runtime_error("plant: Sigma_w is not n x n");
    }
    if (!W.isApprox(W.transpose(), 1e-10)) throw std::runtime_error("plant: W not symmetric");
    if (!R.isApprox(R.transpose(), 1e-10)) throw std::runtime_error("plant: R not symmetric");
    if (!sigma_w.isApprox(sigma_w.transpose(), 1e-10)) {
        throw std::runtime_error("plant: Sigma_w not symmetric");
    }
    // B must be block diagonal over the subsystem slices
    const int num = num_subsystems();
    for (int i = 0; i < num; ++i) {
        for (int j = 0; j < num; ++j) {
            if (i == j) continue;
            const auto blk = B.block(state_offset(i), input_offset(j), state_dims[i], input_dims[j]);
            if (blk.cwiseAbs().maxCoeff() > 0.0) {
                throw std::runtime_error("plant: B has nonzero off-diagonal block");
            }
        }
    }
}

Eigen::VectorXd apply_dropouts(const PlantModel& plant, const Eigen::VectorXd& u,
                               const std::vector<bool>& delivered) {
    if (static_cast<int>(delivered.size()) != plant.num_subsystems()) {
        throw std::runtime_error("apply_dropouts: delivery mask length mismatch");
    }
    Eigen::VectorXd out = u;
    for (int i = 0; i < plant.num_subsystems(); ++i) {
        if (!delivered[i]) {
            out.segment(plant.input_offset(i), plant.input_dims[i]).setZero();
        }
    }
    return out;
}

Eigen::VectorXd plant_step(const PlantModel& plant, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& u_delivered, const Eigen::VectorXd& w) {
    return plant.A * x + plant.B * u_delivered + w;
}

double stage_cost(const PlantModel& plant, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    return x.dot(plant.W * x) + u.dot(plant.R * u);
}

Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& sigma) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    if (es.info() != Eigen::Success) throw std::runtime_error("matrix_sqrt_psd: eigensolve failed");
    Eigen::VectorXd vals = es.eigenvalues();
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (vals(i) < -1e-10) throw std::runtime_error("matrix_sqrt_psd: matrix not PSD");
        vals(i) = std::sqrt(std::max(vals(i), 0.0));
    }
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::VectorXd sample_noise(const Eigen::MatrixXd& sqrt_sigma, Rng& rng) {
    Eigen::VectorXd z(sqrt_sigma.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    return sqrt_sigma * z;
}

namespace {

int svd_rank(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double tol =
        sv(0) * static_cast<double>(std::max(m.rows(), m.cols())) *
        std::numeric_limits<double>::epsilon() * 100.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol) ++rank;
    }
    return rank;
}

}  // namespace

bool check_controllability(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    const Eigen::Index n = A.rows();
    Eigen::MatrixXd ctrb(n, n * B.cols());
    Eigen::MatrixXd term = B;
    for (Eigen::Index k = 0; k < n; ++k) {
        ctrb.middleCols(k * B.cols(), B.cols()) = term;
        term = A * term;
    }
    return svd_rank(ctrb) == n;
}

bool check_observability(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C) {
    return check_controllability(A.transpose(), C.transpose());
}

void save_plant(const PlantModel& plant, const std::string& path) {
    io::Archive a;
    std::vector<std::int64_t> sd(plant.state_dims.begin(), plant.state_dims.end());
    std::vector<std::int64_t> id(plant.input_dims.begin(), plant.input_dims.end());
    a.put_ints("state_dims", sd);
    a.put_ints("input_dims", id);
    a.put_matrix("A", plant.A);
    a.put_matrix("B", plant.B);
    a.put_matrix("W", plant.W);
    a.put_matrix("R", plant.R);
    a.put_matrix("sigma_w", plant.sigma_w);
    a.save(path);
}

PlantModel load_plant(const std::string& path) {
    io::Archive a = io::Archive::load_file(path);
    PlantModel p;
    for (auto v : a.get_ints("state_dims")) p.state_dims.push_back(static_cast<int>(v));
    for (auto v : a.get_ints("input_dims")) p.input_dims.push_back(static_cast<int>(v));
    p.A = a.get_matrix("A");
    p.B = a.get_matrix("B");
    p.W = a.get_matrix("W");
    p.R = a.get_matrix("R");
    p.sigma_w = a.get_matrix("sigma_w");
    p.validate();
    return p;
}

}  // namespace dira
