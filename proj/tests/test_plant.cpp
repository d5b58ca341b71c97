#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <filesystem>
#include <sstream>

#include "dira/matrix_io.hpp"
#include "dira/plant.hpp"
#include "dira/rng.hpp"

using namespace dira;

namespace {

PlantModel tiny_plant() {
    PlantModel p;
    p.state_dims = {2, 2};
    p.input_dims = {1, 1};
    p.A.resize(4, 4);
    p.A << 0.9, 0.1, 0.02, 0.0,
          -0.1, 0.9, 0.0, 0.01,
           0.0, 0.03, 1.1, 0.2,
           0.0, 0.0, -0.2, 0.7;
    p.B = Eigen::MatrixXd::Zero(4, 2);
    p.B(0, 0) = 1.0;
    p.B(1, 0) = 0.5;
    p.B(2, 1) = 0.8;
    p.B(3, 1) = 1.2;
    p.W = Eigen::MatrixXd::Identity(4, 4);
    p.R = Eigen::MatrixXd::Identity(2, 2);
    p.sigma_w = 0.01 * Eigen::MatrixXd::Identity(4, 4);
    p.validate();
    return p;
}

}  // namespace

TEST_CASE("dropout mask keeps scheduled slices and zeroes the rest") {
    PlantModel p = tiny_plant();
    Eigen::VectorXd u(2);
    u << 3.0, -2.0;

    CHECK(apply_dropouts(p, u, {true, true}) == u);
    CHECK(apply_dropouts(p, u, {false, false}).isZero(0.0));

    Eigen::VectorXd partial = apply_dropouts(p, u, {true, false});
    CHECK(partial(0) == 3.0);
    CHECK(partial(1) == 0.0);
}

TEST_CASE("dropout mask is idempotent") {
    PlantModel p = tiny_plant();
    Eigen::VectorXd u(2);
    u << 1.5, 2.5;
    const std::vector<bool> mask = {false, true};
    const Eigen::VectorXd once = apply_dropouts(p, u, mask);
    CHECK(apply_dropouts(p, once, mask) == once);
}

TEST_CASE("three-subsystem mask zeroes exactly the dropped slice") {
    PlantModel p;
    p.state_dims = {2, 2, 2};
    p.input_dims = {1, 1, 1};
    p.A = Eigen::MatrixXd::Identity(6, 6);
    p.B = Eigen::MatrixXd::Zero(6, 3);
    for (int i = 0; i < 3; ++i) p.B(2 * i, i) = 1.0;
    p.W = Eigen::MatrixXd::Identity(6, 6);
    p.R = Eigen::MatrixXd::Identity(3, 3);
    p.sigma_w = Eigen::MatrixXd::Identity(6, 6);

    Eigen::VectorXd u(3);
    u << 1.0, 2.0, 3.0;
    const Eigen::VectorXd kept = apply_dropouts(p, u, {true, false, true});
    CHECK(kept(0) == 1.0);
    CHECK(kept(1) == 0.0);
    CHECK(kept(2) == 3.0);
}

TEST_CASE("step is linear in state, input, and noise") {
    PlantModel p = tiny_plant();
    Rng rng(77);
    Eigen::VectorXd x1(4), x2(4), u1(2), u2(2), w1(4), w2(4);
    for (int i = 0; i < 4; ++i) {
        x1(i) = rng.normal();
        x2(i) = rng.normal();
        w1(i) = rng.normal();
        w2(i) = rng.normal();
    }
    for (int i = 0; i < 2; ++i) {
        u1(i) = rng.normal();
        u2(i) = rng.normal();
    }
    const Eigen::VectorXd lhs = plant_step(p, x1 + x2, u1 + u2, w1 + w2);
    const Eigen::VectorXd rhs = plant_step(p, x1, u1, w1) + plant_step(p, x2, u2, w2);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("stage cost vanishes only at the origin with zero input") {
    PlantModel p = tiny_plant();
    CHECK(stage_cost(p, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(2)) == 0.0);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
    x(2) = 1e-3;
    CHECK(stage_cost(p, x, Eigen::VectorXd::Zero(2)) > 0.0);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(2);
    u(1) = -1e-3;
    CHECK(stage_cost(p, Eigen::VectorXd::Zero(4), u) > 0.0);
}

TEST_CASE("noise samples reproduce the requested covariance") {
    Eigen::MatrixXd sigma(2, 2);
    sigma << 0.5, 0.2, 0.2, 0.3;
    const Eigen::MatrixXd s = matrix_sqrt_psd(sigma);
    CHECK((s * s.transpose() - sigma).cwiseAbs().maxCoeff() < 1e-12);

    Rng rng(123);
    const int samples = 200000;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(2, 2);
    for (int i = 0; i < samples; ++i) {
        const Eigen::VectorXd w = sample_noise(s, rng);
        acc += w * w.transpose();
    }
    acc /= samples;
    CHECK((acc - sigma).cwiseAbs().maxCoeff() < 0.01);
}

TEST_CASE("controllability rank test accepts and rejects canonical pairs") {
    Eigen::MatrixXd A(2, 2), B(2, 1);
    A << 1.0, 1.0, 0.0, 1.0;
    B << 0.0, 1.0;
    CHECK(check_controllability(A, B));

    // Second state unreachable.
    Eigen::MatrixXd A2 = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd B2(2, 1);
    B2 << 1.0, 0.0;
    CHECK_FALSE(check_controllability(A2, B2));

    CHECK(check_observability(A, Eigen::MatrixXd::Identity(2, 2)));
}

TEST_CASE("generated network has the configured stable/unstable split") {
    PlantGenConfig cfg;
    cfg.num_subsystems = 8;
    Rng rng(2024);
    PlantModel p = generate_random_ncs(cfg, rng);

    REQUIRE(p.num_subsystems() == 8);
    int stable = 0, unstable = 0;
    for (int i = 0; i < 8; ++i) {
        const double rho = p.state_block(i, i).eigenvalues().cwiseAbs().maxCoeff();
        if (rho < 1.0) {
            ++stable;
        } else {
            CHECK(rho > 1.0);
            CHECK(rho < 1.5);
            ++unstable;
        }
    }
    CHECK(stable == 4);
    CHECK(unstable == 4);

    // Coupling entries stay inside the configured band.
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            if (i == j) continue;
            CHECK(p.state_block(i, j).cwiseAbs().maxCoeff() <= cfg.coupling_scale);
        }
    }
    CHECK(check_controllability(p.A, p.B));
}

TEST_CASE("zero coupling probability gives a block-diagonal network") {
    PlantGenConfig cfg;
    cfg.num_subsystems = 4;
    cfg.coupling_probability = 0.0;
    Rng rng(5);
    PlantModel p = generate_random_ncs(cfg, rng);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (i != j) CHECK(p.state_block(i, j).isZero(0.0));
        }
    }
}

TEST_CASE("generation is deterministic in the seed") {
    PlantGenConfig cfg;
    cfg.num_subsystems = 6;
    Rng a(99), b(99);
    PlantModel p1 = generate_random_ncs(cfg, a);
    PlantModel p2 = generate_random_ncs(cfg, b);
    CHECK(p1.A == p2.A);
    CHECK(p1.B == p2.B);
    CHECK(p1.W == p2.W);
}

TEST_CASE("plant round-trips through the text archive exactly") {
    PlantGenConfig cfg;
    cfg.num_subsystems = 4;
    Rng rng(31);
    PlantModel p = generate_random_ncs(cfg, rng);

    const std::string path = (std::filesystem::temp_directory_path() / "plant_rt.txt").string();
    save_plant(p, path);
    PlantModel q = load_plant(path);
    std::filesystem::remove(path);

    CHECK(p.A == q.A);
    CHECK(p.B == q.B);
    CHECK(p.W == q.W);
    CHECK(p.R == q.R);
    CHECK(p.sigma_w == q.sigma_w);
    CHECK(p.state_dims == q.state_dims);
}

TEST_CASE("archive scalars survive a round trip at full precision") {
    io::Archive a;
    a.put_scalar("third", 1.0 / 3.0);
    a.put_scalar("tiny", 1e-300);
    a.put_ints("dims", {3, 1, 4});
    std::stringstream ss;
    a.save(ss);
    io::Archive b = io::Archive::load(ss);
    CHECK(b.get_scalar("third") == 1.0 / 3.0);
    CHECK(b.get_scalar("tiny") == 1e-300);
    CHECK(b.get_ints("dims") == std::vector<std::int64_t>{3, 1, 4});
    CHECK_THROWS(b.get_scalar("missing"));
}
