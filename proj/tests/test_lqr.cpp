#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "dira/lqr.hpp"
#include "dira/plant.hpp"
#include "dira/rng.hpp"
#include "oracles.hpp"

using namespace dira;

namespace {

PlantModel scalar_plant(double a, double b, double w, double r) {
    PlantModel p;
    p.state_dims = {1};
    p.input_dims = {1};
    p.A = Eigen::MatrixXd::Constant(1, 1, a);
    p.B = Eigen::MatrixXd::Constant(1, 1, b);
    p.W = Eigen::MatrixXd::Constant(1, 1, w);
    p.R = Eigen::MatrixXd::Constant(1, 1, r);
    p.sigma_w = Eigen::MatrixXd::Identity(1, 1);
    return p;
}

PlantModel random_plant(int n_subsystems, std::uint64_t seed) {
    PlantGenConfig cfg;
    cfg.num_subsystems = n_subsystems;
    cfg.normalize_cost = false;
    Rng rng(seed);
    return generate_random_ncs(cfg, rng);
}

}  // namespace

TEST_CASE("expected actuation scales column blocks by delivery probability") {
    PlantModel p = random_plant(3, 11);
    Eigen::VectorXd q(3);
    q << 1.0, 0.5, 0.0;
    const Eigen::MatrixXd eb = expected_b(p, q);
    CHECK(eb.col(0) == p.B.col(0));
    CHECK((eb.col(1) - 0.5 * p.B.col(1)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(eb.col(2).isZero(0.0));
}

TEST_CASE("quadratic actuation moment matches a Bernoulli Monte Carlo estimate") {
    PlantModel p = random_plant(3, 12);
    Eigen::VectorXd q(3);
    q << 0.9, 0.6, 0.3;
    Eigen::MatrixXd K = Eigen::MatrixXd::Random(6, 6);
    K = (K * K.transpose()).eval();  // make it PSD

    const Eigen::MatrixXd analytic = expected_bkb(p, K, q);

    Rng rng(99);
    Eigen::MatrixXd mc = Eigen::MatrixXd::Zero(3, 3);
    const int samples = 400000;
    for (int s = 0; s < samples; ++s) {
        Eigen::MatrixXd bd = p.B;
        for (int i = 0; i < 3; ++i) {
            if (!rng.bernoulli(q(i))) bd.col(i).setZero();
        }
        mc += bd.transpose() * K * bd;
    }
    mc /= samples;
    CHECK((analytic - mc).cwiseAbs().maxCoeff() < 0.15);

    // The diagonal uses q, not q^2: with q=0.5 the two differ by a factor 2.
    Eigen::VectorXd qh = Eigen::VectorXd::Constant(3, 0.5);
    const Eigen::MatrixXd m = expected_bkb(p, K, qh);
    const Eigen::MatrixXd full = p.B.transpose() * K * p.B;
    CHECK(std::abs(m(0, 0) - 0.5 * full(0, 0)) < 1e-12);
    CHECK(std::abs(m(0, 1) - 0.25 * full(0, 1)) < 1e-12);
}

TEST_CASE("scalar backup matches the hand-derived dynamic program") {
    PlantModel p = scalar_plant(1.2, 1.0, 1.0, 1.0);
    Eigen::VectorXd q(1);
    q << 0.5;
    const Eigen::MatrixXd K = riccati_iterate(p, Eigen::MatrixXd::Identity(1, 1), q);
    const double expect = oracles::scalar_lossy_riccati_step(1.2, 1.0, 1.0, 1.0, 0.5, 1.0);
    CHECK(expect == doctest::Approx(2.2).epsilon(1e-12));
    CHECK(K(0, 0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("perfect delivery reduces to the classical discrete Riccati equation") {
    for (std::uint64_t seed : {21u, 22u, 23u}) {
        PlantModel p = random_plant(4, seed);
        const Eigen::VectorXd q = Eigen::VectorXd::Ones(4);
        RiccatiSolution sol = solve_steady_state(p, q);
        REQUIRE(sol.status == RiccatiStatus::Converged);
        const Eigen::MatrixXd ref = oracles::solve_dare_sda(p.A, p.B, p.W, p.R);
        CHECK((sol.K - ref).cwiseAbs().maxCoeff() / ref.norm() < 1e-7);
    }
}

TEST_CASE("steady-state cost matrix is symmetric positive definite") {
    PlantModel p = random_plant(4, 33);
    Eigen::VectorXd q = Eigen::VectorXd::Constant(4, 0.9);
    RiccatiSolution sol = solve_steady_state(p, q);
    REQUIRE(sol.status == RiccatiStatus::Converged);
    CHECK((sol.K - sol.K.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sol.K);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("cost matrix grows as delivery degrades") {
    PlantModel p = random_plant(4, 44);
    Eigen::VectorXd q_hi = Eigen::VectorXd::Constant(4, 0.95);
    Eigen::VectorXd q_lo = Eigen::VectorXd::Constant(4, 0.80);
    RiccatiSolution hi = solve_steady_state(p, q_hi);
    RiccatiSolution lo = solve_steady_state(p, q_lo);
    REQUIRE(hi.status == RiccatiStatus::Converged);
    REQUIRE(lo.status == RiccatiStatus::Converged);
    // K(q_lo) - K(q_hi) should be PSD: worse channels can only cost more.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lo.K - hi.K);
    CHECK(es.eigenvalues().minCoeff() > -1e-8);
}

TEST_CASE("scalar unstable system diverges below the critical delivery rate") {
    // For x+ = a x, divergence of the iteration sets in when (1-q) a^2 >= 1,
    // i.e. q < 1 - 1/a^2.
    const double a = 1.2;
    const double q_crit = 1.0 - 1.0 / (a * a);
    PlantModel p = scalar_plant(a, 1.0, 1.0, 1.0);

    Eigen::VectorXd q(1);
    q << q_crit + 0.05;
    RiccatiSolution above = solve_steady_state(p, q);
    CHECK(above.status == RiccatiStatus::Converged);

    q << q_crit - 0.05;
    RiccatiSolution below = solve_steady_state(p, q);
    CHECK(below.status == RiccatiStatus::Diverged);

    CHECK(steady_state_margin(p, Eigen::VectorXd::Constant(1, q_crit + 0.05)) < 1.0);
    CHECK(steady_state_margin(p, Eigen::VectorXd::Constant(1, q_crit - 0.05)) > 1.0);
}

TEST_CASE("finite-horizon fallback reproduces backward recursion from W") {
    PlantModel p = random_plant(3, 55);
    Eigen::VectorXd q = Eigen::VectorXd::Constant(3, 0.7);
    Eigen::MatrixXd K = p.W;
    for (int t = 0; t < 17; ++t) K = riccati_iterate(p, K, q);
    CHECK((finite_horizon_k(p, q, 17) - K).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("candidate controls zero unscheduled subsystems and match the scheduled solve") {
    PlantModel p = random_plant(3, 66);
    RiccatiSolution sol = solve_steady_state(p, Eigen::VectorXd::Ones(3));
    REQUIRE(sol.status == RiccatiStatus::Converged);

    Eigen::VectorXd q(3);
    q << 0.9, 0.0, 0.5;
    Rng rng(3);
    Eigen::VectorXd x(p.state_dim());
    for (int i = 0; i < x.size(); ++i) x(i) = rng.normal();

    const Eigen::VectorXd u = candidate_controls(p, sol.K, q, x);
    CHECK(u(1) == 0.0);
    CHECK(u(0) != 0.0);
    CHECK(u(2) != 0.0);

    // With every subsystem scheduled at q=1 this is the classical LQR input.
    const Eigen::VectorXd u_full = candidate_controls(p, sol.K, Eigen::VectorXd::Ones(3), x);
    const Eigen::MatrixXd gain =
        (p.R + p.B.transpose() * sol.K * p.B).ldlt().solve(p.B.transpose() * sol.K * p.A);
    CHECK((u_full + gain * x).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("schedule closure probabilities combine independent channels") {
    Eigen::VectorXd s(3);
    s << 0.9, 0.8, 0.5;
    // Channels 1 and 2 both serve subsystem 1; channel 3 serves subsystem 3.
    const Eigen::VectorXd q = closure_probs_for_action(3, {1, 1, 3}, s);
    CHECK(q(0) == doctest::Approx(1.0 - 0.1 * 0.2).epsilon(1e-15));
    CHECK(q(1) == 0.0);
    CHECK(q(2) == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS(closure_probs_for_action(2, {3, 1}, Eigen::VectorXd::Constant(2, 0.5)));
}

TEST_CASE("success estimator reports the prior until data arrives, then the window mean") {
    SuccessRateEstimator est(2, 4);
    CHECK(est.estimate(0) == 0.5);
    CHECK(est.estimate(1) == 0.5);

    est.record(0, true);
    CHECK(est.estimate(0) == 1.0);
    est.record(0, false);
    est.record(0, false);
    est.record(0, false);
    CHECK(est.estimate(0) == 0.25);

    // Window slides: a fifth observation evicts the oldest.
    est.record(0, false);
    CHECK(est.estimate(0) == 0.0);
    CHECK(est.estimate(1) == 0.5);  // untouched stream keeps the prior
}

TEST_CASE("shrinking the estimator window drops the oldest samples") {
    SuccessRateEstimator est(1, 6);
    for (int i = 0; i < 4; ++i) est.record(0, true);
    est.record(0, false);
    est.record(0, false);
    CHECK(est.estimate(0) == doctest::Approx(4.0 / 6.0));
    est.set_window(2);
    CHECK(est.estimate(0) == 0.0);
    est.set_window(3);
    est.record(0, true);
    CHECK(est.estimate(0) == doctest::Approx(1.0 / 3.0));
}
