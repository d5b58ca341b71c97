#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dira/channel.hpp"
#include "dira/rng.hpp"
#include "oracles.hpp"

using namespace dira;

TEST_CASE("identity transition matrix freezes the state") {
    MarkovChannel ch;
    ch.T = Eigen::MatrixXd::Identity(3, 3);
    ch.p = Eigen::VectorXd::Zero(3);
    ch.p(1) = 1.0;
    ch.e = Eigen::VectorXd::Zero(3);
    Rng rng(1);
    for (int i = 0; i < 100; ++i) CHECK(step_channel(ch, 1, rng) == 1);
}

TEST_CASE("permutation transition matrix alternates deterministically") {
    MarkovChannel ch;
    ch.T.resize(2, 2);
    ch.T << 0, 1, 1, 0;
    ch.p = Eigen::VectorXd::Constant(2, 0.5);
    ch.e = Eigen::VectorXd::Zero(2);
    Rng rng(1);
    int s = 0;
    for (int i = 0; i < 10; ++i) {
        s = step_channel(ch, s, rng);
        CHECK(s == (i % 2 == 0 ? 1 : 0));
    }
}

TEST_CASE("transmission outcome follows the per-state dropout rate") {
    MarkovChannel ch;
    ch.T = Eigen::MatrixXd::Identity(2, 2);
    ch.p = Eigen::VectorXd::Constant(2, 0.5);
    ch.e.resize(2);
    ch.e << 0.0, 1.0;
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        CHECK(sample_transmission(ch, 0, rng) == 1);
        CHECK(sample_transmission(ch, 1, rng) == 0);
    }

    ch.e(1) = 0.07;
    int hits = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) hits += sample_transmission(ch, 1, rng);
    CHECK(std::abs(static_cast<double>(hits) / n - 0.93) < 0.01);
}

TEST_CASE("stationary distribution matches closed forms and rejects reducible chains") {
    Eigen::MatrixXd sym(2, 2);
    sym << 0.7, 0.3, 0.3, 0.7;
    const Eigen::VectorXd p1 = stationary_distribution(sym);
    CHECK(std::abs(p1(0) - 0.5) < 1e-12);

    const double g = 0.05, b = 0.25;
    Eigen::MatrixXd T(2, 2);
    T << 1 - g, g, b, 1 - b;
    const Eigen::VectorXd p2 = stationary_distribution(T);
    const Eigen::Vector2d expect = oracles::two_state_stationary(g, b);
    CHECK((p2 - expect).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS(stationary_distribution(Eigen::MatrixXd::Identity(2, 2)));
}

TEST_CASE("gilbert-elliot presets hit the requested average success") {
    for (double target : {0.99, 0.93}) {
        MarkovChannel ch = gilbert_elliot(target);
        CHECK(std::abs(average_success(ch) - target) < 1e-10);
        const Eigen::Vector2d p = oracles::two_state_stationary(
            1.0 / 20.0, 1.0 / 4.0);
        CHECK((ch.p - Eigen::VectorXd(p)).cwiseAbs().maxCoeff() < 1e-12);
    }

    MarkovChannel lossless;
    lossless.T = Eigen::MatrixXd::Identity(1, 1);
    lossless.p = Eigen::VectorXd::Ones(1);
    lossless.e = Eigen::VectorXd::Zero(1);
    CHECK(average_success(lossless) == 1.0);
}

TEST_CASE("unreachable average success is rejected") {
    // With 20-step good sojourns and 4-step bad sojourns the good state holds
    // 5/6 of the mass; pushing the average above what the good state alone can
    // deliver forces e_bad < 0.
    CHECK_THROWS(gilbert_elliot(0.9999));
    CHECK_THROWS(gilbert_elliot(1.0));
    CHECK_THROWS(gilbert_elliot(0.0));
    // Very low targets force e_bad > 1.
    CHECK_THROWS(gilbert_elliot(0.05));
}

TEST_CASE("long-run state frequencies match the stationary solve") {
    for (double target : {0.99, 0.93}) {
        MarkovChannel ch = gilbert_elliot(target);
        Rng rng(42);
        int s = sample_initial_state(ch, rng);
        const int steps = 1000000;
        std::vector<int> visits(ch.num_states(), 0);
        for (int i = 0; i < steps; ++i) {
            ++visits[s];
            s = step_channel(ch, s, rng);
        }
        for (int d = 0; d < ch.num_states(); ++d) {
            const double freq = static_cast<double>(visits[d]) / steps;
            // Markov samples are correlated, so widen the i.i.d. multinomial
            // band by the chain's integrated autocorrelation time.
            const double slack = 4.0;
            CHECK(std::abs(freq - ch.p(d)) <
                  slack * oracles::multinomial_3sigma(ch.p(d), steps));
        }
    }
}

TEST_CASE("empirical average success tracks the analytic value") {
    MarkovChannel ch = gilbert_elliot(0.93);
    Rng rng(9);
    int s = sample_initial_state(ch, rng);
    const int steps = 1000000;
    long hits = 0;
    for (int i = 0; i < steps; ++i) {
        hits += sample_transmission(ch, s, rng);
        s = step_channel(ch, s, rng);
    }
    CHECK(std::abs(static_cast<double>(hits) / steps - average_success(ch)) < 0.005);
}

TEST_CASE("distinct channels driven by split seeds stay uncorrelated") {
    MarkovChannel ch = gilbert_elliot(0.93);
    Rng rng_a(derive_seed(1234, 0));
    Rng rng_b(derive_seed(1234, 1));
    int sa = sample_initial_state(ch, rng_a);
    int sb = sample_initial_state(ch, rng_b);
    const int steps = 100000;
    double sum_a = 0, sum_b = 0, sum_ab = 0;
    std::vector<int> da(steps), db(steps);
    for (int i = 0; i < steps; ++i) {
        da[i] = sample_transmission(ch, sa, rng_a);
        db[i] = sample_transmission(ch, sb, rng_b);
        sa = step_channel(ch, sa, rng_a);
        sb = step_channel(ch, sb, rng_b);
        sum_a += da[i];
        sum_b += db[i];
        sum_ab += da[i] * db[i];
    }
    const double ma = sum_a / steps, mb = sum_b / steps;
    double cov = sum_ab / steps - ma * mb;
    double var_a = ma - ma * ma, var_b = mb - mb * mb;
    const double corr = cov / std::sqrt(var_a * var_b);
    CHECK(std::abs(corr) < 0.02);
}

TEST_CASE("identical seeds reproduce identical trajectories") {
    MarkovChannel ch = gilbert_elliot(0.99);
    Rng r1(555), r2(555);
    int s1 = sample_initial_state(ch, r1);
    int s2 = sample_initial_state(ch, r2);
    for (int i = 0; i < 1000; ++i) {
        CHECK(s1 == s2);
        CHECK(sample_transmission(ch, s1, r1) == sample_transmission(ch, s2, r2));
        s1 = step_channel(ch, s1, r1);
        s2 = step_channel(ch, s2, r2);
    }
}

TEST_CASE("default channel mix puts reliable channels first") {
    auto set = default_channel_set(6);
    REQUIRE(set.size() == 6);
    CHECK(std::abs(average_success(set[0]) - 0.99) < 1e-10);
    CHECK(std::abs(average_success(set[1]) - 0.99) < 1e-10);
    for (int j = 2; j < 6; ++j) {
        CHECK(std::abs(average_success(set[j]) - 0.93) < 1e-10);
    }
    auto three = default_channel_set(3);
    CHECK(std::abs(average_success(three[0]) - 0.99) < 1e-10);
    CHECK(std::abs(average_success(three[1]) - 0.93) < 1e-10);
}
