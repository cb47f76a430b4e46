#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kroots/counter_rng.hpp"
#include "kroots/errors.hpp"
#include "kroots/monte_carlo.hpp"

using namespace kroots;

namespace {

ExpSumSpace space_1d() {
    return ExpSumSpace(1, {{{-2}, 0.5}, {{0}, 1.0}, {{1}, 2.0}, {{3}, 1.0}, {{4}, 0.25}});
}

ExpSumSpace space_2d() {
    return ExpSumSpace(2, {{{0, 0}, 1.0}, {{1, 0}, 2.0}, {{0, 1}, 2.0}, {{2, 1}, 0.5}, {{1, 2}, 0.5}});
}

SampledSystem fixed(std::vector<ExpSumSpace> spaces, std::vector<Eigen::VectorXd> f) {
    return SampledSystem{std::move(spaces), std::move(f)};
}

DomainBox box(double lo, double hi, int n = 1) {
    return {Eigen::VectorXd::Constant(n, lo), Eigen::VectorXd::Constant(n, hi)};
}

}  // namespace

TEST_SUITE("monte_carlo") {
    TEST_CASE("counter rng matches the reference replica") {
        // values produced by tests/oracles/counter_rng.py
        const CounterRng rng(42);
        CHECK(rng.bits(0, 0, 0) == 2403427474417783062ULL);
        CHECK(rng.bits(3, 1, 2, 1) == 3346979386904415153ULL);
        CHECK(rng.normal(0, 0, 0) == doctest::Approx(-1.313915861138752).epsilon(1e-14));
        CHECK(rng.normal(7, 2, 5) == doctest::Approx(0.7152448249609518).epsilon(1e-14));
    }

    TEST_CASE("normal draws have unit moments") {
        const CounterRng rng(3);
        const int m = 100000;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < m; ++i) {
            const double z = rng.normal(i, 0, 0);
            s += z;
            s2 += z * z;
        }
        const double mean = s / m;
        CHECK(std::fabs(mean) < 0.02);
        CHECK(std::fabs(s2 / m - mean * mean - 1.0) < 0.02);
    }

    TEST_CASE("sample_system is deterministic with one coefficient per term") {
        const std::vector<ExpSumSpace> spaces{space_2d(), kostlan_space(2)};
        const auto a = sample_system(spaces, 9, 4);
        const auto b = sample_system(spaces, 9, 4);
        const auto c = sample_system(spaces, 9, 5);
        REQUIRE(a.coefficients.size() == 2);
        CHECK(a.coefficients[0].size() == 5);
        CHECK(a.coefficients[1].size() == 3);
        CHECK(a.coefficients[0] == b.coefficients[0]);
        CHECK(a.coefficients[1] == b.coefficients[1]);
        CHECK(a.coefficients[0] != c.coefficients[0]);
    }

    TEST_CASE("evaluate_system on hand-made coefficients") {
        const auto k1 = kostlan_space(1);
        Eigen::VectorXd x(1);
        x << 0.0;
        CHECK(evaluate_system(fixed({k1}, {Eigen::Vector2d(-1, 1)}), x)(0) == doctest::Approx(0.0).scale(1.0));
        CHECK(evaluate_system(fixed({k1}, {Eigen::Vector2d(1, 1)}), x)(0) == doctest::Approx(std::sqrt(2.0)));
        x << 700.0;  // no overflow in the normalized residual
        CHECK(evaluate_system(fixed({k1}, {Eigen::Vector2d(-1, 1)}), x)(0) == doctest::Approx(1.0));
    }

    TEST_CASE("sign profile matches the long double oracle") {
        const std::vector<ExpSumSpace> s{space_1d()};
        const auto sys = sample_system(s, 2024, 0);
        const int points = 1000000;
        int positive = 0, changes = 0;
        double prev = 0.0;
        for (int i = 0; i < points; ++i) {
            Eigen::VectorXd x(1);
            x << -5.0 + 10.0 * i / (points - 1);
            const double v = evaluate_system(sys, x)(0);
            positive += v > 0;
            if (i > 0) changes += (v > 0) != (prev > 0);
            prev = v;
        }
        CHECK(positive == 653013);
        CHECK(changes == 2);
    }

    TEST_CASE("count_roots_1d on closed-form cases") {
        const auto k1 = kostlan_space(1);
        CHECK(count_roots_1d(fixed({k1}, {Eigen::Vector2d(-1, 1)}), box(-1, 1)).count == 1);
        CHECK(count_roots_1d(fixed({k1}, {Eigen::Vector2d(1, 1)}), box(-1, 1)).count == 0);
        // root at x = 0 exactly belongs to [0, 1) only
        CHECK(count_roots_1d(fixed({k1}, {Eigen::Vector2d(-1, 1)}), box(-1, 0)).count == 0);
        CHECK(count_roots_1d(fixed({k1}, {Eigen::Vector2d(-1, 1)}), box(0, 1)).count == 1);
        const auto r = count_roots_1d(fixed({k1}, {Eigen::Vector2d(-2, 1)}), box(-3, 3));
        REQUIRE(r.roots.size() == 1);
        CHECK(r.roots[0](0) == doctest::Approx(std::log(2.0)).epsilon(1e-10));
    }

    TEST_CASE("count_roots_1d agrees with the 10^7-point oracle") {
        const std::vector<ExpSumSpace> s{space_1d()};
        const int expected[] = {2, 1, 2, 1, 0};
        for (int k = 0; k < 5; ++k) {
            CAPTURE(k);
            CHECK(count_roots_1d(sample_system(s, 2024, k), box(-10, 10)).count == expected[k]);
        }
    }

    TEST_CASE("1D counts are additive over adjacent intervals") {
        const std::vector<ExpSumSpace> s{space_1d()};
        for (int k = 0; k < 20; ++k) {
            const auto sys = sample_system(s, 77, k);
            CHECK(count_roots_1d(sys, box(-10, 10)).count ==
                  count_roots_1d(sys, box(-10, 0.3)).count + count_roots_1d(sys, box(0.3, 10)).count);
        }
    }

    TEST_CASE("count_roots_2d solves a linear system") {
        // 1 + X - 2Y = 0 and -3 + X + Y = 0  =>  X = 5/3, Y = 4/3
        const auto k2 = kostlan_space(2);  // terms (0,0), (0,1), (1,0)
        const auto sys = fixed({k2, k2}, {Eigen::Vector3d(1, -2, 1), Eigen::Vector3d(-3, 1, 1)});
        const auto r = count_roots_2d(sys, box(-3, 3, 2));
        REQUIRE(r.count == 1);
        CHECK(r.roots[0](0) == doctest::Approx(std::log(5.0 / 3.0)).epsilon(1e-8));
        CHECK(r.roots[0](1) == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-8));
        // all-positive coefficients: no positive solution
        CHECK(count_roots_2d(fixed({k2, k2}, {Eigen::Vector3d(1, 2, 1), Eigen::Vector3d(3, 1, 1)}), box(-3, 3, 2))
                  .count == 0);
    }

    TEST_CASE("count_roots_2d agrees with the 4096^2 grid oracle") {
        const auto k2 = kostlan_space(2);
        const std::vector<ExpSumSpace> kk{k2, k2};
        const int kostlan[] = {0, 0, 1, 1, 0};
        for (int k = 0; k < 5; ++k) {
            CAPTURE(k);
            CHECK(count_roots_2d(sample_system(kk, 11, k), box(-6, 6, 2)).count == kostlan[k]);
        }
        const std::vector<ExpSumSpace> ss{space_2d(), space_2d()};
        const int general[] = {0, 0, 1, 1};
        for (int k = 0; k < 4; ++k) {
            CAPTURE(k);
            CHECK(count_roots_2d(sample_system(ss, 5, k), box(-4, 4, 2)).count == general[k]);
        }
    }

    TEST_CASE("estimate_expected_roots recovers the Kostlan value") {
        const std::vector<ExpSumSpace> s{kostlan_space(1)};
        const auto e = estimate_expected_roots(s, DomainUnion::cube(1, -30, 30), 20000, 1);
        CHECK(e.samples == 20000);
        CHECK(std::fabs(e.mean - 0.5) <= 3.0 * e.standard_error);
        const auto again = estimate_expected_roots(s, DomainUnion::cube(1, -30, 30), 20000, 1);
        CHECK(again.mean == e.mean);
    }

    TEST_CASE("signed estimate of a degree-2 polynomial") {
        const std::vector<ExpSumSpace> s{power(kostlan_space(1), 2)};
        const auto w = SignedDomain::all_orthants(
            DomainUnion(1, {{Eigen::VectorXd::Constant(1, std::exp(-30.0)), Eigen::VectorXd::Constant(1, std::exp(30.0))}}));
        const auto e = estimate_expected_roots_signed(s, w, 20000, 2);
        CHECK(std::fabs(e.mean - std::sqrt(2.0)) <= 3.0 * e.standard_error);
    }

    TEST_CASE("a single-term space has no roots") {
        const std::vector<ExpSumSpace> s{ExpSumSpace(1, {{{2}, 1.0}})};
        const auto e = estimate_expected_roots(s, DomainUnion::cube(1, -5, 5), 500, 3);
        CHECK(e.mean == 0.0);
        CHECK(e.standard_error == 0.0);
    }

    TEST_CASE("dimension three is unsupported") {
        const std::vector<ExpSumSpace> s(3, kostlan_space(3));
        CHECK_THROWS_AS(estimate_expected_roots(s, DomainUnion::cube(3, -1, 1), 10, 1), UnsupportedError);
    }

    TEST_CASE("estimate_abs_det closed forms") {
        const std::vector<Eigen::MatrixXd> one{Eigen::MatrixXd::Identity(1, 1)};
        const auto e1 = estimate_abs_det(one, 100000, 4);
        CHECK(std::fabs(e1.mean - std::sqrt(2.0 / std::numbers::pi)) <= 3.0 * e1.standard_error);

        const std::vector<Eigen::MatrixXd> two{Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)};
        const auto e2 = estimate_abs_det(two, 100000, 5);
        CHECK(std::fabs(e2.mean - 1.0) <= 3.0 * e2.standard_error);

        // scaling row i's covariance by s^2 scales |det| by s, sample by sample
        const std::vector<Eigen::MatrixXd> scaled{4.0 * Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)};
        const auto e3 = estimate_abs_det(scaled, 100000, 5);
        CHECK(e3.mean == doctest::Approx(2.0 * e2.mean).epsilon(1e-12));
    }
}
