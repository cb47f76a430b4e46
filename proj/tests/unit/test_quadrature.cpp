#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "kroots/parallel.hpp"
#include "kroots/quadrature.hpp"

using namespace kroots;

TEST_SUITE("quadrature") {
    TEST_CASE("Gauss-Legendre integrates polynomials of degree 2k - 1 exactly") {
        for (int k : {1, 2, 5, 16, 32, 64}) {
            const auto rule = gauss_legendre(k);
            REQUIRE(rule.nodes.size() == static_cast<std::size_t>(k));
            for (int p = 0; p <= 2 * k - 1; ++p) {
                double q = 0.0;
                for (int i = 0; i < k; ++i) q += rule.weights[i] * std::pow(rule.nodes[i], p);
                const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
                CHECK(q == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
            }
        }
    }

    TEST_CASE("nodes are symmetric and inside the interval") {
        const auto rule = gauss_legendre(33);
        for (int i = 0; i < 33; ++i) {
            CHECK(std::fabs(rule.nodes[i]) < 1.0);
            CHECK(rule.nodes[i] == doctest::Approx(-rule.nodes[32 - i]).epsilon(1e-15).scale(1.0));
            CHECK(rule.weights[i] > 0.0);
        }
    }

    TEST_CASE("smooth integrand") {
        const auto rule = gauss_legendre(20);
        double q = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) q += rule.weights[i] * std::exp(rule.nodes[i]);
        CHECK(q == doctest::Approx(std::exp(1.0) - std::exp(-1.0)).epsilon(1e-15));
    }

    TEST_CASE("parallel_for covers every index once and rethrows") {
        std::vector<int> hits(1000, 0);
        parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
        for (int h : hits) CHECK(h == 1);
        CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                            if (i == 7) throw std::runtime_error("boom");
                        }),
                        std::runtime_error);
        CHECK(worker_count() >= 1);
    }
}
