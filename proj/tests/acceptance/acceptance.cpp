// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "kroots/convex_mixed_volume.hpp"
#include "kroots/monte_carlo.hpp"
#include "kroots/root_expectation.hpp"
#include "kroots/verify.hpp"

using namespace kroots;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
    bool passed;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

Outcome volume_identity() {
    double worst = 0.0;
    for (int n = 1; n <= 12; ++n) worst = std::max(worst, std::fabs(tech_identity_residual(n)));
    return {worst < 1e-12, fmt("max |residual| %.2e over n = 1..12", worst)};
}

Outcome kostlan_half_powers() {
    bool ok = true;
    std::string detail;
    for (int n = 1; n <= 2; ++n) {
        const std::vector<ExpSumSpace> s(n, kostlan_space(n));
        const auto e = expected_roots(s, DomainUnion::cube(n, -30, 30));
        const double target = std::ldexp(1.0, -n);
        ok = ok && std::fabs(e.value - target) <= 1e-3;
        if (!detail.empty()) detail += ", ";
        detail += fmt("n=%.0f: %.9f (target %.4f)", n, e.value, target);
    }
    return {ok, detail};
}

Outcome kss_sqrt_d() {
    bool ok = true;
    std::string detail;
    const auto real_line = SignedDomain::all_orthants(DomainUnion(1, {{Eigen::VectorXd::Constant(1, std::exp(-30.0)),
                                                                       Eigen::VectorXd::Constant(1, std::exp(30.0))}}));
    for (int d : {2, 3, 5}) {
        const std::vector<ExpSumSpace> s{power(kostlan_space(1), d)};
        const double target = std::sqrt(d);
        const double quad = expected_roots_signed(s, real_line).value;
        const auto mc = estimate_expected_roots_signed(s, real_line, 20000, kSeed + d);
        const double z = (mc.mean - target) / mc.standard_error;
        ok = ok && std::fabs(quad - target) <= 2e-3 && std::fabs(z) <= 3.0;
        if (!detail.empty()) detail += ", ";
        detail += fmt("d=%.0f quad %.6f", d, quad) + fmt(" mc %.4f z=%+.2f", mc.mean, z);
    }
    return {ok, detail};
}

Outcome suite_outcome(const char* name, int size, const std::function<std::string(const SuiteReport&)>& summary) {
    const auto r = run_suite(name, kSeed, size);
    int failed = 0;
    for (const auto& c : r.checks) failed += !c.passed;
    return {r.passed(), summary(r) + fmt(" (%.0f/%.0f checks pass)", r.checks.size() - failed, r.checks.size())};
}

Outcome scaling_law() {
    return suite_outcome("scaling", 20, [](const SuiteReport& r) {
        double worst = 0.0;
        for (const auto& c : r.checks) worst = std::max(worst, std::fabs(c.value / c.reference - 1.0));
        return fmt("20 random tuples, worst relative ratio error %.2e", worst);
    });
}

Outcome metric_additivity() {
    return suite_outcome("additivity", 100, [](const SuiteReport& r) {
        return fmt("additivity max entry %.2e, Hessian relative %.2e", r.checks[0].value, r.checks[1].value);
    });
}

Outcome vitale() {
    return suite_outcome("vitale", 20, [](const SuiteReport& r) {
        const auto& id = r.checks[0];
        double worst = 0.0;
        for (const auto& c : r.checks) worst = std::max(worst, std::fabs(c.value - c.reference) / (c.tolerance / 3.0));
        return fmt("identity n=2: closed %.6f vs MC %.6f; worst |z| %.2f over 21 tuples", id.reference, id.value, worst);
    });
}

Outcome subadditivity() {
    return suite_outcome("subadd", 50, [](const SuiteReport& r) {
        double worst = INFINITY;
        for (const auto& c : r.checks) worst = std::min(worst, c.value);
        return fmt("50 random triples, minimum slack %.3e", worst);
    });
}

Outcome bkk_homomorphism() {
    Draw draw(kSeed, 8);
    int exact = 0;
    for (int k = 0; k < 20; ++k) {
        const auto p = random_polygon(draw);
        const auto q = random_polygon(draw);
        const std::int64_t d1 = draw.uniform_int(1, 3), d2 = draw.uniform_int(1, 3);
        const std::vector<LatticePolytope> base{p, q}, dilated{p.dilate(d1), q.dilate(d2)};
        exact += generic_count(dilated) == static_cast<double>(d1 * d2) * generic_count(base);
    }
    return {exact == 20, fmt("%.0f/20 polygon pairs exact", exact)};
}

Outcome oracle_cross_validation() {
    Draw draw(kSeed, 9);
    int agree = 0;
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        const std::vector<ExpSumSpace> s{random_space(draw, 1, 5, 3)};
        const auto dom = DomainUnion::cube(1, -10, 10);
        const auto quad = expected_roots(s, dom);
        const auto mc = estimate_expected_roots(s, dom, 10000, kSeed + 100 + k);
        const double z = (mc.mean - quad.value) / std::hypot(mc.standard_error, quad.error_estimate);
        worst = std::max(worst, std::fabs(z));
        agree += std::fabs(z) <= 3.0;
    }
    for (int k = 0; k < 3; ++k) {
        const std::vector<ExpSumSpace> s{random_space(draw, 2, 5, 2), random_space(draw, 2, 5, 2)};
        const auto dom = DomainUnion::cube(2, -4, 4);
        const auto quad = expected_roots(s, dom);
        const auto mc = estimate_expected_roots(s, dom, 2000, kSeed + 200 + k);
        const double z = (mc.mean - quad.value) / std::hypot(mc.standard_error, quad.error_estimate);
        worst = std::max(worst, std::fabs(z));
        agree += std::fabs(z) <= 3.0;
    }
    return {agree == 13, fmt("%.0f/13 spaces within 3 standard errors, worst |z| %.2f", agree, worst)};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "volume identity", 1e-3, volume_identity},
        {2, "Kostlan 2^-n", 10, kostlan_half_powers},
        {3, "Kostlan-Shub-Smale sqrt(d)", 120, kss_sqrt_d},
        {4, "scaling law", 300, scaling_law},
        {5, "metric additivity", 10, metric_additivity},
        {6, "Vitale/Weil expected |det|", 60, vitale},
        {7, "sub-additivity", 300, subadditivity},
        {8, "BKK homomorphism", 1, bkk_homomorphism},
        {9, "oracle cross-validation", 600, oracle_cross_validation},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.passed && in_time;
        failures += !pass;
        std::printf("[%s] %d %s: %s; %.3f s (budget %g s%s)\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                    o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", exceeded");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
