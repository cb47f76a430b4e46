#include "kroots/verify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kroots/convex_mixed_volume.hpp"
#include "kroots/errors.hpp"
#include "kroots/kernel_geometry.hpp"
#include "kroots/monte_carlo.hpp"
#include "kroots/root_expectation.hpp"

namespace kroots {

int Draw::uniform_int(int lo, int hi) {
    const auto range = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(bits() % range);
}

ExpSumSpace random_space(Draw& draw, int n, int max_terms, int max_exponent) {
    if (n < 1 || n > 3) throw UnsupportedError("random spaces are generated for n <= 3");
    for (;;) {
        const int count = draw.uniform_int(n + 1, std::max(n + 1, max_terms));
        std::vector<Term> terms;
        for (int k = 0; k < count; ++k) {
            Exponent e(n);
            for (auto& c : e) c = draw.uniform_int(-max_exponent, max_exponent);
            const bool dup = std::any_of(terms.begin(), terms.end(), [&](const Term& t) { return t.exponent == e; });
            if (!dup) terms.push_back({e, std::exp(draw.uniform(std::log(0.1), std::log(10.0)))});
        }
        if (static_cast<int>(terms.size()) < n + 1) continue;
        std::vector<Exponent> pts;
        for (const auto& t : terms) pts.push_back(t.exponent);
        if (lattice_normalized_volume(n, pts) == 0) continue;
        return ExpSumSpace(n, std::move(terms));
    }
}

LatticePolytope random_polygon(Draw& draw, int span) {
    for (;;) {
        const int count = draw.uniform_int(3, 6);
        std::vector<Exponent> pts;
        for (int k = 0; k < count; ++k) pts.push_back({draw.uniform_int(0, span), draw.uniform_int(0, span)});
        if (lattice_normalized_volume(2, pts) > 0) return LatticePolytope(2, std::move(pts));
    }
}

Eigen::MatrixXd random_covariance(Draw& draw, int n) {
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = draw.normal();
    Eigen::MatrixXd c = b * b.transpose();
    c.diagonal().array() += 0.1;
    return c;
}

bool SuiteReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

namespace {

Check upper_bound_check(std::string name, double value, double bound) {
    return {std::move(name), value, 0.0, bound, std::isfinite(value) && value < bound};
}

void identities(SuiteReport& r) {
    for (int n = 1; n <= r.size; ++n)
        r.checks.push_back(upper_bound_check("identity_n" + std::to_string(n), std::fabs(tech_identity_residual(n)),
                                             1e-12));
}

// Second differences of phi against D^2 phi = 2 G, max-entry error over
// 1 + the largest entry of 2 G.
double hessian_error(const ExpSumSpace& s, const Eigen::VectorXd& x) {
    const int n = s.dim();
    const double h = 1e-4;
    const KernelGeometry geo(s);
    const Eigen::MatrixXd exact = 2.0 * geo.metric(x);
    double worst = 0.0;
    auto phi = [&](int i, double di, int j, double dj) {
        Eigen::VectorXd y = x;
        y(i) += di;
        y(j) += dj;
        return geo.log_kernel_norm(y);
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double fd =
                (phi(i, h, j, h) - phi(i, h, j, -h) - phi(i, -h, j, h) + phi(i, -h, j, -h)) / (4.0 * h * h);
            worst = std::max(worst, std::fabs(fd - exact(i, j)));
        }
    return worst / (1.0 + exact.cwiseAbs().maxCoeff());
}

void additivity(SuiteReport& r) {
    Draw draw(r.seed, 1);
    double add_worst = 0.0;
    double hess_worst = 0.0;
    for (int k = 0; k < r.size; ++k) {
        const int n = 1 + k % 3;
        const ExpSumSpace b = random_space(draw, n);
        const ExpSumSpace c = random_space(draw, n);
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x(i) = draw.uniform(-3.0, 3.0);
        const Eigen::MatrixXd diff = metric(aronszajn_product(b, c), x) - metric(b, x) - metric(c, x);
        add_worst = std::max(add_worst, diff.cwiseAbs().maxCoeff());
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y(i) = draw.uniform(-1.0, 1.0);
        hess_worst = std::max(hess_worst, hessian_error(b, y));
    }
    r.checks.push_back(upper_bound_check("metric_additivity_max_entry", add_worst, 1e-9));
    r.checks.push_back(upper_bound_check("hessian_relative_error", hess_worst, 1e-5));
}

void scaling(SuiteReport& r) {
    Draw draw(r.seed, 2);
    for (int k = 0; k < r.size; ++k) {
        const int n = 1 + k % 2;
        std::vector<ExpSumSpace> spaces;
        std::vector<int> degrees;
        double expected = 1.0;
        for (int i = 0; i < n; ++i) {
            spaces.push_back(random_space(draw, n, 5, 2));
            degrees.push_back(draw.uniform_int(1, 4));
            expected *= degrees.back();
        }
        expected = std::sqrt(expected);
        const auto c = scaling_check(spaces, degrees, DomainUnion::cube(n, -10.0, 10.0));
        Check chk{"scaling_" + std::to_string(k), c.ratio, expected, 5e-3 * expected, false};
        chk.passed = std::fabs(c.ratio - expected) <= chk.tolerance;
        r.checks.push_back(std::move(chk));
    }
}

void subadd(SuiteReport& r) {
    Draw draw(r.seed, 3);
    for (int k = 0; k < r.size; ++k) {
        const int n = 1 + k % 2;
        std::vector<ExpSumSpace> fixed;
        for (int i = 0; i + 1 < n; ++i) fixed.push_back(random_space(draw, n, 5, 2));
        const ExpSumSpace g = random_space(draw, n, 5, 2);
        const ExpSumSpace h = random_space(draw, n, 5, 2);
        const auto c = subadditivity_check(fixed, g, h, DomainUnion::cube(n, -10.0, 10.0));
        // Slack is reported as the value; it must stay above -1e-6.
        r.checks.push_back({"subadd_" + std::to_string(k), c.slack, 0.0, 1e-6, c.slack >= -1e-6});
    }
}

Check abs_det_check(std::string name, const std::vector<Eigen::MatrixXd>& covs, std::size_t samples,
                    std::uint64_t seed) {
    const double closed = expected_abs_det_gaussian(covs);
    const auto mc = estimate_abs_det(covs, samples, seed);
    const double band = 3.0 * mc.standard_error;
    return {std::move(name), mc.mean, closed, band, std::fabs(mc.mean - closed) <= band};
}

void vitale(SuiteReport& r) {
    constexpr std::size_t kSamples = 1000000;
    const std::vector<Eigen::MatrixXd> identity(2, Eigen::MatrixXd::Identity(2, 2));
    r.checks.push_back(abs_det_check("abs_det_identity_n2", identity, kSamples, r.seed));
    Draw draw(r.seed, 4);
    for (int k = 0; k < r.size; ++k) {
        const int n = 1 + k % 3;
        std::vector<Eigen::MatrixXd> covs;
        for (int i = 0; i < n; ++i) covs.push_back(random_covariance(draw, n));
        r.checks.push_back(abs_det_check("abs_det_" + std::to_string(k), covs, kSamples, r.seed + 1 + k));
    }
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"identities", "additivity", "scaling", "subadd", "vitale"};
    return names;
}

SuiteReport run_suite(std::string_view suite, std::uint64_t seed, int size) {
    SuiteReport r;
    r.suite = std::string(suite);
    r.seed = seed;
    if (suite == "identities") {
        r.size = size > 0 ? std::min(size, 30) : 12;
        identities(r);
    } else if (suite == "additivity") {
        r.size = size > 0 ? size : 100;
        additivity(r);
    } else if (suite == "scaling") {
        r.size = size > 0 ? size : 20;
        scaling(r);
    } else if (suite == "subadd") {
        r.size = size > 0 ? size : 50;
        subadd(r);
    } else if (suite == "vitale") {
        r.size = size > 0 ? size : 20;
        vitale(r);
    } else {
        throw ValidationError("unknown verification suite \"" + std::string(suite) + "\"");
    }
    return r;
}

OrderedJson suite_report_json(const SuiteReport& report) {
    OrderedJson doc;
    doc["suite"] = report.suite;
    doc["seed"] = report.seed;
    doc["size"] = report.size;
    doc["passed"] = report.passed();
    OrderedJson checks = OrderedJson::array();
    for (const auto& c : report.checks) {
        OrderedJson j;
        j["name"] = c.name;
        j["value"] = c.value;
        j["reference"] = c.reference;
        j["tolerance"] = c.tolerance;
        j["passed"] = c.passed;
        checks.push_back(std::move(j));
    }
    doc["checks"] = std::move(checks);
    return doc;
}

}  // namespace kroots
