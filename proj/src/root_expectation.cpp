#include "kroots/root_expectation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <set>
#include <string>

#include "kroots/convex_mixed_volume.hpp"
#include "kroots/errors.hpp"
#include "kroots/parallel.hpp"
#include "kroots/quadrature.hpp"

namespace kroots {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

double small_det(const double* g, int n) {
    switch (n) {
        case 1:
            return g[0];
        case 2:
            return g[0] * g[3] - g[1] * g[2];
        case 3:
            return g[0] * (g[4] * g[8] - g[5] * g[7]) - g[1] * (g[3] * g[8] - g[5] * g[6]) +
                   g[2] * (g[3] * g[7] - g[4] * g[6]);
        default:
            throw UnsupportedError("density is implemented up to dimension 3");
    }
}

int common_dim(std::span<const ExpSumSpace> spaces) {
    if (spaces.empty()) throw ValidationError("need at least one space");
    const int n = static_cast<int>(spaces.size());
    for (const auto& s : spaces)
        if (s.dim() != n)
            throw ValidationError("a system of " + std::to_string(n) + " equations needs spaces of dimension " +
                                  std::to_string(n) + ", got dimension " + std::to_string(s.dim()));
    if (n > 3) throw UnsupportedError("expected root counts are implemented up to dimension 3");
    return n;
}

void check_config(const QuadratureConfig& cfg) {
    if (cfg.nodes_per_axis < 1 || cfg.subdivisions < 1 || cfg.mv_grid < 0)
        throw ValidationError("quadrature configuration must be positive");
}

// Integrand of the expected-root formula for a fixed tuple of spaces.
class DensityEvaluator {
public:
    DensityEvaluator(std::span<const ExpSumSpace> spaces, const QuadratureConfig& cfg, bool force_mixed)
        : n_(common_dim(spaces)), mv_grid_(cfg.mv_grid) {
        equal_ = !force_mixed && std::all_of(spaces.begin(), spaces.end(),
                                             [&](const ExpSumSpace& s) { return s == spaces[0]; });
        for (const auto& s : spaces) geometry_.emplace_back(s);
        equal_prefactor_ = factorial(n_) * ball_volume(n_) / std::pow(kTwoPi, n_);
        mixed_prefactor_ = factorial(n_) / std::pow(kTwoPi, 0.5 * n_);
        if (!equal_ && n_ == 3) grid_ = std::make_unique<GeodesicGrid>(mv_grid_);
    }

    int dim() const { return n_; }

    double operator()(std::span<const double> x) const {
        double g[9];
        if (equal_ || n_ == 1) {
            geometry_[0].metric_into(x, {g, static_cast<std::size_t>(n_ * n_)});
            return equal_prefactor_ * std::sqrt(std::max(0.0, small_det(g, n_)));
        }
        if (n_ == 2 && mv_grid_ == 0) {
            double h[4];
            geometry_[0].metric_into(x, {g, 4});
            geometry_[1].metric_into(x, {h, 4});
            const Eigen::Matrix2d m1 = Eigen::Map<const Eigen::Matrix2d>(g) / kTwoPi;
            const Eigen::Matrix2d m2 = Eigen::Map<const Eigen::Matrix2d>(h) / kTwoPi;
            return mixed_prefactor_ * mixed_area_closed_form(m1, m2);
        }
        std::vector<EllipsoidBody> bodies;
        bodies.reserve(n_);
        for (const auto& geo : geometry_) {
            Eigen::MatrixXd m(n_, n_);
            geo.metric_into(x, {m.data(), static_cast<std::size_t>(n_ * n_)});
            bodies.emplace_back(m / kTwoPi);
        }
        const double mv = n_ == 3 ? grid_->mixed_volume(bodies)
                                  : mixed_volume_ellipsoids(bodies, MixedVolumeOptions{mv_grid_});
        return mixed_prefactor_ * mv;
    }

private:
    int n_;
    int mv_grid_;
    bool equal_ = false;
    double equal_prefactor_ = 0.0;
    double mixed_prefactor_ = 0.0;
    std::vector<KernelGeometry> geometry_;
    std::unique_ptr<GeodesicGrid> grid_;
};

// Tensor Gauss-Legendre over every panel of every box, at orders k and k/2.
// Panels are independent tasks; the reduction runs in panel order.
template <class Integrand>
Estimate integrate(const Integrand& f, int n, const DomainUnion& domain, const QuadratureConfig& cfg) {
    check_config(cfg);
    if (domain.dim() != n)
        throw ValidationError("domain has dimension " + std::to_string(domain.dim()) + ", expected " +
                              std::to_string(n));
    const GaussLegendreRule full = gauss_legendre(cfg.nodes_per_axis);
    const GaussLegendreRule half = gauss_legendre(std::max(1, cfg.nodes_per_axis / 2));

    std::size_t panels_per_box = 1;
    for (int j = 0; j < n; ++j) panels_per_box *= cfg.subdivisions;
    const std::size_t tasks = panels_per_box * domain.boxes().size();

    auto tensor_sum = [&](const GaussLegendreRule& rule, const double* lo, const double* width) {
        const int k = static_cast<int>(rule.nodes.size());
        int idx[3] = {0, 0, 0};
        double x[3];
        double acc = 0.0;
        while (true) {
            double w = 1.0;
            for (int j = 0; j < n; ++j) {
                x[j] = lo[j] + 0.5 * width[j] * (rule.nodes[idx[j]] + 1.0);
                w *= 0.5 * width[j] * rule.weights[idx[j]];
            }
            acc += w * f(std::span<const double>(x, n));
            int j = 0;
            while (j < n && ++idx[j] == k) idx[j++] = 0;
            if (j == n) break;
        }
        return acc;
    };

    std::vector<double> high(tasks), low(tasks);
    parallel_for(tasks, [&](std::size_t t) {
        const auto& box = domain.boxes()[t / panels_per_box];
        std::size_t panel = t % panels_per_box;
        double lo[3], width[3];
        for (int j = 0; j < n; ++j) {
            const std::size_t p = panel % cfg.subdivisions;
            panel /= cfg.subdivisions;
            const double span = box.hi[j] - box.lo[j];
            width[j] = span / cfg.subdivisions;
            lo[j] = box.lo[j] + span * static_cast<double>(p) / cfg.subdivisions;
        }
        high[t] = tensor_sum(full, lo, width);
        low[t] = tensor_sum(half, lo, width);
    });
    double hi_sum = 0.0, lo_sum = 0.0;
    for (std::size_t t = 0; t < tasks; ++t) {
        hi_sum += high[t];
        lo_sum += low[t];
    }
    return {hi_sum, std::fabs(hi_sum - lo_sum)};
}

std::vector<ExpSumSpace> powered(std::span<const ExpSumSpace> spaces, std::span<const int> degrees) {
    if (degrees.size() != spaces.size())
        throw ValidationError("need one degree per space, got " + std::to_string(degrees.size()) + " for " +
                              std::to_string(spaces.size()) + " spaces");
    std::vector<ExpSumSpace> out;
    out.reserve(spaces.size());
    for (std::size_t i = 0; i < spaces.size(); ++i) out.push_back(power(spaces[i], degrees[i]));
    return out;
}

}  // namespace

DomainUnion::DomainUnion(int dim, std::vector<DomainBox> boxes) : dim_(dim), boxes_(std::move(boxes)) {
    if (dim_ < 1) throw ValidationError("domain dimension must be positive");
    if (boxes_.empty()) throw ValidationError("domain needs at least one box");
    for (const auto& b : boxes_) {
        if (b.lo.size() != dim_ || b.hi.size() != dim_)
            throw ValidationError("domain box has wrong dimension, expected " + std::to_string(dim_));
        for (int j = 0; j < dim_; ++j) {
            if (!std::isfinite(b.lo[j]) || !std::isfinite(b.hi[j]))
                throw ValidationError("domain box bounds must be finite");
            if (!(b.lo[j] < b.hi[j])) throw ValidationError("domain box needs lo < hi on every axis");
        }
    }
    for (std::size_t a = 0; a < boxes_.size(); ++a)
        for (std::size_t b = a + 1; b < boxes_.size(); ++b) {
            bool overlap = true;
            for (int j = 0; j < dim_ && overlap; ++j)
                overlap = std::max(boxes_[a].lo[j], boxes_[b].lo[j]) < std::min(boxes_[a].hi[j], boxes_[b].hi[j]);
            if (overlap) throw ValidationError("domain boxes must be disjoint");
        }
}

DomainUnion DomainUnion::cube(int dim, double lo, double hi) {
    return DomainUnion(dim, {DomainBox{Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, hi)}});
}

SignedDomain::SignedDomain(int dim, std::vector<std::pair<SignVector, DomainUnion>> pieces)
    : dim_(dim), pieces_(std::move(pieces)) {
    std::set<SignVector> seen;
    for (const auto& [s, region] : pieces_) {
        if (static_cast<int>(s.size()) != dim_ || region.dim() != dim_)
            throw ValidationError("sign condition and region must have dimension " + std::to_string(dim_));
        for (int v : s)
            if (v != 1 && v != -1) throw ValidationError("sign conditions have entries +1 or -1");
        if (!seen.insert(s).second) throw ValidationError("each sign condition may appear only once");
        for (const auto& b : region.boxes())
            for (int j = 0; j < dim_; ++j)
                if (!(b.lo[j] > 0.0))
                    throw ValidationError("orthant regions must stay away from the coordinate hyperplanes (lo > 0)");
    }
}

SignedDomain SignedDomain::all_orthants(const DomainUnion& positive_region) {
    const int n = positive_region.dim();
    std::vector<std::pair<SignVector, DomainUnion>> pieces;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        SignVector s(n);
        for (int j = 0; j < n; ++j) s[j] = (mask & (1u << j)) ? -1 : 1;
        pieces.emplace_back(std::move(s), positive_region);
    }
    return SignedDomain(n, std::move(pieces));
}

DomainUnion log_domain(const DomainUnion& positive_region) {
    std::vector<DomainBox> boxes;
    for (const auto& b : positive_region.boxes()) {
        if ((b.lo.array() <= 0.0).any()) throw ValidationError("log domain needs lo > 0");
        boxes.push_back({b.lo.array().log().matrix(), b.hi.array().log().matrix()});
    }
    return DomainUnion(positive_region.dim(), std::move(boxes));
}

double density(std::span<const ExpSumSpace> spaces, const EvaluationPoint& x, const QuadratureConfig& cfg) {
    const DensityEvaluator f(spaces, cfg, false);
    if (x.size() != f.dim()) throw ValidationError("evaluation point has the wrong dimension");
    return f({x.data(), static_cast<std::size_t>(x.size())});
}

double density_mixed_volume(std::span<const ExpSumSpace> spaces, const EvaluationPoint& x,
                            const QuadratureConfig& cfg) {
    const DensityEvaluator f(spaces, cfg, true);
    if (x.size() != f.dim()) throw ValidationError("evaluation point has the wrong dimension");
    return f({x.data(), static_cast<std::size_t>(x.size())});
}

Estimate expected_roots(std::span<const ExpSumSpace> spaces, const DomainUnion& domain, const QuadratureConfig& cfg) {
    const DensityEvaluator f(spaces, cfg, false);
    return integrate(f, f.dim(), domain, cfg);
}

Estimate veronese_volume(const ExpSumSpace& space, const DomainUnion& domain, const QuadratureConfig& cfg) {
    const int n = space.dim();
    if (n > 3) throw UnsupportedError("Veronese volume is implemented up to dimension 3");
    const KernelGeometry geo(space);
    auto f = [&](std::span<const double> x) {
        double g[9];
        geo.metric_into(x, {g, static_cast<std::size_t>(n * n)});
        return std::sqrt(std::max(0.0, small_det(g, n)));
    };
    return integrate(f, n, domain, cfg);
}

ScalingCheck scaling_check(std::span<const ExpSumSpace> spaces, std::span<const int> degrees,
                           const DomainUnion& domain, const QuadratureConfig& cfg) {
    const auto lifted = powered(spaces, degrees);
    double factor = 1.0;
    for (int d : degrees) factor *= d;
    factor = std::sqrt(factor);
    const Estimate lhs = expected_roots(lifted, domain, cfg);
    const Estimate base = expected_roots(spaces, domain, cfg);
    return {lhs.value, factor * base.value, lhs.value / base.value,
            lhs.error_estimate + factor * base.error_estimate};
}

SubadditivityCheck subadditivity_check(std::span<const ExpSumSpace> fixed, const ExpSumSpace& g,
                                       const ExpSumSpace& h, const DomainUnion& domain,
                                       const QuadratureConfig& cfg) {
    auto with_last = [&](const ExpSumSpace& last) {
        std::vector<ExpSumSpace> tuple(fixed.begin(), fixed.end());
        tuple.push_back(last);
        return expected_roots(tuple, domain, cfg);
    };
    const Estimate lhs = with_last(aronszajn_product(g, h));
    const Estimate eg = with_last(g);
    const Estimate eh = with_last(h);
    const double rhs = eg.value + eh.value;
    return {lhs.value, rhs, rhs - lhs.value, lhs.error_estimate + eg.error_estimate + eh.error_estimate};
}

double generic_count(std::span<const LatticePolytope> supports) { return static_cast<double>(bkk_number(supports)); }

double generic_count(std::span<const ExpSumSpace> spaces) {
    std::vector<LatticePolytope> polys;
    polys.reserve(spaces.size());
    for (const auto& s : spaces) polys.emplace_back(s.dim(), support_hull(s).hull_vertices);
    return generic_count(polys);
}

double square_root_ratio(std::span<const ExpSumSpace> spaces, std::span<const int> degrees,
                         const DomainUnion& domain, const QuadratureConfig& cfg) {
    const auto lifted = powered(spaces, degrees);
    const double count = generic_count(lifted);
    if (!(count > 0.0)) throw UndefinedError("generic root count is zero; the square-root ratio is undefined");
    return expected_roots(lifted, domain, cfg).value / std::sqrt(count);
}

Estimate expected_roots_signed(std::span<const ExpSumSpace> spaces, const SignedDomain& w,
                               const QuadratureConfig& cfg) {
    const int n = common_dim(spaces);
    if (w.dim() != n) throw ValidationError("signed domain has the wrong dimension");
    // The coefficient map f_{i,a} -> s^a f_{i,a} preserves the Gaussian
    // measure, so every orthant contributes the positive-orthant expectation
    // of its reflected region.
    Estimate total;
    for (const auto& [s, region] : w.pieces()) {
        const Estimate e = expected_roots(spaces, log_domain(region), cfg);
        total.value += e.value;
        total.error_estimate += e.error_estimate;
    }
    return total;
}

}  // namespace kroots
