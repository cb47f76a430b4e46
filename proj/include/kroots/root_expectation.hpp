#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kroots/kernel_geometry.hpp"
#include "kroots/lattice.hpp"
#include "kroots/space_algebra.hpp"

namespace kroots {

/// Axis-aligned box lo < hi (componentwise).
struct DomainBox {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
};

/// Finite union of boxes with pairwise disjoint interiors.
class DomainUnion {
public:
    DomainUnion(int dim, std::vector<DomainBox> boxes);
    static DomainUnion cube(int dim, double lo, double hi);

    int dim() const { return dim_; }
    const std::vector<DomainBox>& boxes() const { return boxes_; }

private:
    int dim_;
    std::vector<DomainBox> boxes_;
};

using SignVector = std::vector<int>;  // entries +1 / -1

/// W = union of W_s, one region per sign condition s. Each region is stored
/// as |W_s| = diag(s) W_s, i.e. in the strictly positive orthant of
/// polynomial coordinates X.
class SignedDomain {
public:
    SignedDomain(int dim, std::vector<std::pair<SignVector, DomainUnion>> pieces);
    /// The same positive-orthant region |W_s| under all 2^n sign conditions.
    static SignedDomain all_orthants(const DomainUnion& positive_region);

    int dim() const { return dim_; }
    const std::vector<std::pair<SignVector, DomainUnion>>& pieces() const { return pieces_; }

private:
    int dim_;
    std::vector<std::pair<SignVector, DomainUnion>> pieces_;
};

struct QuadratureConfig {
    int nodes_per_axis = 64;
    int subdivisions = 8;
    int mv_grid = 0;  // forwarded to MixedVolumeOptions::grid
};

struct Estimate {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// Expected-root density at x: n!/(2 pi)^{n/2} MV(C_1(x), ..., C_n(x)) with
/// C_i(x) the ellipsoid of shape G_i(x) / (2 pi). Equal spaces use the
/// closed form n! Vol(B^n)/(2 pi)^n sqrt(det G(x)). n <= 3.
double density(std::span<const ExpSumSpace> spaces, const EvaluationPoint& x, const QuadratureConfig& cfg = {});

/// Same quantity, always through the mixed-volume route.
double density_mixed_volume(std::span<const ExpSumSpace> spaces, const EvaluationPoint& x,
                            const QuadratureConfig& cfg = {});

/// Expected number of real roots in the domain (x coordinates): tensor
/// Gauss-Legendre on every box, `subdivisions` panels per axis. The error
/// estimate is |Q_k - Q_{k/2}|.
Estimate expected_roots(std::span<const ExpSumSpace> spaces, const DomainUnion& domain,
                        const QuadratureConfig& cfg = {});

/// Volume of the image of the domain under x -> [V(x)], int sqrt(det G).
Estimate veronese_volume(const ExpSumSpace& space, const DomainUnion& domain, const QuadratureConfig& cfg = {});

struct ScalingCheck {
    double lhs;    // E(F_1^{d_1}, ..., F_n^{d_n})
    double rhs;    // sqrt(d_1 ... d_n) E(F_1, ..., F_n)
    double ratio;  // lhs / E(F_1, ..., F_n)
    double tolerance;
};

ScalingCheck scaling_check(std::span<const ExpSumSpace> spaces, std::span<const int> degrees,
                           const DomainUnion& domain, const QuadratureConfig& cfg = {});

struct SubadditivityCheck {
    double lhs;        // E(F_1, ..., F_{n-1}, G H)
    double rhs_sum;    // E(..., G) + E(..., H)
    double slack;      // rhs_sum - lhs
    double tolerance;  // combined quadrature error estimates
};

SubadditivityCheck subadditivity_check(std::span<const ExpSumSpace> fixed, const ExpSumSpace& g,
                                       const ExpSumSpace& h, const DomainUnion& domain,
                                       const QuadratureConfig& cfg = {});

/// Generic number of roots in the complex torus, n! MV of the supports'
/// convex hulls. n <= 3.
double generic_count(std::span<const LatticePolytope> supports);
double generic_count(std::span<const ExpSumSpace> spaces);

/// E_D(F_1^{d_1}, ...) / sqrt(generic count of the powered supports).
/// Throws UndefinedError when the generic count is zero.
double square_root_ratio(std::span<const ExpSumSpace> spaces, std::span<const int> degrees,
                         const DomainUnion& domain, const QuadratureConfig& cfg = {});

/// Expected number of real roots of the sparse polynomial system in W, as
/// the sum over sign conditions of the expectation on log|W_s|.
Estimate expected_roots_signed(std::span<const ExpSumSpace> spaces, const SignedDomain& w,
                               const QuadratureConfig& cfg = {});

/// Componentwise log of a positive-orthant box union.
DomainUnion log_domain(const DomainUnion& positive_region);

}  // namespace kroots
