#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kroots/kernel_geometry.hpp"
#include "kroots/root_expectation.hpp"
#include "kroots/space_algebra.hpp"

namespace kroots {

/// One random system: row i has i.i.d. N(0, 1) coefficients f_{i,a}, one
/// per term of spaces[i].
struct SampledSystem {
    std::vector<ExpSumSpace> spaces;
    std::vector<Eigen::VectorXd> coefficients;
};

enum RootCountFlag : std::uint32_t {
    kTangencyRefined = 1u << 0,       // a same-sign cell was split at an interior extremum
    kNewtonNotConverged = 1u << 1,    // a 2D candidate cell produced no converged root nearby
    kDirectEvaluation = 1u << 2,      // separable tables were unsafe, evaluated point by point
};

struct RootCountSample {
    int count = 0;
    std::uint64_t seed = 0;
    std::uint32_t flags = 0;
    std::vector<Eigen::VectorXd> roots;
};

struct MonteCarloEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t samples = 0;
    std::size_t flagged_samples = 0;
    std::uint32_t flags = 0;  // union over samples
};

/// Coefficients for sample `sample_index` of the stream keyed by `seed`.
SampledSystem sample_system(std::span<const ExpSumSpace> spaces, std::uint64_t seed, std::uint64_t sample_index = 0);

/// Normalized residuals f_i . V_i(x) / ||V_i(x)||; same zero set as the
/// system, bounded by ||f_i||, no overflow.
Eigen::VectorXd evaluate_system(const SampledSystem& sys, const EvaluationPoint& x);

struct Count1dOptions {
    int cells = 4096;
    double tol = 1e-12;
};

/// Real roots of a univariate system in [lo, hi): sign changes on a uniform
/// grid refined by bisection, plus a tangency guard for cells whose ends
/// agree in sign while the derivative changes sign.
RootCountSample count_roots_1d(const SampledSystem& sys, const DomainBox& interval, const Count1dOptions& opts = {});

/// Roots of a bivariate system in the half-open box: grid cells where both
/// residuals change sign seed damped Newton; roots are deduplicated at 1e-8.
RootCountSample count_roots_2d(const SampledSystem& sys, const DomainBox& box, int cells = 512);

struct MonteCarloOptions {
    Count1dOptions count1d;
    int cells2d = 512;
};

/// Sample mean and standard error of the number of roots in the domain.
/// n in {1, 2}; deterministic for fixed (samples, seed).
MonteCarloEstimate estimate_expected_roots(std::span<const ExpSumSpace> spaces, const DomainUnion& domain,
                                           std::size_t samples, std::uint64_t seed,
                                           const MonteCarloOptions& opts = {});

/// Same for a polynomial system over a signed region: each sampled
/// polynomial is evaluated at X = diag(s) exp(x) in every orthant piece
/// (no symmetry assumption is used).
MonteCarloEstimate estimate_expected_roots_signed(std::span<const ExpSumSpace> spaces, const SignedDomain& w,
                                                  std::size_t samples, std::uint64_t seed,
                                                  const MonteCarloOptions& opts = {});

/// E|det R| for independent rows r_i ~ N(0, cov_i), n <= 4.
MonteCarloEstimate estimate_abs_det(std::span<const Eigen::MatrixXd> covariances, std::size_t samples,
                                    std::uint64_t seed);

}  // namespace kroots
