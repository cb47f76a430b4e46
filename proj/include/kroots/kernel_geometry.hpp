#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kroots/space_algebra.hpp"

namespace kroots {

/// Point in logarithmic coordinates; the polynomial point is X = exp(x).
using EvaluationPoint = Eigen::VectorXd;

/// Pullback of the real Fubini-Study metric, <u, v>_x = u^T G(x) v.
using MetricMatrix = Eigen::MatrixXd;

using MomentumVector = Eigen::VectorXd;

/// Evaluates the kernel potential phi(x) = 1/2 log sum_a alpha_a^2 e^{2 a.x}
/// and its derivatives for one space.
///
/// All sums are shifted by max_a (log alpha_a^2 + 2 a.x) before
/// exponentiation, so |a.x| in the thousands does not overflow. The object
/// only flattens the space for fast evaluation; it holds no per-point state.
class KernelGeometry {
public:
    explicit KernelGeometry(const ExpSumSpace& space);

    int dim() const { return dim_; }
    std::size_t size() const { return log_c2_.size(); }

    double log_kernel_norm(const EvaluationPoint& x) const;
    std::vector<double> term_weights(const EvaluationPoint& x) const;
    MomentumVector momentum(const EvaluationPoint& x) const;
    /// Weighted covariance of the exponents, sum_a w_a (a - m)(a - m)^T.
    MetricMatrix metric(const EvaluationPoint& x) const;

    /// Writes the metric into `out` (dim x dim, row major). No allocation.
    void metric_into(std::span<const double> x, std::span<double> out) const;

private:
    // Fills weights_ (unnormalized, max 1) and returns the shift and the sum.
    double shifted_weights(std::span<const double> x, std::span<double> weights, double& shift) const;

    int dim_;
    std::vector<double> exponents_;  // row-major size() x dim_
    std::vector<double> log_c2_;
};

double log_kernel_norm(const ExpSumSpace& space, const EvaluationPoint& x);
std::vector<double> term_weights(const ExpSumSpace& space, const EvaluationPoint& x);
MomentumVector momentum(const ExpSumSpace& space, const EvaluationPoint& x);
MetricMatrix metric(const ExpSumSpace& space, const EvaluationPoint& x);

/// log K(x, y) = log sum_a alpha_a^2 e^{a.(x + y)}; the kernel is always positive.
double log_kernel(const ExpSumSpace& space, const EvaluationPoint& x, const EvaluationPoint& y);

}  // namespace kroots
