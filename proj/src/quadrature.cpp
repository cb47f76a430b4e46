#include "kroots/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kroots/errors.hpp"

namespace kroots {

GaussLegendreRule gauss_legendre(int order) {
    if (order < 1) throw ValidationError("Gauss-Legendre order must be positive, got " + std::to_string(order));
    GaussLegendreRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi's initial guess for the i-th largest root.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (order == 1) p0 = 1.0;
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (order == 1) p0 = 1.0;
            dp = order * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[order - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.weights[order - 1 - i] = w;
        rule.weights[i] = w;
    }
    return rule;
}

}  // namespace kroots
