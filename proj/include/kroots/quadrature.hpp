#pragma once

#include <vector>

namespace kroots {

struct GaussLegendreRule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order by Newton iteration on P_n.
GaussLegendreRule gauss_legendre(int order);

}  // namespace kroots
