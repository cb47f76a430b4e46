#pragma once

#include <cstdint>
#include <vector>

#include "kroots/space_algebra.hpp"

namespace kroots {

/// Convex hull of a finite set of integer points in dimension 1, 2 or 3.
/// Only the extreme points are kept, sorted lexicographically. All
/// predicates are evaluated in exact integer arithmetic.
class LatticePolytope {
public:
    LatticePolytope(int dim, std::vector<Exponent> points);

    int dim() const { return dim_; }
    const std::vector<Exponent>& vertices() const { return vertices_; }

    /// dim! * Vol_dim, which is an integer for lattice polytopes.
    std::int64_t normalized_volume() const;
    double volume() const;

    LatticePolytope dilate(std::int64_t factor) const;

    bool operator==(const LatticePolytope&) const = default;

private:
    int dim_;
    std::vector<Exponent> vertices_;
};

LatticePolytope minkowski_sum(const LatticePolytope& p, const LatticePolytope& q);

/// Extreme points of conv(points), sorted lexicographically.
std::vector<Exponent> lattice_hull_vertices(int dim, std::vector<Exponent> points);

/// dim! times the volume of conv(points).
std::int64_t lattice_normalized_volume(int dim, const std::vector<Exponent>& points);

}  // namespace kroots
