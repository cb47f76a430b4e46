#pragma once

#include <cstdint>
#include <vector>

namespace kroots {

using Exponent = std::vector<std::int64_t>;

struct Term {
    Exponent exponent;
    double c2;  // squared metric coefficient alpha_a^2

    bool operator==(const Term&) const = default;
};

/// A space of exponential sums (equivalently of sparse polynomials) with
/// orthonormal basis { alpha_a e^{a.x} : a in A }.
///
/// Terms are kept sorted lexicographically by exponent, coefficients are
/// stored squared. Values are immutable once constructed.
class ExpSumSpace {
public:
    /// Validates and normalizes. Throws ValidationError on an empty term list,
    /// a wrong exponent length, a duplicate exponent or a nonpositive (or
    /// non-finite) squared coefficient.
    ExpSumSpace(int dim, std::vector<Term> terms);

    int dim() const { return dim_; }
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    /// Sum of all squared coefficients, i.e. K(0, 0).
    double total_weight() const;

    bool operator==(const ExpSumSpace&) const = default;

private:
    int dim_;
    std::vector<Term> terms_;
};

/// Vertex list of conv(A), sorted lexicographically.
struct SupportShape {
    int dim = 0;
    std::vector<Exponent> hull_vertices;

    bool operator==(const SupportShape&) const = default;
};

ExpSumSpace make_space(int n, std::vector<Term> terms);

/// Product space: support is the Minkowski sum B + C and the squared
/// coefficient of a is sum_{b+c=a} beta_b^2 gamma_c^2.
ExpSumSpace aronszajn_product(const ExpSumSpace& left, const ExpSumSpace& right);

/// d-fold product of a space with itself, d >= 1.
ExpSumSpace power(const ExpSumSpace& space, int d);

/// Space with orthonormal basis 1, X_1, ..., X_n.
ExpSumSpace kostlan_space(int n);

/// Extreme points of the support. Exact; dimensions 1 to 3 only.
SupportShape support_hull(const ExpSumSpace& space);

}  // namespace kroots
