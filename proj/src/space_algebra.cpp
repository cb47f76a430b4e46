#include "kroots/space_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "kroots/errors.hpp"
#include "kroots/lattice.hpp"

namespace kroots {
namespace {

// Doubles hold every integer below 2^53 exactly.
constexpr double kExactIntegerLimit = 9007199254740992.0;

bool is_exact_integer(double v) { return v == std::floor(v) && std::fabs(v) < kExactIntegerLimit; }

bool all_integral(const ExpSumSpace& s) {
    return std::all_of(s.terms().begin(), s.terms().end(), [](const Term& t) { return is_exact_integer(t.c2); });
}

}  // namespace

ExpSumSpace::ExpSumSpace(int dim, std::vector<Term> terms) : dim_(dim), terms_(std::move(terms)) {
    if (dim_ < 1) throw ValidationError("space dimension must be positive, got " + std::to_string(dim_));
    if (terms_.empty()) throw ValidationError("space must have at least one term");
    for (const auto& t : terms_) {
        if (static_cast<int>(t.exponent.size()) != dim_)
            throw ValidationError("exponent has length " + std::to_string(t.exponent.size()) + ", expected " +
                                  std::to_string(dim_));
        if (!(t.c2 > 0.0) || !std::isfinite(t.c2))
            throw ValidationError("squared coefficients must be finite and positive, got " + std::to_string(t.c2));
    }
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.exponent < b.exponent; });
    for (std::size_t i = 1; i < terms_.size(); ++i) {
        if (terms_[i].exponent == terms_[i - 1].exponent) {
            std::string e;
            for (auto c : terms_[i].exponent) e += (e.empty() ? "" : ",") + std::to_string(c);
            throw ValidationError("duplicate exponent (" + e + ")");
        }
    }
}

double ExpSumSpace::total_weight() const {
    double acc = 0.0;
    for (const auto& t : terms_) acc += t.c2;
    return acc;
}

ExpSumSpace make_space(int n, std::vector<Term> terms) { return ExpSumSpace(n, std::move(terms)); }

ExpSumSpace aronszajn_product(const ExpSumSpace& left, const ExpSumSpace& right) {
    if (left.dim() != right.dim())
        throw ValidationError("Aronszajn product of spaces of dimensions " + std::to_string(left.dim()) + " and " +
                              std::to_string(right.dim()));
    const int n = left.dim();

    auto minkowski = [n](const Exponent& b, const Exponent& c) {
        Exponent a(n);
        for (int k = 0; k < n; ++k) a[k] = b[k] + c[k];
        return a;
    };

    std::vector<Term> out;
    if (all_integral(left) && all_integral(right)) {
        std::map<Exponent, unsigned __int128> acc;
        for (const auto& b : left.terms())
            for (const auto& c : right.terms())
                acc[minkowski(b.exponent, c.exponent)] +=
                    static_cast<unsigned __int128>(b.c2) * static_cast<unsigned __int128>(c.c2);
        out.reserve(acc.size());
        for (auto& [a, v] : acc) out.push_back({a, static_cast<double>(v)});
    } else {
        // Fixed summation order (lexicographic in (b, c)) keeps results reproducible.
        std::map<Exponent, double> acc;
        for (const auto& b : left.terms())
            for (const auto& c : right.terms()) acc[minkowski(b.exponent, c.exponent)] += b.c2 * c.c2;
        out.reserve(acc.size());
        for (auto& [a, v] : acc) out.push_back({a, v});
    }
    return ExpSumSpace(n, std::move(out));
}

ExpSumSpace power(const ExpSumSpace& space, int d) {
    if (d < 1) throw ValidationError("power exponent must be at least 1, got " + std::to_string(d));
    ExpSumSpace result = space;
    for (int k = 1; k < d; ++k) result = aronszajn_product(space, result);
    return result;
}

ExpSumSpace kostlan_space(int n) {
    if (n < 1) throw ValidationError("space dimension must be positive, got " + std::to_string(n));
    std::vector<Term> terms;
    terms.push_back({Exponent(n, 0), 1.0});
    for (int k = 0; k < n; ++k) {
        Exponent e(n, 0);
        e[k] = 1;
        terms.push_back({std::move(e), 1.0});
    }
    return ExpSumSpace(n, std::move(terms));
}

SupportShape support_hull(const ExpSumSpace& space) {
    if (space.dim() > 3)
        throw UnsupportedError("support hull is exact only up to dimension 3, got " + std::to_string(space.dim()));
    std::vector<Exponent> pts;
    pts.reserve(space.size());
    for (const auto& t : space.terms()) pts.push_back(t.exponent);
    return {space.dim(), lattice_hull_vertices(space.dim(), std::move(pts))};
}

}  // namespace kroots
