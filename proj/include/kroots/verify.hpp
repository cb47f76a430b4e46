#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "kroots/counter_rng.hpp"
#include "kroots/json_io.hpp"
#include "kroots/lattice.hpp"
#include "kroots/space_algebra.hpp"

namespace kroots {

/// Sequential draws from one counter-based stream.
class Draw {
public:
    Draw(std::uint64_t seed, std::uint64_t stream) : rng_(seed), stream_(stream) {}

    std::uint64_t bits() { return rng_.bits(0, stream_, next_++); }
    int uniform_int(int lo, int hi);  // inclusive
    double uniform(double lo, double hi) { return lo + (hi - lo) * (1.0 - rng_.uniform(0, stream_, next_++)); }
    double normal() { return rng_.normal(0, stream_, next_++); }

private:
    CounterRng rng_;
    std::uint64_t stream_;
    std::uint64_t next_ = 0;
};

/// Random space with a full-dimensional support and n + 1 .. max_terms terms,
/// exponents in [-max_exponent, max_exponent], c2 log-uniform in [0.1, 10].
/// n <= 3.
ExpSumSpace random_space(Draw& draw, int n, int max_terms = 5, int max_exponent = 3);
/// Random lattice polygon with nonzero area, coordinates in [0, span].
LatticePolytope random_polygon(Draw& draw, int span = 4);
/// B B^T + 0.1 I with B standard normal.
Eigen::MatrixXd random_covariance(Draw& draw, int n);

struct Check {
    std::string name;
    double value = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    int size = 0;
    std::vector<Check> checks;

    bool passed() const;
};

/// Suites: identities, additivity, scaling, subadd, vitale. size <= 0
/// selects the default (12, 100, 20, 50, 20). Throws ValidationError for an
/// unknown suite name.
SuiteReport run_suite(std::string_view suite, std::uint64_t seed, int size = 0);
const std::vector<std::string>& suite_names();

OrderedJson suite_report_json(const SuiteReport& report);

}  // namespace kroots
