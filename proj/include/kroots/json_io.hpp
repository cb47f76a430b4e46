#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "kroots/canonical_json.hpp"
#include "kroots/lattice.hpp"
#include "kroots/space_algebra.hpp"

namespace kroots {

/// {"n": int, "terms": [{"e": [int, ...], "c2": number}, ...]}, terms
/// sorted lexicographically by exponent.
OrderedJson space_to_json(const ExpSumSpace& space);
/// Throws ValidationError on schema violations (and on invalid spaces).
ExpSumSpace space_from_json(const nlohmann::json& doc);
ExpSumSpace parse_space(std::string_view text);

/// {"n": int, "vertices": [[int, ...], ...]}
OrderedJson polytope_to_json(const LatticePolytope& p);
LatticePolytope polytope_from_json(const nlohmann::json& doc);

}  // namespace kroots
