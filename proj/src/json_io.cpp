#include "kroots/json_io.hpp"

#include "kroots/errors.hpp"

namespace kroots {
namespace {

const nlohmann::json& require(const nlohmann::json& doc, const char* key) {
    if (!doc.is_object() || !doc.contains(key)) throw ValidationError(std::string("missing field \"") + key + "\"");
    return doc.at(key);
}

std::int64_t as_int(const nlohmann::json& v, const char* what) {
    if (!v.is_number_integer()) throw ValidationError(std::string(what) + " must be an integer");
    return v.get<std::int64_t>();
}

Exponent as_exponent(const nlohmann::json& v, std::int64_t n, const char* what) {
    if (!v.is_array()) throw ValidationError(std::string(what) + " must be an array of integers");
    Exponent e;
    for (const auto& c : v) e.push_back(as_int(c, what));
    if (static_cast<std::int64_t>(e.size()) != n)
        throw ValidationError(std::string(what) + " has length " + std::to_string(e.size()) + ", expected " +
                              std::to_string(n));
    return e;
}

}  // namespace

OrderedJson space_to_json(const ExpSumSpace& space) {
    OrderedJson doc;
    doc["n"] = space.dim();
    OrderedJson terms = OrderedJson::array();
    for (const auto& t : space.terms()) {
        OrderedJson term;
        term["e"] = t.exponent;
        term["c2"] = t.c2;
        terms.push_back(std::move(term));
    }
    doc["terms"] = std::move(terms);
    return doc;
}

ExpSumSpace space_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ValidationError("space document must be a JSON object");
    const auto n = as_int(require(doc, "n"), "\"n\"");
    if (n < 1) throw ValidationError("\"n\" must be positive");
    const auto& terms = require(doc, "terms");
    if (!terms.is_array()) throw ValidationError("\"terms\" must be an array");
    std::vector<Term> out;
    for (const auto& t : terms) {
        const auto& c2 = require(t, "c2");
        if (!c2.is_number()) throw ValidationError("\"c2\" must be a number");
        out.push_back({as_exponent(require(t, "e"), n, "\"e\""), c2.get<double>()});
    }
    return ExpSumSpace(static_cast<int>(n), std::move(out));
}

ExpSumSpace parse_space(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
    return space_from_json(doc);
}

OrderedJson polytope_to_json(const LatticePolytope& p) {
    OrderedJson doc;
    doc["n"] = p.dim();
    doc["vertices"] = p.vertices();
    return doc;
}

LatticePolytope polytope_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ValidationError("polytope document must be a JSON object");
    const auto n = as_int(require(doc, "n"), "\"n\"");
    if (n < 1) throw ValidationError("\"n\" must be positive");
    const auto& verts = require(doc, "vertices");
    if (!verts.is_array() || verts.empty()) throw ValidationError("\"vertices\" must be a nonempty array");
    std::vector<Exponent> pts;
    for (const auto& v : verts) pts.push_back(as_exponent(v, n, "vertex"));
    return LatticePolytope(static_cast<int>(n), std::move(pts));
}

}  // namespace kroots
