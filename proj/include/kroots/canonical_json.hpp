#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include <json.hpp>

namespace kroots {

using OrderedJson = nlohmann::ordered_json;

namespace canonical_detail {

inline std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    std::string s(buf);
    // Keep the value typed as floating point when read back.
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

inline void write(std::ostringstream& out, const OrderedJson& j, int indent, int depth) {
    const auto newline = [&](int d) {
        if (indent <= 0) return;
        out << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case OrderedJson::value_t::object: {
            if (j.empty()) {
                out << "{}";
                return;
            }
            out << '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out << ',';
                first = false;
                newline(depth + 1);
                out << OrderedJson(it.key()).dump() << (indent > 0 ? ": " : ":");
                write(out, it.value(), indent, depth + 1);
            }
            newline(depth);
            out << '}';
            return;
        }
        case OrderedJson::value_t::array: {
            if (j.empty()) {
                out << "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            const bool flat = std::none_of(j.begin(), j.end(), [](const OrderedJson& e) { return e.is_structured(); });
            out << '[';
            bool first = true;
            for (const auto& e : j) {
                if (!first) out << (flat && indent > 0 ? ", " : ",");
                first = false;
                if (!flat) newline(depth + 1);
                write(out, e, indent, depth + 1);
            }
            if (!flat) newline(depth);
            out << ']';
            return;
        }
        case OrderedJson::value_t::number_float:
            out << format_double(j.get<double>());
            return;
        default:
            out << j.dump();
    }
}

}  // namespace canonical_detail

/// Serializes with insertion-ordered keys and every floating-point number
/// printed with 17 significant digits ("%.17g"), so parse -> dump is
/// byte-stable. Integers are printed as integers; non-finite floats as null.
inline std::string dump_canonical(const OrderedJson& doc, int indent = 2) {
    std::ostringstream out;
    canonical_detail::write(out, doc, indent, 0);
    return out.str();
}

}  // namespace kroots
