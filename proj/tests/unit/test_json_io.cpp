#include <doctest.h>

#include "kroots/errors.hpp"
#include "kroots/json_io.hpp"

using namespace kroots;

TEST_SUITE("json_io") {
    TEST_CASE("space round trip") {
        const auto s = make_space(2, {{{1, 0}, 0.1}, {{0, 0}, 3.0}, {{-1, 2}, 1e-300}});
        const std::string text = dump_canonical(space_to_json(s));
        const auto back = parse_space(text);
        CHECK(back == s);
        CHECK(dump_canonical(space_to_json(back)) == text);
        // Terms are written in lexicographic order.
        CHECK(text.find("[-1, 2]") < text.find("[0, 0]"));
        CHECK(text.find("[0, 0]") < text.find("[1, 0]"));
    }

    TEST_CASE("canonical form") {
        const auto s = power(kostlan_space(1), 2);
        CHECK(dump_canonical(space_to_json(s), 0) ==
              R"({"n":1,"terms":[{"e":[0],"c2":1.0},{"e":[1],"c2":2.0},{"e":[2],"c2":1.0}]})");
        OrderedJson doc;
        doc["b"] = 0.1;
        doc["a"] = 1e-7;
        doc["i"] = 3;
        doc["nan"] = std::nan("");
        CHECK(dump_canonical(doc, 0) == R"({"b":0.10000000000000001,"a":9.9999999999999995e-08,"i":3,"nan":null})");
    }

    TEST_CASE("reserialization is byte-identical") {
        OrderedJson doc;
        doc["command"] = "expect";
        doc["results"] = OrderedJson::array({{{"name", "q"}, {"value", 0.49999999999999994}, {"error_estimate", 1e-17}}});
        doc["empty"] = OrderedJson::object();
        doc["list"] = OrderedJson::array();
        const std::string once = dump_canonical(doc);
        CHECK(dump_canonical(OrderedJson::parse(once)) == once);
    }

    TEST_CASE("schema errors") {
        CHECK_THROWS_AS(parse_space("{"), ValidationError);
        CHECK_THROWS_AS(parse_space("[]"), ValidationError);
        CHECK_THROWS_AS(parse_space(R"({"terms": []})"), ValidationError);
        CHECK_THROWS_AS(parse_space(R"({"n": 1})"), ValidationError);
        CHECK_THROWS_AS(parse_space(R"({"n": 1, "terms": []})"), ValidationError);
        CHECK_THROWS_AS(parse_space(R"({"n": 1.5, "terms": [{"e": [0], "c2": 1}]})"), ValidationError);
        CHECK_THROWS_AS(parse_space(R"({"n": 2, "terms": [{"e": [0], "c2": 1}]})"), ValidationError);
        CHECK_THROWS_AS(parse_space(R"({"n": 1, "terms": [{"e": [0.5], "c2": 1}]})"), ValidationError);
        CHECK_THROWS_AS(parse_space(R"({"n": 1, "terms": [{"e": [0], "c2": "1"}]})"), ValidationError);
        CHECK_THROWS_AS(parse_space(R"({"n": 1, "terms": [{"e": [0], "c2": 1}, {"e": [0], "c2": 2}]})"),
                        ValidationError);
        CHECK_NOTHROW(parse_space(R"({"n": 1, "terms": [{"e": [1], "c2": 1}, {"e": [0], "c2": 2}]})"));
    }

    TEST_CASE("polytope documents") {
        const auto p = polytope_from_json(nlohmann::json::parse(R"({"n": 2, "vertices": [[0,0],[2,0],[1,0],[0,2]]})"));
        CHECK(p.vertices().size() == 3);
        CHECK(polytope_to_json(p)["vertices"].size() == 3);
        CHECK_THROWS_AS(polytope_from_json(nlohmann::json::parse(R"({"n": 2, "vertices": []})")), ValidationError);
        CHECK_THROWS_AS(polytope_from_json(nlohmann::json::parse(R"({"n": 2, "vertices": [[0]]})")), ValidationError);
    }
}
