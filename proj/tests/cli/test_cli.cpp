#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "kroots/canonical_json.hpp"

namespace {

struct Run {
    int code;
    std::string out;
};

std::string data(const std::string& name) { return std::string(KR_DATA_DIR) + "/" + name; }

Run run(const std::string& args) {
    const std::string cmd = std::string(KR_CLI_PATH) + " " + args + " 2>cli_stderr.txt";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof(buf), p)) > 0) out.append(buf, got);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

kroots::OrderedJson report(const Run& r) { return kroots::OrderedJson::parse(r.out); }

double result(const kroots::OrderedJson& doc, const std::string& name) {
    for (const auto& r : doc["results"])
        if (r["name"] == name) return r["value"].get<double>();
    FAIL("missing result " << name);
    return NAN;
}

}  // namespace

TEST_CASE("space subcommands") {
    auto r = run("space power --d 3 " + data("kostlan1.json"));
    REQUIRE(r.code == 0);
    auto doc = report(r);
    REQUIRE(doc["terms"].size() == 4);
    CHECK(doc["terms"][1]["c2"] == 3.0);
    CHECK(doc["terms"][3]["e"][0] == 3);
    CHECK(kroots::dump_canonical(doc) + "\n" == r.out);

    r = run("space product " + data("kostlan1.json") + " " + data("kostlan1.json"));
    REQUIRE(r.code == 0);
    doc = report(r);
    CHECK(doc["terms"][1]["c2"] == 2.0);

    r = run("space hull " + data("kostlan2.json"));
    REQUIRE(r.code == 0);
    CHECK(report(r)["vertices"].size() == 3);
}

TEST_CASE("input errors exit with 2") {
    CHECK(run("space hull " + data("malformed.json")).code == 2);
    CHECK(run("space hull " + data("duplicate.json")).code == 2);
    CHECK(run("space hull " + data("does_not_exist.json")).code == 2);
    CHECK(run("space power --d 0 " + data("kostlan1.json")).code == 2);
    CHECK(run("expect --domain=1:0 " + data("kostlan1.json")).code == 2);
    CHECK(run("expect --domain=abc " + data("kostlan1.json")).code == 2);
    CHECK(run("expect --domain=-1:1,0:1 " + data("kostlan1.json")).code == 2);
    CHECK(run("expect --method nope " + data("kostlan1.json")).code == 2);
    CHECK(run("expect --signed some " + data("kostlan1.json")).code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("verify nope").code == 2);
    CHECK(run("bkk " + data("simplex3.json") + " " + data("simplex2.json")).code == 2);
}

TEST_CASE("unsupported configurations exit with 3") {
    CHECK(run("expect --method mc --domain=-1:1,-1:1,-1:1 " + data("kostlan3.json")).code == 3);
}

TEST_CASE("expect") {
    auto r = run("expect --method both --samples 20000 --domain=-30:30 " + data("kostlan1.json"));
    REQUIRE(r.code == 0);
    auto doc = report(r);
    CHECK(std::fabs(result(doc, "quadrature") - 0.5) < 1e-3);
    CHECK(std::fabs(result(doc, "z_score")) <= 3.0);
    CHECK(doc["seed"] == 1);
    CHECK(kroots::dump_canonical(kroots::OrderedJson::parse(r.out)) + "\n" == r.out);
    for (const auto& e : doc["results"]) CHECK((e.contains("error_estimate") || e.contains("exact")));

    r = run("expect --degrees 4 --domain=-30:30 " + data("kostlan1.json"));
    REQUIRE(r.code == 0);
    CHECK(std::fabs(result(report(r), "quadrature") - 1.0) < 1e-3);

    r = run("expect --signed all --degrees 4 " + data("kostlan1.json"));
    REQUIRE(r.code == 0);
    CHECK(std::fabs(result(report(r), "quadrature") - 2.0) < 2e-3);

    r = run("expect --nodes 16 --subdiv 2 --domain=-1:1,-1:1,-1:1 " + data("kostlan3.json"));
    REQUIRE(r.code == 0);
    CHECK(result(report(r), "quadrature") > 0.0);

    r = run("expect --domain=-30:0+0:30 " + data("kostlan1.json"));
    REQUIRE(r.code == 0);
    CHECK(std::fabs(result(report(r), "quadrature") - 0.5) < 1e-3);
}

TEST_CASE("Monte Carlo results are reproducible") {
    const std::string args = "expect --method mc --samples 300 --seed 9 " + data("kostlan2.json");
    const auto a = report(run(args));
    const auto b = report(run(args));
    CHECK(a["results"] == b["results"]);
    CHECK(report(run("expect --method mc --samples 300 --seed 10 " + data("kostlan2.json")))["results"] != a["results"]);
}

TEST_CASE("density profile") {
    const auto r = run("expect --profile 5 --profile-out profile_test.csv --domain=-2:2,-2:2 " + data("kostlan2.json"));
    REQUIRE(r.code == 0);
    std::ifstream in("profile_test.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "x1,x2,density");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 25);
}

TEST_CASE("eval") {
    const auto r = run("eval --x 0 " + data("kostlan1.json"));
    REQUIRE(r.code == 0);
    const auto doc = report(r);
    CHECK(doc["results"][2]["value"][0][0].get<double>() == doctest::Approx(0.25));
    CHECK(run("eval --x 0,1 " + data("kostlan1.json")).code == 2);
}

TEST_CASE("verify") {
    const auto r = run("verify identities");
    CHECK(r.code == 0);
    const auto doc = report(r);
    CHECK(doc["passed"] == true);
    CHECK(doc["results"].size() == 12);
    CHECK(run("verify scaling --seed 7 --size 2").code == 0);
}

TEST_CASE("bkk") {
    auto r = run("bkk " + data("simplex2.json") + " " + data("simplex2.json"));
    REQUIRE(r.code == 0);
    CHECK(report(r)["results"][0]["value"] == 1);
    CHECK(report(r)["results"][0]["exact"] == true);
    r = run("bkk " + data("simplex2_d2.json") + " " + data("simplex2_d3.json"));
    CHECK(report(r)["results"][0]["value"] == 6);
    r = run("bkk " + data("segment_x2.json") + " " + data("segment_y3.json"));
    CHECK(report(r)["results"][0]["value"] == 6);
    r = run("bkk " + data("kostlan2.json") + " " + data("kostlan2.json"));
    CHECK(report(r)["results"][0]["value"] == 1);
}
