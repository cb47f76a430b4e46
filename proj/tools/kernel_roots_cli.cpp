#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kernel_roots/kernel_roots.h"
#include "kroots/canonical_json.hpp"

namespace {

using kroots::OrderedJson;
using Json = nlohmann::json;

constexpr int kExitVerification = 1;
constexpr int kExitInput = 2;
constexpr int kExitUnsupported = 3;

struct Failure {
    int code;
    std::string message;
};

int exit_code(kr_status s) {
    switch (s) {
        case KR_OK:
            return 0;
        case KR_INVALID_ARGUMENT:
            return kExitInput;
        case KR_UNSUPPORTED:
        case KR_UNDEFINED:
            return kExitUnsupported;
        default:
            return kExitVerification;
    }
}

void check(kr_status s) {
    if (s != KR_OK) throw Failure{exit_code(s), kr_last_error()};
}

struct SpaceDeleter {
    void operator()(kr_space* s) const { kr_space_destroy(s); }
};
using Space = std::unique_ptr<kr_space, SpaceDeleter>;

struct OwnedString {
    char* p = nullptr;
    ~OwnedString() { kr_string_free(p); }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{kExitInput, "cannot read " + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json read_json(const std::string& path) {
    try {
        return Json::parse(read_file(path));
    } catch (const Json::parse_error& e) {
        throw Failure{kExitInput, path + ": malformed JSON: " + e.what()};
    }
}

Space load_space(const std::string& path) {
    const std::string text = read_file(path);
    kr_space* s = nullptr;
    const kr_status st = kr_space_from_json(text.c_str(), &s);
    if (st != KR_OK) throw Failure{exit_code(st), path + ": " + kr_last_error()};
    return Space(s);
}

std::string space_json(const kr_space* s) {
    OwnedString out;
    check(kr_space_to_json(s, &out.p));
    return out.p;
}

std::vector<int64_t> hull_of(const kr_space* s, std::size_t& count) {
    count = 0;
    check(kr_space_hull(s, nullptr, &count));
    std::vector<int64_t> v(count * static_cast<std::size_t>(kr_space_dim(s)));
    check(kr_space_hull(s, v.data(), &count));
    return v;
}

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw Failure{kExitInput, "malformed " + what + " \"" + text + "\""};
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// `lo:hi` per axis joined by `,`; boxes joined by `+`.
struct Domain {
    int n = 0;
    std::vector<double> lo;
    std::vector<double> hi;
    std::size_t boxes() const { return n ? lo.size() / n : 0; }
};

Domain parse_domain(const std::string& spec, int n) {
    Domain d;
    d.n = n;
    for (const auto& box : split(spec, '+')) {
        const auto axes = split(box, ',');
        if (static_cast<int>(axes.size()) != n)
            throw Failure{kExitInput, "domain box \"" + box + "\" has " + std::to_string(axes.size()) +
                                          " axes, expected " + std::to_string(n)};
        for (const auto& ax : axes) {
            const auto ends = split(ax, ':');
            if (ends.size() != 2) throw Failure{kExitInput, "domain axis \"" + ax + "\" is not lo:hi"};
            d.lo.push_back(parse_number(ends[0], "domain bound"));
            d.hi.push_back(parse_number(ends[1], "domain bound"));
        }
    }
    return d;
}

kr_domain view(const Domain& d) { return {d.n, d.boxes(), d.lo.data(), d.hi.data()}; }

OrderedJson flag_names(uint32_t flags) {
    OrderedJson out = OrderedJson::array();
    if (flags & 1u) out.push_back("tangency_refined");
    if (flags & 2u) out.push_back("newton_not_converged");
    if (flags & 4u) out.push_back("direct_evaluation");
    return out;
}

OrderedJson estimate_entry(const std::string& name, double value, double error) {
    OrderedJson r;
    r["name"] = name;
    r["value"] = value;
    r["error_estimate"] = error;
    return r;
}

OrderedJson report_header(const std::string& command, const std::vector<std::string>& argv) {
    OrderedJson doc;
    doc["command"] = command;
    doc["argv"] = argv;
    return doc;
}

void emit(const OrderedJson& doc) { std::cout << kroots::dump_canonical(doc) << '\n'; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- space ----

struct SpaceArgs {
    std::vector<std::string> files;
    int d = 0;
};

int run_space_product(const SpaceArgs& a) {
    if (a.files.size() < 2) throw Failure{kExitInput, "space product needs at least two space files"};
    Space acc = load_space(a.files[0]);
    for (std::size_t i = 1; i < a.files.size(); ++i) {
        const Space next = load_space(a.files[i]);
        kr_space* out = nullptr;
        check(kr_space_product(acc.get(), next.get(), &out));
        acc.reset(out);
    }
    std::cout << space_json(acc.get()) << '\n';
    return 0;
}

int run_space_power(const SpaceArgs& a) {
    if (a.files.size() != 1) throw Failure{kExitInput, "space power takes one space file"};
    const Space s = load_space(a.files[0]);
    kr_space* out = nullptr;
    check(kr_space_power(s.get(), a.d, &out));
    const Space p(out);
    std::cout << space_json(p.get()) << '\n';
    return 0;
}

int run_space_hull(const SpaceArgs& a) {
    if (a.files.size() != 1) throw Failure{kExitInput, "space hull takes one space file"};
    const Space s = load_space(a.files[0]);
    const int n = kr_space_dim(s.get());
    std::size_t count = 0;
    const auto v = hull_of(s.get(), count);
    OrderedJson doc;
    doc["n"] = n;
    OrderedJson verts = OrderedJson::array();
    for (std::size_t k = 0; k < count; ++k) verts.push_back(std::vector<int64_t>(v.begin() + k * n, v.begin() + (k + 1) * n));
    doc["vertices"] = std::move(verts);
    emit(doc);
    return 0;
}

// ---- eval ----

struct EvalArgs {
    std::string file;
    std::string x;
};

int run_eval(const EvalArgs& a, const std::vector<std::string>& argv) {
    const auto t0 = std::chrono::steady_clock::now();
    const Space s = load_space(a.file);
    const int n = kr_space_dim(s.get());
    std::vector<double> x(n, 0.0);
    if (!a.x.empty()) {
        const auto parts = split(a.x, ',');
        if (static_cast<int>(parts.size()) != n)
            throw Failure{kExitInput, "--x needs " + std::to_string(n) + " comma-separated values"};
        for (int j = 0; j < n; ++j) x[j] = parse_number(parts[j], "coordinate");
    }
    double phi = 0.0;
    std::vector<double> m(n), g(static_cast<std::size_t>(n) * n);
    check(kr_log_kernel_norm(s.get(), x.data(), &phi));
    check(kr_momentum(s.get(), x.data(), m.data()));
    check(kr_metric(s.get(), x.data(), g.data()));

    OrderedJson doc = report_header("eval", argv);
    OrderedJson config;
    config["space"] = a.file;
    config["x"] = x;
    doc["config"] = std::move(config);
    doc["seed"] = nullptr;
    OrderedJson results = OrderedJson::array();
    // Direct evaluations: no discretization error beyond rounding.
    OrderedJson r;
    r["name"] = "log_kernel_norm";
    r["value"] = phi;
    r["exact"] = true;
    results.push_back(r);
    r["name"] = "momentum";
    r["value"] = m;
    results.push_back(r);
    OrderedJson rows = OrderedJson::array();
    for (int i = 0; i < n; ++i) rows.push_back(std::vector<double>(g.begin() + i * n, g.begin() + (i + 1) * n));
    r["name"] = "metric";
    r["value"] = rows;
    results.push_back(r);
    doc["results"] = std::move(results);
    doc["flags"] = OrderedJson::array();
    doc["wall_time_s"] = seconds_since(t0);
    emit(doc);
    return 0;
}

// ---- expect ----

struct ExpectArgs {
    std::vector<std::string> files;
    std::string domain;
    std::string degrees;
    std::string method = "quad";
    std::string signed_mode;
    uint64_t seed = 1;
    uint64_t samples = 10000;
    int nodes = 64;
    int subdiv = 8;
    int mv_grid = 0;
    int cells = 0;
    int profile = 0;
    std::string profile_out = "profile.csv";
};

std::vector<Space> expect_spaces(const ExpectArgs& a, std::vector<int>& degrees) {
    std::vector<Space> base;
    for (const auto& f : a.files) base.push_back(load_space(f));
    const int n = kr_space_dim(base[0].get());
    for (const auto& s : base)
        if (kr_space_dim(s.get()) != n) throw Failure{kExitInput, "all spaces must have the same dimension"};
    if (base.size() == 1 && n > 1) {
        // One file stands for n equal spaces.
        for (int i = 1; i < n; ++i) {
            kr_space* copy = nullptr;
            check(kr_space_power(base[0].get(), 1, &copy));
            base.emplace_back(copy);
        }
    }
    if (static_cast<int>(base.size()) != n)
        throw Failure{kExitInput, "a system in " + std::to_string(n) + " variables needs " + std::to_string(n) +
                                      " space files (or one)"};
    degrees.assign(n, 1);
    if (!a.degrees.empty()) {
        const auto parts = split(a.degrees, ',');
        if (parts.size() != 1 && static_cast<int>(parts.size()) != n)
            throw Failure{kExitInput, "--degrees needs one value or one per space"};
        for (int i = 0; i < n; ++i) {
            const double d = parse_number(parts.size() == 1 ? parts[0] : parts[i], "degree");
            if (d != std::floor(d) || d < 1 || d > 1000) throw Failure{kExitInput, "degrees must be integers >= 1"};
            degrees[i] = static_cast<int>(d);
        }
    }
    std::vector<Space> out;
    for (int i = 0; i < n; ++i) {
        kr_space* p = nullptr;
        check(kr_space_power(base[i].get(), degrees[i], &p));
        out.emplace_back(p);
    }
    return out;
}

void write_profile(const std::vector<const kr_space*>& spaces, const Domain& d, const kr_quad_config& cfg, int k,
                   const std::string& path) {
    const int n = d.n;
    std::vector<double> lo(d.lo.begin(), d.lo.begin() + n);
    std::vector<double> hi(d.hi.begin(), d.hi.begin() + n);
    for (std::size_t b = 1; b < d.boxes(); ++b)
        for (int j = 0; j < n; ++j) {
            lo[j] = std::min(lo[j], d.lo[b * n + j]);
            hi[j] = std::max(hi[j], d.hi[b * n + j]);
        }
    std::ofstream out(path);
    if (!out) throw Failure{kExitInput, "cannot write " + path};
    for (int j = 0; j < n; ++j) out << 'x' << j + 1 << ',';
    out << "density\n";
    std::size_t total = 1;
    for (int j = 0; j < n; ++j) total *= static_cast<std::size_t>(k);
    std::vector<double> x(n);
    char buf[40];
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        // The last axis varies fastest.
        for (int j = n - 1; j >= 0; --j) {
            const auto i = rest % k;
            rest /= k;
            x[j] = k == 1 ? 0.5 * (lo[j] + hi[j]) : lo[j] + (hi[j] - lo[j]) * static_cast<double>(i) / (k - 1);
        }
        double rho = 0.0;
        check(kr_density(spaces.data(), n, x.data(), &cfg, &rho));
        for (int j = 0; j < n; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g,", x[j]);
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), "%.17g\n", rho);
        out << buf;
    }
}

int run_expect(const ExpectArgs& a, const std::vector<std::string>& argv) {
    const auto t0 = std::chrono::steady_clock::now();
    if (a.method != "quad" && a.method != "mc" && a.method != "both")
        throw Failure{kExitInput, "--method must be quad, mc or both"};
    if (!a.signed_mode.empty() && a.signed_mode != "all")
        throw Failure{kExitInput, "--signed accepts only \"all\""};
    if (a.profile < 0 || a.cells < 0) throw Failure{kExitInput, "--profile and --cells must be nonnegative"};
    const bool is_signed = !a.signed_mode.empty();

    std::vector<int> degrees;
    const auto owned = expect_spaces(a, degrees);
    std::vector<const kr_space*> spaces;
    for (const auto& s : owned) spaces.push_back(s.get());
    const int n = static_cast<int>(spaces.size());

    std::string domain_spec = a.domain;
    if (domain_spec.empty()) {
        for (int j = 0; j < n; ++j) domain_spec += (j ? "," : "") + std::string("-30:30");
    }
    const Domain dom = parse_domain(domain_spec, n);
    const kr_domain dv = view(dom);
    const kr_quad_config cfg{a.nodes, a.subdiv, a.mv_grid};

    OrderedJson doc = report_header("expect", argv);
    OrderedJson config;
    config["spaces"] = a.files;
    config["n"] = n;
    config["degrees"] = degrees;
    config["domain"] = domain_spec;
    config["domain_coordinates"] = is_signed ? "log_abs_X_all_orthants" : "x";
    config["method"] = a.method;
    config["nodes"] = a.nodes;
    config["subdiv"] = a.subdiv;
    config["mv_grid"] = a.mv_grid;
    config["samples"] = a.samples;
    config["cells"] = a.cells;
    doc["config"] = std::move(config);
    doc["seed"] = a.seed;

    OrderedJson results = OrderedJson::array();
    OrderedJson flags = OrderedJson::array();
    kr_estimate quad{0.0, 0.0};
    kr_mc_estimate mc{};
    if (a.method != "mc") {
        if (is_signed)
            check(kr_expected_roots_signed(spaces.data(), n, &dv, &cfg, &quad));
        else
            check(kr_expected_roots(spaces.data(), n, &dv, &cfg, &quad));
        results.push_back(estimate_entry("quadrature", quad.value, quad.error_estimate));
    }
    if (a.method != "quad") {
        if (is_signed)
            check(kr_mc_expected_roots_signed(spaces.data(), n, &dv, a.samples, a.seed, a.cells, &mc));
        else
            check(kr_mc_expected_roots(spaces.data(), n, &dv, a.samples, a.seed, a.cells, &mc));
        OrderedJson r = estimate_entry("monte_carlo", mc.mean, mc.standard_error);
        r["samples"] = mc.samples;
        r["flagged_samples"] = mc.flagged_samples;
        results.push_back(std::move(r));
        flags = flag_names(mc.flags);
    }
    if (a.method == "both") {
        const double scale = std::hypot(mc.standard_error, quad.error_estimate);
        const double z = scale > 0.0 ? (mc.mean - quad.value) / scale : 0.0;
        // A z-score has unit standard deviation by construction.
        results.push_back(estimate_entry("z_score", z, 1.0));
    }
    if (a.profile > 0) {
        write_profile(spaces, dom, cfg, a.profile, a.profile_out);
        doc["profile"] = a.profile_out;
    }
    doc["results"] = std::move(results);
    doc["flags"] = std::move(flags);
    doc["wall_time_s"] = seconds_since(t0);
    emit(doc);
    return 0;
}

// ---- verify ----

struct VerifyArgs {
    std::string suite;
    uint64_t seed = 7;
    int size = 0;
};

int run_verify(const VerifyArgs& a, const std::vector<std::string>& argv) {
    const auto t0 = std::chrono::steady_clock::now();
    OwnedString report;
    int passed = 0;
    check(kr_verify(a.suite.c_str(), a.seed, a.size, &report.p, &passed));
    const OrderedJson suite = OrderedJson::parse(report.p);

    OrderedJson doc = report_header("verify", argv);
    OrderedJson config;
    config["suite"] = suite["suite"];
    config["size"] = suite["size"];
    doc["config"] = std::move(config);
    doc["seed"] = a.seed;
    doc["results"] = suite["checks"];
    doc["passed"] = passed != 0;
    doc["flags"] = OrderedJson::array();
    doc["wall_time_s"] = seconds_since(t0);
    emit(doc);
    return passed ? 0 : kExitVerification;
}

// ---- bkk ----

struct BkkArgs {
    std::vector<std::string> files;
};

int run_bkk(const BkkArgs& a, const std::vector<std::string>& argv) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::vector<int64_t>> points;
    std::vector<std::size_t> counts;
    const int n = static_cast<int>(a.files.size());
    for (const auto& f : a.files) {
        const Json doc = read_json(f);
        if (!doc.is_object() || !doc.contains("n") || !doc["n"].is_number_integer())
            throw Failure{kExitInput, f + ": expected a space or polytope document"};
        if (doc["n"].get<int>() != n)
            throw Failure{kExitInput, f + ": dimension " + std::to_string(doc["n"].get<int>()) + " does not match " +
                                          std::to_string(n) + " input files"};
        std::vector<int64_t> pts;
        std::size_t count = 0;
        if (doc.contains("terms")) {
            const Space s = load_space(f);
            pts = hull_of(s.get(), count);
        } else if (doc.contains("vertices") && doc["vertices"].is_array()) {
            for (const auto& v : doc["vertices"]) {
                if (!v.is_array() || static_cast<int>(v.size()) != n)
                    throw Failure{kExitInput, f + ": every vertex needs " + std::to_string(n) + " coordinates"};
                for (const auto& c : v) {
                    if (!c.is_number_integer()) throw Failure{kExitInput, f + ": vertex coordinates must be integers"};
                    pts.push_back(c.get<int64_t>());
                }
                ++count;
            }
        } else {
            throw Failure{kExitInput, f + ": expected \"terms\" or \"vertices\""};
        }
        points.push_back(std::move(pts));
        counts.push_back(count);
    }
    std::vector<const int64_t*> ptrs;
    for (const auto& p : points) ptrs.push_back(p.data());
    int64_t result = 0;
    check(kr_generic_count_points(n, ptrs.data(), counts.data(), &result));

    OrderedJson doc = report_header("bkk", argv);
    OrderedJson config;
    config["inputs"] = a.files;
    config["n"] = n;
    doc["config"] = std::move(config);
    doc["seed"] = nullptr;
    OrderedJson r;
    r["name"] = "generic_count";
    r["value"] = result;
    r["exact"] = true;
    doc["results"] = OrderedJson::array({r});
    doc["flags"] = OrderedJson::array();
    doc["wall_time_s"] = seconds_since(t0);
    emit(doc);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    CLI::App app{"Expected real roots of random exponential sums"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kr_version()));

    SpaceArgs space_args;
    auto* space = app.add_subcommand("space", "space algebra on JSON space documents");
    space->require_subcommand(1);
    auto* product = space->add_subcommand("product", "Aronszajn product of two or more spaces");
    product->add_option("files", space_args.files, "space JSON files")->required();
    auto* pw = space->add_subcommand("power", "d-th Aronszajn power");
    pw->add_option("--d", space_args.d, "exponent d >= 1")->required();
    pw->add_option("file", space_args.files, "space JSON file")->required();
    auto* hull = space->add_subcommand("hull", "vertices of the support's convex hull");
    hull->add_option("file", space_args.files, "space JSON file")->required();

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "potential, momentum and metric of a space at a point");
    eval->add_option("file", ev.file, "space JSON file")->required();
    eval->add_option("--x", ev.x, "point in log coordinates, comma separated (default origin)");

    ExpectArgs ex;
    auto* expect = app.add_subcommand("expect", "expected number of real roots");
    expect->add_option("files", ex.files, "space JSON files (one file means n equal spaces)")->required();
    expect->add_option("--domain", ex.domain, "lo:hi per axis joined by ',', boxes joined by '+' (default -30:30)");
    expect->add_option("--degrees", ex.degrees, "Aronszajn powers, one value or one per space");
    expect->add_option("--method", ex.method, "quad, mc or both")->capture_default_str();
    expect->add_option("--signed", ex.signed_mode, "\"all\": sum over every sign orthant, domain in log|X|");
    expect->add_option("--seed", ex.seed, "Monte Carlo seed")->capture_default_str();
    expect->add_option("--samples", ex.samples, "Monte Carlo samples")->capture_default_str();
    expect->add_option("--nodes", ex.nodes, "Gauss-Legendre nodes per axis")->capture_default_str();
    expect->add_option("--subdiv", ex.subdiv, "panels per axis and box")->capture_default_str();
    expect->add_option("--mv-grid", ex.mv_grid, "mixed-volume grid, 0 for the default route")->capture_default_str();
    expect->add_option("--cells", ex.cells, "root-counter grid cells per axis, 0 for the default");
    expect->add_option("--profile", ex.profile, "write the density on a k-point grid per axis");
    expect->add_option("--profile-out", ex.profile_out, "CSV path for --profile")->capture_default_str();

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "run a property verification suite");
    verify->add_option("suite", va.suite, "identities, additivity, scaling, subadd or vitale")->required();
    verify->add_option("--seed", va.seed, "seed for the random inputs")->capture_default_str();
    verify->add_option("--size", va.size, "number of random cases, 0 for the default");

    BkkArgs bk;
    auto* bkk = app.add_subcommand("bkk", "generic root count in the complex torus");
    bkk->add_option("files", bk.files, "one space or polytope JSON file per equation")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (product->parsed()) return run_space_product(space_args);
        if (pw->parsed()) return run_space_power(space_args);
        if (hull->parsed()) return run_space_hull(space_args);
        if (eval->parsed()) return run_eval(ev, args);
        if (expect->parsed()) return run_expect(ex, args);
        if (verify->parsed()) return run_verify(va, args);
        if (bkk->parsed()) return run_bkk(bk, args);
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << '\n';
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitVerification;
    }
    return kExitInput;
}
