#include "kernel_roots/kernel_roots.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "kroots/convex_mixed_volume.hpp"
#include "kroots/errors.hpp"
#include "kroots/json_io.hpp"
#include "kroots/kernel_geometry.hpp"
#include "kroots/monte_carlo.hpp"
#include "kroots/root_expectation.hpp"
#include "kroots/space_algebra.hpp"
#include "kroots/verify.hpp"

struct kr_space {
    kroots::ExpSumSpace space;
};

namespace {

thread_local std::string last_error;

kr_status fail(kr_status code, const char* msg) {
    last_error = msg;
    return code;
}

template <class F>
kr_status guarded(F&& f) {
    try {
        last_error.clear();
        f();
        return KR_OK;
    } catch (const kroots::ValidationError& e) {
        return fail(KR_INVALID_ARGUMENT, e.what());
    } catch (const kroots::UnsupportedError& e) {
        return fail(KR_UNSUPPORTED, e.what());
    } catch (const kroots::UndefinedError& e) {
        return fail(KR_UNDEFINED, e.what());
    } catch (const std::bad_alloc&) {
        return fail(KR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(KR_INTERNAL, e.what());
    } catch (...) {
        return fail(KR_INTERNAL, "unknown error");
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw kroots::ValidationError(what);
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::vector<kroots::ExpSumSpace> gather(const kr_space* const* spaces, int n) {
    require(spaces != nullptr && n >= 1, "expected n >= 1 spaces");
    std::vector<kroots::ExpSumSpace> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        require(spaces[i] != nullptr, "null space handle");
        out.push_back(spaces[i]->space);
    }
    return out;
}

Eigen::VectorXd point(const double* x, int n) {
    require(x != nullptr, "null point");
    return Eigen::Map<const Eigen::VectorXd>(x, n);
}

kroots::DomainUnion domain_of(const kr_domain* d, int n) {
    require(d != nullptr && d->lo != nullptr && d->hi != nullptr, "null domain");
    require(d->n == n, "domain dimension does not match the spaces");
    std::vector<kroots::DomainBox> boxes;
    for (std::size_t b = 0; b < d->num_boxes; ++b)
        boxes.push_back({point(d->lo + b * n, n), point(d->hi + b * n, n)});
    return kroots::DomainUnion(n, std::move(boxes));
}

kroots::QuadratureConfig config_of(const kr_quad_config* cfg) {
    kroots::QuadratureConfig out;
    if (cfg) {
        out.nodes_per_axis = cfg->nodes_per_axis;
        out.subdivisions = cfg->subdivisions;
        out.mv_grid = cfg->mv_grid;
    }
    require(out.nodes_per_axis >= 2 && out.subdivisions >= 1 && out.mv_grid >= 0, "invalid quadrature config");
    return out;
}

std::vector<Eigen::MatrixXd> matrices(int n, const double* data) {
    require(n >= 1 && data != nullptr, "expected n >= 1 matrices");
    std::vector<Eigen::MatrixXd> out;
    for (int i = 0; i < n; ++i)
        out.push_back(Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            data + static_cast<std::size_t>(i) * n * n, n, n));
    return out;
}

kroots::MonteCarloOptions mc_options(int n, int cells) {
    require(cells >= 0, "cells must be nonnegative");
    kroots::MonteCarloOptions opts;
    if (cells > 0) {
        if (n == 1)
            opts.count1d.cells = cells;
        else
            opts.cells2d = cells;
    }
    return opts;
}

void fill(const kroots::MonteCarloEstimate& e, kr_mc_estimate* out) {
    out->mean = e.mean;
    out->standard_error = e.standard_error;
    out->samples = e.samples;
    out->flagged_samples = e.flagged_samples;
    out->flags = e.flags;
}

}  // namespace

extern "C" {

const char* kr_last_error(void) { return last_error.c_str(); }

const char* kr_version(void) { return "0.1.0"; }

void kr_string_free(char* s) { std::free(s); }

kr_status kr_space_create(int n, size_t num_terms, const int64_t* exponents, const double* c2, kr_space** out) {
    return guarded([&] {
        require(out != nullptr, "null output");
        require(n >= 1, "space dimension must be positive");
        require(num_terms == 0 || (exponents != nullptr && c2 != nullptr), "null term arrays");
        std::vector<kroots::Term> terms;
        for (std::size_t k = 0; k < num_terms; ++k)
            terms.push_back({kroots::Exponent(exponents + k * n, exponents + (k + 1) * n), c2[k]});
        *out = new kr_space{kroots::ExpSumSpace(n, std::move(terms))};
    });
}

kr_status kr_space_from_json(const char* json, kr_space** out) {
    return guarded([&] {
        require(json != nullptr && out != nullptr, "null argument");
        *out = new kr_space{kroots::parse_space(json)};
    });
}

kr_status kr_space_to_json(const kr_space* s, char** out) {
    return guarded([&] {
        require(s != nullptr && out != nullptr, "null argument");
        *out = copy_string(kroots::dump_canonical(kroots::space_to_json(s->space)));
    });
}

void kr_space_destroy(kr_space* s) { delete s; }

int kr_space_dim(const kr_space* s) { return s ? s->space.dim() : 0; }

size_t kr_space_num_terms(const kr_space* s) { return s ? s->space.size() : 0; }

kr_status kr_space_term(const kr_space* s, size_t index, int64_t* exponent, double* c2) {
    return guarded([&] {
        require(s != nullptr, "null space");
        require(index < s->space.size(), "term index out of range");
        const auto& t = s->space.terms()[index];
        if (exponent) std::copy(t.exponent.begin(), t.exponent.end(), exponent);
        if (c2) *c2 = t.c2;
    });
}

kr_status kr_space_kostlan(int n, kr_space** out) {
    return guarded([&] {
        require(out != nullptr, "null output");
        *out = new kr_space{kroots::kostlan_space(n)};
    });
}

kr_status kr_space_product(const kr_space* a, const kr_space* b, kr_space** out) {
    return guarded([&] {
        require(a != nullptr && b != nullptr && out != nullptr, "null argument");
        *out = new kr_space{kroots::aronszajn_product(a->space, b->space)};
    });
}

kr_status kr_space_power(const kr_space* s, int d, kr_space** out) {
    return guarded([&] {
        require(s != nullptr && out != nullptr, "null argument");
        *out = new kr_space{kroots::power(s->space, d)};
    });
}

kr_status kr_space_hull(const kr_space* s, int64_t* vertices, size_t* count) {
    return guarded([&] {
        require(s != nullptr && count != nullptr, "null argument");
        const auto hull = kroots::support_hull(s->space);
        if (vertices) {
            require(*count >= hull.hull_vertices.size(), "vertex buffer too small");
            for (const auto& v : hull.hull_vertices) vertices = std::copy(v.begin(), v.end(), vertices);
        }
        *count = hull.hull_vertices.size();
    });
}

kr_status kr_log_kernel_norm(const kr_space* s, const double* x, double* out) {
    return guarded([&] {
        require(s != nullptr && out != nullptr, "null argument");
        *out = kroots::log_kernel_norm(s->space, point(x, s->space.dim()));
    });
}

kr_status kr_momentum(const kr_space* s, const double* x, double* out) {
    return guarded([&] {
        require(s != nullptr && out != nullptr, "null argument");
        const Eigen::VectorXd m = kroots::momentum(s->space, point(x, s->space.dim()));
        std::copy(m.data(), m.data() + m.size(), out);
    });
}

kr_status kr_metric(const kr_space* s, const double* x, double* out) {
    return guarded([&] {
        require(s != nullptr && out != nullptr, "null argument");
        const int n = s->space.dim();
        const Eigen::MatrixXd g = kroots::metric(s->space, point(x, n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out[i * n + j] = g(i, j);
    });
}

double kr_ball_volume(int n) { return n >= 0 ? kroots::ball_volume(n) : 0.0; }

double kr_projective_volume(int n) { return n >= 0 ? kroots::projective_volume(n) : 0.0; }

kr_status kr_tech_identity_residual(int n, double* out) {
    return guarded([&] {
        require(out != nullptr, "null output");
        *out = kroots::tech_identity_residual(n);
    });
}

kr_status kr_mixed_volume_ellipsoids(int n, const double* shapes, int grid, double* out) {
    return guarded([&] {
        require(out != nullptr && grid >= 0, "invalid argument");
        std::vector<kroots::EllipsoidBody> bodies;
        for (auto& m : matrices(n, shapes)) bodies.emplace_back(std::move(m));
        *out = kroots::mixed_volume_ellipsoids(bodies, {grid});
    });
}

kr_status kr_expected_abs_det(int n, const double* covariances, int grid, double* out) {
    return guarded([&] {
        require(out != nullptr && grid >= 0, "invalid argument");
        *out = kroots::expected_abs_det_gaussian(matrices(n, covariances), {grid});
    });
}

kr_quad_config kr_quad_config_default(void) {
    const kroots::QuadratureConfig d;
    return {d.nodes_per_axis, d.subdivisions, d.mv_grid};
}

kr_status kr_density(const kr_space* const* spaces, int n, const double* x, const kr_quad_config* cfg, double* out) {
    return guarded([&] {
        require(out != nullptr, "null output");
        *out = kroots::density(gather(spaces, n), point(x, n), config_of(cfg));
    });
}

kr_status kr_expected_roots(const kr_space* const* spaces, int n, const kr_domain* domain, const kr_quad_config* cfg,
                            kr_estimate* out) {
    return guarded([&] {
        require(out != nullptr, "null output");
        const auto e = kroots::expected_roots(gather(spaces, n), domain_of(domain, n), config_of(cfg));
        *out = {e.value, e.error_estimate};
    });
}

kr_status kr_expected_roots_signed(const kr_space* const* spaces, int n, const kr_domain* log_region,
                                   const kr_quad_config* cfg, kr_estimate* out) {
    return guarded([&] {
        require(out != nullptr, "null output");
        const auto all = gather(spaces, n);
        const auto region = domain_of(log_region, n);
        std::vector<kroots::DomainBox> positive;
        for (const auto& b : region.boxes()) positive.push_back({b.lo.array().exp(), b.hi.array().exp()});
        const auto w = kroots::SignedDomain::all_orthants(kroots::DomainUnion(n, std::move(positive)));
        const auto e = kroots::expected_roots_signed(all, w, config_of(cfg));
        *out = {e.value, e.error_estimate};
    });
}

kr_status kr_veronese_volume(const kr_space* s, const kr_domain* domain, const kr_quad_config* cfg, kr_estimate* out) {
    return guarded([&] {
        require(s != nullptr && out != nullptr, "null argument");
        const auto e = kroots::veronese_volume(s->space, domain_of(domain, s->space.dim()), config_of(cfg));
        *out = {e.value, e.error_estimate};
    });
}

kr_status kr_generic_count(const kr_space* const* spaces, int n, int64_t* out) {
    return guarded([&] {
        require(out != nullptr, "null output");
        const auto all = gather(spaces, n);
        *out = static_cast<int64_t>(kroots::generic_count(all));
    });
}

kr_status kr_generic_count_points(int n, const int64_t* const* points, const size_t* counts, int64_t* out) {
    return guarded([&] {
        require(n >= 1 && points != nullptr && counts != nullptr && out != nullptr, "null argument");
        std::vector<kroots::LatticePolytope> polys;
        for (int i = 0; i < n; ++i) {
            require(points[i] != nullptr && counts[i] > 0, "empty point set");
            std::vector<kroots::Exponent> pts;
            for (std::size_t k = 0; k < counts[i]; ++k)
                pts.emplace_back(points[i] + k * n, points[i] + (k + 1) * n);
            polys.emplace_back(n, std::move(pts));
        }
        *out = kroots::bkk_number(polys);
    });
}

kr_status kr_mc_expected_roots(const kr_space* const* spaces, int n, const kr_domain* domain, uint64_t samples,
                               uint64_t seed, int cells, kr_mc_estimate* out) {
    return guarded([&] {
        require(out != nullptr, "null output");
        fill(kroots::estimate_expected_roots(gather(spaces, n), domain_of(domain, n), samples, seed,
                                             mc_options(n, cells)),
             out);
    });
}

kr_status kr_mc_expected_roots_signed(const kr_space* const* spaces, int n, const kr_domain* log_region,
                                      uint64_t samples, uint64_t seed, int cells, kr_mc_estimate* out) {
    return guarded([&] {
        require(out != nullptr, "null output");
        const auto region = domain_of(log_region, n);
        std::vector<kroots::DomainBox> positive;
        for (const auto& b : region.boxes()) positive.push_back({b.lo.array().exp(), b.hi.array().exp()});
        const auto w = kroots::SignedDomain::all_orthants(kroots::DomainUnion(n, std::move(positive)));
        fill(kroots::estimate_expected_roots_signed(gather(spaces, n), w, samples, seed, mc_options(n, cells)), out);
    });
}

kr_status kr_mc_abs_det(int n, const double* covariances, uint64_t samples, uint64_t seed, kr_mc_estimate* out) {
    return guarded([&] {
        require(out != nullptr, "null output");
        fill(kroots::estimate_abs_det(matrices(n, covariances), samples, seed), out);
    });
}

kr_status kr_verify(const char* suite, uint64_t seed, int size, char** report, int* passed) {
    return guarded([&] {
        require(suite != nullptr, "null suite name");
        const auto r = kroots::run_suite(suite, seed, size);
        if (passed) *passed = r.passed() ? 1 : 0;
        if (report) *report = copy_string(kroots::dump_canonical(kroots::suite_report_json(r)));
    });
}

}  // extern "C"
