#include "kroots/kernel_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kroots/errors.hpp"

namespace kroots {
namespace {

void check_point(int dim, std::span<const double> x) {
    if (static_cast<int>(x.size()) != dim)
        throw ValidationError("evaluation point has length " + std::to_string(x.size()) + ", expected " +
                              std::to_string(dim));
    for (double v : x)
        if (!std::isfinite(v)) throw ValidationError("evaluation point must be finite");
}

std::span<const double> as_span(const EvaluationPoint& x) { return {x.data(), static_cast<std::size_t>(x.size())}; }

}  // namespace

KernelGeometry::KernelGeometry(const ExpSumSpace& space) : dim_(space.dim()) {
    exponents_.reserve(space.size() * dim_);
    log_c2_.reserve(space.size());
    for (const auto& t : space.terms()) {
        for (auto c : t.exponent) exponents_.push_back(static_cast<double>(c));
        log_c2_.push_back(std::log(t.c2));
    }
}

double KernelGeometry::shifted_weights(std::span<const double> x, std::span<double> weights, double& shift) const {
    const std::size_t k = log_c2_.size();
    shift = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < k; ++a) {
        double s = log_c2_[a];
        const double* e = &exponents_[a * dim_];
        for (int j = 0; j < dim_; ++j) s += 2.0 * e[j] * x[j];
        weights[a] = s;
        shift = std::max(shift, s);
    }
    double total = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        weights[a] = std::exp(weights[a] - shift);
        total += weights[a];
    }
    return total;
}

double KernelGeometry::log_kernel_norm(const EvaluationPoint& x) const {
    check_point(dim_, as_span(x));
    std::vector<double> w(size());
    double shift = 0.0;
    const double total = shifted_weights(as_span(x), w, shift);
    return 0.5 * (shift + std::log(total));
}

std::vector<double> KernelGeometry::term_weights(const EvaluationPoint& x) const {
    check_point(dim_, as_span(x));
    std::vector<double> w(size());
    double shift = 0.0;
    const double total = shifted_weights(as_span(x), w, shift);
    for (auto& v : w) v /= total;
    return w;
}

MomentumVector KernelGeometry::momentum(const EvaluationPoint& x) const {
    const auto w = term_weights(x);
    MomentumVector m = MomentumVector::Zero(dim_);
    for (std::size_t a = 0; a < w.size(); ++a)
        for (int j = 0; j < dim_; ++j) m[j] += w[a] * exponents_[a * dim_ + j];
    return m;
}

MetricMatrix KernelGeometry::metric(const EvaluationPoint& x) const {
    check_point(dim_, as_span(x));
    MetricMatrix g(dim_, dim_);
    metric_into(as_span(x), {g.data(), static_cast<std::size_t>(dim_ * dim_)});
    return g;  // symmetric, so storage order does not matter
}

void KernelGeometry::metric_into(std::span<const double> x, std::span<double> out) const {
    const std::size_t k = size();
    constexpr std::size_t kStack = 64;
    double stack_buf[kStack];
    std::vector<double> heap_buf;
    std::span<double> w;
    if (k <= kStack) {
        w = {stack_buf, k};
    } else {
        heap_buf.resize(k);
        w = heap_buf;
    }
    double shift = 0.0;
    const double total = shifted_weights(x, w, shift);

    double m[8] = {};
    std::vector<double> m_heap;
    double* mp = m;
    if (dim_ > 8) {
        m_heap.assign(dim_, 0.0);
        mp = m_heap.data();
    }
    for (std::size_t a = 0; a < k; ++a) {
        w[a] /= total;
        const double* e = &exponents_[a * dim_];
        for (int j = 0; j < dim_; ++j) mp[j] += w[a] * e[j];
    }
    std::fill(out.begin(), out.end(), 0.0);
    // Centered form: no cancellation between E[a a^T] and m m^T far out in x.
    for (std::size_t a = 0; a < k; ++a) {
        const double* e = &exponents_[a * dim_];
        for (int i = 0; i < dim_; ++i) {
            const double di = e[i] - mp[i];
            for (int j = i; j < dim_; ++j) out[i * dim_ + j] += w[a] * di * (e[j] - mp[j]);
        }
    }
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < i; ++j) out[i * dim_ + j] = out[j * dim_ + i];
}

double log_kernel_norm(const ExpSumSpace& space, const EvaluationPoint& x) {
    return KernelGeometry(space).log_kernel_norm(x);
}

std::vector<double> term_weights(const ExpSumSpace& space, const EvaluationPoint& x) {
    return KernelGeometry(space).term_weights(x);
}

MomentumVector momentum(const ExpSumSpace& space, const EvaluationPoint& x) { return KernelGeometry(space).momentum(x); }

MetricMatrix metric(const ExpSumSpace& space, const EvaluationPoint& x) { return KernelGeometry(space).metric(x); }

double log_kernel(const ExpSumSpace& space, const EvaluationPoint& x, const EvaluationPoint& y) {
    if (x.size() != y.size()) throw ValidationError("kernel arguments have different lengths");
    const EvaluationPoint mid = 0.5 * (x + y);
    return 2.0 * log_kernel_norm(space, mid);
}

}  // namespace kroots
