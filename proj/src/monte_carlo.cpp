#include "kroots/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kroots/counter_rng.hpp"
#include "kroots/errors.hpp"
#include "kroots/parallel.hpp"

namespace kroots {
namespace {

// Exponent spread (in log units) below which the separable 2D tables cannot
// underflow the dominant term.
constexpr double kSafeTableSpread = 600.0;

// One equation f . V(x) with log-shifted evaluation.
class ResidualRow {
public:
    explicit ResidualRow(const ExpSumSpace& space) : dim_(space.dim()) {
        for (const auto& t : space.terms()) {
            for (auto c : t.exponent) {
                exponents_.push_back(static_cast<double>(c));
                parity_.push_back(static_cast<int>(((c % 2) + 2) % 2));
            }
            half_log_c2_.push_back(0.5 * std::log(t.c2));
        }
    }

    int dim() const { return dim_; }
    std::size_t size() const { return half_log_c2_.size(); }
    double exponent(std::size_t a, int j) const { return exponents_[a * dim_ + j]; }
    double half_log_c2(std::size_t a) const { return half_log_c2_[a]; }

    /// Coefficients of the same polynomial seen from orthant s: f_a s^a.
    Eigen::VectorXd reflect(const Eigen::VectorXd& f, const SignVector& s) const {
        Eigen::VectorXd g = f;
        for (std::size_t a = 0; a < size(); ++a) {
            int sign = 1;
            for (int j = 0; j < dim_; ++j)
                if (s[j] < 0 && parity_[a * dim_ + j]) sign = -sign;
            g[a] *= sign;
        }
        return g;
    }

    /// Normalized residual; optionally its gradient.
    double value(const double* x, const Eigen::VectorXd& f, double* grad = nullptr) const {
        const std::size_t k = size();
        double shift = -std::numeric_limits<double>::infinity();
        double sbuf[64];
        std::vector<double> sheap;
        double* s = sbuf;
        if (k > 64) {
            sheap.resize(k);
            s = sheap.data();
        }
        for (std::size_t a = 0; a < k; ++a) {
            double v = half_log_c2_[a];
            for (int j = 0; j < dim_; ++j) v += exponents_[a * dim_ + j] * x[j];
            s[a] = v;
            shift = std::max(shift, v);
        }
        double num = 0.0, den2 = 0.0;
        double dnum[2] = {0, 0}, dden[2] = {0, 0};
        for (std::size_t a = 0; a < k; ++a) {
            const double e = std::exp(s[a] - shift);
            num += f[a] * e;
            den2 += e * e;
            if (grad)
                for (int j = 0; j < dim_ && j < 2; ++j) {
                    dnum[j] += f[a] * exponents_[a * dim_ + j] * e;
                    dden[j] += exponents_[a * dim_ + j] * e * e;
                }
        }
        const double den = std::sqrt(den2);
        const double r = num / den;
        if (grad)
            for (int j = 0; j < dim_ && j < 2; ++j) grad[j] = dnum[j] / den - r * dden[j] / den2;
        return r;
    }

    /// Sign-faithful value of g(x) = f . V(x) and g'(x) for n = 1, both
    /// scaled by the same positive factor.
    void scaled_value_and_slope(double x, const Eigen::VectorXd& f, double& g, double& dg) const {
        double shift = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < size(); ++a) shift = std::max(shift, half_log_c2_[a] + exponents_[a] * x);
        g = dg = 0.0;
        for (std::size_t a = 0; a < size(); ++a) {
            const double e = std::exp(half_log_c2_[a] + exponents_[a] * x - shift);
            g += f[a] * e;
            dg += f[a] * exponents_[a] * e;
        }
    }

private:
    int dim_;
    std::vector<double> exponents_;
    std::vector<int> parity_;
    std::vector<double> half_log_c2_;
};

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

double bisect_root(const ResidualRow& row, const Eigen::VectorXd& f, double a, double b, double tol) {
    double fa = row.value(&a, f);
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = row.value(&m, f);
        if (fm == 0.0) return m;
        if (sign_of(fm) == sign_of(fa)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// Univariate counter with the grid tables precomputed, shared across samples.
class UnivariateCounter {
public:
    UnivariateCounter(const ExpSumSpace& space, double lo, double hi, const Count1dOptions& opts)
        : row_(space), lo_(lo), hi_(hi), cells_(opts.cells), tol_(opts.tol) {
        if (space.dim() != 1) throw ValidationError("univariate root counting needs a 1D space");
        if (cells_ < 1) throw ValidationError("root counting grid needs at least one cell");
        if (!(lo < hi)) throw ValidationError("root counting interval needs lo < hi");
        const std::size_t k = row_.size();
        table_.resize((cells_ + 1) * k);
        slope_.resize((cells_ + 1) * k);
        for (int i = 0; i <= cells_; ++i) {
            const double x = grid(i);
            double shift = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < k; ++a) shift = std::max(shift, row_.half_log_c2(a) + row_.exponent(a, 0) * x);
            for (std::size_t a = 0; a < k; ++a) {
                const double e = std::exp(row_.half_log_c2(a) + row_.exponent(a, 0) * x - shift);
                table_[i * k + a] = e;
                slope_[i * k + a] = row_.exponent(a, 0) * e;
            }
        }
    }

    const ResidualRow& row() const { return row_; }

    RootCountSample count(const Eigen::VectorXd& f) const {
        RootCountSample out;
        const std::size_t k = row_.size();
        std::vector<double> v(cells_ + 1);
        for (int i = 0; i <= cells_; ++i) {
            double acc = 0.0;
            const double* t = &table_[i * k];
            for (std::size_t a = 0; a < k; ++a) acc += f[a] * t[a];
            v[i] = acc;
        }
        auto slope_at = [&](int i) {
            double acc = 0.0;
            const double* t = &slope_[i * k];
            for (std::size_t a = 0; a < k; ++a) acc += f[a] * t[a];
            return acc;
        };
        auto push_root = [&](double x) {
            out.roots.push_back(Eigen::VectorXd::Constant(1, x));
            ++out.count;
        };
        for (int i = 0; i < cells_; ++i) {
            const double a = grid(i), b = grid(i + 1);
            if (v[i] == 0.0) {
                push_root(a);
                continue;
            }
            if (v[i + 1] == 0.0) continue;  // belongs to the next cell
            if (sign_of(v[i]) != sign_of(v[i + 1])) {
                push_root(bisect_root(row_, f, a, b, tol_));
                continue;
            }
            const double da = slope_at(i), db = slope_at(i + 1);
            if (sign_of(da) * sign_of(db) >= 0) continue;
            // Interior extremum: locate it and test whether it crosses zero.
            double l = a, r = b;
            for (int it = 0; it < 200 && r - l > tol_; ++it) {
                const double m = 0.5 * (l + r);
                double g, dg;
                row_.scaled_value_and_slope(m, f, g, dg);
                if (sign_of(dg) == sign_of(da)) l = m; else r = m;
            }
            const double c = 0.5 * (l + r);
            double gc, dgc;
            row_.scaled_value_and_slope(c, f, gc, dgc);
            if (sign_of(gc) != 0 && sign_of(gc) != sign_of(v[i])) {
                out.flags |= kTangencyRefined;
                push_root(bisect_root(row_, f, a, c, tol_));
                push_root(bisect_root(row_, f, c, b, tol_));
            }
        }
        return out;
    }

private:
    double grid(int i) const { return i == cells_ ? hi_ : lo_ + (hi_ - lo_) * static_cast<double>(i) / cells_; }

    ResidualRow row_;
    double lo_, hi_;
    int cells_;
    double tol_;
    std::vector<double> table_;
    std::vector<double> slope_;
};

// Bivariate counter; separable exponential tables per row when safe.
class BivariateCounter {
public:
    BivariateCounter(const ExpSumSpace& s1, const ExpSumSpace& s2, const DomainBox& box, int cells)
        : rows_{ResidualRow(s1), ResidualRow(s2)}, box_(box), cells_(cells) {
        if (s1.dim() != 2 || s2.dim() != 2) throw ValidationError("bivariate root counting needs 2D spaces");
        if (box.lo.size() != 2 || box.hi.size() != 2) throw ValidationError("bivariate root counting needs a 2D box");
        if (cells_ < 1) throw ValidationError("root counting grid needs at least one cell");
        for (int j = 0; j < 2; ++j) {
            if (!(box.lo[j] < box.hi[j])) throw ValidationError("root counting box needs lo < hi");
            width_[j] = (box.hi[j] - box.lo[j]) / cells_;
        }
        separable_ = true;
        for (const auto& row : rows_) {
            double spread = 0.0;
            for (int j = 0; j < 2; ++j) {
                double mn = std::numeric_limits<double>::infinity(), mx = -mn;
                for (std::size_t a = 0; a < row.size(); ++a) {
                    mn = std::min(mn, row.exponent(a, j));
                    mx = std::max(mx, row.exponent(a, j));
                }
                spread += 2.0 * (mx - mn) * std::max(std::fabs(box.lo[j]), std::fabs(box.hi[j]));
            }
            double cmin = std::numeric_limits<double>::infinity(), cmax = -cmin;
            for (std::size_t a = 0; a < row.size(); ++a) {
                cmin = std::min(cmin, row.half_log_c2(a));
                cmax = std::max(cmax, row.half_log_c2(a));
            }
            if (spread + (cmax - cmin) > kSafeTableSpread) separable_ = false;
        }
        if (separable_) {
            for (int r = 0; r < 2; ++r) {
                const auto& row = rows_[r];
                const std::size_t k = row.size();
                for (int j = 0; j < 2; ++j) {
                    auto& t = tables_[r][j];
                    t.resize((cells_ + 1) * k);
                    for (int i = 0; i <= cells_; ++i) {
                        const double x = coord(j, i);
                        double shift = -std::numeric_limits<double>::infinity();
                        for (std::size_t a = 0; a < k; ++a) {
                            const double base = j == 0 ? row.half_log_c2(a) : 0.0;
                            shift = std::max(shift, base + row.exponent(a, j) * x);
                        }
                        for (std::size_t a = 0; a < k; ++a) {
                            const double base = j == 0 ? row.half_log_c2(a) : 0.0;
                            t[i * k + a] = std::exp(base + row.exponent(a, j) * x - shift);
                        }
                    }
                }
            }
        }
    }

    RootCountSample count(const Eigen::VectorXd& f1, const Eigen::VectorXd& f2) const {
        RootCountSample out;
        const int m = cells_ + 1;
        std::vector<double> values[2] = {std::vector<double>(m * m), std::vector<double>(m * m)};
        const Eigen::VectorXd* coeffs[2] = {&f1, &f2};
        for (int r = 0; r < 2; ++r) {
            const auto& row = rows_[r];
            const auto& f = *coeffs[r];
            if (separable_) {
                const std::size_t k = row.size();
                std::vector<double> fx(k);
                for (int i = 0; i < m; ++i) {
                    const double* tx = &tables_[r][0][i * k];
                    for (std::size_t a = 0; a < k; ++a) fx[a] = f[a] * tx[a];
                    for (int j = 0; j < m; ++j) {
                        const double* ty = &tables_[r][1][j * k];
                        double acc = 0.0;
                        for (std::size_t a = 0; a < k; ++a) acc += fx[a] * ty[a];
                        values[r][i * m + j] = acc;
                    }
                }
            } else {
                out.flags |= kDirectEvaluation;
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) {
                        const double x[2] = {coord(0, i), coord(1, j)};
                        values[r][i * m + j] = row.value(x, f);
                    }
            }
        }

        auto changes_sign = [&](const std::vector<double>& v, int i, int j) {
            bool pos = false, neg = false;
            for (int di = 0; di < 2; ++di)
                for (int dj = 0; dj < 2; ++dj) {
                    const double w = v[(i + di) * m + (j + dj)];
                    pos = pos || w >= 0.0;
                    neg = neg || w <= 0.0;
                }
            return pos && neg;
        };

        for (int i = 0; i < cells_; ++i)
            for (int j = 0; j < cells_; ++j) {
                if (!changes_sign(values[0], i, j) || !changes_sign(values[1], i, j)) continue;
                const Eigen::Vector2d center(coord(0, i) + 0.5 * width_[0], coord(1, j) + 0.5 * width_[1]);
                bool found_here = false;
                const Eigen::Vector2d starts[5] = {
                    center, {coord(0, i), coord(1, j)}, {coord(0, i + 1), coord(1, j)},
                    {coord(0, i), coord(1, j + 1)}, {coord(0, i + 1), coord(1, j + 1)}};
                for (const auto& start : starts) {
                    Eigen::Vector2d root;
                    if (!newton(start, f1, f2, root)) continue;
                    if (inside(root)) add_unique(out, root);
                    if (std::fabs(root[0] - center[0]) <= 1.5 * width_[0] &&
                        std::fabs(root[1] - center[1]) <= 1.5 * width_[1]) {
                        found_here = true;
                        break;
                    }
                }
                if (!found_here) out.flags |= kNewtonNotConverged;
            }
        out.count = static_cast<int>(out.roots.size());
        return out;
    }

private:
    double coord(int axis, int i) const {
        return i == cells_ ? box_.hi[axis] : box_.lo[axis] + width_[axis] * static_cast<double>(i);
    }

    bool inside(const Eigen::Vector2d& x) const {
        return x[0] >= box_.lo[0] && x[0] < box_.hi[0] && x[1] >= box_.lo[1] && x[1] < box_.hi[1];
    }

    static void add_unique(RootCountSample& out, const Eigen::Vector2d& root) {
        for (const auto& r : out.roots)
            if ((r - root).norm() < 1e-8) return;
        out.roots.push_back(root);
    }

    double residual(const Eigen::Vector2d& x, const Eigen::VectorXd& f1, const Eigen::VectorXd& f2,
                    Eigen::Vector2d& r, Eigen::Matrix2d* jac) const {
        double g1[2], g2[2];
        r[0] = rows_[0].value(x.data(), f1, jac ? g1 : nullptr);
        r[1] = rows_[1].value(x.data(), f2, jac ? g2 : nullptr);
        if (jac) *jac << g1[0], g1[1], g2[0], g2[1];
        return r.norm();
    }

    bool newton(Eigen::Vector2d x, const Eigen::VectorXd& f1, const Eigen::VectorXd& f2, Eigen::Vector2d& root) const {
        Eigen::Vector2d r;
        Eigen::Matrix2d jac;
        double norm = residual(x, f1, f2, r, &jac);
        for (int it = 0; it < 60; ++it) {
            const double det = jac.determinant();
            if (!std::isfinite(det) || std::fabs(det) < 1e-300) return false;
            const Eigen::Vector2d step = jac.inverse() * r;
            double t = 1.0;
            Eigen::Vector2d next, rn;
            double next_norm = norm;
            for (; t > 1e-6; t *= 0.5) {
                next = x - t * step;
                next_norm = residual(next, f1, f2, rn, nullptr);
                if (next_norm < norm || next_norm < 1e-15) break;
            }
            if (t <= 1e-6) return false;
            const double moved = (t * step).norm();
            x = next;
            norm = residual(x, f1, f2, r, &jac);
            if (!x.allFinite()) return false;
            if (moved < 1e-13 * (1.0 + x.norm()) || norm < 1e-15) {
                if (norm > 1e-9) return false;
                root = x;
                return true;
            }
        }
        return false;
    }

    ResidualRow rows_[2];
    DomainBox box_;
    int cells_;
    double width_[2] = {0, 0};
    bool separable_ = false;
    std::vector<double> tables_[2][2];
};

MonteCarloEstimate summarize(const std::vector<double>& values, const std::vector<std::uint32_t>& flags) {
    MonteCarloEstimate est;
    est.samples = values.size();
    if (values.empty()) return est;
    double sum = 0.0;
    for (double v : values) sum += v;
    est.mean = sum / values.size();
    double sq = 0.0;
    for (double v : values) sq += (v - est.mean) * (v - est.mean);
    if (values.size() > 1) est.standard_error = std::sqrt(sq / (values.size() - 1) / values.size());
    for (auto f : flags) {
        est.flags |= f;
        if (f) ++est.flagged_samples;
    }
    return est;
}

void check_system_spaces(std::span<const ExpSumSpace> spaces) {
    const int n = static_cast<int>(spaces.size());
    if (n < 1) throw ValidationError("need at least one space");
    for (const auto& s : spaces)
        if (s.dim() != n) throw ValidationError("a system of n equations needs n-dimensional spaces");
    if (n > 2) throw UnsupportedError("Monte Carlo root counting is implemented for n = 1 and n = 2");
}

// Counts roots of one sampled system in one orthant piece (x coordinates).
struct PieceCounter {
    SignVector sign;
    std::vector<UnivariateCounter> univariate;
    std::vector<BivariateCounter> bivariate;
};

std::vector<PieceCounter> build_counters(std::span<const ExpSumSpace> spaces,
                                         const std::vector<std::pair<SignVector, DomainUnion>>& pieces,
                                         const MonteCarloOptions& opts) {
    std::vector<PieceCounter> out;
    for (const auto& [s, region] : pieces) {
        PieceCounter pc{s, {}, {}};
        for (const auto& b : region.boxes()) {
            if (spaces.size() == 1)
                pc.univariate.emplace_back(spaces[0], b.lo[0], b.hi[0], opts.count1d);
            else
                pc.bivariate.emplace_back(spaces[0], spaces[1], b, opts.cells2d);
        }
        out.push_back(std::move(pc));
    }
    return out;
}

MonteCarloEstimate run_counts(std::span<const ExpSumSpace> spaces, const std::vector<PieceCounter>& counters,
                              std::size_t samples, std::uint64_t seed) {
    std::vector<ResidualRow> rows;
    for (const auto& s : spaces) rows.emplace_back(s);
    std::vector<double> counts(samples);
    std::vector<std::uint32_t> flags(samples);
    parallel_for(samples, [&](std::size_t k) {
        const SampledSystem sys = sample_system(spaces, seed, k);
        int total = 0;
        std::uint32_t fl = 0;
        for (const auto& pc : counters) {
            std::vector<Eigen::VectorXd> coeffs;
            for (std::size_t i = 0; i < rows.size(); ++i) coeffs.push_back(rows[i].reflect(sys.coefficients[i], pc.sign));
            for (const auto& c : pc.univariate) {
                const auto r = c.count(coeffs[0]);
                total += r.count;
                fl |= r.flags;
            }
            for (const auto& c : pc.bivariate) {
                const auto r = c.count(coeffs[0], coeffs[1]);
                total += r.count;
                fl |= r.flags;
            }
        }
        counts[k] = total;
        flags[k] = fl;
    });
    return summarize(counts, flags);
}

}  // namespace

SampledSystem sample_system(std::span<const ExpSumSpace> spaces, std::uint64_t seed, std::uint64_t sample_index) {
    SampledSystem sys;
    const CounterRng rng(seed);
    for (std::size_t i = 0; i < spaces.size(); ++i) {
        sys.spaces.push_back(spaces[i]);
        Eigen::VectorXd f(spaces[i].size());
        for (std::size_t a = 0; a < spaces[i].size(); ++a) f[a] = rng.normal(sample_index, i, a);
        sys.coefficients.push_back(std::move(f));
    }
    return sys;
}

Eigen::VectorXd evaluate_system(const SampledSystem& sys, const EvaluationPoint& x) {
    Eigen::VectorXd out(sys.spaces.size());
    for (std::size_t i = 0; i < sys.spaces.size(); ++i) {
        if (x.size() != sys.spaces[i].dim()) throw ValidationError("evaluation point has the wrong dimension");
        if (sys.coefficients[i].size() != static_cast<Eigen::Index>(sys.spaces[i].size()))
            throw ValidationError("coefficient vector length does not match the number of terms");
        out[i] = ResidualRow(sys.spaces[i]).value(x.data(), sys.coefficients[i]);
    }
    return out;
}

RootCountSample count_roots_1d(const SampledSystem& sys, const DomainBox& interval, const Count1dOptions& opts) {
    if (sys.spaces.size() != 1) throw ValidationError("univariate root counting needs exactly one equation");
    if (interval.lo.size() != 1 || interval.hi.size() != 1) throw ValidationError("interval must be 1D");
    const UnivariateCounter counter(sys.spaces[0], interval.lo[0], interval.hi[0], opts);
    return counter.count(sys.coefficients[0]);
}

RootCountSample count_roots_2d(const SampledSystem& sys, const DomainBox& box, int cells) {
    if (sys.spaces.size() != 2) throw ValidationError("bivariate root counting needs exactly two equations");
    const BivariateCounter counter(sys.spaces[0], sys.spaces[1], box, cells);
    return counter.count(sys.coefficients[0], sys.coefficients[1]);
}

MonteCarloEstimate estimate_expected_roots(std::span<const ExpSumSpace> spaces, const DomainUnion& domain,
                                           std::size_t samples, std::uint64_t seed, const MonteCarloOptions& opts) {
    check_system_spaces(spaces);
    if (domain.dim() != static_cast<int>(spaces.size())) throw ValidationError("domain has the wrong dimension");
    const std::vector<std::pair<SignVector, DomainUnion>> pieces = {{SignVector(spaces.size(), 1), domain}};
    return run_counts(spaces, build_counters(spaces, pieces, opts), samples, seed);
}

MonteCarloEstimate estimate_expected_roots_signed(std::span<const ExpSumSpace> spaces, const SignedDomain& w,
                                                  std::size_t samples, std::uint64_t seed,
                                                  const MonteCarloOptions& opts) {
    check_system_spaces(spaces);
    if (w.dim() != static_cast<int>(spaces.size())) throw ValidationError("signed domain has the wrong dimension");
    std::vector<std::pair<SignVector, DomainUnion>> pieces;
    for (const auto& [s, region] : w.pieces()) pieces.emplace_back(s, log_domain(region));
    return run_counts(spaces, build_counters(spaces, pieces, opts), samples, seed);
}

MonteCarloEstimate estimate_abs_det(std::span<const Eigen::MatrixXd> covariances, std::size_t samples,
                                    std::uint64_t seed) {
    const int n = static_cast<int>(covariances.size());
    if (n < 1) throw ValidationError("need at least one covariance");
    if (n > 4) throw UnsupportedError("Monte Carlo |det| is implemented up to n = 4");
    std::vector<Eigen::MatrixXd> roots;
    for (const auto& cov : covariances) {
        if (cov.rows() != n || cov.cols() != n) throw ValidationError("covariances must be n x n");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (cov + cov.transpose()));
        if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, cov.cwiseAbs().maxCoeff()))
            throw ValidationError("covariance is not positive semidefinite");
        const Eigen::VectorXd sq = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        roots.push_back(eig.eigenvectors() * sq.asDiagonal() * eig.eigenvectors().transpose());
    }
    const CounterRng rng(seed);
    std::vector<double> values(samples);
    std::vector<std::uint32_t> flags(samples, 0);
    parallel_for(samples, [&](std::size_t k) {
        Eigen::MatrixXd m(n, n);
        Eigen::VectorXd z(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) z[j] = rng.normal(k, i, j);
            m.row(i) = (roots[i] * z).transpose();
        }
        values[k] = std::fabs(m.determinant());
    });
    return summarize(values, flags);
}

}  // namespace kroots
