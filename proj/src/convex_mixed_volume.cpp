#include "kroots/convex_mixed_volume.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "kroots/errors.hpp"

namespace kroots {
namespace {

constexpr double kPsdTolerance = 1e-10;
constexpr int kDefaultGeodesicLevel = 5;  // 20 * 4^5 = 20480 faces

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

double log_ball_volume(int n) { return 0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n + 1.0); }

double log_projective_volume(int n) {
    const double h = 0.5 * (n + 1);
    return std::log(n + 1.0) + h * std::log(std::numbers::pi) - std::log(2.0) - std::lgamma(h + 1.0);
}

void check_dimension(int n, int max_dim, const char* what) {
    if (n < 1) throw ValidationError(std::string(what) + ": dimension must be positive");
    if (n > max_dim)
        throw UnsupportedError(std::string(what) + " is implemented up to dimension " + std::to_string(max_dim) +
                               ", got " + std::to_string(n));
}

// sqrt(u^T M u) and its touch point M u / sqrt(u^T M u); zero where the
// quadratic form vanishes (the gradient is undefined on a null set only).
double support_and_touch(const Eigen::MatrixXd& m, const Eigen::Vector3d& u, Eigen::Vector3d& touch) {
    const Eigen::Vector3d mu = m * u;
    const double q = u.dot(mu);
    if (q <= 0.0) {
        touch.setZero();
        return 0.0;
    }
    const double h = std::sqrt(q);
    touch = mu / h;
    return h;
}

int geodesic_level(int grid) {
    if (grid <= 0) return kDefaultGeodesicLevel;
    int level = 1;
    while (20L * (1L << (2 * level)) < grid) ++level;
    return level;
}

// Sum over nonempty subsets S of {0..n-1} of (-1)^{n-|S|} vol(S) / n!.
template <class VolumeOf>
double polarize(int n, VolumeOf&& volume_of) {
    double acc = 0.0;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        const int size = __builtin_popcount(mask);
        const double sign = ((n - size) % 2 == 0) ? 1.0 : -1.0;
        acc += sign * volume_of(mask);
    }
    return acc / factorial(n);
}

// Mixed volumes are equivariant under linear maps, so map the bodies by
// S^{-1/2}, S the sum of their shapes: the sum becomes the unit ball and no
// body is much thinner than the others. Equal bodies become exact balls.
std::vector<EllipsoidBody> round_off(std::span<const EllipsoidBody> bodies, double& factor) {
    const int n = bodies[0].dim();
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
    for (const auto& b : bodies) sum += b.shape();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sum);
    const auto& lambda = eig.eigenvalues();
    factor = 1.0;
    if (!(lambda.minCoeff() > 1e-300 * std::max(1.0, lambda.maxCoeff())))
        return {bodies.begin(), bodies.end()};  // flat configuration, leave as is
    const Eigen::MatrixXd t = eig.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal() *
                              eig.eigenvectors().transpose();
    factor = std::sqrt(lambda.prod());
    std::vector<EllipsoidBody> out;
    out.reserve(bodies.size());
    for (const auto& b : bodies) {
        Eigen::MatrixXd m = t * b.shape() * t;
        out.emplace_back(0.5 * (m + m.transpose()));
    }
    return out;
}

}  // namespace

EllipsoidBody::EllipsoidBody(Eigen::MatrixXd shape) : shape_(std::move(shape)) {
    if (shape_.rows() != shape_.cols() || shape_.rows() < 1)
        throw ValidationError("ellipsoid shape matrix must be square and nonempty");
    if (!shape_.allFinite()) throw ValidationError("ellipsoid shape matrix must be finite");
    const double scale = std::max(1.0, shape_.cwiseAbs().maxCoeff());
    if ((shape_ - shape_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ValidationError("ellipsoid shape matrix must be symmetric");
    shape_ = 0.5 * (shape_ + shape_.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(shape_, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -kPsdTolerance * scale)
        throw ValidationError("ellipsoid shape matrix is not positive semidefinite (eigenvalue " +
                              std::to_string(eig.eigenvalues().minCoeff()) + ")");
}

double EllipsoidBody::support(const Eigen::VectorXd& u) const {
    return std::sqrt(std::max(0.0, u.dot(shape_ * u)));
}

double ball_volume(int n) {
    if (n < 1) throw ValidationError("ball dimension must be positive");
    return std::exp(log_ball_volume(n));
}

double projective_volume(int n) {
    if (n < 1) throw ValidationError("projective space dimension must be positive");
    return std::exp(log_projective_volume(n));
}

double tech_identity_residual(int n) {
    if (n < 1 || n > 30) throw ValidationError("volume identity is evaluated for 1 <= n <= 30");
    const double log_lhs =
        std::lgamma(n + 1.0) - n * std::log(2.0 * std::numbers::pi) + log_ball_volume(n) + log_projective_volume(n);
    return std::expm1(log_lhs);
}

double ellipsoid_volume(const EllipsoidBody& body) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(body.shape(), Eigen::EigenvaluesOnly);
    double det = 1.0;
    for (double lambda : eig.eigenvalues()) det *= std::max(lambda, 0.0);
    return std::sqrt(det) * ball_volume(body.dim());
}

double mixed_area_closed_form(const Eigen::Matrix2d& m1, const Eigen::Matrix2d& m2) {
    // Generalized eigenvalues of the pencil (m1, m2) give the semi-axes of m1
    // in the frame where m2 is the unit disc; the mixed area is then half the
    // perimeter of that ellipse times sqrt(det m2). Written symmetrically:
    //   c = tr(adj(m1) m2),  s = sqrt(c^2 - 4 det m1 det m2),
    //   MV = sqrt(2 (c + s)) E(k),  k^2 = 2 s / (c + s).
    const double c = std::max(0.0, m1(0, 0) * m2(1, 1) + m1(1, 1) * m2(0, 0) - 2.0 * m1(0, 1) * m2(0, 1));
    const double d = std::max(0.0, m1.determinant()) * std::max(0.0, m2.determinant());
    const double s = std::sqrt(std::max(0.0, c * c - 4.0 * d));
    if (c + s <= 0.0) return 0.0;
    const double k2 = std::min(1.0, 2.0 * s / (c + s));
    return std::sqrt(2.0 * (c + s)) * std::comp_ellint_2(std::sqrt(k2));
}

double minkowski_area_quadrature(std::span<const EllipsoidBody> bodies, int grid) {
    if (grid < 8) throw ValidationError("angular grid needs at least 8 points");
    const double step = 2.0 * std::numbers::pi / grid;
    double acc = 0.0;
    for (int k = 0; k < grid; ++k) {
        const double theta = k * step;
        const Eigen::Vector2d u(std::cos(theta), std::sin(theta));
        const Eigen::Vector2d du(-u.y(), u.x());
        double h = 0.0, dh = 0.0;
        for (const auto& b : bodies) {
            const Eigen::Matrix2d m = b.shape();
            const double q = u.dot(m * u);
            if (q <= 0.0) continue;
            const double sq = std::sqrt(q);
            h += sq;
            dh += u.dot(m * du) / sq;
        }
        acc += h * h - dh * dh;
    }
    return 0.5 * acc * step;
}

GeodesicGrid::GeodesicGrid(int faces)
    : level_(geodesic_level(faces)), fine_(build(level_)), coarse_(build(level_ - 1)) {}

GeodesicGrid::Mesh GeodesicGrid::build(int level) {
    Mesh s;
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    const double raw[12][3] = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                               {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    for (const auto& r : raw) s.vertices.push_back(Eigen::Vector3d(r[0], r[1], r[2]).normalized());
    s.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
               {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
               {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> midpoints;
        auto midpoint = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoints.find(key);
            if (it != midpoints.end()) return it->second;
            s.vertices.push_back((s.vertices[a] + s.vertices[b]).normalized());
            const int idx = static_cast<int>(s.vertices.size()) - 1;
            midpoints.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(s.faces.size() * 4);
        for (const auto& f : s.faces) {
            const int ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        s.faces = std::move(next);
    }
    return s;
}

// The touch points of the Minkowski sum, connected with the icosphere's
// triangulation, bound a polyhedron inscribed in the body.
double GeodesicGrid::polyhedron_volume(const Mesh& mesh, std::span<const EllipsoidBody> bodies) {
    std::vector<Eigen::Vector3d> touch(mesh.vertices.size(), Eigen::Vector3d::Zero());
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        Eigen::Vector3d acc = Eigen::Vector3d::Zero(), p;
        for (const auto& b : bodies) {
            support_and_touch(b.shape(), mesh.vertices[v], p);
            acc += p;
        }
        touch[v] = acc;
    }
    double six_volume = 0.0;
    for (const auto& f : mesh.faces) six_volume += touch[f[0]].dot(touch[f[1]].cross(touch[f[2]]));
    return std::fabs(six_volume) / 6.0;
}

double GeodesicGrid::minkowski_volume(std::span<const EllipsoidBody> bodies) const {
    for (const auto& b : bodies)
        if (b.dim() != 3) throw ValidationError("geodesic volumes need 3D bodies");
    return (4.0 * polyhedron_volume(fine_, bodies) - polyhedron_volume(coarse_, bodies)) / 3.0;
}

double GeodesicGrid::mixed_volume(std::span<const EllipsoidBody> bodies) const {
    if (bodies.size() != 3) throw ValidationError("3D mixed volume needs three bodies");
    double factor = 1.0;
    const auto rounded = round_off(bodies, factor);
    return factor * polarize(3, [&](unsigned mask) {
        std::vector<EllipsoidBody> chosen;
        for (int i = 0; i < 3; ++i)
            if (mask & (1u << i)) chosen.push_back(rounded[i]);
        return minkowski_volume(chosen);
    });
}

double minkowski_volume_geodesic(std::span<const EllipsoidBody> bodies, int level) {
    if (level < 1) throw ValidationError("geodesic level must be at least 1");
    return GeodesicGrid(20 * (1 << (2 * level))).minkowski_volume(bodies);
}

double mixed_volume_ellipsoids(std::span<const EllipsoidBody> bodies, const MixedVolumeOptions& opts) {
    const int n = static_cast<int>(bodies.size());
    check_dimension(n, 3, "mixed volume of ellipsoids");
    for (const auto& b : bodies)
        if (b.dim() != n)
            throw ValidationError("mixed volume needs " + std::to_string(n) + " bodies of dimension " +
                                  std::to_string(n) + ", got one of dimension " + std::to_string(b.dim()));

    if (n == 1) return 2.0 * std::sqrt(std::max(0.0, bodies[0].shape()(0, 0)));

    if (n == 2) {
        if (opts.grid <= 0) return mixed_area_closed_form(bodies[0].shape(), bodies[1].shape());
        double factor = 1.0;
        const auto rounded = round_off(bodies, factor);
        return factor * polarize(2, [&](unsigned mask) {
            std::vector<EllipsoidBody> chosen;
            for (int i = 0; i < 2; ++i)
                if (mask & (1u << i)) chosen.push_back(rounded[i]);
            return minkowski_area_quadrature(chosen, opts.grid);
        });
    }

    return GeodesicGrid(opts.grid).mixed_volume(bodies);
}

std::int64_t bkk_number(std::span<const LatticePolytope> polys) {
    const int n = static_cast<int>(polys.size());
    check_dimension(n, 3, "mixed volume of polytopes");
    for (const auto& p : polys)
        if (p.dim() != n)
            throw ValidationError("mixed volume needs " + std::to_string(n) + " polytopes of dimension " +
                                  std::to_string(n) + ", got one of dimension " + std::to_string(p.dim()));
    __int128 acc = 0;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::optional<LatticePolytope> sum;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) sum = sum ? minkowski_sum(*sum, polys[i]) : polys[i];
        const int size = __builtin_popcount(mask);
        const __int128 nv = sum->normalized_volume();
        acc += ((n - size) % 2 == 0) ? nv : -nv;
    }
    const auto nf = static_cast<__int128>(factorial(n));
    if (acc % nf != 0) throw std::logic_error("lattice mixed volume is not a multiple of 1/n!");
    return static_cast<std::int64_t>(acc / nf);
}

double mixed_volume_polytopes(std::span<const LatticePolytope> polys) {
    return static_cast<double>(bkk_number(polys)) / factorial(static_cast<int>(polys.size()));
}

double expected_abs_det_gaussian(std::span<const Eigen::MatrixXd> covariances, const MixedVolumeOptions& opts) {
    const int n = static_cast<int>(covariances.size());
    check_dimension(n, 3, "expected |det| closed form");
    std::vector<EllipsoidBody> bodies;
    bodies.reserve(n);
    for (const auto& cov : covariances) bodies.emplace_back(cov / (2.0 * std::numbers::pi));
    return factorial(n) * mixed_volume_ellipsoids(bodies, opts);
}

}  // namespace kroots
