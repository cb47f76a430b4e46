#include "kroots/lattice.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <limits>
#include <set>
#include <string>
#include <utility>

#include "kroots/errors.hpp"

namespace kroots {
namespace {

using i128 = __int128;

// Keeps every intermediate of the 3D predicates comfortably inside 128 bits.
constexpr std::int64_t kMaxCoordinate = std::int64_t{1} << 40;

struct Point2 {
    std::int64_t x, y;
    std::size_t source;
};

i128 cross2(const Point2& o, const Point2& a, const Point2& b) {
    return i128(a.x - o.x) * (b.y - o.y) - i128(a.y - o.y) * (b.x - o.x);
}

// Andrew's monotone chain. Returns the strictly convex hull in
// counter-clockwise order; collinear boundary points are dropped.
std::vector<Point2> convex_hull_2d(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    if (pts.size() <= 2) return pts;

    std::vector<Point2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross2(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

i128 twice_area(const std::vector<Point2>& ccw) {
    i128 acc = 0;
    for (std::size_t i = 0; i < ccw.size(); ++i) {
        const auto& a = ccw[i];
        const auto& b = ccw[(i + 1) % ccw.size()];
        acc += i128(a.x) * b.y - i128(a.y) * b.x;
    }
    return acc;
}

struct Point3 {
    std::int64_t x, y, z;
};

Point3 to_point3(const Exponent& e) { return {e[0], e[1], e[2]}; }

std::array<i128, 3> cross3(const Point3& o, const Point3& a, const Point3& b) {
    const i128 ax = a.x - o.x, ay = a.y - o.y, az = a.z - o.z;
    const i128 bx = b.x - o.x, by = b.y - o.y, bz = b.z - o.z;
    return {ay * bz - az * by, az * bx - ax * bz, ax * by - ay * bx};
}

// det(b - a, c - a, d - a): positive when d lies on the side of plane (a, b, c)
// that its normal (b - a) x (c - a) points to.
i128 orient3(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
    const auto n = cross3(a, b, c);
    return n[0] * (d.x - a.x) + n[1] * (d.y - a.y) + n[2] * (d.z - a.z);
}

bool is_zero(const std::array<i128, 3>& v) { return v[0] == 0 && v[1] == 0 && v[2] == 0; }

// Extreme points of a set of coplanar points with plane normal `normal`.
std::vector<std::size_t> planar_extreme_points(const std::vector<Point3>& pts,
                                               const std::vector<std::size_t>& members,
                                               const std::array<i128, 3>& normal) {
    int drop = 0;
    for (int k = 1; k < 3; ++k) {
        const i128 mk = normal[k] < 0 ? -normal[k] : normal[k];
        const i128 md = normal[drop] < 0 ? -normal[drop] : normal[drop];
        if (mk > md) drop = k;
    }
    std::vector<Point2> projected;
    projected.reserve(members.size());
    for (auto idx : members) {
        const auto& p = pts[idx];
        const std::int64_t c[3] = {p.x, p.y, p.z};
        const int u = drop == 0 ? 1 : 0;
        const int v = drop == 2 ? 1 : 2;
        projected.push_back({c[u], c[v], idx});
    }
    std::vector<std::size_t> out;
    for (const auto& q : convex_hull_2d(std::move(projected))) out.push_back(q.source);
    return out;
}

struct Hull3 {
    int affine_dim = 0;
    std::vector<std::size_t> extreme;  // indices into the deduplicated point list
    i128 six_volume = 0;
};

Hull3 hull_3d(const std::vector<Point3>& pts) {
    Hull3 out;
    const std::size_t n = pts.size();
    auto same = [](const Point3& a, const Point3& b) { return a.x == b.x && a.y == b.y && a.z == b.z; };

    std::size_t i1 = 1;
    while (i1 < n && same(pts[i1], pts[0])) ++i1;
    if (i1 >= n) {
        out.extreme = {0};
        return out;
    }
    std::size_t i2 = i1 + 1;
    while (i2 < n && is_zero(cross3(pts[0], pts[i1], pts[i2]))) ++i2;
    if (i2 >= n) {
        // Collinear; points are sorted lexicographically, which is a linear
        // order along the line, so the endpoints are the first and last.
        out.affine_dim = 1;
        out.extreme = {0, n - 1};
        return out;
    }
    const auto plane_normal = cross3(pts[0], pts[i1], pts[i2]);
    std::size_t i3 = i2 + 1;
    while (i3 < n && orient3(pts[0], pts[i1], pts[i2], pts[i3]) == 0) ++i3;
    if (i3 >= n) {
        out.affine_dim = 2;
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        out.extreme = planar_extreme_points(pts, all, plane_normal);
        return out;
    }
    out.affine_dim = 3;

    using Face = std::array<std::size_t, 3>;
    std::vector<Face> faces;
    const std::array<std::size_t, 4> simplex = {0, i1, i2, i3};
    for (int skip = 0; skip < 4; ++skip) {
        Face f{};
        int k = 0;
        for (int j = 0; j < 4; ++j)
            if (j != skip) f[k++] = simplex[j];
        if (orient3(pts[f[0]], pts[f[1]], pts[f[2]], pts[simplex[skip]]) > 0) std::swap(f[1], f[2]);
        faces.push_back(f);
    }

    for (std::size_t p = 0; p < n; ++p) {
        if (p == 0 || p == i1 || p == i2 || p == i3) continue;
        std::vector<Face> kept;
        std::set<std::pair<std::size_t, std::size_t>> visible_edges;
        kept.reserve(faces.size());
        for (const auto& f : faces) {
            if (orient3(pts[f[0]], pts[f[1]], pts[f[2]], pts[p]) > 0) {
                visible_edges.insert({f[0], f[1]});
                visible_edges.insert({f[1], f[2]});
                visible_edges.insert({f[2], f[0]});
            } else {
                kept.push_back(f);
            }
        }
        if (visible_edges.empty()) continue;
        for (const auto& [u, v] : visible_edges)
            if (!visible_edges.count({v, u})) kept.push_back({u, v, p});
        faces = std::move(kept);
    }

    for (const auto& f : faces) out.six_volume += orient3(pts[f[0]], pts[f[1]], pts[f[2]], pts[0]);
    out.six_volume = -out.six_volume;

    // Group triangles by supporting plane; the extreme points of the polytope
    // are the union of the extreme points of each facet polygon.
    std::vector<bool> done(faces.size(), false);
    std::set<std::size_t> extreme;
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
        if (done[fi]) continue;
        const auto& f = faces[fi];
        const Point3 &a = pts[f[0]], &b = pts[f[1]], &c = pts[f[2]];
        for (std::size_t gj = fi; gj < faces.size(); ++gj) {
            const auto& g = faces[gj];
            if (orient3(a, b, c, pts[g[0]]) == 0 && orient3(a, b, c, pts[g[1]]) == 0 &&
                orient3(a, b, c, pts[g[2]]) == 0)
                done[gj] = true;
        }
        std::vector<std::size_t> on_plane;
        for (std::size_t q = 0; q < n; ++q)
            if (orient3(a, b, c, pts[q]) == 0) on_plane.push_back(q);
        for (auto idx : planar_extreme_points(pts, on_plane, cross3(a, b, c))) extreme.insert(idx);
    }
    out.extreme.assign(extreme.begin(), extreme.end());
    return out;
}

void check_points(int dim, const std::vector<Exponent>& points) {
    if (dim < 1 || dim > 3)
        throw UnsupportedError("exact lattice hulls are implemented for dimensions 1 to 3, got " +
                               std::to_string(dim));
    if (points.empty()) throw ValidationError("lattice polytope needs at least one point");
    for (const auto& p : points) {
        if (static_cast<int>(p.size()) != dim)
            throw ValidationError("lattice point has length " + std::to_string(p.size()) +
                                  ", expected " + std::to_string(dim));
        for (auto c : p)
            if (c > kMaxCoordinate || c < -kMaxCoordinate)
                throw ValidationError("lattice coordinate out of range: " + std::to_string(c));
    }
}

struct HullResult {
    std::vector<Exponent> vertices;
    i128 normalized_volume = 0;
};

HullResult compute_hull(int dim, std::vector<Exponent> points) {
    check_points(dim, points);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    HullResult out;
    if (dim == 1) {
        out.vertices.push_back(points.front());
        if (points.size() > 1) out.vertices.push_back(points.back());
        out.normalized_volume = i128(points.back()[0]) - points.front()[0];
        return out;
    }
    if (dim == 2) {
        std::vector<Point2> p2;
        p2.reserve(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) p2.push_back({points[i][0], points[i][1], i});
        const auto hull = convex_hull_2d(std::move(p2));
        if (hull.size() >= 3) out.normalized_volume = twice_area(hull);
        for (const auto& q : hull) out.vertices.push_back(points[q.source]);
        std::sort(out.vertices.begin(), out.vertices.end());
        return out;
    }
    std::vector<Point3> p3;
    p3.reserve(points.size());
    for (const auto& p : points) p3.push_back(to_point3(p));
    const auto hull = hull_3d(p3);
    out.normalized_volume = hull.six_volume;
    for (auto idx : hull.extreme) out.vertices.push_back(points[idx]);
    std::sort(out.vertices.begin(), out.vertices.end());
    return out;
}

std::int64_t narrow(i128 v) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
        throw UnsupportedError("lattice volume exceeds 64-bit range");
    return static_cast<std::int64_t>(v);
}

}  // namespace

std::vector<Exponent> lattice_hull_vertices(int dim, std::vector<Exponent> points) {
    return compute_hull(dim, std::move(points)).vertices;
}

std::int64_t lattice_normalized_volume(int dim, const std::vector<Exponent>& points) {
    return narrow(compute_hull(dim, points).normalized_volume);
}

LatticePolytope::LatticePolytope(int dim, std::vector<Exponent> points)
    : dim_(dim), vertices_(lattice_hull_vertices(dim, std::move(points))) {}

std::int64_t LatticePolytope::normalized_volume() const { return lattice_normalized_volume(dim_, vertices_); }

double LatticePolytope::volume() const {
    double factorial = 1.0;
    for (int k = 2; k <= dim_; ++k) factorial *= k;
    return static_cast<double>(normalized_volume()) / factorial;
}

LatticePolytope LatticePolytope::dilate(std::int64_t factor) const {
    if (factor < 0) throw ValidationError("dilation factor must be nonnegative");
    std::vector<Exponent> scaled = vertices_;
    for (auto& v : scaled)
        for (auto& c : v) c *= factor;
    return LatticePolytope(dim_, std::move(scaled));
}

LatticePolytope minkowski_sum(const LatticePolytope& p, const LatticePolytope& q) {
    if (p.dim() != q.dim())
        throw ValidationError("Minkowski sum of polytopes of dimensions " + std::to_string(p.dim()) +
                              " and " + std::to_string(q.dim()));
    std::vector<Exponent> sums;
    sums.reserve(p.vertices().size() * q.vertices().size());
    for (const auto& a : p.vertices())
        for (const auto& b : q.vertices()) {
            Exponent s(a.size());
            for (std::size_t k = 0; k < a.size(); ++k) s[k] = a[k] + b[k];
            sums.push_back(std::move(s));
        }
    return LatticePolytope(p.dim(), std::move(sums));
}

}  // namespace kroots
