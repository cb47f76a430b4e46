#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kroots/lattice.hpp"

namespace kroots {

/// Centered convex body with support function h(u) = sqrt(u^T M u).
/// M must be symmetric positive semidefinite; degenerate M (segments,
/// discs) are legal.
class EllipsoidBody {
public:
    explicit EllipsoidBody(Eigen::MatrixXd shape);

    int dim() const { return static_cast<int>(shape_.rows()); }
    const Eigen::MatrixXd& shape() const { return shape_; }
    double support(const Eigen::VectorXd& u) const;

    EllipsoidBody scaled(double lambda) const { return EllipsoidBody(lambda * lambda * shape_); }

private:
    Eigen::MatrixXd shape_;
};

double ball_volume(int n);
/// Vol(RP^n) = Vol(S^n) / 2.
double projective_volume(int n);
/// n!/(2 pi)^n Vol(B^n) Vol(RP^n) - 1, evaluated in log space, 1 <= n <= 30.
double tech_identity_residual(int n);

double ellipsoid_volume(const EllipsoidBody& body);

/// Options for mixed volumes of ellipsoid bodies.
///
/// grid == 0 selects the default route per dimension: the closed-form
/// elliptic-integral mixed area for n = 2, and a 20480-face geodesic grid
/// for n = 3. grid > 0 for n = 2 switches to polarization with a uniform
/// angular boundary quadrature of that many points; for n = 3 it is the
/// requested number of geodesic faces (rounded up to 20 * 4^k).
struct MixedVolumeOptions {
    int grid = 0;
};

/// Precomputed icosphere direction grids (two consecutive levels) for
/// repeated 3D Minkowski-sum volumes.
class GeodesicGrid {
public:
    /// `faces` is rounded up to 20 * 4^level; 0 selects 20480.
    explicit GeodesicGrid(int faces = 0);

    int level() const { return level_; }
    /// Volume of sum(bodies), Richardson-extrapolated between the two levels.
    double minkowski_volume(std::span<const EllipsoidBody> bodies) const;
    double mixed_volume(std::span<const EllipsoidBody> bodies) const;

private:
    struct Mesh {
        std::vector<Eigen::Vector3d> vertices;
        std::vector<std::array<int, 3>> faces;
    };
    static Mesh build(int level);
    static double polyhedron_volume(const Mesh& mesh, std::span<const EllipsoidBody> bodies);

    int level_;
    Mesh fine_;
    Mesh coarse_;
};

/// Mixed volume, normalized so MV(C, ..., C) = Vol(C). n <= 3.
double mixed_volume_ellipsoids(std::span<const EllipsoidBody> bodies, const MixedVolumeOptions& opts = {});

/// Mixed area of two centered planar ellipses from the complete elliptic
/// integral of the second kind. Exact up to rounding, including segments.
double mixed_area_closed_form(const Eigen::Matrix2d& m1, const Eigen::Matrix2d& m2);

/// Area of the Minkowski sum of planar ellipse bodies by
/// 1/2 int (h^2 - h'^2) dtheta on a uniform grid.
double minkowski_area_quadrature(std::span<const EllipsoidBody> bodies, int grid);

/// Volume of the Minkowski sum of 3D ellipsoid bodies, touch points on an
/// icosphere of the given subdivision level (20 * 4^level faces), with
/// Richardson extrapolation against level - 1.
double minkowski_volume_geodesic(std::span<const EllipsoidBody> bodies, int level);

/// Mixed volume of lattice polytopes by polarization over exact hull
/// volumes. n <= 3.
double mixed_volume_polytopes(std::span<const LatticePolytope> polys);

/// n! * MV as an exact integer (the BKK number of the tuple).
std::int64_t bkk_number(std::span<const LatticePolytope> polys);

/// E|det R| for independent rows r_i ~ N(0, cov_i), via n! MV of the
/// ellipsoidal zonoids with shape cov_i / (2 pi). n <= 3.
double expected_abs_det_gaussian(std::span<const Eigen::MatrixXd> covariances, const MixedVolumeOptions& opts = {});

}  // namespace kroots
