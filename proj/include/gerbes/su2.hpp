#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <array>
#include <vector>

#include "gerbes/angles.hpp"
#include "gerbes/complex.hpp"

namespace gerbes {

struct EndpointMismatch : ValidationError {
  using ValidationError::ValidationError;
};
struct BoundaryMismatch : ValidationError {
  using ValidationError::ValidationError;
};
struct BoundaryInconsistent : ValidationError {
  using ValidationError::ValidationError;
};
struct NoUnhitPoint : ValidationError {
  using ValidationError::ValidationError;
};

using Quat = Eigen::Quaterniond;

/// Geodesic interpolation on the unit quaternions as points of S^3 (q and
/// -q are distinct). Antipodal pairs take a deterministic detour through a
/// perturbed midpoint; *perturbed records when that happened.
Quat slerp_s3(const Quat& a, const Quat& b, double t,
              bool* perturbed = nullptr);

/// Principal-branch power q^t with the same antipode convention.
Quat qpow(const Quat& q, double t, bool* perturbed = nullptr);
Quat qmul(const Quat& a, const Quat& b);

inline double qdist(const Quat& a, const Quat& b) {
  return (a.coeffs() - b.coeffs()).norm();
}

/// Sampled map I -> SU(2) on a uniform grid with n+1 points, n a power of
/// two and at least 8.
struct Path {
  int n = 0;
  std::vector<Quat> s;
  bool perturbed = false;

  const Quat& at(int i) const { return s[i]; }
  Quat eval(double t) const;
  const Quat& start() const { return s.front(); }
  const Quat& end() const { return s.back(); }
};

struct Square {
  int n = 0;
  std::vector<Quat> s;  // (n+1)^2 row-major, s index major
  bool perturbed = false;

  const Quat& at(int i, int j) const { return s[i * (n + 1) + j]; }
  Quat& at(int i, int j) { return s[i * (n + 1) + j]; }
  Path row(int i) const;
  Path col(int j) const;
  Quat eval(double si, double tj) const;
};

struct Cube {
  int n = 0;
  std::vector<Quat> s;  // (n+1)^3, r major then s then t
  bool perturbed = false;

  const Quat& at(int r, int ss, int t) const {
    return s[(r * (n + 1) + ss) * (n + 1) + t];
  }
  Quat& at(int r, int ss, int t) {
    return s[(r * (n + 1) + ss) * (n + 1) + t];
  }
};

Path constant_path(const Quat& q, int n);
Square translate_square(const Quat& q, const Square& s);
Path geodesic_path(const Quat& a, const Quat& b, int n);
Path translate_path(const Quat& q, const Path& p);  // left translation
Path reverse_path(const Path& p);
Path resample(const Path& p, int n);

/// Concatenation b then a at double speed (a: x2->x3, b: x1->x2).
Path compose_paths(const Path& a, const Path& b);

enum class ComposeMode { Vertical, Horizontal };

/// Vertical: traverse b in s in [0,1/2] then a; horizontal: b in t then a.
Square compose_squares(const Square& a, const Square& b, ComposeMode mode);

Square constant_square(const Path& p, int n = -1);  // constant in s
Square reverse_s(const Square& sq);

Square associator_square(const Path& c34, const Path& c23, const Path& c12);

enum class Side { Left, Right };
Square identity_square(const Path& c, Side side);

/// Homotopy with fixed endpoints between two paths sharing endpoints:
/// pointwise geodesic interpolation.
Square fill_square(const Path& p0, const Path& p1);

/// Faces in the order r0, r1, s0, s1, t0, t1; r-faces indexed (s,t),
/// s-faces (r,t), t-faces (r,s). The interior is filled by stereographic
/// projection from an unhit point and radial interpolation from the center.
Cube fill_cube(const std::array<Square, 6>& faces);

/// Cube between two squares with identical boundary edges.
Cube cube_between(const Square& m1, const Square& m2);

/// Second-order finite-difference pullback of the normalized invariant
/// 3-form, summed over cells with pairwise summation. Integrates to 1 over
/// a chart covering the group once.
double integrate_nu_cube(const Cube& c);

/// Same quadrature on a rectangular box of samples, (nr+1)x(ns+1)x(nt+1)
/// in r-major order.
double integrate_nu_box(const std::vector<Quat>& samples, int nr, int ns,
                        int nt);

/// Degree of a sampled map S^3 -> SU(2) presented in a cube chart.
double degree_s3(const Cube& chart_samples);

/// The standard chart cube: (r,s,t) -> exp coordinates covering SU(2) once.
Quat su2_chart(double r, double s, double t);
Cube sample_su2_chart(int n);

/// z2 == z1 * exp(2 pi i Int F* nu) for the filled cube F between m1, m2.
bool equiv_check(const Square& m1, double z1, const Square& m2, double z2,
                 double tol = 5e-3);

/// Offset angle of the filled cube between two squares.
double equiv_offset(const Square& m1, const Square& m2);

/// |Int nu| over the filled coherence cycle of the four composable paths.
double pentagon_defect(const Path& c45, const Path& c34, const Path& c23,
                       const Path& c12);

}  // namespace gerbes
