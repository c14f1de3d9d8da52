#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <string>
#include <vector>

#include "gerbes/complex.hpp"
#include "gerbes/su2.hpp"

namespace gerbes {

struct PoleTooClose : ValidationError {
  using ValidationError::ValidationError;
};

using Vec5 = Eigen::Matrix<double, 5, 1>;

/// Star cover of the 4-sphere from the boundary of the 5-simplex, radially
/// projected: six unit vertices, the combinatorial nerve, and normalized
/// barycenters as sample points.
struct SphereCover {
  Eigen::Matrix<double, 5, 6> vertices;  // columns
  Complex nerve;                          // boundary simplex on 6 vertices
  std::map<Face, Vec5> barycenter;

  /// m lies in the open star of vertex i iff its i-th affine coordinate is
  /// not the minimal one.
  bool in_star(int i, const Vec5& m) const;
  int fundamental_sign(int omitted_vertex) const {
    return omitted_vertex % 2 == 0 ? 1 : -1;
  }
};

SphereCover make_cover();

/// Clutched SU(2) transition data of instanton number k: three vertices per
/// chart, poles on the axis through the two opposite 2-face barycenters,
/// g_ij = u^{k (sigma_j - sigma_i)} for the normalized quaternionic
/// coordinate u.
struct Clutch {
  int k = 0;
  std::array<int, 6> sigma{};
  Vec5 pole;
  Eigen::Matrix<double, 5, 4> qframe;

  double chart_distance(const Vec5& m) const;
  Quat u(const Vec5& m) const;  // throws PoleTooClose below 0.1
  Quat gauge(int i, const Vec5& m) const;
  Quat transition(int i, int j, const Vec5& m) const;
};

Clutch make_clutch(const SphereCover& cover, int k);

Path path_gamma(const Clutch& c, int i, int j, const Vec5& m, int N);
Square square_gamma(const Clutch& c, int i, int j, int k, const Vec5& m,
                    int N);
double cocycle_value(const Clutch& c, int i, int j, int k, int l,
                     const Vec5& m, int N);

struct PontReport {
  int k = 0;
  int grid = 0;
  // per quadruple face: the evaluations at its incident quintuple barycenters
  struct QuadValue {
    Face quad;
    std::vector<std::pair<Face, double>> at;  // (quintuple face, angle)
  };
  std::vector<QuadValue> values;
  double delta_defect = 0.0;        // max distance of the 5-term sums to Z
  double integrality_defect = 0.0;  // max |lifted sum - rounded integer|
  double continuity_gap = 0.0;      // max spread of a quadruple's two values
  std::vector<std::int64_t> rounded;  // integer 4-cochain per quintuple
  std::int64_t class_coordinate = 0;  // H^4 = Z coordinate
  bool defect_exceeded = false;
  double elapsed_seconds = 0.0;
};

PontReport compute_p1(int k, int N, double delta_tol = 1e-2,
                      double integrality_tol = 0.1);

/// Winding of u^k over the equatorial 3-sphere; approximately k.
double degree_oracle(int k, int N);

}  // namespace gerbes
