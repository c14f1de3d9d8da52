#include "gerbes/su2.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gerbes {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kAntipodeTol = 1e-12;

Eigen::Vector4d coeffs(const Quat& q) { return q.coeffs(); }

Quat from_coeffs(const Eigen::Vector4d& v) {
  Quat q;
  q.coeffs() = v;
  return q;
}

// deterministic unit vector orthogonal to a, derived from the component
// pattern of a
Eigen::Vector4d ortho_dir(const Eigen::Vector4d& a) {
  int m = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(a[i]) < std::abs(a[m])) m = i;
  Eigen::Vector4d e = Eigen::Vector4d::Zero();
  e[m] = 1.0;
  Eigen::Vector4d v = e - a.dot(e) * a;
  return v.normalized();
}

}  // namespace

Quat qmul(const Quat& a, const Quat& b) { return a * b; }

Quat slerp_s3(const Quat& a, const Quat& b, double t, bool* perturbed) {
  Eigen::Vector4d va = coeffs(a), vb = coeffs(b);
  double d = va.dot(vb);
  if (d < -1.0 + kAntipodeTol) {
    // antipodal: deterministic detour direction
    if (perturbed) *perturbed = true;
    vb = (vb + 1e-9 * ortho_dir(va)).normalized();
    d = va.dot(vb);
  }
  d = std::clamp(d, -1.0, 1.0);
  double omega = std::acos(d);
  if (omega < 1e-9) {
    Eigen::Vector4d v = ((1.0 - t) * va + t * vb).normalized();
    return from_coeffs(v);
  }
  double so = std::sin(omega);
  Eigen::Vector4d v =
      (std::sin((1.0 - t) * omega) / so) * va + (std::sin(t * omega) / so) * vb;
  return from_coeffs(v.normalized());
}

Quat qpow(const Quat& q, double t, bool* perturbed) {
  return slerp_s3(Quat::Identity(), q, t, perturbed);
}

Quat Path::eval(double t) const {
  double u = t * n;
  int i = static_cast<int>(std::floor(u));
  if (i < 0) i = 0;
  if (i >= n) return s[n];
  double f = u - i;
  if (f == 0.0) return s[i];
  return slerp_s3(s[i], s[i + 1], f);
}

Path Square::row(int i) const {
  Path p;
  p.n = n;
  p.perturbed = perturbed;
  p.s.reserve(n + 1);
  for (int j = 0; j <= n; ++j) p.s.push_back(at(i, j));
  return p;
}

Path Square::col(int j) const {
  Path p;
  p.n = n;
  p.perturbed = perturbed;
  p.s.reserve(n + 1);
  for (int i = 0; i <= n; ++i) p.s.push_back(at(i, j));
  return p;
}

Quat Square::eval(double si, double tj) const {
  double u = si * n;
  int i = static_cast<int>(std::floor(u));
  if (i >= n) i = n - 1;
  if (i < 0) i = 0;
  double f = u - i;
  Quat lo = row(i).eval(tj);
  if (f == 0.0) return lo;
  Quat hi = row(i + 1).eval(tj);
  return slerp_s3(lo, hi, f);
}

Square translate_square(const Quat& q, const Square& sq) {
  Square out = sq;
  for (size_t i = 0; i < sq.s.size(); ++i)
    out.s[i] = (q * sq.s[i]).normalized();
  return out;
}

Path constant_path(const Quat& q, int n) {
  Path p;
  p.n = n;
  p.s.assign(n + 1, q.normalized());
  return p;
}

Path geodesic_path(const Quat& a, const Quat& b, int n) {
  Path p;
  p.n = n;
  p.s.reserve(n + 1);
  bool pert = false;
  for (int i = 0; i <= n; ++i)
    p.s.push_back(slerp_s3(a, b, static_cast<double>(i) / n, &pert));
  p.perturbed = pert;
  return p;
}

Path translate_path(const Quat& q, const Path& p) {
  Path out = p;
  for (size_t i = 0; i < p.s.size(); ++i) out.s[i] = (q * p.s[i]).normalized();
  return out;
}

Path reverse_path(const Path& p) {
  Path out = p;
  std::reverse(out.s.begin(), out.s.end());
  return out;
}

Path resample(const Path& p, int n) {
  if (p.n == n) return p;
  Path out;
  out.n = n;
  out.perturbed = p.perturbed;
  out.s.reserve(n + 1);
  for (int i = 0; i <= n; ++i)
    out.s.push_back(p.eval(static_cast<double>(i) / n));
  return out;
}

Path compose_paths(const Path& a, const Path& b) {
  if (qdist(b.end(), a.start()) > 1e-9)
    throw EndpointMismatch("paths do not share the middle endpoint");
  int n = std::max(a.n, b.n);
  Path A = resample(a, n), B = resample(b, n);
  Path out;
  out.n = n;
  out.perturbed = A.perturbed || B.perturbed;
  out.s.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    double t = static_cast<double>(i) / n;
    out.s[i] = (2 * i <= n) ? B.eval(2 * t) : A.eval(2 * t - 1);
  }
  return out;
}

Square compose_squares(const Square& a, const Square& b, ComposeMode mode) {
  int n = std::max(a.n, b.n);
  if (a.n != n || b.n != n)
    throw BoundaryMismatch("squares must share one grid");
  Square out;
  out.n = n;
  out.perturbed = a.perturbed || b.perturbed;
  out.s.resize((n + 1) * (n + 1));
  if (mode == ComposeMode::Vertical) {
    for (int j = 0; j <= n; ++j)
      if (qdist(b.at(n, j), a.at(0, j)) > 1e-9)
        throw BoundaryMismatch("vertical: shared row differs");
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        out.at(i, j) = (2 * i <= n) ? b.at(std::min(2 * i, n), j)
                                    : a.at(2 * i - n, j);
  } else {
    for (int i = 0; i <= n; ++i)
      if (qdist(b.at(i, n), a.at(i, 0)) > 1e-9)
        throw BoundaryMismatch("horizontal: shared column differs");
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        out.at(i, j) = (2 * j <= n) ? b.at(i, std::min(2 * j, n))
                                    : a.at(i, 2 * j - n);
  }
  return out;
}

Square constant_square(const Path& p, int n) {
  if (n < 0) n = p.n;
  Path q = resample(p, n);
  Square out;
  out.n = n;
  out.perturbed = q.perturbed;
  out.s.resize((n + 1) * (n + 1));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) out.at(i, j) = q.at(j);
  return out;
}

Square reverse_s(const Square& sq) {
  Square out = sq;
  for (int i = 0; i <= sq.n; ++i)
    for (int j = 0; j <= sq.n; ++j) out.at(i, j) = sq.at(sq.n - i, j);
  return out;
}

Square associator_square(const Path& c34, const Path& c23, const Path& c12) {
  if (qdist(c12.end(), c23.start()) > 1e-9 ||
      qdist(c23.end(), c34.start()) > 1e-9)
    throw EndpointMismatch("associator needs composable paths");
  int n = std::max(c34.n, std::max(c23.n, c12.n));
  Path a = resample(c34, n), b = resample(c23, n), c = resample(c12, n);
  Square out;
  out.n = n;
  out.perturbed = a.perturbed || b.perturbed || c.perturbed;
  out.s.resize((n + 1) * (n + 1));
  for (int i = 0; i <= n; ++i) {
    double si = static_cast<double>(i) / n;
    for (int j = 0; j <= n; ++j) {
      double t = static_cast<double>(j) / n;
      if (t <= (2 - si) / 4) {
        out.at(i, j) = c.eval(4 * t / (2 - si));
      } else if (t <= (3 - si) / 4) {
        out.at(i, j) = b.eval(4 * t - 2 + si);
      } else {
        out.at(i, j) = a.eval((4 * t - 3 + si) / (1 + si));
      }
    }
  }
  return out;
}

Square identity_square(const Path& c, Side side) {
  int n = c.n;
  Square out;
  out.n = n;
  out.perturbed = c.perturbed;
  out.s.resize((n + 1) * (n + 1));
  for (int i = 0; i <= n; ++i) {
    double si = static_cast<double>(i) / n;
    for (int j = 0; j <= n; ++j) {
      double t = static_cast<double>(j) / n;
      if (side == Side::Left) {
        out.at(i, j) =
            (t <= si / 2) ? c.start() : c.eval((2 * t - si) / (2 - si));
      } else {
        out.at(i, j) =
            (t <= 1.0 / (si + 1)) ? c.eval((si + 1) * t) : c.end();
      }
    }
  }
  return out;
}

Square fill_square(const Path& p0, const Path& p1) {
  if (qdist(p0.start(), p1.start()) > 1e-9 ||
      qdist(p0.end(), p1.end()) > 1e-9)
    throw EndpointMismatch("fill_square needs shared endpoints");
  int n = std::max(p0.n, p1.n);
  Path a = resample(p0, n), b = resample(p1, n);
  Square out;
  out.n = n;
  out.s.resize((n + 1) * (n + 1));
  bool pert = a.perturbed || b.perturbed;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      out.at(i, j) =
          slerp_s3(a.at(j), b.at(j), static_cast<double>(i) / n, &pert);
  out.perturbed = pert;
  return out;
}

namespace {

// low-discrepancy candidate points on S^3 for the unhit-point search
std::vector<Quat> unhit_candidates() {
  std::vector<Quat> out;
  const double g1 = 0.6180339887498949, g2 = 0.7548776662466927,
               g3 = 0.5698402909980532;
  for (int k = 1; k <= 64; ++k) {
    double u = std::fmod(k * g1, 1.0), v = std::fmod(k * g2, 1.0),
           w = std::fmod(k * g3, 1.0);
    double alpha = kPi * u, beta = kPi * v, gamma = 2 * kPi * w;
    Quat q(std::cos(alpha), std::sin(alpha) * std::cos(beta),
           std::sin(alpha) * std::sin(beta) * std::cos(gamma),
           std::sin(alpha) * std::sin(beta) * std::sin(gamma));
    out.push_back(q);
  }
  return out;
}

struct Stereo {
  Eigen::Vector4d pole;
  Eigen::Matrix<double, 4, 3> frame;

  Eigen::Vector3d project(const Quat& q) const {
    Eigen::Vector4d v = q.coeffs();
    double denom = 1.0 - pole.dot(v);
    return (frame.transpose() * v) / denom;
  }
  Quat lift(const Eigen::Vector3d& x) const {
    double n2 = x.squaredNorm();
    Eigen::Vector4d v = ((n2 - 1.0) / (n2 + 1.0)) * pole +
                        (2.0 / (n2 + 1.0)) * (frame * x);
    Quat q;
    q.coeffs() = v.normalized();
    return q;
  }
};

Stereo make_stereo(const Quat& pole) {
  Stereo st;
  st.pole = pole.coeffs();
  // Gram-Schmidt a 3-frame orthogonal to the pole
  int col = 0;
  for (int e = 0; e < 4 && col < 3; ++e) {
    Eigen::Vector4d v = Eigen::Vector4d::Zero();
    v[e] = 1.0;
    v -= st.pole.dot(v) * st.pole;
    for (int c = 0; c < col; ++c) v -= st.frame.col(c).dot(v) * st.frame.col(c);
    if (v.norm() > 1e-6) st.frame.col(col++) = v.normalized();
  }
  return st;
}

}  // namespace

Cube fill_cube(const std::array<Square, 6>& faces) {
  const int n = faces[0].n;
  for (const Square& f : faces)
    if (f.n != n) throw BoundaryInconsistent("faces on different grids");

  Cube out;
  out.n = n;
  out.s.resize((n + 1) * (n + 1) * (n + 1));
  for (const Square& f : faces) out.perturbed = out.perturbed || f.perturbed;

  // write the boundary; verify agreement on shared edges
  std::vector<char> assigned((n + 1) * (n + 1) * (n + 1), 0);
  auto put = [&](int r, int ss, int t, const Quat& q) {
    size_t idx = (r * (n + 1) + ss) * (n + 1) + t;
    if (assigned[idx]) {
      if (qdist(out.s[idx], q) > 1e-9)
        throw BoundaryInconsistent("face edges disagree");
      return;
    }
    assigned[idx] = 1;
    out.s[idx] = q;
  };
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b) {
      put(0, a, b, faces[0].at(a, b));
      put(n, a, b, faces[1].at(a, b));
      put(a, 0, b, faces[2].at(a, b));
      put(a, n, b, faces[3].at(a, b));
      put(a, b, 0, faces[4].at(a, b));
      put(a, b, n, faces[5].at(a, b));
    }

  // unhit point: candidate farthest from every boundary sample
  std::vector<Quat> boundary;
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b)
      for (const Square& f : faces) boundary.push_back(f.at(a, b));
  Quat best = Quat::Identity();
  double best_dist = -1.0;
  for (const Quat& cand : unhit_candidates()) {
    double mind = 2.0;
    for (const Quat& q : boundary)
      mind = std::min(mind, qdist(cand, q));
    if (mind > best_dist) {
      best_dist = mind;
      best = cand;
    }
  }
  if (best_dist < 1e-6)
    throw NoUnhitPoint("boundary image is dense on the 3-sphere");

  Stereo st = make_stereo(best);

  // project the boundary faces once
  std::array<std::vector<Eigen::Vector3d>, 6> proj;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  for (int f = 0; f < 6; ++f) {
    proj[f].resize((n + 1) * (n + 1));
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= n; ++b) {
        proj[f][a * (n + 1) + b] = st.project(faces[f].at(a, b));
        center += proj[f][a * (n + 1) + b];
      }
  }
  center /= 6.0 * (n + 1) * (n + 1);

  auto face_value = [&](int f, double a, double b) {
    double ua = a * n, ub = b * n;
    int ia = std::min(static_cast<int>(std::floor(ua)), n - 1);
    int ib = std::min(static_cast<int>(std::floor(ub)), n - 1);
    double fa = ua - ia, fb = ub - ib;
    const auto& P = proj[f];
    const Eigen::Vector3d& v00 = P[ia * (n + 1) + ib];
    const Eigen::Vector3d& v01 = P[ia * (n + 1) + ib + 1];
    const Eigen::Vector3d& v10 = P[(ia + 1) * (n + 1) + ib];
    const Eigen::Vector3d& v11 = P[(ia + 1) * (n + 1) + ib + 1];
    return ((1 - fa) * ((1 - fb) * v00 + fb * v01) +
            fa * ((1 - fb) * v10 + fb * v11));
  };

  // boundary value along the ray from the cube center through p
  auto boundary_value = [&](const Eigen::Vector3d& p) {
    Eigen::Vector3d c0(0.5, 0.5, 0.5);
    Eigen::Vector3d dvec = p - c0;
    double scale = 0.0;
    for (int d = 0; d < 3; ++d)
      scale = std::max(scale, std::abs(dvec[d]) / 0.5);
    Eigen::Vector3d b = c0 + dvec / scale;
    // identify the face b lies on (priority r0,r1,s0,s1,t0,t1)
    const double eps = 1e-12;
    if (b[0] <= eps) return face_value(0, b[1], b[2]);
    if (b[0] >= 1 - eps) return face_value(1, b[1], b[2]);
    if (b[1] <= eps) return face_value(2, b[0], b[2]);
    if (b[1] >= 1 - eps) return face_value(3, b[0], b[2]);
    if (b[2] <= eps) return face_value(4, b[0], b[1]);
    return face_value(5, b[0], b[1]);
  };

  for (int r = 1; r < n; ++r)
    for (int ss = 1; ss < n; ++ss)
      for (int t = 1; t < n; ++t) {
        Eigen::Vector3d p(static_cast<double>(r) / n,
                          static_cast<double>(ss) / n,
                          static_cast<double>(t) / n);
        Eigen::Vector3d c0(0.5, 0.5, 0.5);
        Eigen::Vector3d dvec = p - c0;
        double rho = 0.0;
        for (int d = 0; d < 3; ++d)
          rho = std::max(rho, std::abs(dvec[d]) / 0.5);
        Eigen::Vector3d val =
            (rho == 0.0)
                ? center
                : (center + rho * (boundary_value(p) - center)).eval();
        out.at(r, ss, t) = st.lift(val);
      }
  return out;
}

Cube cube_between(const Square& m1, const Square& m2) {
  const int n = m1.n;
  if (m2.n != n) throw BoundaryMismatch("squares on different grids");
  for (int j = 0; j <= n; ++j) {
    if (qdist(m1.at(0, j), m2.at(0, j)) > 1e-9 ||
        qdist(m1.at(n, j), m2.at(n, j)) > 1e-9)
      throw BoundaryMismatch("squares do not share boundary rows");
  }
  for (int i = 0; i <= n; ++i) {
    if (qdist(m1.at(i, 0), m2.at(i, 0)) > 1e-9 ||
        qdist(m1.at(i, n), m2.at(i, n)) > 1e-9)
      throw BoundaryMismatch("squares do not share boundary columns");
  }
  std::array<Square, 6> faces;
  faces[0] = m1;
  faces[1] = m2;
  faces[2] = constant_square(m1.row(0));  // s = 0 face, constant in r
  faces[3] = constant_square(m1.row(n));
  Square t0, t1;
  t0.n = t1.n = n;
  t0.s.assign((n + 1) * (n + 1), Quat::Identity());
  t1.s.assign((n + 1) * (n + 1), Quat::Identity());
  for (int r = 0; r <= n; ++r)
    for (int ss = 0; ss <= n; ++ss) {
      t0.at(r, ss) = m1.at(ss, 0);
      t1.at(r, ss) = m1.at(ss, n);
    }
  faces[4] = t0;
  faces[5] = t1;
  return fill_cube(faces);
}

double integrate_nu_box(const std::vector<Quat>& samples, int nr, int ns,
                        int nt) {
  std::vector<double> cells;
  cells.reserve(static_cast<size_t>(nr) * ns * nt);
  const double norm = 1.0 / (2.0 * kPi * kPi);
  auto at = [&](int r, int s2, int t) -> const Quat& {
    return samples[(r * (ns + 1) + s2) * (nt + 1) + t];
  };
  for (int r = 0; r < nr; ++r)
    for (int ss = 0; ss < ns; ++ss)
      for (int t = 0; t < nt; ++t) {
        Eigen::Vector4d q[8];
        for (int b = 0; b < 8; ++b)
          q[b] = at(r + ((b >> 2) & 1), ss + ((b >> 1) & 1), t + (b & 1))
                     .coeffs();
        Eigen::Vector4d dr = Eigen::Vector4d::Zero(),
                        ds = Eigen::Vector4d::Zero(),
                        dt = Eigen::Vector4d::Zero();
        for (int b = 0; b < 8; ++b) {
          if (!((b >> 2) & 1)) dr += q[b | 4] - q[b];
          if (!((b >> 1) & 1)) ds += q[b | 2] - q[b];
          if (!(b & 1)) dt += q[b | 1] - q[b];
        }
        dr /= 4;
        ds /= 4;
        dt /= 4;
        Eigen::Vector4d g0 = Eigen::Vector4d::Zero();
        for (int b = 0; b < 8; ++b) g0 += q[b];
        g0.normalize();
        Quat qg0;
        qg0.coeffs() = g0;
        Quat ginv = qg0.conjugate();
        auto logd = [&](const Eigen::Vector4d& d) {
          Quat qd;
          qd.coeffs() = d;
          Quat m = qd * ginv;
          return Eigen::Vector3d(m.x(), m.y(), m.z());
        };
        Eigen::Vector3d a = logd(dr), b2 = logd(ds), c2 = logd(dt);
        cells.push_back(norm * a.dot(b2.cross(c2)));
      }
  // fixed-order pairwise summation
  std::vector<double> acc = std::move(cells);
  while (acc.size() > 1) {
    std::vector<double> next;
    next.reserve((acc.size() + 1) / 2);
    for (size_t i = 0; i + 1 < acc.size(); i += 2)
      next.push_back(acc[i] + acc[i + 1]);
    if (acc.size() % 2) next.push_back(acc.back());
    acc = std::move(next);
  }
  return acc.empty() ? 0.0 : acc[0];
}

double integrate_nu_cube(const Cube& c) {
  return integrate_nu_box(c.s, c.n, c.n, c.n);
}

double degree_s3(const Cube& chart_samples) {
  return integrate_nu_cube(chart_samples);
}

Quat su2_chart(double r, double s, double t) {
  double alpha = kPi * r, beta = kPi * s, gamma = 2 * kPi * t;
  return Quat(std::cos(alpha), std::sin(alpha) * std::cos(beta),
              std::sin(alpha) * std::sin(beta) * std::cos(gamma),
              std::sin(alpha) * std::sin(beta) * std::sin(gamma));
}

Cube sample_su2_chart(int n) {
  Cube c;
  c.n = n;
  c.s.resize((n + 1) * (n + 1) * (n + 1));
  for (int r = 0; r <= n; ++r)
    for (int ss = 0; ss <= n; ++ss)
      for (int t = 0; t <= n; ++t)
        c.at(r, ss, t) =
            su2_chart(static_cast<double>(r) / n, static_cast<double>(ss) / n,
                      static_cast<double>(t) / n);
  return c;
}

double equiv_offset(const Square& m1, const Square& m2) {
  Cube F = cube_between(m1, m2);
  return integrate_nu_cube(F);
}

bool equiv_check(const Square& m1, double z1, const Square& m2, double z2,
                 double tol) {
  double integral = equiv_offset(m1, m2);
  return angle_dist(z2, z1 + integral) <= tol;
}

double pentagon_defect(const Path& c45, const Path& c34, const Path& c23,
                       const Path& c12) {
  // the five coherence 2-cells around the associativity cycle
  Square S1 = compose_squares(associator_square(c45, c34, c23),
                              constant_square(c12), ComposeMode::Horizontal);
  Square S2 = associator_square(c45, compose_paths(c34, c23), c12);
  Square S3 = compose_squares(constant_square(c45),
                              associator_square(c34, c23, c12),
                              ComposeMode::Horizontal);
  Square S4 = reverse_s(associator_square(c45, c34, compose_paths(c23, c12)));
  Square S5 = reverse_s(associator_square(compose_paths(c45, c34), c23, c12));

  Square X1 = compose_squares(S2, S1, ComposeMode::Vertical);
  Square X2 = compose_squares(S4, S3, ComposeMode::Vertical);
  Square X3 = compose_squares(X2, X1, ComposeMode::Vertical);
  Square loop = compose_squares(S5, X3, ComposeMode::Vertical);

  Square still = constant_square(loop.row(0));
  Cube F = cube_between(loop, still);
  return std::abs(integrate_nu_cube(F));
}

}  // namespace gerbes
