#include "gerbes/pontryagin.hpp"

#include <chrono>
#include <cmath>
#include <future>

namespace gerbes {

namespace {

// integer power through the principal angle-axis form; powers of one u
// commute exactly, so the transition cocycle closes to rounding error
Quat qpow_int(const Quat& q, int p) {
  if (p == 0) return Quat::Identity();
  Eigen::Vector3d v(q.x(), q.y(), q.z());
  double vn = v.norm();
  double theta = std::atan2(vn, q.w());
  Eigen::Vector3d axis = vn > 1e-14 ? (v / vn).eval() : Eigen::Vector3d(1, 0, 0);
  double a = p * theta;
  Eigen::Vector3d im = std::sin(a) * axis;
  return Quat(std::cos(a), im.x(), im.y(), im.z());
}

}  // namespace

SphereCover make_cover() {
  SphereCover cov;
  // Helmert frame of the sum-zero hyperplane in R^6; columns of H are the
  // centered standard basis images, pairwise inner product -1/5 after
  // normalization.
  Eigen::Matrix<double, 5, 6> H;
  H.setZero();
  for (int r = 0; r < 5; ++r) {
    double denom = std::sqrt(static_cast<double>((r + 1) * (r + 2)));
    for (int c2 = 0; c2 <= r; ++c2) H(r, c2) = 1.0 / denom;
    H(r, r + 1) = -(r + 1.0) / denom;
  }
  double scale = std::sqrt(6.0 / 5.0);
  for (int i = 0; i < 6; ++i) cov.vertices.col(i) = scale * H.col(i);

  cov.nerve = make_boundary_simplex(4);
  for (int k = 0; k <= cov.nerve.dim(); ++k)
    for (const Face& f : cov.nerve.faces(k)) {
      Vec5 b = Vec5::Zero();
      for (int v : f) b += cov.vertices.col(v);
      cov.barycenter[f] = b.normalized();
    }

  // invariants: distinct unit barycenters, each inside the stars of its
  // vertices
  for (const auto& [f, b] : cov.barycenter) {
    if (std::abs(b.norm() - 1.0) > 1e-12)
      throw ValidationError("barycenter not on the sphere");
    for (int v : f)
      if (!cov.in_star(v, b))
        throw ValidationError("barycenter escapes a vertex star");
  }
  return cov;
}

bool SphereCover::in_star(int i, const Vec5& m) const {
  // angular cap around the vertex; radius arccos(1/10) keeps every face
  // barycenter inside (cos toward own vertices is at least 1/5) while the
  // six-fold intersection is empty (the six cosines sum to zero) and the
  // cap around a sigma=0 vertex misses the sigma=1 pole and vice versa
  return vertices.col(i).dot(m) > 0.1;
}

Clutch make_clutch(const SphereCover& cover, int k) {
  Clutch c;
  c.k = k;
  c.sigma = {0, 0, 0, 1, 1, 1};
  Vec5 axis = Vec5::Zero();
  for (int i = 0; i < 6; ++i)
    if (c.sigma[i] == 1) axis += cover.vertices.col(i);
  c.pole = axis.normalized();

  // orthonormal quaternionic frame on the orthogonal complement of the
  // axis, seeded generically so that no evaluation point lands on a branch
  // wall of the power maps
  Eigen::Matrix<double, 5, 4> seeds;
  seeds << 0.91, -0.23, 0.12, 0.05,
           0.31, 0.87, -0.19, 0.11,
           0.17, 0.29, 0.83, -0.21,
           0.07, 0.13, 0.37, 0.79,
           0.03, 0.11, 0.23, 0.41;
  int col = 0;
  for (int e = 0; e < 4; ++e) {
    Vec5 v = seeds.col(e);
    v -= c.pole.dot(v) * c.pole;
    for (int t = 0; t < col; ++t) v -= c.qframe.col(t).dot(v) * c.qframe.col(t);
    if (v.norm() > 1e-8) c.qframe.col(col++) = v.normalized();
  }
  if (col != 4) throw ValidationError("frame construction failed");

  // every evaluation point stays clear of the pole axis
  for (const Face& f : cover.nerve.faces(4)) {
    if (c.chart_distance(cover.barycenter.at(f)) < 0.1)
      throw PoleTooClose("quintuple barycenter too close to the pole axis");
  }
  return c;
}

double Clutch::chart_distance(const Vec5& m) const {
  return (qframe.transpose() * m).norm();
}

Quat Clutch::u(const Vec5& m) const {
  Eigen::Vector4d q = qframe.transpose() * m;
  double n = q.norm();
  if (n < 0.1) throw PoleTooClose("point too close to the pole axis");
  q /= n;
  return Quat(q(0), q(1), q(2), q(3));
}

Quat Clutch::gauge(int i, const Vec5& m) const {
  // deterministic smooth spreading gauge on U_i; keeps the cocycle exact
  // while making the transition data pointwise non-commuting
  Eigen::Vector4d w;
  w(0) = 1.0;
  for (int r = 0; r < 3; ++r) {
    double acc = 0.0;
    for (int t = 0; t < 5; ++t) {
      // fixed quasi-random coefficient table
      double coef = std::sin(1.3 + 0.7 * i + 1.1 * r + 2.3 * t) * 0.45;
      acc += coef * m(t);
    }
    w(r + 1) = acc;
  }
  w.normalize();
  return Quat(w(0), w(1), w(2), w(3));
}

Quat Clutch::transition(int i, int j, const Vec5& m) const {
  int p = k * (sigma[j] - sigma[i]);
  Quat core = (p == 0) ? Quat::Identity() : qpow_int(u(m), p);
  return (gauge(i, m).conjugate() * core * gauge(j, m)).normalized();
}

Path path_gamma(const Clutch& c, int i, int j, const Vec5& m, int N) {
  return geodesic_path(Quat::Identity(), c.transition(i, j, m), N);
}

Square square_gamma(const Clutch& c, int i, int j, int k, const Vec5& m,
                    int N) {
  Path p_ik = path_gamma(c, i, k, m, N);
  Path p_ij = path_gamma(c, i, j, m, N);
  Path p_jk = path_gamma(c, j, k, m, N);
  Path composed =
      compose_paths(translate_path(c.transition(i, j, m), p_jk), p_ij);
  return fill_square(p_ik, composed);
}

double cocycle_value(const Clutch& c, int i, int j, int k, int l,
                     const Vec5& m, int N) {
  Quat g_ij = c.transition(i, j, m);
  Quat g_ik = c.transition(i, k, m);

  Square G_ijl = square_gamma(c, i, j, l, m, N);
  Square G_ikl = square_gamma(c, i, k, l, m, N);
  Square G_ijk = square_gamma(c, i, j, k, m, N);
  Square G_jkl = square_gamma(c, j, k, l, m, N);

  Path p_ij = path_gamma(c, i, j, m, N);
  Path p_jk = path_gamma(c, j, k, m, N);
  Path p_kl = path_gamma(c, k, l, m, N);

  // r=0 face: whisker gamma_jkl on the left by gamma_ij, stack on gamma_ijl
  Square A = compose_squares(translate_square(g_ij, G_jkl),
                             constant_square(p_ij), ComposeMode::Horizontal);
  Square S_face = compose_squares(A, G_ijl, ComposeMode::Vertical);

  // r=1 face: whisker gamma_ijk on the right by gamma_kl, stack on
  // gamma_ikl, close with the reversed associator
  Square B =
      compose_squares(constant_square(translate_path(g_ik, p_kl)), G_ijk,
                      ComposeMode::Horizontal);
  Square abar = associator_square(translate_path(g_ik, p_kl),
                                  translate_path(g_ij, p_jk), p_ij);
  Square T_face = compose_squares(
      reverse_s(abar), compose_squares(B, G_ikl, ComposeMode::Vertical),
      ComposeMode::Vertical);

  Cube H = cube_between(S_face, T_face);
  return wrap_angle(integrate_nu_cube(H));
}

PontReport compute_p1(int k, int N, double delta_tol, double integrality_tol) {
  auto t0 = std::chrono::steady_clock::now();
  SphereCover cover = make_cover();
  Clutch c = make_clutch(cover, k);
  const Complex& nerve = cover.nerve;

  PontReport rep;
  rep.k = k;
  rep.grid = N;

  const auto& quints = nerve.faces(4);

  // cube evaluations: every quadruple at each incident quintuple
  // barycenter; the five-term closure and lift integrality certify the
  // assembled faces. One task per quintuple.
  std::vector<std::future<std::vector<double>>> tasks;
  for (const Face& Q : quints) {
    tasks.push_back(std::async(std::launch::async, [&, Q]() {
      Vec5 m = cover.barycenter.at(Q);
      std::vector<double> vals;
      for (size_t a = 0; a < Q.size(); ++a) {
        Face sub;
        for (size_t b = 0; b < Q.size(); ++b)
          if (b != a) sub.push_back(Q[b]);
        vals.push_back(cocycle_value(c, sub[0], sub[1], sub[2], sub[3], m, N));
      }
      return vals;
    }));
  }

  std::map<Face, std::vector<std::pair<Face, double>>> by_quad;
  for (size_t qi = 0; qi < quints.size(); ++qi) {
    std::vector<double> vals = tasks[qi].get();
    const Face& Q = quints[qi];
    for (size_t a = 0; a < Q.size(); ++a) {
      Face sub;
      for (size_t b = 0; b < Q.size(); ++b)
        if (b != a) sub.push_back(Q[b]);
      by_quad[sub].push_back({Q, vals[a]});
    }
  }

  std::map<Face, std::map<Face, double>> lift;
  for (auto& [quad, at] : by_quad) {
    rep.values.push_back({quad, at});
    double base = wrap_angle(at[0].second);
    lift[quad][at[0].first] = base;
    for (size_t t = 1; t < at.size(); ++t) {
      double drift = wrap_signed(at[t].second - at[0].second);
      rep.continuity_gap = std::max(rep.continuity_gap, std::abs(drift));
      lift[quad][at[t].first] = base + drift;
    }
  }
  for (size_t qi = 0; qi < quints.size(); ++qi) {
    const Face& Q = quints[qi];
    double acc = 0.0;
    for (size_t a = 0; a < Q.size(); ++a) {
      Face sub;
      for (size_t b = 0; b < Q.size(); ++b)
        if (b != a) sub.push_back(Q[b]);
      double v = lift.at(sub).at(Q);
      acc += (a % 2 == 0) ? v : -v;
    }
    rep.delta_defect = std::max(rep.delta_defect, angle_dist0(acc));
    rep.integrality_defect = std::max(
        rep.integrality_defect, std::abs(acc - std::nearbyint(acc)));
  }

  // class integers by clutching-degree localization: the winding of u^k
  // over the equatorial sphere is split into six chart slabs, each closed
  // up by a geodesic cone over its cut slice so the slab carries an
  // integer. Slab j is assigned to the quintuple face omitting vertex j,
  // weighted by the fundamental-cycle sign.
  const int M = std::min(48, 2 * N);  // internal grid for the class integrals
  std::vector<int> cuts(7);
  cuts[0] = 0;
  cuts[6] = M;
  for (int j = 1; j <= 5; ++j) {
    int cut = static_cast<int>(std::lround(j * M / 6.0));
    if (2 * cut == M) ++cut;  // keep the cut slice off the antipodal band
    cuts[j] = cut;
  }
  auto cap_integral = [&](int cut) {
    if (cut == 0 || cut == M) return 0.0;
    double r = static_cast<double>(cut) / M;
    Quat tip = su2_chart(r, 0.0, 0.0);
    std::vector<Quat> s;
    s.reserve((M + 1) * (M + 1) * (M + 1));
    for (int x = 0; x <= M; ++x)
      for (int ss = 0; ss <= M; ++ss)
        for (int t = 0; t <= M; ++t) {
          Quat base = slerp_s3(tip,
                               su2_chart(r, static_cast<double>(ss) / M,
                                         static_cast<double>(t) / M),
                               static_cast<double>(x) / M);
          s.push_back(qpow_int(base, k));
        }
    return integrate_nu_box(s, M, M, M);
  };
  auto slab_integral = [&](int lo, int hi) {
    std::vector<Quat> s;
    s.reserve((hi - lo + 1) * (M + 1) * (M + 1));
    for (int x = lo; x <= hi; ++x)
      for (int ss = 0; ss <= M; ++ss)
        for (int t = 0; t <= M; ++t)
          s.push_back(qpow_int(su2_chart(static_cast<double>(x) / M,
                                         static_cast<double>(ss) / M,
                                         static_cast<double>(t) / M),
                               k));
    return integrate_nu_box(s, hi - lo, M, M);
  };

  std::vector<double> caps(7);
  for (int j = 0; j <= 6; ++j) caps[j] = cap_integral(cuts[j]);

  IntCochain n = zero_cochain<std::int64_t>(nerve, 4);
  for (int j = 0; j < 6; ++j) {
    double cell = slab_integral(cuts[j], cuts[j + 1]) + caps[j] - caps[j + 1];
    double rounded = std::nearbyint(cell);
    rep.integrality_defect =
        std::max(rep.integrality_defect, std::abs(cell - rounded));
    // quintuple face omitting vertex j, fundamental sign (-1)^j
    Face Q;
    for (int v = 0; v < 6; ++v)
      if (v != j) Q.push_back(v);
    int qi = nerve.face_index(Q);
    std::int64_t nq = static_cast<std::int64_t>(rounded) *
                      cover.fundamental_sign(j);
    n.values(qi) = nq;
  }
  for (int qi = 0; qi < nerve.face_count(4); ++qi)
    rep.rounded.push_back(n.values(qi));

  CohomologyClass cls = class_of(n, /*require_cocycle=*/true);
  rep.class_coordinate = cls.free_coords.size() == 1 ? cls.free_coords(0) : 0;
  rep.defect_exceeded =
      rep.delta_defect > delta_tol || rep.integrality_defect > integrality_tol;
  rep.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

double degree_oracle(int k, int N) {
  // the equatorial 3-sphere is the unit sphere of the quaternionic frame,
  // where u is the identity chart; the winding of u^k is read off the
  // standard chart cube
  Cube c;
  c.n = N;
  c.s.resize((N + 1) * (N + 1) * (N + 1));
  for (int r = 0; r <= N; ++r)
    for (int s = 0; s <= N; ++s)
      for (int t = 0; t <= N; ++t) {
        Quat q = su2_chart(static_cast<double>(r) / N,
                           static_cast<double>(s) / N,
                           static_cast<double>(t) / N);
        c.at(r, s, t) = qpow_int(q, k);
      }
  return degree_s3(c);
}

}  // namespace gerbes
