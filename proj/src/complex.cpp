#include "gerbes/complex.hpp"

#include <algorithm>
#include <set>

namespace gerbes {

Complex Complex::from_maximal(std::vector<int> vertices,
                              std::vector<Face> maximal) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()),
                 vertices.end());
  if (vertices.empty()) throw ValidationError("complex needs a vertex");

  std::set<int> vset(vertices.begin(), vertices.end());
  std::set<Face> all;
  for (int v : vertices) all.insert({v});
  for (Face f : maximal) {
    std::sort(f.begin(), f.end());
    if (std::adjacent_find(f.begin(), f.end()) != f.end())
      throw ValidationError("face with repeated vertex");
    for (int v : f)
      if (!vset.count(v)) throw ValidationError("face uses unknown vertex");
    // downward closure: every nonempty subset is a face
    int n = static_cast<int>(f.size());
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      Face sub;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) sub.push_back(f[i]);
      all.insert(std::move(sub));
    }
  }

  Complex K;
  K.verts_ = std::move(vertices);
  int dim = 0;
  for (const Face& f : all) dim = std::max(dim, static_cast<int>(f.size()) - 1);
  K.faces_.resize(dim + 1);
  K.index_.resize(dim + 1);
  for (const Face& f : all) K.faces_[f.size() - 1].push_back(f);
  for (int k = 0; k <= dim; ++k) {
    std::sort(K.faces_[k].begin(), K.faces_[k].end());
    for (int i = 0; i < static_cast<int>(K.faces_[k].size()); ++i)
      K.index_[k].emplace(K.faces_[k][i], i);
  }
  return K;
}

const std::vector<Face>& Complex::faces(int k) const {
  static const std::vector<Face> kEmpty;
  if (k < 0 || k > dim()) return kEmpty;
  return faces_[k];
}

int Complex::face_count(int k) const {
  return static_cast<int>(faces(k).size());
}

int Complex::face_index(const Face& f) const {
  int k = static_cast<int>(f.size()) - 1;
  if (k < 0 || k > dim()) return -1;
  auto it = index_[k].find(f);
  return it == index_[k].end() ? -1 : it->second;
}

std::vector<Face> Complex::maximal_faces() const {
  std::vector<Face> out;
  for (int k = dim(); k >= 0; --k) {
    for (const Face& f : faces_[k]) {
      bool covered = false;
      for (const Face& g : out) {
        if (std::includes(g.begin(), g.end(), f.begin(), f.end())) {
          covered = true;
          break;
        }
      }
      if (!covered) out.push_back(f);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Complex make_boundary_simplex(int n) {
  if (n < 1) throw ValidationError("boundary simplex needs n >= 1");
  std::vector<int> verts(n + 2);
  for (int i = 0; i < n + 2; ++i) verts[i] = i;
  std::vector<Face> maximal;
  for (int omit = 0; omit < n + 2; ++omit) {
    Face f;
    for (int i = 0; i < n + 2; ++i)
      if (i != omit) f.push_back(i);
    maximal.push_back(f);
  }
  return Complex::from_maximal(verts, maximal);
}

Complex make_rp2() {
  std::vector<Face> tri = {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5},
                           {0, 1, 5}, {1, 2, 4}, {2, 3, 5}, {1, 3, 4},
                           {2, 4, 5}, {1, 3, 5}};
  return Complex::from_maximal({0, 1, 2, 3, 4, 5}, tri);
}

IntMat delta_matrix(const Complex& K, int k) {
  const int rows = K.face_count(k + 1);
  const int cols = K.face_count(k);
  IntMat D = IntMat::Zero(rows, cols);
  const auto& top = K.faces(k + 1);
  for (int r = 0; r < rows; ++r) {
    const Face& f = top[r];
    for (int i = 0; i < static_cast<int>(f.size()); ++i) {
      Face sub;
      sub.reserve(f.size() - 1);
      for (int j = 0; j < static_cast<int>(f.size()); ++j)
        if (j != i) sub.push_back(f[j]);
      int c = K.face_index(sub);
      D(r, c) += (i % 2 == 0) ? 1 : -1;
    }
  }
  return D;
}

namespace {

template <typename Scalar>
Cochain<Scalar> delta_impl(const Cochain<Scalar>& c) {
  Cochain<Scalar> out;
  out.K = c.K;
  out.degree = c.degree + 1;
  const int rows = c.K->face_count(c.degree + 1);
  out.values.setZero(rows);
  if (rows == 0) return out;  // empty cochain one degree up
  const auto& top = c.K->faces(c.degree + 1);
  for (int r = 0; r < rows; ++r) {
    const Face& f = top[r];
    Scalar acc = 0;
    for (int i = 0; i < static_cast<int>(f.size()); ++i) {
      Face sub;
      sub.reserve(f.size() - 1);
      for (int j = 0; j < static_cast<int>(f.size()); ++j)
        if (j != i) sub.push_back(f[j]);
      Scalar v = c.values(c.K->face_index(sub));
      acc += (i % 2 == 0) ? v : -v;
    }
    out.values(r) = acc;
  }
  return out;
}

}  // namespace

IntCochain delta(const IntCochain& c) { return delta_impl(c); }
RealCochain delta(const RealCochain& c) { return delta_impl(c); }

RealCochain delta_circle(const RealCochain& c) {
  RealCochain out = delta_impl(c);
  for (int i = 0; i < out.values.size(); ++i)
    out.values(i) = wrap_angle(out.values(i));
  return out;
}

bool CohomologyClass::is_zero() const {
  if (!free_coords.isZero()) return false;
  for (auto& [v, d] : torsion)
    if (v % d != 0) return false;
  return true;
}

bool CohomologyClass::operator==(const CohomologyClass& o) const {
  return degree == o.degree && free_coords == o.free_coords &&
         torsion == o.torsion;
}

std::pair<int, std::vector<std::int64_t>> cohomology(const Complex& K, int k) {
  if (k < 0 || k > K.dim()) throw ValidationError("degree out of range");
  IntMat Dk = delta_matrix(K, k);
  SmithForm fk = smith_normal_form(Dk);
  int rank_k = fk.rank;
  int rank_km1 = 0;
  std::vector<std::int64_t> torsion;
  if (k >= 1) {
    SmithForm fkm1 = smith_normal_form(delta_matrix(K, k - 1));
    rank_km1 = fkm1.rank;
    for (int i = 0; i < fkm1.rank; ++i)
      if (fkm1.diag(i) > 1) torsion.push_back(fkm1.diag(i));
  }
  int betti = K.face_count(k) - rank_k - rank_km1;
  return {betti, torsion};
}

CohomologyClass class_of(const IntCochain& n, bool require_cocycle) {
  const Complex& K = *n.K;
  const int k = n.degree;
  if (require_cocycle && k < K.dim()) {
    IntCochain d = delta(n);
    if (!d.values.isZero()) throw NotACocycle("delta n != 0");
  }

  // Kernel lattice of delta_k, then quotient by the image of delta_{k-1}.
  SmithForm fk = smith_normal_form(delta_matrix(K, k));
  IntMat Z = kernel_basis(fk);  // n_k x z
  const int z = static_cast<int>(Z.cols());

  // Coordinates of n in the kernel basis: rows >= rank of Tinv * n.
  IntVec y_full = fk.Tinv * n.values;
  for (int i = 0; i < fk.rank; ++i)
    if (y_full(i) != 0)
      throw NotACocycle("cochain not in the kernel lattice");
  IntVec y = y_full.segment(fk.rank, z);

  // Image of delta_{k-1} expressed in kernel coordinates.
  IntMat W(z, 0);
  if (k >= 1) {
    IntMat Dm = delta_matrix(K, k - 1);
    IntMat Wfull = fk.Tinv * Dm;
    W = Wfull.bottomRows(z);
  }
  SmithForm fw = smith_normal_form(W);
  IntVec c = fw.S * y;

  CohomologyClass cls;
  cls.degree = k;
  std::vector<std::int64_t> free;
  for (int i = 0; i < z; ++i) {
    std::int64_t d = (i < std::min<int>(fw.D.rows(), fw.D.cols()))
                         ? fw.D(i, i)
                         : 0;
    if (d == 0) {
      free.push_back(c(i));
    } else if (d > 1) {
      std::int64_t v = ((c(i) % d) + d) % d;
      cls.torsion.emplace_back(v, d);
    }
  }
  cls.free_coords = Eigen::Map<IntVec>(free.data(), free.size());
  return cls;
}

CohomologyClass circle_class(const RealCochain& g, double tol) {
  const Complex& K = *g.K;
  const int k = g.degree;
  RealCochain lift = g;
  for (int i = 0; i < lift.values.size(); ++i)
    lift.values(i) = wrap_angle(lift.values(i));

  RealCochain d = delta(lift);
  IntCochain n = zero_cochain<std::int64_t>(K, k + 1);
  for (int i = 0; i < d.values.size(); ++i) {
    double defect = angle_dist0(d.values(i));
    if (defect > tol) throw NotACocycle("coboundary defect above tolerance");
    double r = std::nearbyint(d.values(i));
    if (std::abs(d.values(i) - r) > 0.25 + tol)
      throw NonIntegralLift("lifted coboundary far from an integer");
    n.values(i) = static_cast<std::int64_t>(r);
  }
  // delta n = delta(round(delta a)) vanishes exactly: it is integer valued
  // and within 5*tol of delta(delta a) = 0.
  return class_of(n, /*require_cocycle=*/true);
}

std::optional<RealCochain> trivialize_circle(const RealCochain& g,
                                             double tol) {
  const Complex& K = *g.K;
  const int k = g.degree;
  if (k < 1) throw ValidationError("nothing to trivialize in degree 0");

  RealCochain a = g;
  for (int i = 0; i < a.values.size(); ++i)
    a.values(i) = wrap_angle(a.values(i));

  // Cocycle within tolerance, with integer part n of the lifted coboundary.
  RealCochain d = delta(a);
  IntVec n(d.values.size());
  for (int i = 0; i < d.values.size(); ++i) {
    if (angle_dist0(d.values(i)) > tol)
      throw NotACocycle("coboundary defect above tolerance");
    n(i) = static_cast<std::int64_t>(std::nearbyint(d.values(i)));
  }

  if (!circle_class(g, tol).is_zero()) return std::nullopt;

  // Integer correction m with delta m = -n, so a + m is closed over R.
  IntMat Dk = delta_matrix(K, k);
  SmithForm fk = smith_normal_form(Dk);
  auto m = solve_integer(fk, IntVec(-n));
  if (!m) return std::nullopt;  // cannot happen when the class vanished
  Eigen::VectorXd a2 = a.values.cast<double>() + m->cast<double>();

  // Least-squares potential for the corrected lift.
  Eigen::MatrixXd Dm1 = delta_matrix(K, k - 1).cast<double>();
  Eigen::VectorXd x =
      Dm1.colPivHouseholderQr().solve(a2);
  Eigen::VectorXd resid = a2 - Dm1 * x;

  // A leftover harmonic piece obstructs even at vanishing integer class.
  for (int i = 0; i < resid.size(); ++i)
    if (angle_dist0(resid(i)) > 10 * tol) return std::nullopt;

  RealCochain h = zero_cochain<double>(K, k - 1);
  for (int i = 0; i < x.size(); ++i) h.values(i) = wrap_angle(x(i));
  return h;
}

RealCochain product_cocycle(const RealCochain& g, const RealCochain& h) {
  if (g.K != h.K || g.degree != h.degree)
    throw ValidationError("cocycle product needs matching complex and degree");
  RealCochain out = g;
  for (int i = 0; i < out.values.size(); ++i)
    out.values(i) = wrap_angle(g.values(i) + h.values(i));
  return out;
}

RealCochain dual_cocycle(const RealCochain& g) {
  RealCochain out = g;
  for (int i = 0; i < out.values.size(); ++i)
    out.values(i) = wrap_angle(-g.values(i));
  return out;
}

void validate_simplicial(const SimplicialMap& phi) {
  for (int v : phi.src->vertices())
    if (!phi.vertex_map.count(v))
      throw ValidationError("vertex map not total");
  for (int k = 0; k <= phi.src->dim(); ++k) {
    for (const Face& f : phi.src->faces(k)) {
      Face img;
      for (int v : f) img.push_back(phi.vertex_map.at(v));
      std::sort(img.begin(), img.end());
      img.erase(std::unique(img.begin(), img.end()), img.end());
      if (!phi.dst->has_face(img))
        throw ValidationError("image of a face is not a face");
    }
  }
}

namespace {

// Sign of the permutation sorting the tuple, 0 on repeats.
int sort_sign(std::vector<int>& t) {
  int sign = 1;
  for (size_t i = 0; i < t.size(); ++i)
    for (size_t j = i + 1; j < t.size(); ++j) {
      if (t[i] == t[j]) return 0;
      if (t[i] > t[j]) {
        std::swap(t[i], t[j]);
        sign = -sign;
      }
    }
  return sign;
}

template <typename Scalar>
Cochain<Scalar> pullback_impl(const Cochain<Scalar>& g,
                              const SimplicialMap& phi, bool circle) {
  validate_simplicial(phi);
  if (g.K != phi.dst) throw ValidationError("cochain not on the target");
  Cochain<Scalar> out = zero_cochain<Scalar>(*phi.src, g.degree);
  const auto& faces = phi.src->faces(g.degree);
  for (int i = 0; i < static_cast<int>(faces.size()); ++i) {
    std::vector<int> img;
    for (int v : faces[i]) img.push_back(phi.vertex_map.at(v));
    int sign = sort_sign(img);
    if (sign == 0) continue;  // degenerate image, normalized convention
    Scalar v = g.values(g.K->face_index(img)) * Scalar(sign);
    if constexpr (std::is_floating_point_v<Scalar>) {
      out.values(i) = circle ? wrap_angle(v) : v;
    } else {
      out.values(i) = v;
    }
  }
  return out;
}

}  // namespace

RealCochain pullback_cocycle(const RealCochain& g, const SimplicialMap& phi) {
  return pullback_impl(g, phi, /*circle=*/true);
}

IntCochain pullback_cocycle(const IntCochain& g, const SimplicialMap& phi) {
  return pullback_impl(g, phi, /*circle=*/false);
}

}  // namespace gerbes
