#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gerbes/angles.hpp"
#include "gerbes/smith.hpp"

namespace gerbes {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotACocycle : ValidationError {
  using ValidationError::ValidationError;
};
struct NonIntegralLift : ValidationError {
  using ValidationError::ValidationError;
};

using Face = std::vector<int>;  // strictly increasing vertex ids

/// Finite simplicial complex: the nerve of a cover at desk scale.
/// Faces are stored per dimension in lexicographic order and the set of
/// faces is closed under taking subsets.
class Complex {
 public:
  static Complex from_maximal(std::vector<int> vertices,
                              std::vector<Face> maximal);

  int dim() const { return static_cast<int>(faces_.size()) - 1; }
  const std::vector<int>& vertices() const { return verts_; }
  const std::vector<Face>& faces(int k) const;
  int face_count(int k) const;
  int face_index(const Face& f) const;  // -1 when absent
  bool has_face(const Face& f) const { return face_index(f) >= 0; }
  std::vector<Face> maximal_faces() const;

 private:
  std::vector<int> verts_;
  std::vector<std::vector<Face>> faces_;
  std::vector<std::map<Face, int>> index_;
};

Complex make_boundary_simplex(int n);  // boundary of the (n+1)-simplex
Complex make_rp2();                    // minimal 6-vertex triangulation

enum class Coeff { Integer, Real, Circle };

/// k-cochain with values indexed by the complex's k-face list.
/// Circle cochains keep values in [0,1).
template <typename Scalar>
struct Cochain {
  const Complex* K = nullptr;
  int degree = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;

  Scalar operator()(const Face& f) const {
    int i = K->face_index(f);
    if (i < 0 || static_cast<int>(f.size()) != degree + 1)
      throw ValidationError("cochain evaluated on a non-face");
    return values(i);
  }
};

using IntCochain = Cochain<std::int64_t>;
using RealCochain = Cochain<double>;

template <typename Scalar>
Cochain<Scalar> zero_cochain(const Complex& K, int k) {
  Cochain<Scalar> c;
  c.K = &K;
  c.degree = k;
  c.values.setZero(k <= K.dim() && k >= 0 ? K.face_count(k) : 0);
  return c;
}

/// Matrix of the coboundary C^k -> C^{k+1}; rows are (k+1)-faces, entries
/// follow the position of the omitted vertex (0-based).
IntMat delta_matrix(const Complex& K, int k);

IntCochain delta(const IntCochain& c);
RealCochain delta(const RealCochain& c);
RealCochain delta_circle(const RealCochain& c);  // reduced to [0,1)

struct CohomologyClass {
  int degree = 0;
  IntVec free_coords;  // coordinates on the free part
  std::vector<std::pair<std::int64_t, std::int64_t>> torsion;  // (value, order)

  bool is_zero() const;
  bool operator==(const CohomologyClass& o) const;
};

/// Betti number and torsion orders of H^k(K; Z).
std::pair<int, std::vector<std::int64_t>> cohomology(const Complex& K, int k);

/// Coordinates of the class of an exact integer cocycle.
CohomologyClass class_of(const IntCochain& n, bool require_cocycle = true);

/// Integer class of a circle cocycle: lift to [0,1), round the coboundary,
/// project. The result lives one degree up.
CohomologyClass circle_class(const RealCochain& g, double tol = 1e-9);

/// h with delta h = g (mod 1), or nullopt when the class obstructs.
std::optional<RealCochain> trivialize_circle(const RealCochain& g,
                                             double tol = 1e-9);

RealCochain product_cocycle(const RealCochain& g, const RealCochain& h);
RealCochain dual_cocycle(const RealCochain& g);

/// Vertex map whose image of every face is a face (possibly degenerate).
struct SimplicialMap {
  const Complex* src = nullptr;
  const Complex* dst = nullptr;
  std::map<int, int> vertex_map;
};

void validate_simplicial(const SimplicialMap& phi);

/// Normalized pullback: degenerate images contribute 0, non-monotone images
/// pick up the sign of the sorting permutation.
RealCochain pullback_cocycle(const RealCochain& g, const SimplicialMap& phi);
IntCochain pullback_cocycle(const IntCochain& g, const SimplicialMap& phi);

}  // namespace gerbes
