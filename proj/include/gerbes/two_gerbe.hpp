#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gerbes/complex.hpp"
#include "gerbes/gerbe.hpp"

namespace gerbes {

/// Finite model of a bundle 2-gerbe (Q,Y,X,M). All torsors carry fixed
/// trivializations, so the data are the Y-level product mY, the gerbe
/// cocycle cQ on Y-triples over each X-pair, the product-morphism phases
/// mHat, and the associator phases aHat on composable Y-triples.
struct Fin2Gerbe {
  FinSurjection surjX;                      // X -> M
  std::vector<std::pair<int, int>> ypair;   // y -> (x1,x2), fiberwise pair
  std::map<std::pair<int, int>, std::vector<int>> yfiber;
  std::map<std::array<int, 3>, double> cQ;  // (y1,y2,y3) in one Y-fiber
  std::map<std::pair<int, int>, int> mY;    // (y23,y12) -> y13
  // ((y23,y12),(y23',y12')) over one (x1,x2,x3)
  std::map<std::array<int, 4>, double> mHat;
  std::map<std::array<int, 3>, double> aHat;  // (y34,y23,y12)

  double c(int y1, int y2, int y3) const;
  double mu(int a23, int a12, int b23, int b12) const;
  int prod(int y23, int y12) const;
  double assoc(int y34, int y23, int y12) const;
  int xof1(int y) const { return ypair[y].first; }
  int xof2(int y) const { return ypair[y].second; }
};

struct TwoGerbeReport {
  bool structure_ok = true;
  bool fiber_gerbes_ok = true;
  bool product_morphism_ok = true;
  bool associator_descends_ok = true;
  bool coherence_ok = true;
  double max_morphism_defect = 0.0;
  double max_descent_defect = 0.0;
  double max_coherence_defect = 0.0;
  std::string witness;
  bool pass() const {
    return structure_ok && fiber_gerbes_ok && product_morphism_ok &&
           associator_descends_ok && coherence_ok;
  }
};

TwoGerbeReport validate_2gerbe(const Fin2Gerbe& g, double tol = 1e-9);

/// Coherence defect with an explicit sign pattern on the five associator
/// pullbacks (canonical: +,-,+,-,+ for pi_1..pi_5). Regression hook.
double coherence_defect(const Fin2Gerbe& g,
                        const std::array<int, 5>& signs = {+1, -1, +1, -1,
                                                           +1});

/// Section choices for the Cech extraction; seed 0 picks canonical minima.
struct SectionChoices {
  std::uint64_t seed = 0;
};

/// Cech 3-cocycle on the nerve of the cover, with each face evaluated at
/// the minimal point of its overlap.
struct Extraction {
  Complex nerve;
  RealCochain epsilon;  // degree 3 circle cochain, points into nerve
};

Extraction extract_3cocycle(const Fin2Gerbe& g,
                            const std::vector<std::vector<int>>& cover,
                            const SectionChoices& choices = {},
                            double tol = 1e-9);

/// Finite bicategory with U(1) 2-cell torsors: 2-cells between parallel
/// 1-cells f,g are angles anchored at a basepoint, composition twists come
/// from the vc/hc tables.
struct Bicat {
  int n_objects = 0;
  struct OneCell {
    int src, tgt;
  };
  std::vector<OneCell> cells;
  std::map<std::pair<int, int>, int> comp;   // (g,f) -> g o f
  std::map<std::array<int, 3>, double> vc;   // (f,g,h) within one hom-set
  std::map<std::array<int, 4>, double> hc;   // (g1,f1,g2,f2)
  std::map<std::array<int, 3>, double> assoc;
  std::vector<int> identity;                 // per object, -1 when absent
  std::map<int, double> lunit;               // L(f): f o 1 => f
  std::map<int, double> runit;               // R(f): 1 o f => f
  std::vector<bool> identity_synthesized;

  bool composable(int gcell, int fcell) const {
    return cells[fcell].tgt == cells[gcell].src;
  }
};

struct BicatReport {
  bool structure_ok = true;
  bool hom_categories_ok = true;
  bool functor_ok = true;  // horizontal functoriality + interchange
  bool naturality_ok = true;
  bool pentagon_ok = true;
  bool triangle_ok = true;
  bool two_cells_invertible = true;
  bool one_cells_coherently_invertible = true;
  bool identities_synthesized = false;
  double max_defect = 0.0;
  std::string witness;
  bool pass() const {
    return structure_ok && hom_categories_ok && functor_ok && naturality_ok &&
           pentagon_ok && triangle_ok && two_cells_invertible &&
           one_cells_coherently_invertible;
  }
};

BicatReport check_bicat(const Bicat& b, double tol = 1e-9);

/// Solve for the unit cells L(f), R(f) from a chosen unit 2-cell per
/// object; with a coherent associator the triangle then holds.
void synthesize_units(Bicat& b);

Bicat restrict_to_point(const Fin2Gerbe& g, int m);

/// Deterministic coherent fixture: the strictly associative trivial model
/// on a random (X,Y) shape, gauge-twisted at the torsor, product and
/// associator levels. Passes validate_2gerbe by construction.
Fin2Gerbe random_2gerbe(std::uint64_t seed, int base_size = 1,
                        bool twist = true);

}  // namespace gerbes
