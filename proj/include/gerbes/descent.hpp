#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "gerbes/gerbe.hpp"

namespace gerbes {

struct CocycleFails : ValidationError {
  using ValidationError::ValidationError;
};
struct NotATrivialization : ValidationError {
  using ValidationError::ValidationError;
};

/// Circle bundle on the total space of a surjection with a descent
/// isomorphism, realized as a phase transport on the canonical
/// trivialization: phi(x1,x2) + phi(x2,x3) = phi(x1,x3), phi(x,x) = 0.
struct DescentBundle {
  FinSurjection surj;
  FiberPairData phi;
};

DescentBundle make_descent_bundle(FinSurjection s, FiberPairData phi,
                                  double tol = 1e-12);

/// psi trivializes the transport along the minimal section:
/// psi(x2) - psi(x1) = phi(x1,x2) on fiber pairs.
std::vector<double> descend(const DescentBundle& b);

/// Induced map on descended bundles from a compatible shift upstairs;
/// functorial under composition.
std::vector<double> descend_map(const DescentBundle& P,
                                const DescentBundle& Q,
                                const std::vector<double>& fmap,
                                double tol = 1e-12);

/// Max mismatch between D(P) (x) D(Q) and D(P (x) Q) under the canonical
/// comparison. Zero in the finite model.
double monoidal_check(const DescentBundle& P, const DescentBundle& Q);

/// Difference of two trivializations of a gerbe descends to the base.
struct TrivializationDifference {
  DescentBundle diff;       // phi = T1 - T2
  std::vector<double> psi;  // its descent datum on the total space
};

TrivializationDifference trivialization_difference(const FinGerbe& G,
                                                   const FiberPairData& T1,
                                                   const FiberPairData& T2,
                                                   double tol = 1e-9);

/// Morphism data over an overlap, keyed by source elements / element pairs.
struct LocalMorphism {
  std::map<int, int> f;
  std::map<std::pair<int, int>, double> lam;
};

/// Local gerbes Q_i, comparison morphisms phi_ij and transformations
/// psi_ijk over a cover. psi_hat is kept at the lifted level on X_i and is
/// keyed by ordered index triples; triples with a repeated adjacent index
/// are implicitly zero and phi_ii is the identity.
struct TwoDescentData {
  int base_size = 0;
  std::vector<std::vector<int>> cover;  // sorted global points of each U_i
  std::vector<GerbePtr> gerbes;         // Q_i over U_i (local base indices)
  std::map<std::pair<int, int>, LocalMorphism> phi;  // i != j, U_ij nonempty
  std::map<std::array<int, 3>, std::map<int, double>> psi_hat;
};

struct TwoDescentReport {
  bool structure_ok = true;
  bool morphisms_ok = true;
  bool psi_descends_ok = true;
  bool cocycle_ok = true;
  double max_descent_defect = 0.0;
  double max_cocycle_defect = 0.0;
  std::string witness;  // first failing location
  bool pass() const {
    return structure_ok && morphisms_ok && psi_descends_ok && cocycle_ok;
  }
};

TwoDescentReport validate_2descent(const TwoDescentData& d, double tol = 1e-9);

struct GluedGerbe {
  GerbePtr gerbe;  // over the full base
  std::vector<int> elem_part;   // glued element -> cover index
  std::vector<int> elem_local;  // glued element -> element of X_i
  std::vector<GerbeMorphism> chi;  // glued|_{U_i} -> Q_i, validated
  std::map<std::pair<int, int>, Transformation> xi;  // phi_ij o chi_i => chi_j
};

GluedGerbe glue_2descent(const TwoDescentData& d, double tol = 1e-9);

/// Restriction of a gerbe to a subset of its base points, reindexed densely.
struct RestrictedGerbe {
  GerbePtr gerbe;
  std::vector<int> elem_to_old;  // new element -> old element
  std::map<int, int> elem_to_new;
};

RestrictedGerbe restrict_gerbe(const FinGerbe& g,
                               const std::vector<int>& base_points);

/// Deterministic coherent fixture: a global coboundary gerbe restricted to a
/// random cover, then conjugated by random lambda_ij and psi twists. Always
/// passes validate_2descent by construction.
TwoDescentData random_2descent(std::uint64_t seed, int base_size = 4,
                               int parts = 3, bool twist = true);

}  // namespace gerbes
