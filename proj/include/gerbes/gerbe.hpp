#pragma once

#include <memory>
#include <vector>

#include "gerbes/angles.hpp"
#include "gerbes/complex.hpp"

namespace gerbes {

struct NotAssociative : ValidationError {
  using ValidationError::ValidationError;
};
struct NotNormalized : ValidationError {
  using ValidationError::ValidationError;
};
struct NotCompatible : ValidationError {
  using ValidationError::ValidationError;
};
struct NotOverIdentity : ValidationError {
  using ValidationError::ValidationError;
};
struct NotSameFiber : ValidationError {
  using ValidationError::ValidationError;
};
struct NotDescendable : ValidationError {
  using ValidationError::ValidationError;
};
struct NotComposable : ValidationError {
  using ValidationError::ValidationError;
};

/// Surjection of finite sets; elements and base points are dense indices.
struct FinSurjection {
  std::vector<int> proj;                  // element -> base point
  int base_size = 0;
  std::vector<std::vector<int>> fibers;   // base point -> sorted elements

  int size() const { return static_cast<int>(proj.size()); }
  static FinSurjection make(int base_size, std::vector<int> proj);
};

/// Angle-valued data on fiberwise pairs of a surjection. Owns the indexing
/// data so it stays valid independently of the surjection it came from.
class FiberPairData {
 public:
  FiberPairData() = default;
  explicit FiberPairData(const FinSurjection& s);
  double operator()(int x1, int x2) const;
  double& at(int x1, int x2);

 private:
  std::vector<int> proj_;
  std::vector<int> local_;                 // element -> index in its fiber
  std::vector<int> fiber_size_;            // per base
  std::vector<std::vector<double>> data_;  // per base, n_b^2
};

/// Finite torsor model of a bundle gerbe: every torsor fiber carries a fixed
/// trivialization, so all structure is the normalized phase cocycle c on
/// fiberwise triples. Associativity is the fiberwise delta condition.
class FinGerbe {
 public:
  static FinGerbe make(FinSurjection s, std::vector<std::vector<double>> c,
                       double tol = 1e-12);
  static FinGerbe trivial(FinSurjection s);
  /// c = delta_fiber(b) for pair data b with zero diagonal.
  static FinGerbe from_pair_data(FinSurjection s, const FiberPairData& b);

  const FinSurjection& surj() const { return surj_; }
  int base_size() const { return surj_.base_size; }
  double c(int x1, int x2, int x3) const;
  int base_of(int x) const { return surj_.proj[x]; }
  int local(int x) const { return local_[x]; }
  /// Inverse phase: the element of P_(x2,x1) with u * u^{-1} = e.
  double inverse_phase(int x1, int x2, double u) const {
    return wrap_angle(-u - c(x1, x2, x1));
  }

  std::vector<std::vector<double>>& raw() { return c_; }
  const std::vector<std::vector<double>>& raw() const { return c_; }

 private:
  FinSurjection surj_;
  std::vector<std::vector<double>> c_;  // per base, n_b^3
  std::vector<int> local_;
};

using GerbePtr = std::shared_ptr<const FinGerbe>;

/// Bundle gerbe morphism over the identity of the base: a fiber map f
/// together with the image phases lambda of the canonical elements.
struct GerbeMorphism {
  GerbePtr src, dst;
  std::vector<int> f;   // X -> Y over id_M
  FiberPairData lambda;  // on fiberwise pairs of X

  double push(int x1, int x2, double u) const {
    return wrap_angle(u + lambda(x1, x2));
  }
};

GerbeMorphism make_morphism(GerbePtr src, GerbePtr dst, std::vector<int> f,
                            FiberPairData lambda, double tol = 1e-12);
GerbeMorphism identity_morphism(GerbePtr g);
GerbeMorphism compose_morphism(const GerbeMorphism& g, const GerbeMorphism& f);
bool same_morphism(const GerbeMorphism& a, const GerbeMorphism& b);

/// Transformation f => g: a section of the descended difference bundle,
/// stored as one angle per base point.
struct Transformation {
  GerbeMorphism f, g;
  std::vector<double> theta;  // per base point
};

/// Transport of v in Q_(f x1, g x1) to Q_(f x2, g x2); independent of the
/// auxiliary torsor element u, which is exposed for tests.
double phi_fg(const GerbeMorphism& f, const GerbeMorphism& g, int x1, int x2,
              double v, double u = 0.0);

Transformation descend_section(const GerbeMorphism& f, const GerbeMorphism& g,
                               const std::vector<double>& theta_hat,
                               double tol = 1e-9);
std::vector<double> lift_section(const Transformation& t);
Transformation identity_transformation(const GerbeMorphism& f);
Transformation vcompose(const Transformation& t1, const Transformation& t2);
Transformation hcompose(const Transformation& theta,
                        const Transformation& lambda);

/// Groupoid of the gerbe restricted to one base point: objects are the fiber
/// elements, arrows from x1 to x2 are angles, composition twists by c.
struct GroupoidTable {
  const FinGerbe* gerbe = nullptr;
  int base = 0;
  std::vector<int> objects;

  double compose(int x1, int x2, int x3, double u23, double u12) const {
    return wrap_angle(u23 + u12 + gerbe->c(x1, x2, x3));
  }
  double identity(int) const { return 0.0; }
  double inverse(int x1, int x2, double u) const {
    return gerbe->inverse_phase(x1, x2, u);
  }
  /// Max defect over the groupoid axioms on sampled arrows.
  double verify(int samples = 3) const;
};

GroupoidTable groupoid_at(const FinGerbe& P, int m);

}  // namespace gerbes
