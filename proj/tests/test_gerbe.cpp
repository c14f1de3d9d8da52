#include <doctest.h>

#include <random>

#include "gerbes/gerbe.hpp"

using namespace gerbes;

namespace {

std::uniform_real_distribution<double> U(0.0, 1.0);

FinSurjection random_surjection_on(std::mt19937_64& rng, int base,
                                   int fiber_max = 3) {
  std::uniform_int_distribution<int> F(1, fiber_max);
  std::vector<int> proj;
  for (int b = 0; b < base; ++b) {
    int n = F(rng);
    for (int i = 0; i < n; ++i) proj.push_back(b);
  }
  return FinSurjection::make(base, std::move(proj));
}

FinSurjection random_surjection(std::mt19937_64& rng, int base_max = 4,
                                int fiber_max = 3) {
  std::uniform_int_distribution<int> B(1, base_max);
  return random_surjection_on(rng, B(rng), fiber_max);
}

struct GerbeWithPotential {
  GerbePtr g;
  FiberPairData b;
};

GerbeWithPotential random_gerbe(const FinSurjection& s, std::mt19937_64& rng) {
  FiberPairData b(s);
  for (int m = 0; m < s.base_size; ++m)
    for (int x1 : s.fibers[m])
      for (int x2 : s.fibers[m])
        if (x1 != x2) b.at(x1, x2) = U(rng);
  GerbePtr g = std::make_shared<FinGerbe>(FinGerbe::from_pair_data(s, b));
  return {g, b};
}

// Morphism between coboundary gerbes over the same base: lambda built from
// the potentials plus a random per-point gauge.
GerbeMorphism random_morphism(const GerbeWithPotential& P,
                              const GerbeWithPotential& Q,
                              std::mt19937_64& rng) {
  const FinSurjection& S = P.g->surj();
  const FinSurjection& T = Q.g->surj();
  std::vector<int> f(S.size());
  for (int m = 0; m < S.base_size; ++m) {
    std::uniform_int_distribution<int> pick(
        0, static_cast<int>(T.fibers[m].size()) - 1);
    for (int x : S.fibers[m]) f[x] = T.fibers[m][pick(rng)];
  }
  std::vector<double> tau(S.size());
  for (double& t : tau) t = U(rng);
  FiberPairData lam(S);
  for (int m = 0; m < S.base_size; ++m)
    for (int x1 : S.fibers[m])
      for (int x2 : S.fibers[m])
        lam.at(x1, x2) = wrap_angle(P.b(x1, x2) - Q.b(f[x1], f[x2]) +
                                    tau[x2] - tau[x1]);
  return make_morphism(P.g, Q.g, std::move(f), std::move(lam));
}

Transformation random_transformation(const GerbeMorphism& f,
                                     const GerbeMorphism& g,
                                     std::mt19937_64& rng) {
  Transformation t;
  t.f = f;
  t.g = g;
  t.theta.resize(f.src->base_size());
  for (double& v : t.theta) v = U(rng);
  return t;
}

bool same_theta(const Transformation& a, const Transformation& b,
                double tol = 1e-12) {
  if (a.theta.size() != b.theta.size()) return false;
  for (size_t i = 0; i < a.theta.size(); ++i)
    if (angle_dist(a.theta[i], b.theta[i]) > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("make_gerbe accepts trivial and coboundary data") {
  std::mt19937_64 rng(101);
  for (int rep = 0; rep < 10; ++rep) {
    FinSurjection s = random_surjection(rng);
    CHECK_NOTHROW(FinGerbe::trivial(s));
    CHECK_NOTHROW(random_gerbe(s, rng));
  }
}

TEST_CASE("make_gerbe rejects a constructed violation") {
  std::mt19937_64 rng(103);
  FinSurjection s = FinSurjection::make(1, {0, 0, 0});
  GerbeWithPotential P = random_gerbe(s, rng);
  auto c = P.g->raw();
  // bump one non-degenerate triple (0,1,2)
  c[0][(0 * 3 + 1) * 3 + 2] = wrap_angle(c[0][(0 * 3 + 1) * 3 + 2] + 0.3);
  CHECK_THROWS_AS(FinGerbe::make(s, c), NotAssociative);
  auto c2 = P.g->raw();
  c2[0][(0 * 3 + 0) * 3 + 2] = 0.3;  // break normalization
  CHECK_THROWS_AS(FinGerbe::make(s, c2), ValidationError);
}

TEST_CASE("phi_fg: u-independence, identities, descent cocycle") {
  std::mt19937_64 rng(107);
  for (int rep = 0; rep < 20; ++rep) {
    FinSurjection s = FinSurjection::make(2, {0, 0, 0, 1, 1});
    FinSurjection sq = FinSurjection::make(2, {0, 0, 1, 1, 1});
    GerbeWithPotential P = random_gerbe(s, rng);
    GerbeWithPotential Q = random_gerbe(sq, rng);
    GerbeMorphism f = random_morphism(P, Q, rng);
    GerbeMorphism g = random_morphism(P, Q, rng);

    double v = U(rng);
    // u-independence on a 3-point fiber
    double a = phi_fg(f, g, 0, 1, v, 0.0);
    double b = phi_fg(f, g, 0, 1, v, 0.37);
    double c = phi_fg(f, g, 0, 1, v, 0.91);
    CHECK(angle_dist(a, b) <= 1e-12);
    CHECK(angle_dist(a, c) <= 1e-12);

    // x1 == x2 is the identity map
    CHECK(angle_dist(phi_fg(f, g, 2, 2, v), wrap_angle(v)) <= 1e-12);

    // f == g: translation by zero
    CHECK(angle_dist(phi_fg(f, f, 0, 2, v), wrap_angle(v)) <= 1e-12);

    // cocycle over fiber triples
    for (int x1 : {0, 1, 2})
      for (int x2 : {0, 1, 2})
        for (int x3 : {0, 1, 2}) {
          double lhs = phi_fg(f, g, x2, x3, phi_fg(f, g, x1, x2, v));
          double rhs = phi_fg(f, g, x1, x3, v);
          CHECK(angle_dist(lhs, rhs) <= 1e-12);
        }
  }
}

TEST_CASE("descend and lift are mutually inverse") {
  std::mt19937_64 rng(109);
  int done = 0;
  for (int rep = 0; rep < 100; ++rep) {
    FinSurjection s = random_surjection(rng);
    GerbeWithPotential P = random_gerbe(s, rng);
    GerbeWithPotential Q =
        random_gerbe(random_surjection_on(rng, P.g->base_size()), rng);
    ++done;
    GerbeMorphism f = random_morphism(P, Q, rng);
    GerbeMorphism g = random_morphism(P, Q, rng);
    Transformation t = random_transformation(f, g, rng);
    Transformation back = descend_section(f, g, lift_section(t));
    CHECK(same_theta(t, back));

    std::vector<double> hat = lift_section(t);
    std::vector<double> hat2 = lift_section(descend_section(f, g, hat));
    for (size_t i = 0; i < hat.size(); ++i)
      CHECK(angle_dist(hat[i], hat2[i]) <= 1e-12);
  }
  CHECK(done == 100);
}

TEST_CASE("perturbed lifted section fails to descend") {
  std::mt19937_64 rng(113);
  FinSurjection s = FinSurjection::make(1, {0, 0});
  GerbeWithPotential P = random_gerbe(s, rng);
  GerbeWithPotential Q = random_gerbe(s, rng);
  GerbeMorphism f = random_morphism(P, Q, rng);
  GerbeMorphism g = random_morphism(P, Q, rng);
  Transformation t = random_transformation(f, g, rng);
  std::vector<double> hat = lift_section(t);
  hat[1] = wrap_angle(hat[1] + 0.3);
  CHECK_THROWS_AS(descend_section(f, g, hat), NotDescendable);
}

TEST_CASE("constant section of D_{f,f} descends to a constant") {
  std::mt19937_64 rng(127);
  FinSurjection s = FinSurjection::make(2, {0, 0, 1});
  GerbeWithPotential P = random_gerbe(s, rng);
  GerbeWithPotential Q = random_gerbe(s, rng);
  GerbeMorphism f = random_morphism(P, Q, rng);
  std::vector<double> hat(s.size(), 0.25);
  Transformation t = descend_section(f, f, hat);
  for (double v : t.theta) CHECK(angle_dist(v, 0.25) <= 1e-12);
}

TEST_CASE("vcompose: units, exact associativity, agreement with descent") {
  std::mt19937_64 rng(131);
  int done = 0;
  for (int rep = 0; rep < 50; ++rep) {
    FinSurjection s = random_surjection(rng);
    GerbeWithPotential P = random_gerbe(s, rng);
    GerbeWithPotential Q =
        random_gerbe(random_surjection_on(rng, P.g->base_size()), rng);
    ++done;
    GerbeMorphism f = random_morphism(P, Q, rng);
    GerbeMorphism g = random_morphism(P, Q, rng);
    GerbeMorphism h = random_morphism(P, Q, rng);
    GerbeMorphism k = random_morphism(P, Q, rng);
    Transformation t1 = random_transformation(f, g, rng);
    Transformation t2 = random_transformation(g, h, rng);
    Transformation t3 = random_transformation(h, k, rng);

    CHECK(same_theta(vcompose(identity_transformation(f), t1), t1));
    CHECK(same_theta(vcompose(t1, identity_transformation(g)), t1));

    Transformation lhs = vcompose(vcompose(t1, t2), t3);
    Transformation rhs = vcompose(t1, vcompose(t2, t3));
    CHECK(same_theta(lhs, rhs, 1e-15));

    // the composite equals the descent of the fiberwise product of lifts
    std::vector<double> h1 = lift_section(t1);
    std::vector<double> h2 = lift_section(t2);
    std::vector<double> prod(h1.size());
    const FinGerbe& Qg = *f.dst;
    for (int x = 0; x < static_cast<int>(h1.size()); ++x)
      prod[x] = wrap_angle(h2[x] + h1[x] + Qg.c(f.f[x], g.f[x], h.f[x]));
    Transformation via_descent = descend_section(f, h, prod);
    CHECK(same_theta(vcompose(t1, t2), via_descent, 1e-9));
  }
  CHECK(done == 50);
}

TEST_CASE("hcompose: identities, reduction to vcompose, interchange") {
  std::mt19937_64 rng(137);
  int done = 0;
  for (int rep = 0; rep < 30; ++rep) {
    FinSurjection sP = random_surjection(rng);
    GerbeWithPotential P = random_gerbe(sP, rng);
    GerbeWithPotential Q =
        random_gerbe(random_surjection_on(rng, P.g->base_size()), rng);
    GerbeWithPotential R =
        random_gerbe(random_surjection_on(rng, P.g->base_size()), rng);
    ++done;
    GerbeMorphism f1 = random_morphism(P, Q, rng);
    GerbeMorphism f2 = random_morphism(P, Q, rng);
    GerbeMorphism f3 = random_morphism(P, Q, rng);
    GerbeMorphism g1 = random_morphism(Q, R, rng);
    GerbeMorphism g2 = random_morphism(Q, R, rng);
    GerbeMorphism g3 = random_morphism(Q, R, rng);

    // identities compose to the identity
    Transformation hid =
        hcompose(identity_transformation(f1), identity_transformation(g1));
    CHECK(same_morphism(hid.f, compose_morphism(g1, f1)));
    for (double v : hid.theta) CHECK(angle_dist0(v) <= 1e-12);

    // interchange law on a 3x3 grid
    Transformation th12 = random_transformation(f1, f2, rng);
    Transformation th23 = random_transformation(f2, f3, rng);
    Transformation la12 = random_transformation(g1, g2, rng);
    Transformation la23 = random_transformation(g2, g3, rng);
    Transformation lhs = hcompose(vcompose(th12, th23), vcompose(la12, la23));
    Transformation rhs = vcompose(hcompose(th12, la12), hcompose(th23, la23));
    CHECK(same_morphism(lhs.f, rhs.f));
    CHECK(same_morphism(lhs.g, rhs.g));
    CHECK(same_theta(lhs, rhs, 1e-12));

    // against the identity morphism, hcompose reduces to a vcomposition
    // with the unit
    GerbeMorphism idq = identity_morphism(Q.g);
    Transformation one = identity_transformation(idq);
    Transformation red = hcompose(th12, one);
    CHECK(same_theta(red, th12, 1e-12));
  }
  CHECK(done == 30);
}

TEST_CASE("groupoid_at satisfies the groupoid axioms") {
  std::mt19937_64 rng(139);
  FinSurjection s1 = FinSurjection::make(1, {0});
  GerbeWithPotential single = random_gerbe(s1, rng);
  GroupoidTable t1 = groupoid_at(*single.g, 0);
  CHECK(t1.objects.size() == 1);
  CHECK(t1.verify() <= 1e-12);

  FinSurjection s3 = FinSurjection::make(1, {0, 0, 0});
  GerbeWithPotential triple = random_gerbe(s3, rng);
  GroupoidTable t3 = groupoid_at(*triple.g, 0);
  CHECK(t3.verify() <= 1e-12);

  // inverses: u + u^{-1} transported through c equals the identity
  double u = 0.41;
  double w = t3.inverse(0, 2, u);
  CHECK(angle_dist0(t3.compose(0, 2, 0, w, u)) <= 1e-12);
}
