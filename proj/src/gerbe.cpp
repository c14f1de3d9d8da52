#include "gerbes/gerbe.hpp"

#include <algorithm>

namespace gerbes {

FinSurjection FinSurjection::make(int base_size, std::vector<int> proj) {
  FinSurjection s;
  s.base_size = base_size;
  s.proj = std::move(proj);
  s.fibers.assign(base_size, {});
  for (int x = 0; x < static_cast<int>(s.proj.size()); ++x) {
    int b = s.proj[x];
    if (b < 0 || b >= base_size)
      throw ValidationError("projection target out of range");
    s.fibers[b].push_back(x);
  }
  for (const auto& f : s.fibers)
    if (f.empty()) throw ValidationError("projection not surjective");
  return s;
}

namespace {

std::vector<int> local_index(const FinSurjection& s) {
  std::vector<int> loc(s.size(), -1);
  for (const auto& fib : s.fibers)
    for (int i = 0; i < static_cast<int>(fib.size()); ++i) loc[fib[i]] = i;
  return loc;
}

}  // namespace

FiberPairData::FiberPairData(const FinSurjection& s)
    : proj_(s.proj), local_(local_index(s)) {
  data_.resize(s.base_size);
  fiber_size_.resize(s.base_size);
  for (int b = 0; b < s.base_size; ++b) {
    size_t n = s.fibers[b].size();
    fiber_size_[b] = static_cast<int>(n);
    data_[b].assign(n * n, 0.0);
  }
}

double FiberPairData::operator()(int x1, int x2) const {
  int b = proj_[x1];
  if (b != proj_[x2]) throw NotSameFiber("pair not in one fiber");
  size_t n = fiber_size_[b];
  return data_[b][local_[x1] * n + local_[x2]];
}

double& FiberPairData::at(int x1, int x2) {
  int b = proj_[x1];
  if (b != proj_[x2]) throw NotSameFiber("pair not in one fiber");
  size_t n = fiber_size_[b];
  return data_[b][local_[x1] * n + local_[x2]];
}

FinGerbe FinGerbe::make(FinSurjection s, std::vector<std::vector<double>> c,
                        double tol) {
  FinGerbe g;
  g.surj_ = std::move(s);
  g.c_ = std::move(c);
  g.local_ = local_index(g.surj_);
  if (static_cast<int>(g.c_.size()) != g.surj_.base_size)
    throw ValidationError("cocycle data incomplete");
  for (int b = 0; b < g.surj_.base_size; ++b) {
    size_t n = g.surj_.fibers[b].size();
    if (g.c_[b].size() != n * n * n)
      throw ValidationError("cocycle data incomplete");
  }

  const auto& fib = g.surj_.fibers;
  for (int b = 0; b < g.surj_.base_size; ++b) {
    const auto& F = fib[b];
    for (int x1 : F)
      for (int x2 : F) {
        if (angle_dist0(g.c(x1, x1, x2)) > tol ||
            angle_dist0(g.c(x1, x2, x2)) > tol)
          throw NotNormalized("c must vanish on repeated consecutive entries");
      }
    for (int x1 : F)
      for (int x2 : F)
        for (int x3 : F)
          for (int x4 : F) {
            double d = g.c(x2, x3, x4) - g.c(x1, x3, x4) + g.c(x1, x2, x4) -
                       g.c(x1, x2, x3);
            if (angle_dist0(d) > tol)
              throw NotAssociative("fiberwise delta condition fails");
          }
  }
  return g;
}

FinGerbe FinGerbe::trivial(FinSurjection s) {
  std::vector<std::vector<double>> c(s.base_size);
  for (int b = 0; b < s.base_size; ++b) {
    size_t n = s.fibers[b].size();
    c[b].assign(n * n * n, 0.0);
  }
  return make(std::move(s), std::move(c));
}

FinGerbe FinGerbe::from_pair_data(FinSurjection s, const FiberPairData& b) {
  std::vector<std::vector<double>> c(s.base_size);
  for (int bp = 0; bp < s.base_size; ++bp) {
    const auto& F = s.fibers[bp];
    size_t n = F.size();
    c[bp].assign(n * n * n, 0.0);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        for (size_t k = 0; k < n; ++k)
          c[bp][(i * n + j) * n + k] =
              wrap_angle(b(F[j], F[k]) - b(F[i], F[k]) + b(F[i], F[j]));
  }
  return make(std::move(s), std::move(c));
}

double FinGerbe::c(int x1, int x2, int x3) const {
  int b = surj_.proj[x1];
  if (b != surj_.proj[x2] || b != surj_.proj[x3])
    throw NotSameFiber("triple not in one fiber");
  size_t n = surj_.fibers[b].size();
  return c_[b][(local_[x1] * n + local_[x2]) * n + local_[x3]];
}

GerbeMorphism make_morphism(GerbePtr src, GerbePtr dst, std::vector<int> f,
                            FiberPairData lambda, double tol) {
  if (src->base_size() != dst->base_size())
    throw NotOverIdentity("morphism must cover the identity of the base");
  GerbeMorphism m;
  m.src = std::move(src);
  m.dst = std::move(dst);
  m.f = std::move(f);
  m.lambda = std::move(lambda);
  const auto& S = m.src->surj();
  if (static_cast<int>(m.f.size()) != S.size())
    throw ValidationError("fiber map not total");
  for (int x = 0; x < S.size(); ++x) {
    if (m.dst->base_of(m.f[x]) != S.proj[x])
      throw NotOverIdentity("fiber map does not cover the identity");
  }
  for (int b = 0; b < S.base_size; ++b) {
    const auto& F = S.fibers[b];
    for (int x1 : F)
      for (int x2 : F)
        for (int x3 : F) {
          double lhs = m.lambda(x2, x3) + m.lambda(x1, x2) +
                       m.dst->c(m.f[x1], m.f[x2], m.f[x3]);
          double rhs = m.lambda(x1, x3) + m.src->c(x1, x2, x3);
          if (angle_dist(lhs, rhs) > tol)
            throw NotCompatible("morphism does not respect products");
        }
  }
  return m;
}

GerbeMorphism identity_morphism(GerbePtr g) {
  GerbeMorphism m;
  m.src = g;
  m.dst = g;
  m.f.resize(g->surj().size());
  for (int x = 0; x < g->surj().size(); ++x) m.f[x] = x;
  m.lambda = FiberPairData(g->surj());
  return m;
}

GerbeMorphism compose_morphism(const GerbeMorphism& g, const GerbeMorphism& f) {
  if (g.src.get() != f.dst.get())
    throw NotComposable("morphism composition needs matching middle gerbe");
  GerbeMorphism m;
  m.src = f.src;
  m.dst = g.dst;
  m.f.resize(f.f.size());
  m.lambda = FiberPairData(f.src->surj());
  const auto& S = f.src->surj();
  for (int x = 0; x < S.size(); ++x) m.f[x] = g.f[f.f[x]];
  for (int b = 0; b < S.base_size; ++b) {
    const auto& F = S.fibers[b];
    for (int x1 : F)
      for (int x2 : F)
        m.lambda.at(x1, x2) =
            wrap_angle(f.lambda(x1, x2) + g.lambda(f.f[x1], f.f[x2]));
  }
  return m;
}

bool same_morphism(const GerbeMorphism& a, const GerbeMorphism& b) {
  if (a.src.get() != b.src.get() || a.dst.get() != b.dst.get()) return false;
  if (a.f != b.f) return false;
  const auto& S = a.src->surj();
  for (int bp = 0; bp < S.base_size; ++bp)
    for (int x1 : S.fibers[bp])
      for (int x2 : S.fibers[bp])
        if (angle_dist(a.lambda(x1, x2), b.lambda(x1, x2)) > 1e-12)
          return false;
  return true;
}

double phi_fg(const GerbeMorphism& f, const GerbeMorphism& g, int x1, int x2,
              double v, double u) {
  if (f.src.get() != g.src.get() || f.dst.get() != g.dst.get())
    throw NotComposable("phi_fg needs parallel morphisms");
  const FinGerbe& P = *f.src;
  const FinGerbe& Q = *f.dst;
  if (P.base_of(x1) != P.base_of(x2)) throw NotSameFiber("phi_fg fiber pair");

  double uinv = P.inverse_phase(x1, x2, u);
  double fuinv = uinv + f.lambda(x2, x1);
  double vf = v + fuinv + Q.c(f.f[x2], f.f[x1], g.f[x1]);
  double gu = u + g.lambda(x1, x2);
  return wrap_angle(gu + vf + Q.c(f.f[x2], g.f[x1], g.f[x2]));
}

namespace {

// Re-anchoring phase for the descended trivialization of D_{f,g}. With
// kappa(m) = c_Q(y*, f(s), g(s)) the composition of descended sections
// becomes plain angle addition: kappa is a primitive of c_Q on the fiber
// (fibers of finite gerbes are simplices, so the cocycle is a coboundary).
double kappa_fg(const GerbeMorphism& f, const GerbeMorphism& g, int m) {
  const FinGerbe& Q = *f.dst;
  int s = f.src->surj().fibers[m].front();
  int ystar = Q.surj().fibers[m].front();
  return Q.c(ystar, f.f[s], g.f[s]);
}

}  // namespace

Transformation descend_section(const GerbeMorphism& f, const GerbeMorphism& g,
                               const std::vector<double>& theta_hat,
                               double tol) {
  const FinSurjection& S = f.src->surj();
  for (int b = 0; b < S.base_size; ++b) {
    const auto& F = S.fibers[b];
    for (int x1 : F)
      for (int x2 : F) {
        double moved = phi_fg(f, g, x1, x2, theta_hat[x1]);
        if (angle_dist(moved, theta_hat[x2]) > tol)
          throw NotDescendable("section not compatible with phi transport");
      }
  }
  Transformation t;
  t.f = f;
  t.g = g;
  t.theta.resize(S.base_size);
  for (int b = 0; b < S.base_size; ++b)
    t.theta[b] =
        wrap_angle(theta_hat[S.fibers[b].front()] + kappa_fg(f, g, b));
  return t;
}

std::vector<double> lift_section(const Transformation& t) {
  const FinSurjection& S = t.f.src->surj();
  std::vector<double> theta_hat(S.size());
  for (int b = 0; b < S.base_size; ++b) {
    int s = S.fibers[b].front();  // section by minimal element id
    double anchored = wrap_angle(t.theta[b] - kappa_fg(t.f, t.g, b));
    for (int x : S.fibers[b])
      theta_hat[x] = phi_fg(t.f, t.g, s, x, anchored);
  }
  return theta_hat;
}

Transformation identity_transformation(const GerbeMorphism& f) {
  Transformation t;
  t.f = f;
  t.g = f;
  t.theta.assign(f.src->base_size(), 0.0);
  return t;
}

Transformation vcompose(const Transformation& t1, const Transformation& t2) {
  if (!same_morphism(t1.g, t2.f))
    throw NotComposable("vertical composition needs a matching middle");
  Transformation t;
  t.f = t1.f;
  t.g = t2.g;
  t.theta.resize(t1.theta.size());
  for (size_t i = 0; i < t.theta.size(); ++i)
    t.theta[i] = wrap_angle(t2.theta[i] + t1.theta[i]);
  return t;
}

Transformation hcompose(const Transformation& theta,
                        const Transformation& lambda) {
  // theta: f1 => f2 for P -> Q, lambda: g1 => g2 for Q -> R.
  if (theta.f.dst.get() != lambda.f.src.get())
    throw NotComposable("horizontal composition needs composable morphisms");
  const GerbeMorphism& f1 = theta.f;
  const GerbeMorphism& f2 = theta.g;
  const GerbeMorphism& g1 = lambda.f;
  const GerbeMorphism& g2 = lambda.g;
  const FinGerbe& R = *g1.dst;

  std::vector<double> th = lift_section(theta);
  std::vector<double> lh = lift_section(lambda);

  const FinSurjection& S = f1.src->surj();
  std::vector<double> section(S.size());
  for (int x = 0; x < S.size(); ++x) {
    double pushed = th[x] + g2.lambda(f1.f[x], f2.f[x]);
    section[x] = wrap_angle(pushed + lh[f1.f[x]] +
                            R.c(g1.f[f1.f[x]], g2.f[f1.f[x]], g2.f[f2.f[x]]));
  }
  return descend_section(compose_morphism(g1, f1), compose_morphism(g2, f2),
                         section, 1e-9);
}

double GroupoidTable::verify(int samples) const {
  double worst = 0;
  std::vector<double> probe;
  for (int i = 0; i < samples; ++i)
    probe.push_back(wrap_angle(0.137 + 0.61 * i));
  for (int x1 : objects)
    for (int x2 : objects) {
      for (double u : probe) {
        worst = std::max(worst,
                         angle_dist(compose(x1, x2, x2, identity(x2), u), u));
        worst = std::max(worst,
                         angle_dist(compose(x1, x1, x2, u, identity(x1)), u));
        double w = inverse(x1, x2, u);
        worst = std::max(worst, angle_dist0(compose(x1, x2, x1, w, u)));
      }
      for (int x3 : objects)
        for (int x4 : objects)
          for (double u : probe) {
            double a = compose(x1, x2, x4, compose(x2, x3, x4, probe[0], u),
                               probe[1]);
            double b = compose(x1, x3, x4, probe[0],
                               compose(x1, x2, x3, u, probe[1]));
            worst = std::max(worst, angle_dist(a, b));
          }
    }
  return worst;
}

GroupoidTable groupoid_at(const FinGerbe& P, int m) {
  if (m < 0 || m >= P.base_size())
    throw ValidationError("base point out of range");
  GroupoidTable t;
  t.gerbe = &P;
  t.base = m;
  t.objects = P.surj().fibers[m];
  return t;
}

}  // namespace gerbes
