#include "gerbes/descent.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <sstream>

namespace gerbes {

DescentBundle make_descent_bundle(FinSurjection s, FiberPairData phi,
                                  double tol) {
  for (int b = 0; b < s.base_size; ++b) {
    const auto& F = s.fibers[b];
    for (int x : F)
      if (angle_dist0(phi(x, x)) > tol)
        throw CocycleFails("phi(x,x) must vanish");
    for (int x1 : F)
      for (int x2 : F)
        for (int x3 : F)
          if (angle_dist(wrap_angle(phi(x1, x2) + phi(x2, x3)),
                         wrap_angle(phi(x1, x3))) > tol)
            throw CocycleFails("descent cocycle condition fails");
  }
  return DescentBundle{std::move(s), std::move(phi)};
}

std::vector<double> descend(const DescentBundle& b) {
  std::vector<double> psi(b.surj.size());
  for (int m = 0; m < b.surj.base_size; ++m) {
    int s = b.surj.fibers[m].front();
    for (int x : b.surj.fibers[m]) psi[x] = wrap_angle(b.phi(s, x));
  }
  return psi;
}

std::vector<double> descend_map(const DescentBundle& P,
                                const DescentBundle& Q,
                                const std::vector<double>& fmap, double tol) {
  const FinSurjection& S = P.surj;
  for (int m = 0; m < S.base_size; ++m)
    for (int x1 : S.fibers[m])
      for (int x2 : S.fibers[m]) {
        double lhs = wrap_angle(fmap[x2] + P.phi(x1, x2));
        double rhs = wrap_angle(Q.phi(x1, x2) + fmap[x1]);
        if (angle_dist(lhs, rhs) > tol)
          throw NotCompatible("map does not intertwine the transports");
      }
  std::vector<double> out(S.base_size);
  for (int m = 0; m < S.base_size; ++m)
    out[m] = wrap_angle(fmap[S.fibers[m].front()]);
  return out;
}

double monoidal_check(const DescentBundle& P, const DescentBundle& Q) {
  const FinSurjection& S = P.surj;
  // tensor transport = sum of phases; compare the two descents
  FiberPairData phi(S);
  for (int m = 0; m < S.base_size; ++m)
    for (int x1 : S.fibers[m])
      for (int x2 : S.fibers[m])
        phi.at(x1, x2) = wrap_angle(P.phi(x1, x2) + Q.phi(x1, x2));
  DescentBundle PQ{S, phi};
  std::vector<double> a = descend(P);
  std::vector<double> b = descend(Q);
  std::vector<double> c = descend(PQ);
  double worst = 0;
  for (int x = 0; x < S.size(); ++x)
    worst = std::max(worst, angle_dist(wrap_angle(a[x] + b[x]), c[x]));
  return worst;
}

TrivializationDifference trivialization_difference(const FinGerbe& G,
                                                   const FiberPairData& T1,
                                                   const FiberPairData& T2,
                                                   double tol) {
  const FinSurjection& S = G.surj();
  for (const FiberPairData* T : {&T1, &T2}) {
    for (int m = 0; m < S.base_size; ++m)
      for (int x1 : S.fibers[m])
        for (int x2 : S.fibers[m])
          for (int x3 : S.fibers[m]) {
            double lhs = wrap_angle((*T)(x2, x3) - (*T)(x1, x3) + (*T)(x1, x2));
            if (angle_dist(lhs, wrap_angle(G.c(x1, x2, x3))) > tol)
              throw NotATrivialization("delta_fiber T != c");
          }
  }
  FiberPairData d(S);
  for (int m = 0; m < S.base_size; ++m)
    for (int x1 : S.fibers[m])
      for (int x2 : S.fibers[m])
        d.at(x1, x2) = wrap_angle(T1(x1, x2) - T2(x1, x2));
  TrivializationDifference out{make_descent_bundle(S, std::move(d), 10 * tol),
                               {}};
  out.psi = descend(out.diff);
  return out;
}

namespace {

// Access into TwoDescentData with the identity/zero defaults for repeated
// adjacent indices.
struct Data {
  const TwoDescentData& d;

  int pos(int i, int m) const {
    const auto& U = d.cover[i];
    auto it = std::lower_bound(U.begin(), U.end(), m);
    if (it == U.end() || *it != m) return -1;
    return static_cast<int>(it - U.begin());
  }
  bool in_cover(int i, int m) const { return pos(i, m) >= 0; }
  int nparts() const { return static_cast<int>(d.cover.size()); }
  int base_pt(int i, int x) const {
    return d.cover[i][d.gerbes[i]->base_of(x)];
  }
  int f(int i, int j, int x) const {
    if (i == j) return x;
    return d.phi.at({i, j}).f.at(x);
  }
  double lam(int i, int j, int x1, int x2) const {
    if (i == j) return 0.0;
    return d.phi.at({i, j}).lam.at({x1, x2});
  }
  double psi(int i, int j, int k, int x) const {
    if (i == j || j == k) return 0.0;
    return d.psi_hat.at({i, j, k}).at(x);
  }
  double c(int i, int x1, int x2, int x3) const {
    return d.gerbes[i]->c(x1, x2, x3);
  }

  // transport of v in (Q_k)_(a(x1), b(x1)) to x2, for the parallel morphisms
  // a = phi_jk o phi_ij and b = phi_ik from Q_i to Q_k; the phi_fg formula
  // written on the local data
  double transport(int i, int j, int k, int x1, int x2, double v) const {
    auto a = [&](int x) { return f(j, k, f(i, j, x)); };
    auto b = [&](int x) { return f(i, k, x); };
    double lam_a_21 = lam(i, j, x2, x1) + lam(j, k, f(i, j, x2), f(i, j, x1));
    double lam_b_12 = lam(i, k, x1, x2);
    double uinv = -c(i, x1, x2, x1);
    double vf = v + uinv + lam_a_21 + c(k, a(x2), a(x1), b(x1));
    return wrap_angle(lam_b_12 + vf + c(k, a(x2), b(x1), b(x2)));
  }
};

}  // namespace

TwoDescentReport validate_2descent(const TwoDescentData& d, double tol) {
  TwoDescentReport rep;
  Data D{d};
  const int n = D.nparts();
  std::ostringstream witness;

  // structural checks
  std::vector<bool> covered(d.base_size, false);
  for (int i = 0; i < n; ++i) {
    if (!std::is_sorted(d.cover[i].begin(), d.cover[i].end())) {
      rep.structure_ok = false;
      witness << "cover " << i << " not sorted;";
    }
    for (int m : d.cover[i])
      if (m >= 0 && m < d.base_size) covered[m] = true;
    if (d.gerbes[i]->base_size() != static_cast<int>(d.cover[i].size())) {
      rep.structure_ok = false;
      witness << "gerbe " << i << " base mismatch;";
    }
  }
  for (int m = 0; m < d.base_size; ++m)
    if (!covered[m]) {
      rep.structure_ok = false;
      witness << "point " << m << " uncovered;";
    }
  if (!rep.structure_ok) {
    rep.witness = witness.str();
    return rep;
  }

  // morphism law for each phi_ij over U_ij
  for (int i = 0; i < n && rep.morphisms_ok; ++i)
    for (int j = 0; j < n && rep.morphisms_ok; ++j) {
      if (i == j) continue;
      for (int m : d.cover[i]) {
        if (!D.in_cover(j, m)) continue;
        if (!d.phi.count({i, j})) {
          rep.morphisms_ok = false;
          witness << "phi(" << i << "," << j << ") missing;";
          break;
        }
        const auto& Fi = d.gerbes[i]->surj().fibers[D.pos(i, m)];
        for (int x1 : Fi)
          for (int x2 : Fi)
            for (int x3 : Fi) {
              double lhs = D.lam(i, j, x2, x3) + D.lam(i, j, x1, x2) +
                           D.c(j, D.f(i, j, x1), D.f(i, j, x2), D.f(i, j, x3));
              double rhs = D.lam(i, j, x1, x3) + D.c(i, x1, x2, x3);
              if (angle_dist(wrap_angle(lhs), wrap_angle(rhs)) > tol) {
                rep.morphisms_ok = false;
                witness << "phi(" << i << "," << j << ") law fails at m=" << m
                        << ";";
              }
            }
        for (int x : Fi)
          if (D.base_pt(j, D.f(i, j, x)) != m) {
            rep.morphisms_ok = false;
            witness << "phi(" << i << "," << j << ") not over id at m=" << m
                    << ";";
          }
      }
    }
  if (!rep.morphisms_ok) {
    rep.witness = witness.str();
    return rep;
  }

  // psi descends: compatibility with the (phi_jk o phi_ij, phi_ik) transport
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (i == j || j == k) continue;
        for (int m : d.cover[i]) {
          if (!D.in_cover(j, m) || !D.in_cover(k, m)) continue;
          if (!d.psi_hat.count({i, j, k})) {
            rep.psi_descends_ok = false;
            witness << "psi(" << i << "," << j << "," << k << ") missing;";
            continue;
          }
          const auto& Fi = d.gerbes[i]->surj().fibers[D.pos(i, m)];
          for (int x1 : Fi)
            for (int x2 : Fi) {
              double moved = D.transport(i, j, k, x1, x2, D.psi(i, j, k, x1));
              double defect =
                  angle_dist(moved, wrap_angle(D.psi(i, j, k, x2)));
              rep.max_descent_defect = std::max(rep.max_descent_defect, defect);
              if (defect > tol && rep.psi_descends_ok) {
                rep.psi_descends_ok = false;
                witness << "psi(" << i << "," << j << "," << k
                        << ") not descendable at m=" << m << ";";
              }
            }
        }
      }

  // non-abelian 2-cocycle condition over ordered quadruples
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          for (int m : d.cover[i]) {
            if (!D.in_cover(j, m) || !D.in_cover(k, m) || !D.in_cover(l, m))
              continue;
            const auto& Fi = d.gerbes[i]->surj().fibers[D.pos(i, m)];
            for (int x : Fi) {
              int fij = D.f(i, j, x);
              int A1 = D.f(k, l, D.f(j, k, fij));
              int A2 = D.f(k, l, D.f(i, k, x));
              int A3 = D.f(i, l, x);
              int B2 = D.f(j, l, fij);
              double lhs = D.psi(i, k, l, x) +
                           (D.psi(i, j, k, x) +
                            D.lam(k, l, D.f(j, k, fij), D.f(i, k, x))) +
                           D.c(l, A1, A2, A3);
              double rhs = D.psi(i, j, l, x) + D.psi(j, k, l, fij) +
                           D.c(l, A1, B2, A3);
              double defect = angle_dist(wrap_angle(lhs), wrap_angle(rhs));
              rep.max_cocycle_defect = std::max(rep.max_cocycle_defect, defect);
              if (defect > tol && rep.cocycle_ok) {
                rep.cocycle_ok = false;
                witness << "2-cocycle fails at (" << i << "," << j << "," << k
                        << "," << l << ") m=" << m << " x=" << x << ";";
              }
            }
          }
        }

  rep.witness = witness.str();
  return rep;
}

RestrictedGerbe restrict_gerbe(const FinGerbe& g,
                               const std::vector<int>& base_points) {
  RestrictedGerbe out;
  std::vector<int> proj;
  for (size_t b = 0; b < base_points.size(); ++b) {
    for (int x : g.surj().fibers[base_points[b]]) {
      out.elem_to_new[x] = static_cast<int>(out.elem_to_old.size());
      out.elem_to_old.push_back(x);
      proj.push_back(static_cast<int>(b));
    }
  }
  FinSurjection s =
      FinSurjection::make(static_cast<int>(base_points.size()), proj);
  std::vector<std::vector<double>> c(s.base_size);
  for (int b = 0; b < s.base_size; ++b) {
    const auto& F = s.fibers[b];
    size_t nb = F.size();
    c[b].assign(nb * nb * nb, 0.0);
    for (size_t a1 = 0; a1 < nb; ++a1)
      for (size_t a2 = 0; a2 < nb; ++a2)
        for (size_t a3 = 0; a3 < nb; ++a3)
          c[b][(a1 * nb + a2) * nb + a3] =
              g.c(out.elem_to_old[F[a1]], out.elem_to_old[F[a2]],
                  out.elem_to_old[F[a3]]);
  }
  out.gerbe = std::make_shared<FinGerbe>(FinGerbe::make(s, std::move(c)));
  return out;
}

GluedGerbe glue_2descent(const TwoDescentData& d, double tol) {
  TwoDescentReport rep = validate_2descent(d, tol);
  if (!rep.pass())
    throw ValidationError("2-descent data invalid: " + rep.witness);

  Data D{d};
  const int n = D.nparts();

  GluedGerbe out;
  // disjoint union of the X_i, projected to the global base
  std::vector<int> proj;
  std::vector<std::vector<int>> offset(n);
  for (int i = 0; i < n; ++i) {
    const auto& S = d.gerbes[i]->surj();
    offset[i].resize(S.size());
    for (int x = 0; x < S.size(); ++x) {
      offset[i][x] = static_cast<int>(proj.size());
      out.elem_part.push_back(i);
      out.elem_local.push_back(x);
      proj.push_back(d.cover[i][S.proj[x]]);
    }
  }
  FinSurjection S = FinSurjection::make(d.base_size, proj);

  // product of canonical elements: u_jk phi_jk(u_ij) psi_ijk^{-1}(x_i)
  auto glued_c = [&](int gi, int gj, int gk) {
    int i = out.elem_part[gi], j = out.elem_part[gj], k = out.elem_part[gk];
    int xi = out.elem_local[gi], xj = out.elem_local[gj],
        xk = out.elem_local[gk];
    int fij = D.f(i, j, xi);
    int A = D.f(j, k, fij);   // phi_jk phi_ij x_i
    int B = D.f(i, k, xi);    // phi_ik x_i
    int C = D.f(j, k, xj);    // phi_jk x_j
    double total = D.lam(j, k, fij, xj) + D.c(k, A, C, xk) -
                   D.psi(i, j, k, xi) - D.c(k, A, B, A) + D.c(k, B, A, xk);
    return wrap_angle(total);
  };

  std::vector<std::vector<double>> c(S.base_size);
  for (int b = 0; b < S.base_size; ++b) {
    const auto& F = S.fibers[b];
    size_t nb = F.size();
    c[b].assign(nb * nb * nb, 0.0);
    for (size_t a1 = 0; a1 < nb; ++a1)
      for (size_t a2 = 0; a2 < nb; ++a2)
        for (size_t a3 = 0; a3 < nb; ++a3)
          c[b][(a1 * nb + a2) * nb + a3] = glued_c(F[a1], F[a2], F[a3]);
  }
  out.gerbe = std::make_shared<FinGerbe>(FinGerbe::make(S, std::move(c), tol));

  // chi_i: glued|_{U_i} -> Q_i via phi_{ji} and psi_{jj'i}
  std::vector<RestrictedGerbe> glued_over(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> base_pts(d.cover[i].begin(), d.cover[i].end());
    glued_over[i] = restrict_gerbe(*out.gerbe, base_pts);
    const RestrictedGerbe& R = glued_over[i];
    const FinSurjection& RS = R.gerbe->surj();
    std::vector<int> fmap(RS.size());
    FiberPairData lam(RS);
    for (int xnew = 0; xnew < RS.size(); ++xnew) {
      int g = R.elem_to_old[xnew];
      fmap[xnew] = D.f(out.elem_part[g], i, out.elem_local[g]);
    }
    for (int b = 0; b < RS.base_size; ++b) {
      const auto& F = RS.fibers[b];
      for (int x1 : F)
        for (int x2 : F) {
          int g1 = R.elem_to_old[x1], g2 = R.elem_to_old[x2];
          int j = out.elem_part[g1], jp = out.elem_part[g2];
          int xj = out.elem_local[g1], xjp = out.elem_local[g2];
          int fjj = D.f(j, jp, xj);
          int Dd = D.f(jp, i, fjj);  // phi_{j'i} phi_{jj'} x_j
          int E = D.f(j, i, xj);     // phi_{ji} x_j
          int Ff = D.f(jp, i, xjp);  // phi_{j'i} x_{j'}
          double v = D.lam(jp, i, fjj, xjp) - D.psi(j, jp, i, xj) -
                     D.c(i, Dd, E, Dd) + D.c(i, E, Dd, Ff);
          lam.at(x1, x2) = wrap_angle(v);
        }
    }
    out.chi.push_back(make_morphism(R.gerbe, d.gerbes[i], std::move(fmap),
                                    std::move(lam), 1e-9));
  }

  // xi_ij: phi_ij o chi_i => chi_j over U_ij, lifted section psi_{kij}
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<int> Uij;
      for (int m : d.cover[i])
        if (D.in_cover(j, m)) Uij.push_back(m);
      if (Uij.empty()) continue;

      RestrictedGerbe G = restrict_gerbe(*out.gerbe, Uij);
      std::vector<int> pos_i, pos_j;
      for (int m : Uij) {
        pos_i.push_back(D.pos(i, m));
        pos_j.push_back(D.pos(j, m));
      }
      RestrictedGerbe Qi = restrict_gerbe(*d.gerbes[i], pos_i);
      RestrictedGerbe Qj = restrict_gerbe(*d.gerbes[j], pos_j);

      auto restrict_chi = [&](int part, const RestrictedGerbe& Qr) {
        const FinSurjection& GS = G.gerbe->surj();
        std::vector<int> fmap(GS.size());
        FiberPairData lam(GS);
        for (int x = 0; x < GS.size(); ++x) {
          int gold = G.elem_to_old[x];
          int yi = out.chi[part].f[glued_over[part].elem_to_new.at(gold)];
          fmap[x] = Qr.elem_to_new.at(yi);
        }
        for (int b = 0; b < GS.base_size; ++b)
          for (int x1 : GS.fibers[b])
            for (int x2 : GS.fibers[b]) {
              int o1 = glued_over[part].elem_to_new.at(G.elem_to_old[x1]);
              int o2 = glued_over[part].elem_to_new.at(G.elem_to_old[x2]);
              lam.at(x1, x2) = out.chi[part].lambda(o1, o2);
            }
        return make_morphism(G.gerbe, Qr.gerbe, std::move(fmap),
                             std::move(lam), 1e-9);
      };
      GerbeMorphism chi_i_r = restrict_chi(i, Qi);
      GerbeMorphism chi_j_r = restrict_chi(j, Qj);

      const FinSurjection& QS = Qi.gerbe->surj();
      std::vector<int> fmap(QS.size());
      FiberPairData lam(QS);
      for (int x = 0; x < QS.size(); ++x)
        fmap[x] = Qj.elem_to_new.at(D.f(i, j, Qi.elem_to_old[x]));
      for (int b = 0; b < QS.base_size; ++b)
        for (int x1 : QS.fibers[b])
          for (int x2 : QS.fibers[b])
            lam.at(x1, x2) = wrap_angle(
                D.lam(i, j, Qi.elem_to_old[x1], Qi.elem_to_old[x2]));
      GerbeMorphism phi_r = make_morphism(Qi.gerbe, Qj.gerbe, std::move(fmap),
                                          std::move(lam), 1e-9);

      GerbeMorphism lhs = compose_morphism(phi_r, chi_i_r);
      const FinSurjection& GS = G.gerbe->surj();
      std::vector<double> sec(GS.size());
      for (int x = 0; x < GS.size(); ++x) {
        int gold = G.elem_to_old[x];
        sec[x] =
            wrap_angle(D.psi(out.elem_part[gold], i, j, out.elem_local[gold]));
      }
      out.xi.emplace(std::make_pair(i, j),
                     descend_section(lhs, chi_j_r, sec, 1e-9));
    }
  return out;
}

TwoDescentData random_2descent(std::uint64_t seed, int base_size, int parts,
                               bool twist) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::uniform_int_distribution<int> fiber(1, 3);

  // global coboundary gerbe over the base
  std::vector<int> proj;
  for (int m = 0; m < base_size; ++m) {
    int nf = fiber(rng);
    for (int t = 0; t < nf; ++t) proj.push_back(m);
  }
  FinSurjection S = FinSurjection::make(base_size, proj);
  FiberPairData b(S);
  for (int m = 0; m < base_size; ++m)
    for (int x1 : S.fibers[m])
      for (int x2 : S.fibers[m])
        if (x1 != x2) b.at(x1, x2) = U(rng);
  FinGerbe global = FinGerbe::from_pair_data(S, b);

  // random cover: each part takes a contiguous-ish random subset; patch any
  // uncovered point into part 0
  TwoDescentData d;
  d.base_size = base_size;
  d.cover.resize(parts);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int m = 0; m < base_size; ++m) {
    bool hit = false;
    for (int i = 0; i < parts; ++i)
      if (coin(rng)) {
        d.cover[i].push_back(m);
        hit = true;
      }
    if (!hit) d.cover[0].push_back(m);
  }
  for (int i = 0; i < parts; ++i)
    if (d.cover[i].empty()) d.cover[i].push_back(0);
  for (auto& U_i : d.cover) std::sort(U_i.begin(), U_i.end());

  std::vector<RestrictedGerbe> restr(parts);
  for (int i = 0; i < parts; ++i) {
    restr[i] = restrict_gerbe(global, d.cover[i]);
    d.gerbes.push_back(restr[i].gerbe);
  }

  // twist potentials: b_ij per ordered pair on global elements over U_ij,
  // eta_ij per ordered pair on base points of U_ij
  std::map<std::pair<int, int>, std::map<int, double>> bt;
  std::map<std::pair<int, int>, std::map<int, double>> eta;
  auto in_cover = [&](int i, int m) {
    return std::binary_search(d.cover[i].begin(), d.cover[i].end(), m);
  };
  for (int i = 0; i < parts; ++i)
    for (int j = 0; j < parts; ++j) {
      if (i == j) continue;
      for (int m : d.cover[i]) {
        if (!in_cover(j, m)) continue;
        eta[{i, j}][m] = twist ? U(rng) : 0.0;
        for (int x : S.fibers[m]) bt[{i, j}][x] = twist ? U(rng) : 0.0;
      }
    }
  auto bt_of = [&](int i, int j, int x) {
    if (i == j) return 0.0;
    return bt.at({i, j}).at(x);
  };
  auto eta_of = [&](int i, int j, int m) {
    if (i == j) return 0.0;
    return eta.at({i, j}).at(m);
  };

  for (int i = 0; i < parts; ++i)
    for (int j = 0; j < parts; ++j) {
      if (i == j) continue;
      LocalMorphism lm;
      bool nonempty = false;
      for (int m : d.cover[i]) {
        if (!in_cover(j, m)) continue;
        nonempty = true;
        const auto& F = S.fibers[m];
        for (int xo : F) {
          int xi = restr[i].elem_to_new.at(xo);
          lm.f[xi] = restr[j].elem_to_new.at(xo);
          for (int yo : F) {
            int yi = restr[i].elem_to_new.at(yo);
            lm.lam[{xi, yi}] =
                wrap_angle(bt_of(i, j, yo) - bt_of(i, j, xo));
          }
        }
      }
      if (nonempty) d.phi[{i, j}] = std::move(lm);
    }

  for (int i = 0; i < parts; ++i)
    for (int j = 0; j < parts; ++j)
      for (int k = 0; k < parts; ++k) {
        if (i == j || j == k) continue;
        std::map<int, double> psi;
        bool nonempty = false;
        for (int m : d.cover[i]) {
          if (!in_cover(j, m) || !in_cover(k, m)) continue;
          nonempty = true;
          double rho = wrap_angle(eta_of(j, k, m) - eta_of(i, k, m) +
                                  eta_of(i, j, m));
          for (int xo : S.fibers[m]) {
            int xi = restr[i].elem_to_new.at(xo);
            psi[xi] = wrap_angle(-(bt_of(i, j, xo) + bt_of(j, k, xo) -
                                   bt_of(i, k, xo)) +
                                 rho);
          }
        }
        if (nonempty) d.psi_hat[{i, j, k}] = std::move(psi);
      }
  return d;
}

}  // namespace gerbes

