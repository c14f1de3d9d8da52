#include "gerbes/two_gerbe.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace gerbes {

double Fin2Gerbe::c(int y1, int y2, int y3) const {
  auto it = cQ.find({y1, y2, y3});
  if (it == cQ.end()) throw ValidationError("cQ missing a fiber triple");
  return it->second;
}

double Fin2Gerbe::mu(int a23, int a12, int b23, int b12) const {
  auto it = mHat.find({a23, a12, b23, b12});
  if (it == mHat.end()) throw ValidationError("mHat missing a pair of pairs");
  return it->second;
}

int Fin2Gerbe::prod(int y23, int y12) const {
  auto it = mY.find({y23, y12});
  if (it == mY.end()) throw ValidationError("mY missing a composable pair");
  return it->second;
}

double Fin2Gerbe::assoc(int y34, int y23, int y12) const {
  auto it = aHat.find({y34, y23, y12});
  if (it == aHat.end()) throw ValidationError("aHat missing a triple");
  return it->second;
}

namespace {

struct Walker {
  const Fin2Gerbe& g;

  const std::vector<int>& yf(int x1, int x2) const {
    static const std::vector<int> kEmpty;
    auto it = g.yfiber.find({x1, x2});
    return it == g.yfiber.end() ? kEmpty : it->second;
  }

  // lambda of the product morphism m between composable pairs T=(y23,y12)
  double lam_m1(const std::array<int, 3>& T, const std::array<int, 3>& U) const {
    // m1 = m(m(w3,w2),w1)
    int ma = g.prod(T[0], T[1]), mb = g.prod(U[0], U[1]);
    return g.mu(T[0], T[1], U[0], U[1]) + g.mu(ma, T[2], mb, U[2]);
  }
  double lam_m2(const std::array<int, 3>& T, const std::array<int, 3>& U) const {
    int ma = g.prod(T[1], T[2]), mb = g.prod(U[1], U[2]);
    return g.mu(T[1], T[2], U[1], U[2]) + g.mu(T[0], ma, U[0], mb);
  }
  int m1(const std::array<int, 3>& T) const {
    return g.prod(g.prod(T[0], T[1]), T[2]);
  }
  int m2(const std::array<int, 3>& T) const {
    return g.prod(T[0], g.prod(T[1], T[2]));
  }

  // phi_{m1,m2} transport of v from triple T to triple U (same X-frame)
  double transport(const std::array<int, 3>& T, const std::array<int, 3>& U,
                   double v) const {
    double cQ3 = g.c(T[0], U[0], T[0]) + g.c(T[1], U[1], T[1]) +
                 g.c(T[2], U[2], T[2]);
    double out = v + lam_m2(T, U) + lam_m1(U, T) - cQ3 +
                 g.c(m1(U), m1(T), m2(T)) + g.c(m1(U), m2(T), m2(U));
    return wrap_angle(out);
  }
};

}  // namespace

namespace {
int comp_at(const Bicat& b, int g, int f) { return b.comp.at({g, f}); }
}  // namespace

double coherence_defect(const Fin2Gerbe& g, const std::array<int, 5>& signs) {
  Walker W{g};
  double worst = 0.0;
  const auto& fib = g.surjX.fibers;
  for (int m = 0; m < g.surjX.base_size; ++m) {
    const auto& F = fib[m];
    for (int x1 : F)
      for (int x2 : F)
        for (int x3 : F)
          for (int x4 : F)
            for (int x5 : F)
              for (int w4 : W.yf(x4, x5))
                for (int w3 : W.yf(x3, x4))
                  for (int w2 : W.yf(x2, x3))
                    for (int w1 : W.yf(x1, x2)) {
                      int w43 = g.prod(w4, w3);
                      int w32 = g.prod(w3, w2);
                      int w21 = g.prod(w2, w1);
                      int V1 = g.prod(g.prod(w43, w2), w1);
                      int V2 = g.prod(g.prod(w4, w32), w1);
                      int V3 = g.prod(w4, g.prod(w32, w1));
                      int V4 = g.prod(w4, g.prod(w3, w21));
                      int V5 = g.prod(w43, w21);
                      double a1 = g.assoc(w4, w3, w2);  // pi_1
                      double a2 = g.assoc(w4, w3, w21); // pi_2
                      double a3 = g.assoc(w4, w32, w1); // pi_3
                      double a4 = g.assoc(w43, w2, w1); // pi_4
                      double a5 = g.assoc(w3, w2, w1);  // pi_5
                      double mu1 = g.mu(g.prod(w43, w2), w1,
                                        g.prod(w4, w32), w1);
                      double mu2 = g.mu(w4, g.prod(w32, w1), w4,
                                        g.prod(w3, w21));
                      double total = signs[0] * a1 + signs[1] * a2 +
                                     signs[2] * a3 + signs[3] * a4 +
                                     signs[4] * a5 + mu1 + mu2 +
                                     g.c(V1, V2, V3) + g.c(V1, V3, V4) -
                                     g.c(V1, V5, V4);
                      worst = std::max(worst, angle_dist0(total));
                    }
  }
  return worst;
}

TwoGerbeReport validate_2gerbe(const Fin2Gerbe& g, double tol) {
  TwoGerbeReport rep;
  Walker W{g};
  std::ostringstream witness;
  const auto& fib = g.surjX.fibers;

  // structure: every fiberwise ordered X-pair carries a nonempty Y-fiber
  for (int m = 0; m < g.surjX.base_size; ++m)
    for (int x1 : fib[m])
      for (int x2 : fib[m])
        if (W.yf(x1, x2).empty()) {
          rep.structure_ok = false;
          witness << "empty Y-fiber over (" << x1 << "," << x2 << ");";
        }
  for (int y = 0; y < static_cast<int>(g.ypair.size()); ++y) {
    auto [x1, x2] = g.ypair[y];
    if (g.surjX.proj[x1] != g.surjX.proj[x2]) {
      rep.structure_ok = false;
      witness << "y " << y << " over a non-fiberwise pair;";
    }
  }
  if (!rep.structure_ok) {
    rep.witness = witness.str();
    return rep;
  }

  // per-point fiber gerbes
  for (const auto& [pair, F] : g.yfiber) {
    for (int y1 : F)
      for (int y2 : F) {
        if (angle_dist0(g.c(y1, y1, y2)) > tol ||
            angle_dist0(g.c(y1, y2, y2)) > tol) {
          rep.fiber_gerbes_ok = false;
          witness << "cQ not normalized over (" << pair.first << ","
                  << pair.second << ");";
        }
      }
    for (int y1 : F)
      for (int y2 : F)
        for (int y3 : F)
          for (int y4 : F) {
            double d = g.c(y2, y3, y4) - g.c(y1, y3, y4) + g.c(y1, y2, y4) -
                       g.c(y1, y2, y3);
            if (angle_dist0(d) > tol) {
              rep.fiber_gerbes_ok = false;
              witness << "cQ not associative over (" << pair.first << ","
                      << pair.second << ");";
            }
          }
  }

  // product morphism law over fiber triples of X
  for (int m = 0; m < g.surjX.base_size; ++m)
    for (int x1 : fib[m])
      for (int x2 : fib[m])
        for (int x3 : fib[m]) {
          std::vector<std::pair<int, int>> pairs;
          for (int y23 : W.yf(x2, x3))
            for (int y12 : W.yf(x1, x2)) pairs.push_back({y23, y12});
          for (auto& p : pairs) {
            int t = g.prod(p.first, p.second);
            auto [t1, t2] = g.ypair[t];
            if (t1 != x1 || t2 != x3) {
              rep.structure_ok = false;
              witness << "mY lands outside Y(x1,x3);";
            }
            double d0 = angle_dist0(g.mu(p.first, p.second, p.first, p.second));
            rep.max_morphism_defect = std::max(rep.max_morphism_defect, d0);
            if (d0 > tol) rep.product_morphism_ok = false;
          }
          for (auto& p1 : pairs)
            for (auto& p2 : pairs)
              for (auto& p3 : pairs) {
                double lhs = g.mu(p2.first, p2.second, p3.first, p3.second) +
                             g.mu(p1.first, p1.second, p2.first, p2.second) +
                             g.c(g.prod(p1.first, p1.second),
                                 g.prod(p2.first, p2.second),
                                 g.prod(p3.first, p3.second));
                double rhs = g.mu(p1.first, p1.second, p3.first, p3.second) +
                             g.c(p1.first, p2.first, p3.first) +
                             g.c(p1.second, p2.second, p3.second);
                double d = angle_dist(wrap_angle(lhs), wrap_angle(rhs));
                rep.max_morphism_defect = std::max(rep.max_morphism_defect, d);
                if (d > tol && rep.product_morphism_ok) {
                  rep.product_morphism_ok = false;
                  witness << "mHat law fails over (" << x1 << "," << x2 << ","
                          << x3 << ");";
                }
              }
        }

  // associator descends along the phi_{m1,m2} transport
  for (int m = 0; m < g.surjX.base_size; ++m)
    for (int x1 : fib[m])
      for (int x2 : fib[m])
        for (int x3 : fib[m])
          for (int x4 : fib[m]) {
            std::vector<std::array<int, 3>> triples;
            for (int w3 : W.yf(x3, x4))
              for (int w2 : W.yf(x2, x3))
                for (int w1 : W.yf(x1, x2)) triples.push_back({w3, w2, w1});
            for (auto& T : triples)
              for (auto& U : triples) {
                double moved =
                    W.transport(T, U, g.assoc(T[0], T[1], T[2]));
                double d = angle_dist(
                    moved, wrap_angle(g.assoc(U[0], U[1], U[2])));
                rep.max_descent_defect = std::max(rep.max_descent_defect, d);
                if (d > tol && rep.associator_descends_ok) {
                  rep.associator_descends_ok = false;
                  witness << "aHat not descendable over (" << x1 << "," << x2
                          << "," << x3 << "," << x4 << ");";
                }
              }
          }

  rep.max_coherence_defect = coherence_defect(g);
  if (rep.max_coherence_defect > tol) {
    rep.coherence_ok = false;
    witness << "five-term coherence fails (defect "
            << rep.max_coherence_defect << ");";
  }
  rep.witness = witness.str();
  return rep;
}

Extraction extract_3cocycle(const Fin2Gerbe& g,
                            const std::vector<std::vector<int>>& cover,
                            const SectionChoices& choices, double tol) {
  const int n = static_cast<int>(cover.size());
  std::mt19937_64 rng(choices.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const bool randomize = choices.seed != 0;

  // nerve of the cover
  std::vector<int> verts(n);
  for (int i = 0; i < n; ++i) verts[i] = i;
  std::vector<Face> maximal;
  std::vector<std::vector<int>> members(n);
  for (int i = 0; i < n; ++i) members[i] = cover[i];
  // all subsets with nonempty intersection; record as faces
  std::vector<Face> faces;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    // intersection
    std::vector<int> inter = cover[idx[0]];
    for (size_t t = 1; t < idx.size(); ++t) {
      std::vector<int> next;
      std::set_intersection(inter.begin(), inter.end(),
                            cover[idx[t]].begin(), cover[idx[t]].end(),
                            std::back_inserter(next));
      inter = next;
    }
    if (!inter.empty()) faces.push_back(idx);
  }
  Extraction out{Complex::from_maximal(verts, faces), {}};

  // common intersection point of a face, by minimal id
  auto face_point = [&](const Face& f) {
    std::vector<int> inter = cover[f[0]];
    for (size_t t = 1; t < f.size(); ++t) {
      std::vector<int> next;
      std::set_intersection(inter.begin(), inter.end(), cover[f[t]].begin(),
                            cover[f[t]].end(), std::back_inserter(next));
      inter = next;
    }
    return inter.front();
  };

  // choices: s_i(m) in X_m, sigma_ij(m) in Y_(s_i, s_j), rho_ijk(m) angle
  std::map<std::pair<int, int>, int> s_choice;       // (i, m) -> x
  std::map<std::array<int, 3>, int> sigma_choice;    // (i, j, m) -> y
  std::map<std::array<int, 4>, double> rho_choice;   // (i, j, k, m)
  auto s_of = [&](int i, int m) {
    auto key = std::make_pair(i, m);
    auto it = s_choice.find(key);
    if (it != s_choice.end()) return it->second;
    const auto& F = g.surjX.fibers[m];
    int pick = F.front();
    if (randomize && F.size() > 1) {
      std::uniform_int_distribution<int> D(0, static_cast<int>(F.size()) - 1);
      pick = F[D(rng)];
    }
    s_choice[key] = pick;
    return pick;
  };
  auto sigma_of = [&](int i, int j, int m) {
    std::array<int, 3> key{i, j, m};
    auto it = sigma_choice.find(key);
    if (it != sigma_choice.end()) return it->second;
    const auto& F = g.yfiber.at({s_of(i, m), s_of(j, m)});
    int pick = F.front();
    if (randomize && F.size() > 1) {
      std::uniform_int_distribution<int> D(0, static_cast<int>(F.size()) - 1);
      pick = F[D(rng)];
    }
    sigma_choice[key] = pick;
    return pick;
  };
  auto rho_of = [&](int i, int j, int k, int m) {
    std::array<int, 4> key{i, j, k, m};
    auto it = rho_choice.find(key);
    if (it != rho_choice.end()) return it->second;
    double pick = randomize ? U(rng) : 0.0;
    rho_choice[key] = pick;
    return pick;
  };

  out.epsilon = zero_cochain<double>(out.nerve, 3);
  const auto& tri = out.nerve.faces(3);
  for (int idx = 0; idx < static_cast<int>(tri.size()); ++idx) {
    int i = tri[idx][0], j = tri[idx][1], k = tri[idx][2], l = tri[idx][3];
    int m = face_point(tri[idx]);
    int sij = sigma_of(i, j, m), sjk = sigma_of(j, k, m),
        skl = sigma_of(k, l, m), sik = sigma_of(i, k, m),
        sil = sigma_of(i, l, m), sjl = sigma_of(j, l, m);
    int jk_ij = g.prod(sjk, sij);   // sigma_jk . sigma_ij
    int kl_jk = g.prod(skl, sjk);
    int V1 = g.prod(kl_jk, sij);    // m1(skl, sjk, sij)
    int V2 = g.prod(skl, jk_ij);    // m2
    double s_cell = rho_of(j, k, l, m) + g.mu(sjl, sij, kl_jk, sij) +
                    rho_of(i, j, l, m) + g.c(sil, g.prod(sjl, sij), V1);
    double t_cell = rho_of(i, j, k, m) + g.mu(skl, sik, skl, jk_ij) +
                    rho_of(i, k, l, m) + g.c(sil, g.prod(skl, sik), V2);
    double alpha = g.assoc(skl, sjk, sij);
    double eps = alpha + s_cell + g.c(sil, V1, V2) - t_cell;
    out.epsilon.values(idx) = wrap_angle(eps);
  }
  (void)tol;
  return out;
}

Bicat restrict_to_point(const Fin2Gerbe& g, int m) {
  if (m < 0 || m >= g.surjX.base_size)
    throw ValidationError("base point out of range");
  Bicat b;
  const auto& X = g.surjX.fibers[m];
  std::map<int, int> xloc;
  for (int t = 0; t < static_cast<int>(X.size()); ++t) xloc[X[t]] = t;
  b.n_objects = static_cast<int>(X.size());

  std::map<int, int> ycell;  // y -> cell index
  for (int x1 : X)
    for (int x2 : X) {
      auto it = g.yfiber.find({x1, x2});
      if (it == g.yfiber.end()) continue;
      for (int y : it->second) {
        ycell[y] = static_cast<int>(b.cells.size());
        b.cells.push_back({xloc[x1], xloc[x2]});
      }
    }

  for (auto& [y23, c23] : ycell)
    for (auto& [y12, c12] : ycell) {
      if (g.ypair[y12].second != g.ypair[y23].first) continue;
      b.comp[{c23, c12}] = ycell.at(g.prod(y23, y12));
      for (auto& [z23, d23] : ycell)
        for (auto& [z12, d12] : ycell) {
          if (g.ypair[z12] != g.ypair[y12] || g.ypair[z23] != g.ypair[y23])
            continue;
          b.hc[{c23, c12, d23, d12}] = g.mu(y23, y12, z23, z12);
        }
    }

  for (auto& [y1, c1] : ycell)
    for (auto& [y2, c2] : ycell)
      for (auto& [y3, c3] : ycell) {
        if (g.ypair[y1] != g.ypair[y2] || g.ypair[y2] != g.ypair[y3]) continue;
        b.vc[{c1, c2, c3}] = g.c(y1, y2, y3);
      }

  for (auto& [w3, d3] : ycell)
    for (auto& [w2, d2] : ycell)
      for (auto& [w1, d1] : ycell) {
        if (g.ypair[w1].second != g.ypair[w2].first) continue;
        if (g.ypair[w2].second != g.ypair[w3].first) continue;
        b.assoc[{d3, d2, d1}] = g.assoc(w3, w2, w1);
      }

  // synthesize identity 1-cells from the diagonal Y-fibers, then the unit
  // cells via the unit-constraint solve
  b.identity.assign(b.n_objects, -1);
  b.identity_synthesized.assign(b.n_objects, false);
  for (int t = 0; t < b.n_objects; ++t) {
    auto it = g.yfiber.find({X[t], X[t]});
    if (it != g.yfiber.end() && !it->second.empty()) {
      b.identity[t] = ycell.at(it->second.front());
      b.identity_synthesized[t] = true;
    }
  }
  synthesize_units(b);
  return b;
}

void synthesize_units(Bicat& b) {
  auto vc_of = [&](int f, int gg, int h) {
    auto it = b.vc.find({f, gg, h});
    return it == b.vc.end() ? 0.0 : it->second;
  };
  auto hc_of = [&](int g1, int f1, int g2, int f2) {
    auto it = b.hc.find({g1, f1, g2, f2});
    return it == b.hc.end() ? 0.0 : it->second;
  };
  auto comp_of = [&](int gg, int f) { return b.comp.at({gg, f}); };
  for (int fcell = 0; fcell < static_cast<int>(b.cells.size()); ++fcell) {
    int a = b.cells[fcell].src, bb = b.cells[fcell].tgt;
    int ia = b.identity[a], ib = b.identity[bb];
    if (ia < 0 || ib < 0) continue;
    // R(f): 1_b o f => f from the unit 2-cell iota_b = 0 in
    // T_(1_b o 1_b, 1_b); with a coherent associator the triangle follows.
    {
      int bb11 = comp_of(ib, ib);
      int bf = comp_of(ib, fcell);
      int lhs_src = comp_of(bb11, fcell);
      double asc = b.assoc.at({ib, ib, fcell});
      double r = 0.0 /*iota*/ + hc_of(bb11, fcell, ib, fcell) -
                 hc_of(ib, bf, ib, fcell) - asc -
                 vc_of(lhs_src, comp_of(ib, bf), bf);
      b.runit[fcell] = wrap_angle(r);
    }
    // L(f): f o 1_a => f
    {
      int aa11 = comp_of(ia, ia);
      int fa = comp_of(fcell, ia);
      int lhs_src = comp_of(fa, ia);
      double asc = b.assoc.at({fcell, ia, ia});
      double l = 0.0 + hc_of(fcell, aa11, fcell, ia) + asc +
                 vc_of(lhs_src, comp_of(fcell, aa11), fa) -
                 hc_of(fa, ia, fcell, ia);
      b.lunit[fcell] = wrap_angle(l);
    }
  }
}

BicatReport check_bicat(const Bicat& b, double tol) {
  BicatReport rep;
  std::ostringstream witness;
  auto record = [&](double d, bool& flag, const char* what) {
    rep.max_defect = std::max(rep.max_defect, d);
    if (d > tol && flag) {
      flag = false;
      witness << what << " (defect " << d << ");";
    }
  };
  const int ncells = static_cast<int>(b.cells.size());

  auto vc_of = [&](int f, int g, int h) {
    auto it = b.vc.find({f, g, h});
    return it == b.vc.end() ? 0.0 : it->second;
  };
  auto hc_of = [&](int g1, int f1, int g2, int f2) {
    auto it = b.hc.find({g1, f1, g2, f2});
    return it == b.hc.end() ? 0.0 : it->second;
  };
  auto parallel = [&](int f, int g) {
    return b.cells[f].src == b.cells[g].src && b.cells[f].tgt == b.cells[g].tgt;
  };

  // composition totality
  for (int f = 0; f < ncells; ++f)
    for (int g = 0; g < ncells; ++g)
      if (b.composable(g, f)) {
        if (!b.comp.count({g, f})) {
          rep.structure_ok = false;
          witness << "composition missing;";
        } else {
          int gf = b.comp.at({g, f});
          if (b.cells[gf].src != b.cells[f].src ||
              b.cells[gf].tgt != b.cells[g].tgt) {
            rep.structure_ok = false;
            witness << "composition types wrong;";
          }
        }
      }
  if (!rep.structure_ok) {
    rep.witness = witness.str();
    return rep;
  }

  // hom-categories: vc normalized and a fiberwise cocycle
  for (int f = 0; f < ncells; ++f)
    for (int g = 0; g < ncells; ++g) {
      if (!parallel(f, g)) continue;
      record(angle_dist0(vc_of(f, f, g)), rep.hom_categories_ok,
             "vertical unit fails");
      record(angle_dist0(vc_of(f, g, g)), rep.hom_categories_ok,
             "vertical unit fails");
      for (int h = 0; h < ncells; ++h) {
        if (!parallel(g, h)) continue;
        for (int k = 0; k < ncells; ++k) {
          if (!parallel(h, k)) continue;
          double d = vc_of(g, h, k) - vc_of(f, h, k) + vc_of(f, g, k) -
                     vc_of(f, g, h);
          record(angle_dist0(d), rep.hom_categories_ok,
                 "vertical associativity fails");
        }
      }
    }

  // horizontal functor: units and interchange
  for (int f1 = 0; f1 < ncells; ++f1)
    for (int g1 = 0; g1 < ncells; ++g1) {
      if (!b.composable(g1, f1)) continue;
      record(angle_dist0(hc_of(g1, f1, g1, f1)), rep.functor_ok,
             "horizontal unit fails");
      for (int f2 = 0; f2 < ncells; ++f2) {
        if (!parallel(f1, f2)) continue;
        for (int f3 = 0; f3 < ncells; ++f3) {
          if (!parallel(f2, f3)) continue;
          for (int g2 = 0; g2 < ncells; ++g2) {
            if (!parallel(g1, g2)) continue;
            for (int g3 = 0; g3 < ncells; ++g3) {
              if (!parallel(g2, g3)) continue;
              double lhs = vc_of(comp_at(b, g1, f1), comp_at(b, g2, f2),
                                 comp_at(b, g3, f3)) +
                           hc_of(g2, f2, g3, f3) + hc_of(g1, f1, g2, f2);
              double rhs = hc_of(g1, f1, g3, f3) + vc_of(g1, g2, g3) +
                           vc_of(f1, f2, f3);
              record(angle_dist(wrap_angle(lhs), wrap_angle(rhs)),
                     rep.functor_ok, "interchange fails");
            }
          }
        }
      }
    }

  // naturality of the associator
  for (int h1 = 0; h1 < ncells; ++h1)
    for (int g1 = 0; g1 < ncells; ++g1)
      for (int f1 = 0; f1 < ncells; ++f1) {
        if (!b.composable(g1, f1) || !b.composable(h1, g1)) continue;
        for (int h2 = 0; h2 < ncells; ++h2)
          for (int g2 = 0; g2 < ncells; ++g2)
            for (int f2 = 0; f2 < ncells; ++f2) {
              if (!parallel(h1, h2) || !parallel(g1, g2) || !parallel(f1, f2))
                continue;
              int hg1 = comp_at(b, h1, g1), hg2 = comp_at(b, h2, g2);
              int gf1 = comp_at(b, g1, f1), gf2 = comp_at(b, g2, f2);
              int l1 = comp_at(b, hg1, f1), l4 = comp_at(b, h2, gf2);
              int l2 = comp_at(b, hg2, f2);
              int l3 = comp_at(b, h1, gf1);
              // (w oh v) oh u then assoc2  ==  assoc1 then w oh (v oh u)
              double lhs = b.assoc.at({h2, g2, f2}) +
                           (hc_of(hg1, f1, hg2, f2) + hc_of(h1, g1, h2, g2)) +
                           vc_of(l1, l2, l4);
              double rhs = (hc_of(h1, gf1, h2, gf2) +
                            hc_of(g1, f1, g2, f2)) +
                           b.assoc.at({h1, g1, f1}) + vc_of(l1, l3, l4);
              record(angle_dist(wrap_angle(lhs), wrap_angle(rhs)),
                     rep.naturality_ok, "associator naturality fails");
            }
      }

  // pentagon
  for (int w4 = 0; w4 < ncells; ++w4)
    for (int w3 = 0; w3 < ncells; ++w3) {
      if (!b.composable(w4, w3)) continue;
      for (int w2 = 0; w2 < ncells; ++w2) {
        if (!b.composable(w3, w2)) continue;
        for (int w1 = 0; w1 < ncells; ++w1) {
          if (!b.composable(w2, w1)) continue;
          int w43 = comp_at(b, w4, w3), w32 = comp_at(b, w3, w2),
              w21 = comp_at(b, w2, w1);
          int V1 = comp_at(b, comp_at(b, w43, w2), w1);
          int V2 = comp_at(b, comp_at(b, w4, w32), w1);
          int V3 = comp_at(b, w4, comp_at(b, w32, w1));
          int V4 = comp_at(b, w4, comp_at(b, w3, w21));
          int V5 = comp_at(b, w43, w21);
          double e1 = b.assoc.at({w4, w3, w2}) +
                      hc_of(comp_at(b, w43, w2), w1, comp_at(b, w4, w32), w1);
          double e2 = b.assoc.at({w4, w32, w1});
          double e3 = b.assoc.at({w3, w2, w1}) +
                      hc_of(w4, comp_at(b, w32, w1), w4, comp_at(b, w3, w21));
          double e4 = b.assoc.at({w4, w3, w21});
          double e5 = b.assoc.at({w43, w2, w1});
          double lhs = e3 + e2 + e1 + vc_of(V1, V2, V3) + vc_of(V1, V3, V4);
          double rhs = e4 + e5 + vc_of(V1, V5, V4);
          record(angle_dist(wrap_angle(lhs), wrap_angle(rhs)), rep.pentagon_ok,
                 "pentagon fails");
        }
      }
    }

  // triangle, when identities are present
  for (int f = 0; f < ncells; ++f) {
    int a = b.cells[f].src;
    for (int g = 0; g < ncells; ++g) {
      if (!b.composable(g, f)) continue;
      int bb = b.cells[f].tgt;
      int ib = b.identity[bb];
      (void)a;
      if (ib < 0 || !b.lunit.count(g) || !b.runit.count(f)) continue;
      int g1 = comp_at(b, g, ib);
      int lhs_src = comp_at(b, g1, f);
      int mid = comp_at(b, g, comp_at(b, ib, f));
      int gf = comp_at(b, g, f);
      double lhs = (b.runit.at(f) + hc_of(g, comp_at(b, ib, f), g, f)) +
                   b.assoc.at({g, ib, f}) + vc_of(lhs_src, mid, gf);
      double rhs = b.lunit.at(g) + hc_of(g1, f, g, f);
      record(angle_dist(wrap_angle(lhs), wrap_angle(rhs)), rep.triangle_ok,
             "triangle fails");
    }
  }

  // torsor 2-cells are invertible by construction; coherent invertibility of
  // 1-cells reduces to the existence of a reverse 1-cell
  for (int f = 0; f < ncells; ++f) {
    bool found = false;
    for (int g = 0; g < ncells && !found; ++g)
      if (b.cells[g].src == b.cells[f].tgt &&
          b.cells[g].tgt == b.cells[f].src)
        found = true;
    if (!found) {
      rep.one_cells_coherently_invertible = false;
      witness << "1-cell " << f << " has no reverse;";
    }
  }

  for (bool s : b.identity_synthesized)
    if (s) rep.identities_synthesized = true;

  rep.witness = witness.str();
  return rep;
}

Fin2Gerbe random_2gerbe(std::uint64_t seed, int base_size, bool twist) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::uniform_int_distribution<int> fiber(2, 3), ysize(1, 2);

  Fin2Gerbe g;
  std::vector<int> proj;
  for (int m = 0; m < base_size; ++m) {
    int nf = fiber(rng);
    for (int t = 0; t < nf; ++t) proj.push_back(m);
  }
  g.surjX = FinSurjection::make(base_size, proj);

  for (int m = 0; m < base_size; ++m)
    for (int x1 : g.surjX.fibers[m])
      for (int x2 : g.surjX.fibers[m]) {
        int ny = ysize(rng);
        std::vector<int> F;
        for (int t = 0; t < ny; ++t) {
          F.push_back(static_cast<int>(g.ypair.size()));
          g.ypair.push_back({x1, x2});
        }
        g.yfiber[{x1, x2}] = F;
      }

  // strictly associative product: constant at the minimal target element
  for (int m = 0; m < base_size; ++m)
    for (int x1 : g.surjX.fibers[m])
      for (int x2 : g.surjX.fibers[m])
        for (int x3 : g.surjX.fibers[m])
          for (int y23 : g.yfiber[{x2, x3}])
            for (int y12 : g.yfiber[{x1, x2}])
              g.mY[{y23, y12}] = g.yfiber[{x1, x3}].front();

  // gauge potentials
  std::map<std::pair<int, int>, double> beta;  // on Y-fiber pairs
  std::map<std::pair<int, int>, double> xi;    // on composable pairs
  std::map<std::array<int, 3>, double> r3;     // X-triple potential for q
  auto beta_of = [&](int y1, int y2) {
    if (y1 == y2) return 0.0;
    auto it = beta.find({y1, y2});
    if (it != beta.end()) return it->second;
    double v = twist ? U(rng) : 0.0;
    beta[{y1, y2}] = v;
    return v;
  };
  auto xi_of = [&](int y23, int y12) {
    auto it = xi.find({y23, y12});
    if (it != xi.end()) return it->second;
    double v = twist ? U(rng) : 0.0;
    xi[{y23, y12}] = v;
    return v;
  };
  auto r3_of = [&](int x1, int x2, int x3) {
    auto it = r3.find({x1, x2, x3});
    if (it != r3.end()) return it->second;
    double v = twist ? U(rng) : 0.0;
    r3[{x1, x2, x3}] = v;
    return v;
  };

  for (auto& [pair, F] : g.yfiber)
    for (int y1 : F)
      for (int y2 : F)
        for (int y3 : F)
          g.cQ[{y1, y2, y3}] = wrap_angle(beta_of(y2, y3) - beta_of(y1, y3) +
                                          beta_of(y1, y2));

  for (int m = 0; m < base_size; ++m)
    for (int x1 : g.surjX.fibers[m])
      for (int x2 : g.surjX.fibers[m])
        for (int x3 : g.surjX.fibers[m])
          for (int a23 : g.yfiber[{x2, x3}])
            for (int a12 : g.yfiber[{x1, x2}])
              for (int b23 : g.yfiber[{x2, x3}])
                for (int b12 : g.yfiber[{x1, x2}]) {
                  double v = beta_of(a23, b23) + beta_of(a12, b12) -
                             beta_of(g.mY[{a23, a12}], g.mY[{b23, b12}]) +
                             xi_of(b23, b12) - xi_of(a23, a12);
                  g.mHat[{a23, a12, b23, b12}] = wrap_angle(v);
                }

  for (int m = 0; m < base_size; ++m)
    for (int x1 : g.surjX.fibers[m])
      for (int x2 : g.surjX.fibers[m])
        for (int x3 : g.surjX.fibers[m])
          for (int x4 : g.surjX.fibers[m])
            for (int w3 : g.yfiber[{x3, x4}])
              for (int w2 : g.yfiber[{x2, x3}])
                for (int w1 : g.yfiber[{x1, x2}]) {
                  int m1 = g.mY[{g.mY[{w3, w2}], w1}];
                  int m2 = g.mY[{w3, g.mY[{w2, w1}]}];
                  double Xi1 = xi_of(w3, w2) + xi_of(g.mY[{w3, w2}], w1);
                  double Xi2 = xi_of(w2, w1) + xi_of(w3, g.mY[{w2, w1}]);
                  double q = r3_of(x2, x3, x4) - r3_of(x1, x3, x4) +
                             r3_of(x1, x2, x4) - r3_of(x1, x2, x3);
                  g.aHat[{w3, w2, w1}] =
                      wrap_angle(-beta_of(m1, m2) + Xi2 - Xi1 + q);
                }
  return g;
}

}  // namespace gerbes
