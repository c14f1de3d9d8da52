#include <doctest.h>

#include <random>

#include "gerbes/complex.hpp"

using namespace gerbes;

namespace {

RealCochain random_circle(const Complex& K, int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  RealCochain c = zero_cochain<double>(K, k);
  for (int i = 0; i < c.values.size(); ++i) c.values(i) = U(rng);
  return c;
}

IntCochain random_int(const Complex& K, int k, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> U(-5, 5);
  IntCochain c = zero_cochain<std::int64_t>(K, k);
  for (int i = 0; i < c.values.size(); ++i) c.values(i) = U(rng);
  return c;
}

}  // namespace

TEST_CASE("fixture combinatorics") {
  Complex S4 = make_boundary_simplex(4);
  CHECK(S4.face_count(0) == 6);
  CHECK(S4.face_count(1) == 15);
  CHECK(S4.face_count(2) == 20);
  CHECK(S4.face_count(3) == 15);
  CHECK(S4.face_count(4) == 6);
  CHECK(S4.dim() == 4);

  Complex rp2 = make_rp2();
  CHECK(rp2.face_count(0) == 6);
  CHECK(rp2.face_count(1) == 15);
  CHECK(rp2.face_count(2) == 10);
  // Euler characteristic of the projective plane
  CHECK(rp2.face_count(0) - rp2.face_count(1) + rp2.face_count(2) == 1);
}

TEST_CASE("delta on a 0-cochain is the endpoint difference") {
  Complex K = Complex::from_maximal({0, 1}, {{0, 1}});
  RealCochain a = zero_cochain<double>(K, 0);
  a.values << 0.2, 0.7;
  RealCochain d = delta(a);
  CHECK(d.values(0) == doctest::Approx(0.7 - 0.2));
}

TEST_CASE("delta squared vanishes") {
  std::mt19937_64 rng(7);
  for (const Complex& K :
       {make_boundary_simplex(2), make_boundary_simplex(3), make_rp2()}) {
    for (int k = 0; k + 2 <= K.dim(); ++k) {
      IntCochain n = random_int(K, k, rng);
      CHECK(delta(delta(n)).values.isZero());
      RealCochain g = random_circle(K, k, rng);
      RealCochain dd = delta_circle(delta_circle(g));
      double worst = 0;
      for (int i = 0; i < dd.values.size(); ++i)
        worst = std::max(worst, angle_dist0(dd.values(i)));
      CHECK(worst <= 1e-12);
    }
  }
}

TEST_CASE("delta of a 2-cochain matches the five-term alternating product") {
  // Direct expansion of the alternating sum over the 4-face (i,j,k,l,m).
  Complex K = make_boundary_simplex(4);
  std::mt19937_64 rng(11);
  RealCochain g = random_circle(K, 3, rng);
  RealCochain d = delta_circle(g);
  const Face F = {0, 1, 2, 3, 4};
  double byhand = g({1, 2, 3, 4}) - g({0, 2, 3, 4}) + g({0, 1, 3, 4}) -
                  g({0, 1, 2, 4}) + g({0, 1, 2, 3});
  CHECK(angle_dist(d(F), byhand) <= 1e-12);
}

TEST_CASE("cohomology of spheres and the projective plane") {
  for (int n : {2, 3, 4}) {
    Complex K = make_boundary_simplex(n);
    auto [btop, ttop] = cohomology(K, n);
    CHECK(btop == 1);
    CHECK(ttop.empty());
    auto [b0, t0] = cohomology(K, 0);
    CHECK(b0 == 1);
    CHECK(t0.empty());
    for (int j = 1; j < n; ++j) {
      auto [bj, tj] = cohomology(K, j);
      CHECK(bj == 0);
      CHECK(tj.empty());
    }
  }
  Complex rp2 = make_rp2();
  auto [b2, t2] = cohomology(rp2, 2);
  CHECK(b2 == 0);
  REQUIRE(t2.size() == 1);
  CHECK(t2[0] == 2);
  auto [b1, t1] = cohomology(rp2, 1);
  CHECK(b1 == 0);
  CHECK(t1.empty());
  CHECK(cohomology(rp2, 0).first == 1);
  CHECK_THROWS_AS(cohomology(rp2, 3), ValidationError);
}

TEST_CASE("class_of: coboundaries vanish, top indicator generates") {
  std::mt19937_64 rng(13);
  Complex S3 = make_boundary_simplex(3);
  for (int rep = 0; rep < 20; ++rep) {
    IntCochain m = random_int(S3, 2, rng);
    CHECK(class_of(delta(m)).is_zero());
  }

  Complex S4 = make_boundary_simplex(4);
  IntCochain ind = zero_cochain<std::int64_t>(S4, 4);
  ind.values(0) = 1;
  CohomologyClass c = class_of(ind);
  REQUIRE(c.free_coords.size() == 1);
  CHECK(std::abs(c.free_coords(0)) == 1);

  // Orientation cross-check: pairing with the fundamental cycle of the
  // boundary simplex. Face j omits vertex j and carries sign (-1)^j.
  auto pairing = [&](const IntCochain& n) {
    std::int64_t acc = 0;
    const auto& tops = S4.faces(4);
    for (int r = 0; r < static_cast<int>(tops.size()); ++r) {
      int omitted = 0;
      for (int v = 0, i = 0; v < 6; ++v) {
        if (i < 5 && tops[r][i] == v) {
          ++i;
        } else {
          omitted = v;
        }
      }
      acc += ((omitted % 2 == 0) ? 1 : -1) * n.values(r);
    }
    return acc;
  };
  // The free coordinate agrees with the pairing up to one fixed global sign.
  std::int64_t s0 = c.free_coords(0) * pairing(ind);
  CHECK(std::abs(s0) == 1);
  for (int rep = 0; rep < 10; ++rep) {
    IntCochain n = ind;
    IntCochain m = random_int(S4, 3, rng);
    n.values += delta(m).values;
    CohomologyClass c2 = class_of(n);
    CHECK(c2 == c);
    CHECK(c2.free_coords(0) * pairing(n) == s0 * 1);
  }
}

TEST_CASE("class_of is gauge invariant (100 random coboundaries)") {
  std::mt19937_64 rng(17);
  Complex S4 = make_boundary_simplex(4);
  IntCochain n = zero_cochain<std::int64_t>(S4, 4);
  n.values(2) = 3;
  n.values(5) = -1;
  CohomologyClass base = class_of(n);
  for (int rep = 0; rep < 100; ++rep) {
    IntCochain m = random_int(S4, 3, rng);
    IntCochain n2 = n;
    n2.values += delta(m).values;
    CHECK(class_of(n2) == base);
  }
}

TEST_CASE("circle_class: coboundaries, gauge invariance, RP2 torsion") {
  std::mt19937_64 rng(19);
  Complex S4 = make_boundary_simplex(4);
  for (int rep = 0; rep < 10; ++rep) {
    RealCochain h = random_circle(S4, 2, rng);
    CHECK(circle_class(delta_circle(h)).is_zero());
  }

  // Gauge invariance in degree 3 on the sphere.
  RealCochain g = delta_circle(random_circle(S4, 2, rng));
  CohomologyClass base = circle_class(g);
  for (int rep = 0; rep < 200; ++rep) {
    RealCochain h = random_circle(S4, 2, rng);
    RealCochain g2 = product_cocycle(g, delta_circle(h));
    CHECK(circle_class(g2) == base);
  }

  // A half-valued 1-cocycle on RP2 realizes the Z/2 class honestly.
  Complex rp2 = make_rp2();
  IntCochain w = zero_cochain<std::int64_t>(rp2, 2);
  w.values.setConstant(1);  // sums to the twisted orientation obstruction
  // Build the half cocycle from an integer solution of delta m = 2 * (lift);
  // concretely: take any integer 2-cocycle z generating H^2 = Z/2, solve
  // delta x = 2 z, then g = x / 2 is a circle 1-cocycle with class z.
  // Locate a generator by scanning indicator cochains.
  bool found = false;
  for (int idx = 0; idx < rp2.face_count(2) && !found; ++idx) {
    IntCochain z = zero_cochain<std::int64_t>(rp2, 2);
    z.values(idx) = 1;
    CohomologyClass cz = class_of(z);
    if (cz.is_zero()) continue;
    IntCochain two_z = z;
    two_z.values *= 2;
    SmithForm f = smith_normal_form(delta_matrix(rp2, 1));
    auto x = solve_integer(f, two_z.values);
    REQUIRE(x.has_value());
    RealCochain ghalf = zero_cochain<double>(rp2, 1);
    for (int i = 0; i < x->size(); ++i)
      ghalf.values(i) = wrap_angle(0.5 * static_cast<double>((*x)(i)));
    CohomologyClass ch = circle_class(ghalf);
    CHECK(!ch.is_zero());
    REQUIRE(ch.torsion.size() == 1);
    CHECK(ch.torsion[0].second == 2);
    CHECK(ch.torsion[0].first % 2 == 1);
    CHECK(!trivialize_circle(ghalf).has_value());
    found = true;
  }
  CHECK(found);
}

TEST_CASE("product and dual act on classes as sum and negation") {
  std::mt19937_64 rng(23);
  Complex rp2 = make_rp2();
  // torsion example: product of the half cocycle with itself doubles to zero
  RealCochain g1 = delta_circle(random_circle(rp2, 0, rng));
  RealCochain g2 = delta_circle(random_circle(rp2, 0, rng));
  CohomologyClass c1 = circle_class(g1), c2 = circle_class(g2);
  CohomologyClass cp = circle_class(product_cocycle(g1, g2));
  CHECK(c1.is_zero());
  CHECK(c2.is_zero());
  CHECK(cp.is_zero());
  CHECK(circle_class(dual_cocycle(g1)).is_zero());
}

TEST_CASE("trivialize_circle solves coboundaries and accepts zero") {
  std::mt19937_64 rng(29);
  Complex S3 = make_boundary_simplex(3);
  for (int rep = 0; rep < 10; ++rep) {
    RealCochain h0 = random_circle(S3, 1, rng);
    RealCochain g = delta_circle(h0);
    auto h = trivialize_circle(g);
    REQUIRE(h.has_value());
    RealCochain back = delta_circle(*h);
    for (int i = 0; i < back.values.size(); ++i)
      CHECK(angle_dist(back.values(i), g.values(i)) <= 1e-8);
  }
  RealCochain z = zero_cochain<double>(S3, 1);
  auto h = trivialize_circle(z);
  REQUIRE(h.has_value());
  RealCochain back = delta_circle(*h);
  for (int i = 0; i < back.values.size(); ++i)
    CHECK(angle_dist0(back.values(i)) <= 1e-9);
}

TEST_CASE("pullback commutes with delta and respects identity") {
  std::mt19937_64 rng(31);
  Complex S3 = make_boundary_simplex(3);
  SimplicialMap id;
  id.src = &S3;
  id.dst = &S3;
  for (int v : S3.vertices()) id.vertex_map[v] = v;
  RealCochain g = random_circle(S3, 1, rng);
  RealCochain pg = pullback_cocycle(g, id);
  CHECK((pg.values - g.values).cwiseAbs().maxCoeff() <= 1e-15);

  // Collapse map on the boundary 2-sphere: merge vertex 3 into 2.
  Complex S2 = make_boundary_simplex(2);
  SimplicialMap collapse;
  collapse.src = &S2;
  collapse.dst = &S2;
  collapse.vertex_map = {{0, 0}, {1, 1}, {2, 2}, {3, 2}};
  RealCochain h = random_circle(S2, 1, rng);
  RealCochain lhs = delta_circle(pullback_cocycle(h, collapse));
  RealCochain rhs = pullback_cocycle(delta_circle(h), collapse);
  for (int i = 0; i < lhs.values.size(); ++i)
    CHECK(angle_dist(lhs.values(i), rhs.values(i)) <= 1e-12);
}

TEST_CASE("errors: non-cocycles are rejected") {
  Complex S3 = make_boundary_simplex(3);
  RealCochain g = zero_cochain<double>(S3, 1);
  g.values(0) = 0.3;  // a single edge value cannot close
  CHECK_THROWS_AS(circle_class(g), NotACocycle);
  IntCochain n = zero_cochain<std::int64_t>(S3, 1);
  n.values(0) = 1;
  CHECK_THROWS_AS(class_of(n), NotACocycle);
}
