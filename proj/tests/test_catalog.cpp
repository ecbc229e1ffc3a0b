#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "nullity/model_catalog.hpp"
#include "oracles.hpp"

using namespace nullity;
using Mat = Eigen::MatrixXd;

TEST_CASE("classification of sign patterns") {
  CHECK(classify_unimodular(MilnorTriple<double>{2, 1, 1}) == "SU(2)");
  CHECK(classify_unimodular(MilnorTriple<double>{2, -1, -1}) == "SL(2,R)~");
  CHECK(classify_unimodular(MilnorTriple<double>{2, 0, 0}) == "Nil3");
  CHECK(classify_unimodular(MilnorTriple<double>{0, -1, 1}) == "E(1,1)");
  CHECK(classify_unimodular(MilnorTriple<double>{1, 1, 0}) == "E(2)~");
  CHECK(classify_unimodular(MilnorTriple<double>{0, 0, 0}) == "Abelian");
  CHECK(classify_unimodular(MilnorTriple<double>{-1, -1, -1}) == "SU(2)");
}

TEST_CASE("classification is invariant under permutations and a global sign flip") {
  const std::array<double, 3> triples[] = {{2, 1, 1}, {2, -1, -1}, {2, 0, 0}, {0, -1, 1}, {1, 1, 0}, {3, 2, -0.5}};
  for (auto t : triples) {
    const auto ref = classify_unimodular(MilnorTriple<double>{t[0], t[1], t[2]});
    std::sort(t.begin(), t.end());
    do {
      for (double s : {1.0, -1.0})
        CHECK(classify_unimodular(MilnorTriple<double>{s * t[0], s * t[1], s * t[2]}) == ref);
    } while (std::next_permutation(t.begin(), t.end()));
  }
}

TEST_CASE("Milnor triple recovery in arbitrary frames") {
  std::mt19937 rng(17);
  const std::array<double, 3> triples[] = {{2, 1, 1}, {2, -1, -1}, {2, 0, 0}, {0, -1, 1}, {1.5, 1, 0}};
  for (const auto& t : triples) {
    const MilnorTriple<double> mt{t[0], t[1], t[2]};
    const auto moved = change_frame(milnor_algebra(mt), oracle::random_frame(rng, 3));
    const auto rec = milnor_triple_of(moved);
    REQUIRE(rec.has_value());
    CHECK(classify_unimodular(*rec) == classify_unimodular(mt));
  }
  CHECK_FALSE(milnor_triple_of(perrone_algebra(1.0)).has_value());
}

TEST_CASE("Table 1 first family") {
  for (double theta : {0.5, 1.0, 2.0, 5.0}) {
    const auto r = table_row_check(TableFamily::T1F1, theta);
    INFO("theta = " << theta);
    for (const auto& m : r.mismatches) INFO(m);
    CHECK(r.pass());
    const auto o = oracle::milnor_curvature(r.triple.lambda1, r.triple.lambda2, r.triple.lambda3);
    CHECK(r.scal == doctest::Approx(o.scal));
    CHECK(r.plane_curvature == doctest::Approx(o.plane[0]));
  }
  CHECK_THROWS_AS(table_row_check(TableFamily::T1F1, 0.0), std::invalid_argument);
}

TEST_CASE("Table 1 second family") {
  for (double theta : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    const auto r = table_row_check(TableFamily::T1F2, theta);
    INFO("theta = " << theta);
    CHECK(r.pass());
  }
  const auto r = table_row_check(TableFamily::T1F2, -1.0);
  CHECK(r.scal == doctest::Approx(-6.0));
  CHECK(r.plane_curvature == doctest::Approx(-5.0));
  CHECK(r.group == "SL(2,R)~");

  // theta = 2 is the round sphere of curvature 1: the whole algebra is 1-nullity
  const auto round = table_row_check(TableFamily::T1F2, 2.0);
  CHECK(round.nullity_index == 3);
  CHECK_FALSE(round.pass());
}

TEST_CASE("Table 2") {
  for (double theta : {0.25, 0.5, 1.0}) {
    const auto r = table_row_check(TableFamily::T2, theta);
    INFO("theta = " << theta);
    CHECK(r.pass());
  }
  CHECK(table_row_check(TableFamily::T2, 1.0).group == "E(1,1)");
  CHECK_THROWS_AS(table_row_check(TableFamily::T2, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(parse_family("T3"), std::invalid_argument);
}

TEST_CASE("conullity-2 frames") {
  for (double f : {0.0, 0.3, 1.0, -2.0}) {
    const auto s = conullity2_frame(f);
    REQUIRE(validate_algebra(s).passed);
    const auto c = curvature(s);
    CHECK(c.scal == doctest::Approx(-2.0));
    CHECK(sectional_curvature(c, s.metric(), 1, 2) == doctest::Approx(1.0));
    const auto nr = nullity_index(c, s.metric(), -1.0);
    REQUIRE(nr.index == 1);
    CHECK(max_principal_angle<double>(nr.basis, Mat(unit_vector<double>(3, 0)), s.metric()) < 1e-7);
    const auto t = milnor_triple_of(s);
    REQUIRE(t.has_value());
    CHECK(classify_unimodular(*t) == (f == 0.0 ? "E(1,1)" : "SL(2,R)~"));
  }
}

TEST_CASE("Perrone algebra matches its unimodular partner") {
  for (double alpha : {1.0, std::sqrt(2.0), 2.0}) {
    const auto p = perrone_algebra(alpha);
    REQUIRE(validate_algebra(p).passed);
    const auto cp = curvature(p);
    const double theta = -alpha * alpha / 2;
    const auto u = milnor_algebra(MilnorTriple<double>{2, theta, theta});
    const auto cu = curvature(u);
    CHECK(cp.scal == doctest::Approx(cu.scal).epsilon(1e-12));
    CHECK(sectional_curvature(cp, p.metric(), 0, 1) == doctest::Approx(sectional_curvature(cu, u.metric(), 1, 2)));
    const auto np = nullity_index(cp, p.metric(), 1.0);
    CHECK(np.index == nullity_index(cu, u.metric(), 1.0).index);
    CHECK(max_principal_angle<double>(np.basis, Mat(unit_vector<double>(3, 2)), p.metric()) < 1e-7);
  }
  CHECK(curvature(perrone_algebra(1.0)).scal == doctest::Approx(-4.0));
  CHECK_THROWS_AS(perrone_algebra(0.0), std::invalid_argument);
}
