#include <doctest.h>

#include <cmath>
#include <random>

#include "nullity/almost_abelian.hpp"
#include "nullity/lie_metric.hpp"
#include "nullity/model_catalog.hpp"
#include "oracles.hpp"

using namespace nullity;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

TEST_CASE("bracket storage is antisymmetric and reversed indices are normalized") {
  const LieMetricSpace<double> s(3, {{1, 0, 2, 1.0}});  // [e1,e0] = e2
  CHECK(s.ad(0)(2, 1) == doctest::Approx(-1.0));
  CHECK(s.ad(1)(2, 0) == doctest::Approx(1.0));
  CHECK(s.bracket(unit_vector<double>(3, 0), unit_vector<double>(3, 1))(2) == doctest::Approx(-1.0));
}

TEST_CASE("constructor rejects bad shapes and indices") {
  CHECK_THROWS_AS(LieMetricSpace<double>(0, {}), std::invalid_argument);
  CHECK_THROWS_AS(LieMetricSpace<double>(2, {{0, 2, 1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(LieMetricSpace<double>(2, {}, Mat::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("validation flags Jacobi failures, diagonal terms and bad metrics") {
  CHECK(validate_algebra(heisenberg_algebra<double>()).passed);

  // [e0,e1] = e2, [e1,e2] = e0, [e0,e2] = e0 breaks Jacobi
  const LieMetricSpace<double> bad(3, {{0, 1, 2, 1.0}, {1, 2, 0, 1.0}, {0, 2, 0, 1.0}});
  const auto r = validate_algebra(bad);
  CHECK_FALSE(r.passed);
  CHECK(r.jacobi_residual > 1e-3);

  CHECK_FALSE(validate_algebra(LieMetricSpace<double>(2, {{0, 0, 1, 1.0}})).passed);
  CHECK_FALSE(validate_algebra(LieMetricSpace<double>(2, {{0, 1, 1, 1.0}, {1, 0, 1, 1.0}})).passed);

  Mat g(2, 2);
  g << 1, 2, 2, 1;
  CHECK_FALSE(validate_algebra(LieMetricSpace<double>(2, {}, g)).passed);
  g << 1, 0.1, 0, 1;
  CHECK_FALSE(validate_algebra(LieMetricSpace<double>(2, {}, g)).passed);
}

TEST_CASE("connection is metric and torsion free") {
  std::mt19937 rng(7);
  const AlmostAbelianGroup<double> grp(oracle::random_matrix(rng, 3, 3, -1, 1));
  const auto space = change_frame(to_lie_metric(grp), oracle::random_frame(rng, 4));
  const auto conn = koszul_connection(space);
  const Mat& g = space.metric();
  for (int i = 0; i < 4; ++i) {
    // torsion: nabla_i e_j - nabla_j e_i = [e_i, e_j]
    for (int j = 0; j < 4; ++j) {
      const Vec torsion = conn.nabla[i].col(j) - conn.nabla[j].col(i) - space.ad(i).col(j);
      CHECK(torsion.norm() < 1e-12);
    }
    // metric: g * nabla_i is skew
    const Mat m = g * conn.nabla[i];
    CHECK((m + m.transpose()).norm() < 1e-12);
  }
}

TEST_CASE("bi-invariant su(2) has K = |[X,Y]|^2/4 and scal 6") {
  const auto s = milnor_algebra(MilnorTriple<double>{2, 2, 2});
  const auto c = curvature(s);
  CHECK(c.scal == doctest::Approx(6.0).epsilon(1e-12));
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      CHECK(sectional_curvature(c, s.metric(), i, j) == doctest::Approx(oracle::biinvariant_plane(s, i, j)));
}

TEST_CASE("Milnor triples match the closed-form Ricci formula") {
  const double triples[][3] = {{2, 1, 1}, {2, -1, -1}, {1, 0, 0}, {3, 2, -0.5}, {0, -1, 1}, {1.5, 0.5, 0}};
  for (const auto& t : triples) {
    const auto s = milnor_algebra(MilnorTriple<double>{t[0], t[1], t[2]});
    const auto c = curvature(s);
    const auto o = oracle::milnor_curvature(t[0], t[1], t[2]);
    CHECK(c.scal == doctest::Approx(o.scal).epsilon(1e-12));
    for (int i = 0; i < 3; ++i) CHECK(c.ricci(i, i) == doctest::Approx(o.ricci[static_cast<std::size_t>(i)]));
    CHECK(std::abs(c.ricci(0, 1)) + std::abs(c.ricci(0, 2)) + std::abs(c.ricci(1, 2)) < 1e-12);
    CHECK(sectional_curvature(c, s.metric(), 1, 2) == doctest::Approx(o.plane[0]));
    CHECK(sectional_curvature(c, s.metric(), 0, 2) == doctest::Approx(o.plane[1]));
    CHECK(sectional_curvature(c, s.metric(), 0, 1) == doctest::Approx(o.plane[2]));
  }
}

TEST_CASE("Riemann tensor symmetries and frame independence of scal") {
  std::mt19937 rng(11);
  const auto base = milnor_algebra(MilnorTriple<double>{1.3, -0.7, 2.1});
  const auto moved = change_frame(base, oracle::random_frame(rng, 3));
  const auto c = curvature(moved);
  CHECK(c.scal == doctest::Approx(curvature(base).scal).epsilon(1e-10));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          CHECK(std::abs(c.riem(i, j, k, l) + c.riem(j, i, k, l)) < 1e-10);
          CHECK(std::abs(c.riem(i, j, k, l) + c.riem(i, j, l, k)) < 1e-10);
          CHECK(std::abs(c.riem(i, j, k, l) - c.riem(k, l, i, j)) < 1e-10);
          CHECK(std::abs(c.riem(i, j, k, l) + c.riem(j, k, i, l) + c.riem(k, i, j, l)) < 1e-10);
        }
  CHECK((c.ricci - c.ricci.transpose()).norm() < 1e-10);
}

TEST_CASE("sectional curvature rejects degenerate planes") {
  const auto s = heisenberg_algebra<double>();
  const auto c = curvature(s);
  const Vec u = unit_vector<double>(3, 0);
  CHECK_THROWS_AS(sectional_curvature<double>(c, s.metric(), u, Vec(2 * u)), std::invalid_argument);
  CHECK(sectional_curvature(c, s.metric(), 0, 1) == doctest::Approx(-0.75));
}

TEST_CASE("flat abelian algebra") {
  const LieMetricSpace<double> s(4, {});
  const auto c = curvature(s);
  CHECK(c.scal == 0.0);
  CHECK(c.ricci.norm() == 0.0);
}

TEST_CASE("growth vectors") {
  const auto h = heisenberg_algebra<double>();
  Mat d(3, 2);
  d << 1, 0, 0, 1, 0, 0;
  const auto gv = growth_vector(h, d);
  CHECK(gv.dims == std::vector<int>{2, 3});
  CHECK(gv.bracket_generating);
  CHECK(gv.step == 2);

  const auto berger = milnor_algebra(MilnorTriple<double>{2.5, 2, 0.5});
  Mat dc(3, 2);
  dc << 0, 0, 1, 0, 0, 1;
  CHECK(growth_vector(berger, dc).dims == std::vector<int>{2, 3});

  // a subalgebra never generates
  const LieMetricSpace<double> solv(3, {{0, 1, 1, 1.0}});
  Mat sub(3, 2);
  sub << 1, 0, 0, 1, 0, 0;
  const auto g2 = growth_vector(solv, sub);
  CHECK(g2.dims == std::vector<int>{2});
  CHECK_FALSE(g2.bracket_generating);
  CHECK(g2.step == 0);

  Mat dep(3, 2);
  dep << 1, 2, 0, 0, 0, 0;
  CHECK_THROWS_AS(growth_vector(h, dep), std::invalid_argument);
}
