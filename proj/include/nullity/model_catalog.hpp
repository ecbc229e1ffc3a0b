#ifndef NULLITY_MODEL_CATALOG_HPP
#define NULLITY_MODEL_CATALOG_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nullity/lie_metric.hpp"
#include "nullity/linalg.hpp"
#include "nullity/nullity_solver.hpp"

namespace nullity {

/// Orthonormal e1, e2, e3 with [e2,e3] = l1 e1, [e3,e1] = l2 e2, [e1,e2] = l3 e3.
template <typename Scalar>
struct MilnorTriple {
  Scalar lambda1{0}, lambda2{0}, lambda3{0};

  std::array<Scalar, 3> values() const { return {lambda1, lambda2, lambda3}; }
};

template <typename Scalar>
LieMetricSpace<Scalar> milnor_algebra(const MilnorTriple<Scalar>& t) {
  std::vector<BracketTerm<Scalar>> terms;
  if (t.lambda3 != Scalar(0)) terms.push_back({0, 1, 2, t.lambda3});
  if (t.lambda1 != Scalar(0)) terms.push_back({1, 2, 0, t.lambda1});
  if (t.lambda2 != Scalar(0)) terms.push_back({0, 2, 1, -t.lambda2});
  return LieMetricSpace<Scalar>(3, std::move(terms));
}

inline constexpr double kSignTol = 1e-9;

/// Sign pattern lookup. Counts of (positive, negative, zero) entries, with a
/// global sign flip applied when negatives outnumber positives.
template <typename Scalar>
std::string classify_unimodular(const MilnorTriple<Scalar>& t, Scalar tol = Scalar(kSignTol)) {
  const auto v = t.values();
  const Scalar scale = std::max<Scalar>(Scalar(1), std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])}));
  int pos = 0, neg = 0;
  for (Scalar x : v) {
    if (x > tol * scale) ++pos;
    else if (x < -tol * scale) ++neg;
  }
  if (neg > pos) std::swap(pos, neg);
  const int zero = 3 - pos - neg;
  if (pos == 3) return "SU(2)";
  if (pos == 2 && neg == 1) return "SL(2,R)~";
  if (pos == 2 && zero == 1) return "E(2)~";
  if (pos == 1 && neg == 1) return "E(1,1)";
  if (pos == 1) return "Nil3";
  return "Abelian";
}

/**
 * Recovers a Milnor triple from any 3-dimensional metric Lie algebra.
 * In a metric-orthonormal frame f, the map L with [f2,f3] = L f1,
 * [f3,f1] = L f2, [f1,f2] = L f3 is symmetric exactly when the algebra is
 * unimodular, and its eigenvalues are the triple. Returns nothing for
 * non-unimodular input.
 */
template <typename Scalar>
std::optional<MilnorTriple<Scalar>> milnor_triple_of(const LieMetricSpace<Scalar>& space,
                                                     Scalar tol = Scalar(kSignTol)) {
  if (space.dim() != 3) throw std::invalid_argument("milnor_triple_of: dimension must be 3");
  const MatrixX<Scalar> p = orthonormalize<Scalar>(MatrixX<Scalar>::Identity(3, 3), space.metric());
  const VectorX<Scalar> f1 = p.col(0), f2 = p.col(1), f3 = p.col(2);
  Eigen::PartialPivLU<MatrixX<Scalar>> lu(p);
  MatrixX<Scalar> l(3, 3);
  l.col(0) = lu.solve(space.bracket(f2, f3));
  l.col(1) = lu.solve(space.bracket(f3, f1));
  l.col(2) = lu.solve(space.bracket(f1, f2));
  const Scalar scale = std::max<Scalar>(Scalar(1), l.cwiseAbs().maxCoeff());
  if ((l - l.transpose()).cwiseAbs().maxCoeff() > tol * scale) return std::nullopt;
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es((l + l.transpose()) / Scalar(2), Eigen::EigenvaluesOnly);
  const VectorX<Scalar>& ev = es.eigenvalues();
  return MilnorTriple<Scalar>{ev(2), ev(1), ev(0)};
}

enum class TableFamily { T1F1, T1F2, T2 };

inline std::string family_name(TableFamily f) {
  switch (f) {
    case TableFamily::T1F1: return "T1F1";
    case TableFamily::T1F2: return "T1F2";
    case TableFamily::T2: return "T2";
  }
  return "";
}

inline TableFamily parse_family(const std::string& s) {
  if (s == "T1F1") return TableFamily::T1F1;
  if (s == "T1F2") return TableFamily::T1F2;
  if (s == "T2") return TableFamily::T2;
  throw std::invalid_argument("unknown table family '" + s + "' (expected T1F1, T1F2 or T2)");
}

template <typename Scalar>
struct TableRowExpectation {
  std::string group;
  Scalar scal{0};
  Scalar plane_curvature{0};
  Scalar kappa{0};
  int nullity_index{0};
};

template <typename Scalar>
struct TableRowReport {
  TableFamily family{TableFamily::T1F1};
  Scalar theta{0};
  MilnorTriple<Scalar> triple;
  TableRowExpectation<Scalar> expected;
  std::string group;
  Scalar scal{0};
  Scalar plane_curvature{0};  ///< K(e2, e3)
  int nullity_index{0};
  Scalar nullity_angle{0};  ///< principal angle between the nullity and e1
  std::vector<std::string> mismatches;

  bool pass() const { return mismatches.empty(); }
};

inline constexpr double kTableTol = 1e-9;
inline constexpr double kAngleTol = 1e-7;

template <typename Scalar>
MilnorTriple<Scalar> table_triple(TableFamily family, Scalar theta) {
  switch (family) {
    case TableFamily::T1F1:
      if (!(theta > Scalar(0))) throw std::invalid_argument("T1F1 requires theta > 0");
      return {theta + Scalar(1) / theta, theta, Scalar(1) / theta};
    case TableFamily::T1F2:
      return {Scalar(2), theta, theta};
    case TableFamily::T2:
      if (!(theta > Scalar(0) && theta <= Scalar(1))) throw std::invalid_argument("T2 requires 0 < theta <= 1");
      return {theta - Scalar(1) / theta, -Scalar(1) / theta, theta};
  }
  throw std::invalid_argument("unknown table family");
}

template <typename Scalar>
TableRowExpectation<Scalar> table_expectation(TableFamily family, Scalar theta) {
  TableRowExpectation<Scalar> e;
  switch (family) {
    case TableFamily::T1F1:
      e = {"SU(2)", Scalar(2), Scalar(-1), Scalar(1), 1};
      break;
    case TableFamily::T1F2:
      e = {"", Scalar(-2) + Scalar(4) * theta, Scalar(-3) + Scalar(2) * theta, Scalar(1), 1};
      e.group = theta > Scalar(0) ? "SU(2)" : (theta < Scalar(0) ? "SL(2,R)~" : "Nil3");
      break;
    case TableFamily::T2:
      e = {theta == Scalar(1) ? "E(1,1)" : "SL(2,R)~", Scalar(-2), Scalar(1), Scalar(-1), 1};
      break;
  }
  return e;
}

template <typename Scalar>
TableRowReport<Scalar> table_row_check(TableFamily family, Scalar theta, Scalar tol = Scalar(kTableTol)) {
  TableRowReport<Scalar> r;
  r.family = family;
  r.theta = theta;
  r.triple = table_triple(family, theta);
  r.expected = table_expectation(family, theta);

  const auto space = milnor_algebra(r.triple);
  const auto curv = curvature(space);
  r.group = classify_unimodular(r.triple);
  r.scal = curv.scal;
  r.plane_curvature = sectional_curvature(curv, space.metric(), 1, 2);
  const auto nr = nullity_index(curv, space.metric(), r.expected.kappa);
  r.nullity_index = nr.index;
  r.nullity_angle = nr.index == 1 ? max_principal_angle<Scalar>(nr.basis, MatrixX<Scalar>(unit_vector<Scalar>(3, 0)),
                                                                space.metric())
                                  : Scalar(std::numbers::pi_v<Scalar> / 2);

  char buf[160];
  if (r.group != r.expected.group) r.mismatches.push_back("group " + r.group + " != " + r.expected.group);
  if (std::abs(r.scal - r.expected.scal) > tol) {
    std::snprintf(buf, sizeof buf, "scal %.12g != %.12g", double(r.scal), double(r.expected.scal));
    r.mismatches.emplace_back(buf);
  }
  if (std::abs(r.plane_curvature - r.expected.plane_curvature) > tol) {
    std::snprintf(buf, sizeof buf, "K(e2,e3) %.12g != %.12g", double(r.plane_curvature),
                  double(r.expected.plane_curvature));
    r.mismatches.emplace_back(buf);
  }
  if (r.nullity_index != r.expected.nullity_index) {
    std::snprintf(buf, sizeof buf, "nullity index %d != %d at kappa %g", r.nullity_index, r.expected.nullity_index,
                  double(r.expected.kappa));
    r.mismatches.emplace_back(buf);
  } else if (r.nullity_angle > Scalar(kAngleTol)) {
    std::snprintf(buf, sizeof buf, "nullity not along e1 (angle %.3g)", double(r.nullity_angle));
    r.mismatches.emplace_back(buf);
  }
  return r;
}

/// Frame (T, X, Y): [X,Y] = 2F T, [T,X] = -X + 2F Y, [T,Y] = Y.
template <typename Scalar>
LieMetricSpace<Scalar> conullity2_frame(Scalar f) {
  std::vector<BracketTerm<Scalar>> terms{{0, 1, 1, Scalar(-1)}, {0, 2, 2, Scalar(1)}};
  if (f != Scalar(0)) {
    terms.push_back({1, 2, 0, Scalar(2) * f});
    terms.push_back({0, 1, 2, Scalar(2) * f});
  }
  return LieMetricSpace<Scalar>(3, std::move(terms));
}

/// Orthonormal (e1, e2, xi): [e1,e2] = alpha e2 + 2 xi, xi central.
template <typename Scalar>
LieMetricSpace<Scalar> perrone_algebra(Scalar alpha) {
  if (alpha == Scalar(0)) throw std::invalid_argument("perrone_algebra: alpha must be nonzero");
  return LieMetricSpace<Scalar>(3, {{0, 1, 1, alpha}, {0, 1, 2, Scalar(2)}});
}

/// Heisenberg algebra [e1,e2] = e3 with the orthonormal metric.
template <typename Scalar>
LieMetricSpace<Scalar> heisenberg_algebra() {
  return milnor_algebra(MilnorTriple<Scalar>{Scalar(0), Scalar(0), Scalar(1)});
}

}  // namespace nullity

#endif  // NULLITY_MODEL_CATALOG_HPP
