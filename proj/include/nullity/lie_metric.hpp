#ifndef NULLITY_LIE_METRIC_HPP
#define NULLITY_LIE_METRIC_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/CXX11/Tensor>

#include "nullity/linalg.hpp"

namespace nullity {

/// One structure constant: [e_i, e_j] contains c * e_k.
template <typename Scalar>
struct BracketTerm {
  int i;
  int j;
  int k;
  Scalar c;
};

/**
 * A metric Lie algebra: structure constants in a fixed frame e_0..e_{n-1}
 * together with the Gram matrix <e_i, e_j> of the left-invariant metric.
 *
 * Terms are stored with i < j; a term given with i > j is stored as
 * (j, i, k, -c). Terms with i == j and contradictory duplicates are kept
 * verbatim so that validate_algebra() can report them; the dense bracket
 * uses the first occurrence of each (i, j, k).
 */
template <typename Scalar>
class LieMetricSpace {
 public:
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;

  LieMetricSpace(int dim, std::vector<BracketTerm<Scalar>> terms)
      : LieMetricSpace(dim, std::move(terms), Matrix::Identity(dim, dim)) {}

  LieMetricSpace(int dim, std::vector<BracketTerm<Scalar>> terms, Matrix metric)
      : dim_(dim), metric_(std::move(metric)) {
    if (dim <= 0) throw std::invalid_argument("LieMetricSpace: dimension must be positive");
    if (metric_.rows() != dim || metric_.cols() != dim)
      throw std::invalid_argument("LieMetricSpace: metric must be " + std::to_string(dim) + "x" +
                                  std::to_string(dim));
    terms_.reserve(terms.size());
    for (auto t : terms) {
      if (t.i < 0 || t.j < 0 || t.k < 0 || t.i >= dim || t.j >= dim || t.k >= dim)
        throw std::invalid_argument("LieMetricSpace: bracket index out of range");
      if (t.i > t.j) {
        std::swap(t.i, t.j);
        t.c = -t.c;
      }
      terms_.push_back(t);
    }
    ad_.assign(dim, Matrix::Zero(dim, dim));
    std::vector<char> seen(static_cast<std::size_t>(dim) * dim * dim, 0);
    for (const auto& t : terms_) {
      if (t.i == t.j) continue;
      auto& flag = seen[(static_cast<std::size_t>(t.i) * dim + t.j) * dim + t.k];
      if (flag) continue;
      flag = 1;
      ad_[t.i](t.k, t.j) = t.c;
      ad_[t.j](t.k, t.i) = -t.c;
    }
  }

  int dim() const { return dim_; }
  const std::vector<BracketTerm<Scalar>>& terms() const { return terms_; }
  const Matrix& metric() const { return metric_; }

  /// Matrix of ad(e_i): column j holds the coefficients of [e_i, e_j].
  const Matrix& ad(int i) const { return ad_[i]; }

  /// ad(x) for an arbitrary algebra element.
  Matrix ad(const Vector& x) const {
    Matrix out = Matrix::Zero(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      if (x(i) != Scalar(0)) out += x(i) * ad_[i];
    return out;
  }

  Vector bracket(const Vector& x, const Vector& y) const { return ad(x) * y; }

  Scalar inner(const Vector& x, const Vector& y) const { return x.dot(metric_ * y); }

 private:
  int dim_;
  std::vector<BracketTerm<Scalar>> terms_;
  Matrix metric_;
  std::vector<Matrix> ad_;
};

template <typename Scalar>
struct ValidationReport {
  Scalar antisymmetry_violation{0};
  Scalar jacobi_residual{0};
  Scalar metric_asymmetry{0};
  Scalar metric_min_eigenvalue{0};
  bool passed{true};
  std::vector<std::string> failures;
};

inline constexpr double kJacobiTol = 1e-10;

/// Checks bracket antisymmetry, the Jacobi identity and positivity of the
/// metric. The Jacobi residual is measured on unit-normalized structure
/// constants, i.e. divided by max(1, max|c|^2).
template <typename Scalar>
ValidationReport<Scalar> validate_algebra(const LieMetricSpace<Scalar>& space,
                                          Scalar tol = Scalar(kJacobiTol)) {
  ValidationReport<Scalar> report;
  const int n = space.dim();

  // Diagonal brackets and contradictory duplicates.
  std::map<std::tuple<int, int, int>, Scalar> first;
  Scalar cmax = 0;
  for (const auto& t : space.terms()) {
    cmax = std::max(cmax, std::abs(t.c));
    if (t.i == t.j) {
      report.antisymmetry_violation = std::max(report.antisymmetry_violation, std::abs(t.c));
      continue;
    }
    auto [it, inserted] = first.emplace(std::make_tuple(t.i, t.j, t.k), t.c);
    if (!inserted)
      report.antisymmetry_violation =
          std::max(report.antisymmetry_violation, std::abs(it->second - t.c));
  }
  if (report.antisymmetry_violation > tol) {
    report.passed = false;
    report.failures.push_back("inconsistent or diagonal bracket terms");
  }

  const Scalar scale = std::max<Scalar>(Scalar(1), cmax * cmax);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const VectorX<Scalar> cyc = space.ad(i) * space.ad(j).col(k) +
                                    space.ad(j) * space.ad(k).col(i) +
                                    space.ad(k) * space.ad(i).col(j);
        report.jacobi_residual = std::max(report.jacobi_residual, cyc.cwiseAbs().maxCoeff() / scale);
      }
  if (report.jacobi_residual > tol) {
    report.passed = false;
    report.failures.push_back("Jacobi identity violated");
  }

  const auto& g = space.metric();
  report.metric_asymmetry = (g - g.transpose()).cwiseAbs().maxCoeff();
  const MatrixX<Scalar> gs = (g + g.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(gs, Eigen::EigenvaluesOnly);
  report.metric_min_eigenvalue = eig.eigenvalues()(0);
  const Scalar gscale = std::max<Scalar>(Scalar(1), g.cwiseAbs().maxCoeff());
  if (report.metric_asymmetry > Scalar(1e-12) * gscale) {
    report.passed = false;
    report.failures.push_back("metric not symmetric");
  }
  if (!(report.metric_min_eigenvalue > Scalar(1e-12) * gscale)) {
    report.passed = false;
    report.failures.push_back("metric not positive definite");
  }
  return report;
}

/// Levi-Civita connection of a left-invariant metric, stored as one matrix
/// per frame vector: nabla[i].col(j) holds the coefficients of
/// nabla_{e_i} e_j, so Gamma[i][j][k] == nabla[i](k, j).
template <typename Scalar>
struct Connection {
  std::vector<MatrixX<Scalar>> nabla;

  Scalar gamma(int i, int j, int k) const { return nabla[i](k, j); }

  Eigen::Tensor<Scalar, 3> tensor() const {
    const auto n = static_cast<Eigen::Index>(nabla.size());
    Eigen::Tensor<Scalar, 3> t(n, n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) t(i, j, k) = nabla[i](k, j);
    return t;
  }
};

/// Koszul formula for left-invariant fields:
/// <nabla_X Y, Z> = 1/2 (<[X,Y],Z> - <[Y,Z],X> + <[Z,X],Y>).
template <typename Scalar>
Connection<Scalar> koszul_connection(const LieMetricSpace<Scalar>& space) {
  const int n = space.dim();
  const auto& g = space.metric();
  Eigen::LLT<MatrixX<Scalar>> llt(g);
  if (llt.info() != Eigen::Success) throw NumericalError("koszul_connection: singular metric");

  // lowered[i](l, j) = <[e_i, e_j], e_l>
  std::vector<MatrixX<Scalar>> lowered(n);
  for (int i = 0; i < n; ++i) lowered[i] = g * space.ad(i);

  Connection<Scalar> conn;
  conn.nabla.assign(n, MatrixX<Scalar>::Zero(n, n));
  VectorX<Scalar> rhs(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l)
        rhs(l) = (lowered[i](l, j) - lowered[j](i, l) + lowered[l](j, i)) / Scalar(2);
      conn.nabla[i].col(j) = llt.solve(rhs);
    }
  return conn;
}

/**
 * Curvature of a left-invariant metric with the convention
 * R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z.
 *
 * `operators[i * n + j]` is the matrix of R(e_i, e_j);
 * riem(i, j, k, l) = <R(e_i, e_j) e_k, e_l>.
 */
template <typename Scalar>
struct CurvatureData {
  int dim{0};
  Connection<Scalar> connection;
  std::vector<MatrixX<Scalar>> operators;
  Eigen::Tensor<Scalar, 4> riem;
  MatrixX<Scalar> ricci;
  Scalar scal{0};

  const MatrixX<Scalar>& op(int i, int j) const { return operators[static_cast<std::size_t>(i) * dim + j]; }

  /// Matrix of R(x, y).
  MatrixX<Scalar> op(const VectorX<Scalar>& x, const VectorX<Scalar>& y) const {
    MatrixX<Scalar> out = MatrixX<Scalar>::Zero(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        const Scalar w = x(i) * y(j);
        if (w != Scalar(0)) out += w * op(i, j);
      }
    return out;
  }

  VectorX<Scalar> apply(const VectorX<Scalar>& x, const VectorX<Scalar>& y, const VectorX<Scalar>& z) const {
    return op(x, y) * z;
  }
};

template <typename Scalar>
CurvatureData<Scalar> curvature_from_connection(const LieMetricSpace<Scalar>& space,
                                                Connection<Scalar> conn) {
  const int n = space.dim();
  const auto& g = space.metric();
  CurvatureData<Scalar> cd;
  cd.dim = n;
  cd.operators.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      MatrixX<Scalar> r = conn.nabla[i] * conn.nabla[j] - conn.nabla[j] * conn.nabla[i];
      for (int p = 0; p < n; ++p) {
        const Scalar c = space.ad(i)(p, j);
        if (c != Scalar(0)) r -= c * conn.nabla[p];
      }
      cd.operators[static_cast<std::size_t>(i) * n + j] = std::move(r);
    }
  cd.connection = std::move(conn);

  cd.riem = Eigen::Tensor<Scalar, 4>(n, n, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const MatrixX<Scalar> low = g * cd.op(i, j);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) cd.riem(i, j, k, l) = low(l, k);
    }

  // Ric(Y, Z) = tr(X -> R(X, Y) Z)
  cd.ricci = MatrixX<Scalar>::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      Scalar s = 0;
      for (int i = 0; i < n; ++i) s += cd.op(i, j)(i, k);
      cd.ricci(j, k) = s;
    }
  const MatrixX<Scalar> ginv = g.inverse();
  cd.scal = (ginv.cwiseProduct(cd.ricci)).sum();
  return cd;
}

template <typename Scalar>
CurvatureData<Scalar> curvature(const LieMetricSpace<Scalar>& space) {
  return curvature_from_connection(space, koszul_connection(space));
}

/// K(u, v) = <R(u,v)v, u> / (|u|^2 |v|^2 - <u,v>^2).
template <typename Scalar>
Scalar sectional_curvature(const CurvatureData<Scalar>& curv, const MatrixX<Scalar>& metric,
                           const VectorX<Scalar>& u, const VectorX<Scalar>& v,
                           Scalar tol = Scalar(1e-12)) {
  const Scalar uu = u.dot(metric * u);
  const Scalar vv = v.dot(metric * v);
  const Scalar uv = u.dot(metric * v);
  const Scalar denom = uu * vv - uv * uv;
  if (!(denom > tol * uu * vv)) throw std::invalid_argument("sectional_curvature: degenerate plane");
  return (curv.apply(u, v, v)).dot(metric * u) / denom;
}

template <typename Scalar>
Scalar sectional_curvature(const CurvatureData<Scalar>& curv, const MatrixX<Scalar>& metric, int i, int j) {
  return sectional_curvature<Scalar>(curv, metric, unit_vector<Scalar>(curv.dim, i),
                                     unit_vector<Scalar>(curv.dim, j));
}

/// Sectional curvatures of all frame planes span(e_i, e_j); diagonal is zero.
template <typename Scalar>
MatrixX<Scalar> frame_sectional_curvatures(const CurvatureData<Scalar>& curv, const MatrixX<Scalar>& metric) {
  const int n = curv.dim;
  MatrixX<Scalar> k = MatrixX<Scalar>::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) k(i, j) = k(j, i) = sectional_curvature(curv, metric, i, j);
  return k;
}

/// Dimensions of the bracket filtration D^1 = D, D^{r+1} = D^r + [D, D^r],
/// listed up to the first level where the dimension stops growing.
struct GrowthVector {
  std::vector<int> dims;
  bool bracket_generating{false};
  int step{0};  ///< r with D^r equal to the whole algebra, 0 if never
};

template <typename Scalar>
GrowthVector growth_vector(const LieMetricSpace<Scalar>& space, const MatrixX<Scalar>& distribution,
                           Scalar rtol = Scalar(kRankTol)) {
  const int n = space.dim();
  if (distribution.rows() != n) throw std::invalid_argument("growth_vector: basis has wrong length");
  MatrixX<Scalar> current = range_basis(distribution, rtol);
  if (current.cols() != distribution.cols())
    throw std::invalid_argument("growth_vector: basis vectors are linearly dependent");

  GrowthVector gv;
  gv.dims.push_back(static_cast<int>(current.cols()));
  std::vector<MatrixX<Scalar>> generators;
  for (Eigen::Index a = 0; a < distribution.cols(); ++a) generators.push_back(space.ad(distribution.col(a)));

  while (gv.dims.back() < n) {
    MatrixX<Scalar> stack(n, current.cols() * (1 + static_cast<Eigen::Index>(generators.size())));
    stack.leftCols(current.cols()) = current;
    Eigen::Index col = current.cols();
    for (const auto& ad : generators) {
      stack.middleCols(col, current.cols()) = ad * current;
      col += current.cols();
    }
    MatrixX<Scalar> next = range_basis(stack, rtol);
    if (next.cols() == current.cols()) break;
    current = std::move(next);
    gv.dims.push_back(static_cast<int>(current.cols()));
  }
  gv.bracket_generating = gv.dims.back() == n;
  gv.step = gv.bracket_generating ? static_cast<int>(gv.dims.size()) : 0;
  return gv;
}

/// Frame change e'_a = sum_i p(i, a) e_i. Returns the same metric Lie algebra
/// expressed in the new frame (structure constants and Gram matrix).
template <typename Scalar>
LieMetricSpace<Scalar> change_frame(const LieMetricSpace<Scalar>& space, const MatrixX<Scalar>& p) {
  const int n = space.dim();
  const MatrixX<Scalar> pinv = p.inverse();
  std::vector<BracketTerm<Scalar>> terms;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const VectorX<Scalar> br = pinv * space.bracket(p.col(a), p.col(b));
      for (int c = 0; c < n; ++c)
        if (br(c) != Scalar(0)) terms.push_back({a, b, c, br(c)});
    }
  return LieMetricSpace<Scalar>(n, std::move(terms), p.transpose() * space.metric() * p);
}

}  // namespace nullity

#endif  // NULLITY_LIE_METRIC_HPP
