#ifndef NULLITY_ALMOST_ABELIAN_HPP
#define NULLITY_ALMOST_ABELIAN_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "nullity/lie_metric.hpp"
#include "nullity/linalg.hpp"
#include "nullity/nullity_solver.hpp"
#include "nullity/polynomial.hpp"

namespace nullity {

/**
 * Almost-Abelian group R x_A V: the generator xi acts on the Abelian ideal V
 * by [xi, X] = A X. The metric makes xi a unit vector orthogonal to V and the
 * frame X_1..X_m of V orthonormal.
 *
 * Frame convention for every (m+1)-dimensional object built from it:
 * index 0 is xi, index i+1 is X_{i+1}.
 */
template <typename Scalar>
class AlmostAbelianGroup {
 public:
  explicit AlmostAbelianGroup(MatrixX<Scalar> a) : a_(std::move(a)) {
    if (a_.rows() < 1 || a_.rows() != a_.cols())
      throw std::invalid_argument("AlmostAbelianGroup: A must be square and nonempty");
    if (!a_.allFinite()) throw std::invalid_argument("AlmostAbelianGroup: A has non-finite entries");
    if (a_.cwiseAbs().maxCoeff() == Scalar(0)) throw std::invalid_argument("AlmostAbelianGroup: A must be nonzero");
    sym_ = (a_ + a_.transpose()) / Scalar(2);
    skew_ = (a_ - a_.transpose()) / Scalar(2);
  }

  int m() const { return static_cast<int>(a_.rows()); }
  const MatrixX<Scalar>& a() const { return a_; }
  const MatrixX<Scalar>& sym() const { return sym_; }
  const MatrixX<Scalar>& skew() const { return skew_; }
  bool unimodular(Scalar tol = Scalar(1e-12)) const { return std::abs(a_.trace()) <= tol; }

 private:
  MatrixX<Scalar> a_;
  MatrixX<Scalar> sym_;
  MatrixX<Scalar> skew_;
};

/// Left-invariant metric Lie algebra of the group, xi at index 0.
template <typename Scalar>
LieMetricSpace<Scalar> to_lie_metric(const AlmostAbelianGroup<Scalar>& g) {
  const int m = g.m();
  std::vector<BracketTerm<Scalar>> terms;
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k)
      if (g.a()(k, i) != Scalar(0)) terms.push_back({0, i + 1, k + 1, g.a()(k, i)});
  return LieMetricSpace<Scalar>(m + 1, std::move(terms));
}

/**
 * Curvature from the closed-form blocks (S = A^sy, K = A^sk, X, Y, Z in V):
 *   nabla_xi xi = 0, nabla_xi X = K X, nabla_X xi = -S X, nabla_X Y = <S X, Y> xi
 *   R(X,Y)Z  = -<S Y, Z> S X + <S X, Z> S Y
 *   R(X,Y)xi = 0
 *   R(xi,X)Y = <([K,S] - S^2) X, Y> xi
 *   R(xi,X)xi = ([S,K] + S^2) X
 * Ricci and scalar curvature use the S-eigenbasis formulas
 *   Ric(xi,xi) = -sum l_j^2, Ric(xi, X_i) = 0,
 *   Ric(X_i,X_i) = -l_i sum l_j, Ric(X_i,X_j) = (l_i - l_j) <K X_i, X_j>,
 *   scal = -sum l_i^2 - (sum l_i)^2.
 */
template <typename Scalar>
CurvatureData<Scalar> aa_curvature(const AlmostAbelianGroup<Scalar>& g) {
  const int m = g.m();
  const int n = m + 1;
  const MatrixX<Scalar>& s = g.sym();
  const MatrixX<Scalar>& k = g.skew();
  const MatrixX<Scalar> s2 = s * s;
  const MatrixX<Scalar> ks = k * s - s * k;  // [K, S]

  CurvatureData<Scalar> cd;
  cd.dim = n;

  cd.connection.nabla.assign(n, MatrixX<Scalar>::Zero(n, n));
  cd.connection.nabla[0].bottomRightCorner(m, m) = k;
  for (int i = 0; i < m; ++i) {
    auto& nab = cd.connection.nabla[i + 1];
    nab.col(0).tail(m) = -s.col(i);
    nab.block(0, 1, 1, m) = s.row(i);  // <S X_i, X_j> xi
  }

  cd.operators.assign(static_cast<std::size_t>(n) * n, MatrixX<Scalar>::Zero(n, n));
  auto op = [&](int i, int j) -> MatrixX<Scalar>& { return cd.operators[static_cast<std::size_t>(i) * n + j]; };
  for (int i = 0; i < m; ++i) {
    // R(xi, X_i): Y -> <([K,S] - S^2) X_i, Y> xi,  xi -> ([S,K] + S^2) X_i
    MatrixX<Scalar>& r = op(0, i + 1);
    r.block(0, 1, 1, m) = (ks - s2).col(i).transpose();
    r.col(0).tail(m) = (-ks + s2).col(i);
    op(i + 1, 0) = -r;
    for (int j = 0; j < m; ++j) {
      // R(X_i, X_j) Z = -<S X_j, Z> S X_i + <S X_i, Z> S X_j
      MatrixX<Scalar>& rv = op(i + 1, j + 1);
      rv.bottomRightCorner(m, m) = -s.col(i) * s.col(j).transpose() + s.col(j) * s.col(i).transpose();
    }
  }

  cd.riem = Eigen::Tensor<Scalar, 4>(n, n, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) cd.riem(i, j, a, b) = op(i, j)(b, a);

  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(s);
  const VectorX<Scalar>& lam = eig.eigenvalues();
  const MatrixX<Scalar>& q = eig.eigenvectors();
  const MatrixX<Scalar> k_eig = q.transpose() * k * q;  // k_eig(j, i) = <K X_i, X_j>
  const Scalar sum = lam.sum();
  MatrixX<Scalar> ric_eig(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      ric_eig(i, j) = i == j ? -lam(i) * sum : (lam(i) - lam(j)) * k_eig(j, i);
  cd.ricci = MatrixX<Scalar>::Zero(n, n);
  cd.ricci(0, 0) = -lam.squaredNorm();
  cd.ricci.bottomRightCorner(m, m) = q * ric_eig * q.transpose();
  cd.scal = -lam.squaredNorm() - sum * sum;
  return cd;
}

inline constexpr double kFlatTol = 1e-12;

/// 0-nullity of a non-flat almost-Abelian group: ker S intersected with
/// K^{-1}(ker S), as an orthonormal basis of a subspace of V (m-vectors).
template <typename Scalar>
MatrixX<Scalar> aa_nullity(const AlmostAbelianGroup<Scalar>& g, Scalar rtol = Scalar(kRankTol)) {
  const int m = g.m();
  if (g.sym().cwiseAbs().maxCoeff() <= Scalar(kFlatTol) * g.a().cwiseAbs().maxCoeff())
    throw std::invalid_argument("aa_nullity: A is skew-symmetric, the group is flat");
  // x in ker S with K x in ker S  <=>  [S; S K] x = 0
  MatrixX<Scalar> stacked(2 * m, m);
  stacked << g.sym(), g.sym() * g.skew();
  return kernel_split(stacked, rtol).kernel;
}

/// Embeds V-vectors into the (m+1)-dimensional frame (xi at index 0).
template <typename Scalar>
MatrixX<Scalar> embed_in_algebra(const MatrixX<Scalar>& v_basis) {
  MatrixX<Scalar> out = MatrixX<Scalar>::Zero(v_basis.rows() + 1, v_basis.cols());
  out.bottomRows(v_basis.rows()) = v_basis;
  return out;
}

enum class LatticeMode { linear, exponential };

template <typename Scalar>
struct IntegralityResult {
  bool integral{false};
  std::vector<long long> coefficients;  ///< rounded, highest degree first
  std::vector<Scalar> raw;
  Scalar max_deviation{0};
  Scalar determinant{0};  ///< of lambda*A or exp(lambda*A)
};

inline constexpr double kIntegralityTol = 1e-6;

template <typename Scalar>
bool is_nilpotent(const MatrixX<Scalar>& a, Scalar tol = Scalar(1e-12)) {
  MatrixX<Scalar> p = a;
  for (Eigen::Index i = 1; i < a.rows(); ++i) p = p * a;
  const Scalar scale = std::max<Scalar>(Scalar(1), std::pow(a.cwiseAbs().maxCoeff(), Scalar(a.rows())));
  return p.cwiseAbs().maxCoeff() <= tol * scale;
}

/**
 * Lattice criterion test. Linear mode: is charpoly(lambda A) integral
 * (requires unimodular, non-nilpotent A). Exponential mode: is
 * charpoly(exp(lambda A)) integral with |det| = 1.
 */
template <typename Scalar>
IntegralityResult<Scalar> integrality_check(const MatrixX<Scalar>& a, Scalar lambda, LatticeMode mode,
                                            Scalar tol = Scalar(kIntegralityTol)) {
  if (a.rows() < 1 || a.rows() != a.cols()) throw std::invalid_argument("integrality_check: A must be square");
  if (lambda == Scalar(0)) throw std::invalid_argument("integrality_check: lambda must be nonzero");
  MatrixX<Scalar> target;
  if (mode == LatticeMode::linear) {
    if (is_nilpotent(a)) throw std::invalid_argument("integrality_check: A is nilpotent");
    if (std::abs(a.trace()) > tol) throw std::invalid_argument("integrality_check: A is not unimodular");
    target = lambda * a;
  } else {
    target = (lambda * a).exp();
  }
  IntegralityResult<Scalar> r;
  r.raw = charpoly(target);
  r.coefficients.reserve(r.raw.size());
  for (Scalar c : r.raw) {
    const Scalar rounded = std::round(c);
    r.max_deviation = std::max(r.max_deviation, std::abs(c - rounded));
    r.coefficients.push_back(static_cast<long long>(rounded));
  }
  r.determinant = target.determinant();
  r.integral = r.max_deviation <= tol;
  if (mode == LatticeMode::exponential && std::abs(std::abs(r.determinant) - Scalar(1)) > tol) r.integral = false;
  return r;
}

/**
 * Candidate scalings lambda with tr exp(lambda A) equal to an integer
 * k in [-bound, bound]. The trace function is sampled, split into monotone
 * branches and each crossing is bisected; survivors of the exponential
 * integrality check are returned in increasing order.
 */
template <typename Scalar>
std::vector<Scalar> lattice_lambda_search(const MatrixX<Scalar>& a, int coefficient_bound,
                                          Scalar tol = Scalar(kIntegralityTol)) {
  if (a.rows() < 1 || a.rows() != a.cols()) throw std::invalid_argument("lattice_lambda_search: A must be square");
  if (is_nilpotent(a)) throw std::invalid_argument("lattice_lambda_search: A is nilpotent");
  if (std::abs(a.trace()) > tol) throw std::invalid_argument("lattice_lambda_search: A is not unimodular");
  if (coefficient_bound < 0) throw std::invalid_argument("lattice_lambda_search: negative bound");

  Eigen::ComplexEigenSolver<MatrixX<Scalar>> es(a, false);
  const auto mu = es.eigenvalues();
  const auto trace_exp = [&](Scalar lambda) {
    Scalar s = 0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) s += std::real(std::exp(lambda * mu(i)));
    return s;
  };

  Scalar max_re = 0, max_im = 0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    max_re = std::max(max_re, std::abs(mu(i).real()));
    max_im = std::max(max_im, std::abs(mu(i).imag()));
  }
  const Scalar m = Scalar(a.rows());
  // Beyond this range |tr exp| exceeds the bound (real part) or the search
  // covers a few periods of the oscillation (purely imaginary spectrum).
  const Scalar range = max_re > Scalar(1e-9)
                           ? (std::log(Scalar(coefficient_bound) + m + Scalar(1)) + Scalar(1)) / max_re
                           : Scalar(8) * std::numbers::pi_v<Scalar> / max_im;

  const int samples = 4000;
  std::vector<Scalar> grid(samples + 1), vals(samples + 1);
  for (int i = 0; i <= samples; ++i) {
    grid[i] = -range + Scalar(2) * range * Scalar(i) / Scalar(samples);
    vals[i] = trace_exp(grid[i]);
  }

  std::vector<Scalar> found;
  for (int k = -coefficient_bound; k <= coefficient_bound; ++k) {
    const Scalar target = Scalar(k);
    for (int i = 0; i < samples; ++i) {
      const Scalar f0 = vals[i] - target, f1 = vals[i + 1] - target;
      if (f0 == Scalar(0) || (f0 < Scalar(0)) == (f1 < Scalar(0))) continue;
      Scalar lo = grid[i], hi = grid[i + 1];
      const bool increasing = f1 > f0;
      for (int it = 0; it < 200 && hi - lo > Scalar(1e-15) * std::max<Scalar>(Scalar(1), std::abs(hi)); ++it) {
        const Scalar mid = (lo + hi) / Scalar(2);
        if ((trace_exp(mid) < target) == increasing) lo = mid; else hi = mid;
      }
      const Scalar lambda = (lo + hi) / Scalar(2);
      if (std::abs(lambda) < Scalar(1e-9)) continue;
      if (!integrality_check(a, lambda, LatticeMode::exponential, tol).integral) continue;
      found.push_back(lambda);
    }
  }
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end(),
                          [](Scalar x, Scalar y) { return std::abs(x - y) < Scalar(1e-9); }),
              found.end());
  return found;
}

/// Everything computed while rebuilding the five-dimensional almost-Abelian
/// example with 0-nullity 1 and a lattice.
template <typename Scalar>
struct Example5Report {
  MatrixX<Scalar> integer_matrix;
  Scalar alpha{0}, beta{0}, gamma{0};
  Scalar sigma{0}, mu{0}, nu{0};
  Scalar a{0}, b{0}, c{0};
  MatrixX<Scalar> A;
  std::vector<Scalar> charpoly_A;  ///< computed from A
  std::vector<Scalar> charpoly_B;  ///< x^4 + sigma x^2 + mu x + nu
  std::vector<Scalar> charpoly_A_closed_form;
  Scalar charpoly_mismatch{0};
  Scalar eigen_consistency{0};  ///< |log(larger real eigenvalue) - (gamma - 2 alpha)|
  Scalar trace_A{0};
  int nullity_index{0};
  MatrixX<Scalar> nullity_basis;  ///< in the (xi, X_1..X_4) frame
  int solver_nullity_index{0};    ///< generic nullity solver at kappa = 0
  VectorX<Scalar> splitting_value;  ///< C_{X_2} xi = -(nabla_xi X_2)^h
};

class ConstructionError : public NumericalError {
 public:
  ConstructionError(const std::string& stage, const std::string& what)
      : NumericalError("example5 stage '" + stage + "': " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

template <typename Scalar = double>
Example5Report<Scalar> construct_example5() {
  Example5Report<Scalar> r;
  r.integer_matrix = MatrixX<Scalar>(4, 4);
  r.integer_matrix << 1, 0, 0, 1,
                      1, 2, 0, 2,
                      0, 1, 3, 0,
                      0, 0, 1, 0;

  // Stage 1: spectrum of the integer matrix.
  Eigen::EigenSolver<MatrixX<Scalar>> es(r.integer_matrix, true);
  std::vector<Scalar> reals;
  std::complex<Scalar> pair{0, 0};
  int complex_count = 0;
  for (Eigen::Index i = 0; i < 4; ++i) {
    const std::complex<Scalar> ev = es.eigenvalues()(i);
    const VectorX<std::complex<Scalar>> v = es.eigenvectors().col(i);
    const Scalar res = (r.integer_matrix.template cast<std::complex<Scalar>>() * v - ev * v).norm();
    if (res > Scalar(1e-10)) throw ConstructionError("eigen", "eigenpair residual too large");
    if (std::abs(ev.imag()) > Scalar(1e-8)) {
      ++complex_count;
      if (ev.imag() > Scalar(0)) pair = ev;
    } else {
      reals.push_back(ev.real());
    }
  }
  if (reals.size() != 2 || complex_count != 2) throw ConstructionError("eigen", "expected two real eigenvalues and one complex pair");
  std::sort(reals.begin(), reals.end());
  if (reals[0] <= Scalar(0)) throw ConstructionError("eigen", "real eigenvalues must be positive");
  r.gamma = -std::log(reals[0]);
  r.alpha = std::log(std::abs(pair));
  r.beta = std::arg(pair);
  r.eigen_consistency = std::abs(std::log(reals[1]) - (r.gamma - Scalar(2) * r.alpha));
  if (r.eigen_consistency > Scalar(1e-8)) throw ConstructionError("eigen", "larger real eigenvalue inconsistent with gamma - 2 alpha");

  // Stage 2: coefficients of p_B(x) = x^4 + sigma x^2 + mu x + nu.
  const Scalar amg = r.alpha - r.gamma;
  r.sigma = -Scalar(2) * r.alpha * r.alpha + r.beta * r.beta - amg * amg;
  r.mu = Scalar(2) * r.alpha * (amg * amg + r.beta * r.beta);
  r.nu = (r.alpha * r.alpha + r.beta * r.beta) * r.gamma * (Scalar(2) * r.alpha - r.gamma);
  if (!(r.mu > Scalar(0)) || !(r.nu < Scalar(0))) throw ConstructionError("coefficients", "expected mu > 0 and nu < 0");
  r.charpoly_B = {Scalar(1), Scalar(0), r.sigma, r.mu, r.nu};

  // Stage 3: a > 0 with a^4 + sigma a^2 - mu a + nu = 0, then b and c.
  const auto quartic = [&](Scalar x) { return ((x * x + r.sigma) * x - r.mu) * x + r.nu; };
  Scalar lo = 0, hi = Scalar(1) + std::abs(r.sigma) + std::abs(r.mu) + std::abs(r.nu);
  if (!(quartic(lo) < Scalar(0)) || !(quartic(hi) > Scalar(0))) throw ConstructionError("quartic", "no sign change on bracket");
  for (int it = 0; it < 300 && hi - lo > Scalar(0); ++it) {
    const Scalar mid = (lo + hi) / Scalar(2);
    if (mid == lo || mid == hi) break;
    if (quartic(mid) < Scalar(0)) lo = mid; else hi = mid;
  }
  r.a = (lo + hi) / Scalar(2);
  r.b = std::sqrt(-r.nu) / r.a;
  r.c = std::sqrt(r.mu / r.a);

  // Stage 4: assemble A and verify.
  r.A = MatrixX<Scalar>(4, 4);
  r.A << Scalar(0), -r.b, Scalar(0), -r.c,
         r.b, Scalar(0), Scalar(0), Scalar(0),
         Scalar(0), Scalar(0), -r.a, Scalar(0),
         r.c, Scalar(0), Scalar(0), r.a;
  r.charpoly_A = charpoly(r.A);
  r.charpoly_A_closed_form = {Scalar(1), Scalar(0), -r.a * r.a + r.b * r.b + r.c * r.c, r.a * r.c * r.c,
                              -r.a * r.a * r.b * r.b};
  for (std::size_t i = 0; i < 5; ++i)
    r.charpoly_mismatch = std::max({r.charpoly_mismatch, std::abs(r.charpoly_A[i] - r.charpoly_B[i]),
                                    std::abs(r.charpoly_A_closed_form[i] - r.charpoly_B[i])});
  if (r.charpoly_mismatch > Scalar(1e-9)) throw ConstructionError("charpoly", "p_A and p_B differ");
  r.trace_A = r.A.trace();
  if (std::abs(r.trace_A) > Scalar(1e-12)) throw ConstructionError("trace", "A is not traceless");

  const AlmostAbelianGroup<Scalar> g(r.A);
  const MatrixX<Scalar> nul = aa_nullity(g);
  r.nullity_index = static_cast<int>(nul.cols());
  r.nullity_basis = embed_in_algebra(nul);
  if (r.nullity_index != 1) throw ConstructionError("nullity", "expected 0-nullity of dimension 1");
  const MatrixX<Scalar> x2 = embed_in_algebra<Scalar>(MatrixX<Scalar>(unit_vector<Scalar>(4, 1)));
  if (max_principal_angle<Scalar>(r.nullity_basis, x2, MatrixX<Scalar>::Identity(5, 5)) > Scalar(1e-7))
    throw ConstructionError("nullity", "nullity is not spanned by X_2");

  const auto space = to_lie_metric(g);
  const auto curv = curvature(space);
  r.solver_nullity_index = nullity_index(curv, space.metric(), Scalar(0)).index;
  if (r.solver_nullity_index != 1) throw ConstructionError("nullity", "generic solver disagrees");

  // C_{X_2} xi = -(nabla_xi X_2)^h, horizontal = orthogonal to X_2
  VectorX<Scalar> v = -curv.connection.nabla[0].col(2);
  v(2) = Scalar(0);
  r.splitting_value = v;
  if (!(v.norm() > Scalar(1e-9))) throw ConstructionError("splitting", "splitting tensor vanishes");
  return r;
}

/// The unimodular group with A = diag(I_{m/2}, -I_{m/2}) and its lattice
/// witness lambda = log((3 + sqrt 5) / 2).
template <typename Scalar>
struct Nul1Report {
  int m{0};
  AlmostAbelianGroup<Scalar> group;
  Scalar witness_lambda{0};
  IntegralityResult<Scalar> witness;
  NullityResult<Scalar> nullity;  ///< kappa = -1 on the full algebra
  Scalar scal{0};
};

template <typename Scalar = double>
Nul1Report<Scalar> nul1_group(int m) {
  if (m < 2 || m % 2 != 0) throw std::invalid_argument("nul1_group: m must be even and >= 2");
  VectorX<Scalar> d(m);
  d.head(m / 2).setOnes();
  d.tail(m / 2).setConstant(Scalar(-1));
  AlmostAbelianGroup<Scalar> g(MatrixX<Scalar>(d.asDiagonal()));
  const Scalar lambda = std::log((Scalar(3) + std::sqrt(Scalar(5))) / Scalar(2));
  auto witness = integrality_check(g.a(), lambda, LatticeMode::exponential);
  const auto space = to_lie_metric(g);
  const auto curv = curvature(space);
  auto nr = nullity_index(curv, space.metric(), Scalar(-1));
  return Nul1Report<Scalar>{m, g, lambda, std::move(witness), std::move(nr), curv.scal};
}

}  // namespace nullity

#endif  // NULLITY_ALMOST_ABELIAN_HPP
