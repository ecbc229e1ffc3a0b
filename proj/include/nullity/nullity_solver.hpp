#ifndef NULLITY_NULLITY_SOLVER_HPP
#define NULLITY_NULLITY_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nullity/lie_metric.hpp"
#include "nullity/linalg.hpp"

namespace nullity {

/**
 * The kappa-nullity membership condition
 *   R(e_i, e_j) z + kappa (<e_i, z> e_j - <e_j, z> e_i) = 0   for all i < j
 * is linear in z and affine in kappa. The stacked operator is A + kappa B.
 */
template <typename Scalar>
struct NullityPencil {
  MatrixX<Scalar> a;
  MatrixX<Scalar> b;

  MatrixX<Scalar> at(Scalar kappa) const { return a + kappa * b; }
};

template <typename Scalar>
NullityPencil<Scalar> nullity_pencil(const CurvatureData<Scalar>& curv, const MatrixX<Scalar>& metric) {
  const int n = curv.dim;
  const Eigen::Index blocks = static_cast<Eigen::Index>(n) * (n - 1) / 2;
  NullityPencil<Scalar> p{MatrixX<Scalar>::Zero(blocks * n, n), MatrixX<Scalar>::Zero(blocks * n, n)};
  Eigen::Index row = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, row += n) {
      p.a.middleRows(row, n) = curv.op(i, j);
      p.b.middleRows(row, n).row(j) += metric.row(i);
      p.b.middleRows(row, n).row(i) -= metric.row(j);
    }
  return p;
}

template <typename Scalar>
struct NullityResult {
  Scalar kappa{0};
  int index{0};
  MatrixX<Scalar> basis;  ///< columns orthonormal in the metric
  Scalar residual{0};     ///< largest discarded singular value over sigma_max
};

template <typename Scalar>
NullityResult<Scalar> nullity_index(const CurvatureData<Scalar>& curv, const MatrixX<Scalar>& metric,
                                    Scalar kappa, Scalar tol = Scalar(kRankTol)) {
  const auto split = kernel_split(nullity_pencil(curv, metric).at(kappa), tol);
  NullityResult<Scalar> out;
  out.kappa = kappa;
  out.index = static_cast<int>(split.kernel.cols());
  out.basis = orthonormalize<Scalar>(split.kernel, metric);
  out.residual = split.residual;
  return out;
}

/// Largest violation of the membership condition over frame pairs, for one vector.
template <typename Scalar>
Scalar nullity_membership_residual(const CurvatureData<Scalar>& curv, const MatrixX<Scalar>& metric,
                                   Scalar kappa, const VectorX<Scalar>& z) {
  return (nullity_pencil(curv, metric).at(kappa) * z).cwiseAbs().maxCoeff();
}

/// Orthogonal complement of the nullity in the metric (the conullity).
template <typename Scalar>
MatrixX<Scalar> conullity_basis(const NullityResult<Scalar>& nr, const MatrixX<Scalar>& metric) {
  const auto n = metric.rows();
  if (nr.index == 0) return MatrixX<Scalar>::Identity(n, n);
  const MatrixX<Scalar> constraints = (metric * nr.basis).transpose();
  return orthonormalize<Scalar>(kernel_split(constraints).kernel, metric);
}

template <typename Scalar>
struct KappaSample {
  Scalar kappa;
  Scalar sigma_min;
  int index;
};

template <typename Scalar>
struct KappaScanResult {
  std::vector<KappaSample<Scalar>> samples;
  std::vector<Scalar> detected;
  std::vector<int> detected_index;
};

namespace detail {

template <typename Scalar>
Scalar pencil_sigma_min(const NullityPencil<Scalar>& p, Scalar kappa) {
  const MatrixX<Scalar> l = p.at(kappa);
  if (l.rows() == 0) return Scalar(0);
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(l);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

template <typename Scalar, typename F>
Scalar golden_section_min(F&& f, Scalar lo, Scalar hi, Scalar width) {
  const Scalar r = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  Scalar f1 = f(x1), f2 = f(x2);
  while (hi - lo > width) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

// For an affine pencil, the kappa that best annihilates a fixed vector z is a
// one-dimensional least-squares solve; alternating it with the smallest
// right singular vector sharpens a golden-section estimate.
template <typename Scalar>
Scalar polish_kappa(const NullityPencil<Scalar>& p, Scalar kappa, int iterations = 3) {
  Scalar best = pencil_sigma_min(p, kappa);
  for (int it = 0; it < iterations; ++it) {
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(p.at(kappa), Eigen::ComputeFullV);
    const VectorX<Scalar> z = svd.matrixV().col(svd.matrixV().cols() - 1);
    const VectorX<Scalar> az = p.a * z, bz = p.b * z;
    const Scalar bb = bz.squaredNorm();
    if (bb == Scalar(0)) break;
    const Scalar cand = -az.dot(bz) / bb;
    const Scalar s = pencil_sigma_min(p, cand);
    if (!(s < best)) break;
    best = s;
    kappa = cand;
  }
  return kappa;
}

}  // namespace detail

/// Scans sigma_min of the nullity operator over `grid`, refines each local
/// minimum by golden-section search down to width 1e-10 and keeps the
/// refined kappa values whose nullity index is positive.
template <typename Scalar>
KappaScanResult<Scalar> kappa_scan(const CurvatureData<Scalar>& curv, const MatrixX<Scalar>& metric,
                                   const std::vector<Scalar>& grid, Scalar tol = Scalar(kRankTol)) {
  if (grid.empty()) throw std::invalid_argument("kappa_scan: empty grid");
  const auto pencil = nullity_pencil(curv, metric);
  KappaScanResult<Scalar> out;
  out.samples.reserve(grid.size());
  for (Scalar k : grid) {
    const auto split = kernel_split(pencil.at(k), tol);
    out.samples.push_back({k, split.sigma_min, static_cast<int>(split.kernel.cols())});
  }

  const auto sigma = [&](Scalar k) { return detail::pencil_sigma_min(pencil, k); };
  const std::size_t n = out.samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Scalar s = out.samples[i].sigma_min;
    const bool left_ok = i == 0 || s <= out.samples[i - 1].sigma_min;
    const bool right_ok = i + 1 == n || s <= out.samples[i + 1].sigma_min;
    if (!left_ok || !right_ok) continue;

    Scalar kappa = out.samples[i].kappa;
    if (n > 1) {
      const Scalar lo = out.samples[i == 0 ? 0 : i - 1].kappa;
      const Scalar hi = out.samples[i + 1 == n ? n - 1 : i + 1].kappa;
      kappa = detail::golden_section_min<Scalar>(sigma, std::min(lo, hi), std::max(lo, hi), Scalar(1e-10));
      if (sigma(out.samples[i].kappa) < sigma(kappa)) kappa = out.samples[i].kappa;
    }
    kappa = detail::polish_kappa(pencil, kappa);

    const auto nr = nullity_index(curv, metric, kappa, tol);
    if (nr.index == 0) continue;
    const bool dup = std::any_of(out.detected.begin(), out.detected.end(),
                                 [&](Scalar d) { return std::abs(d - kappa) < Scalar(1e-8); });
    if (!dup) {
      out.detected.push_back(kappa);
      out.detected_index.push_back(nr.index);
    }
  }
  return out;
}

/// Inclusive grid of `count` points on [lo, hi].
template <typename Scalar>
std::vector<Scalar> linspace(Scalar lo, Scalar hi, int count) {
  if (count < 1) throw std::invalid_argument("linspace: count must be positive");
  std::vector<Scalar> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    g[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * Scalar(i) / Scalar(count - 1);
  return g;
}

/// rho(m) = 2^c + 8d for m = odd * 2^(c + 4d), 0 <= c <= 3.
inline int radon_hurwitz(long long m) {
  if (m <= 0) throw std::invalid_argument("radon_hurwitz: m must be positive");
  int p = 0;
  while (m % 2 == 0) {
    m /= 2;
    ++p;
  }
  return (1 << (p % 4)) + 8 * (p / 4);
}

/// True iff rho(n - d) >= d + 1, i.e. a positive-kappa nullity of dimension d
/// in dimension n is not ruled out by the real-eigenvalue obstruction.
inline bool rh_obstruction_check(int n, int d) {
  if (d < 1 || d >= n) throw std::invalid_argument("rh_obstruction_check: need 1 <= d < n");
  return radon_hurwitz(n - d) >= d + 1;
}

}  // namespace nullity

#endif  // NULLITY_NULLITY_SOLVER_HPP
