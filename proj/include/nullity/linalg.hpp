#ifndef NULLITY_LINALG_HPP
#define NULLITY_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nullity {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Relative singular-value threshold used for every rank and kernel decision.
inline constexpr double kRankTol = 1e-9;

/// Thrown when a computation hits a numerically singular object
/// (non-positive metric, degenerate plane, singular Jacobi tensor, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Result of splitting a matrix into numerical range and kernel by
/// thresholding singular values at `rtol * sigma_max`.
template <typename Scalar>
struct KernelSplit {
  MatrixX<Scalar> kernel;  ///< orthonormal columns (Euclidean)
  Scalar sigma_max{0};
  Scalar sigma_min{0};     ///< smallest singular value, 0 if the matrix is wide
  Scalar residual{0};      ///< largest discarded singular value over sigma_max
  int rank{0};
};

template <typename Derived>
KernelSplit<typename Derived::Scalar> kernel_split(const Eigen::MatrixBase<Derived>& m,
                                                   typename Derived::Scalar rtol = kRankTol) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index cols = m.cols();
  KernelSplit<Scalar> out;
  if (m.rows() == 0 || cols == 0) {
    out.kernel = MatrixX<Scalar>::Identity(cols, cols);
    return out;
  }
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(m.derived(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  out.sigma_max = sv(0);
  out.sigma_min = sv.size() < cols ? Scalar(0) : sv(sv.size() - 1);
  const Scalar cut = rtol * out.sigma_max;
  int rank = 0;
  if (out.sigma_max > Scalar(0)) {
    while (rank < sv.size() && sv(rank) > cut) ++rank;
  }
  out.rank = rank;
  if (rank < sv.size() && out.sigma_max > Scalar(0)) out.residual = sv(rank) / out.sigma_max;
  out.kernel = svd.matrixV().rightCols(cols - rank);
  return out;
}

/// Orthonormal (Euclidean) basis of the column span of `m`.
template <typename Derived>
MatrixX<typename Derived::Scalar> range_basis(const Eigen::MatrixBase<Derived>& m,
                                              typename Derived::Scalar rtol = kRankTol) {
  using Scalar = typename Derived::Scalar;
  if (m.cols() == 0) return MatrixX<Scalar>(m.rows(), 0);
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(m.derived(), Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int rank = 0;
  if (sv.size() > 0 && sv(0) > Scalar(0)) {
    while (rank < sv.size() && sv(rank) > rtol * sv(0)) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

/// Orthonormalizes independent columns with respect to the Gram matrix `g`.
template <typename Scalar>
MatrixX<Scalar> orthonormalize(const MatrixX<Scalar>& basis, const MatrixX<Scalar>& g) {
  if (basis.cols() == 0) return basis;
  const MatrixX<Scalar> gram = basis.transpose() * g * basis;
  Eigen::LLT<MatrixX<Scalar>> llt(gram);
  if (llt.info() != Eigen::Success) throw NumericalError("orthonormalize: dependent columns");
  // basis * L^{-T} has identity Gram matrix.
  MatrixX<Scalar> out = llt.matrixU().template solve<Eigen::OnTheRight>(basis);
  return out;
}

/// Largest principal angle between the column spans of `u` and `w`, measured
/// in the inner product `g`. Both bases are orthonormalized first. Returns
/// pi/2 when the dimensions differ.
template <typename Scalar>
Scalar max_principal_angle(const MatrixX<Scalar>& u, const MatrixX<Scalar>& w,
                           const MatrixX<Scalar>& g) {
  if (u.cols() != w.cols()) return std::numbers::pi_v<Scalar> / 2;
  if (u.cols() == 0) return Scalar(0);
  Eigen::LLT<MatrixX<Scalar>> llt(g);
  if (llt.info() != Eigen::Success) throw NumericalError("max_principal_angle: metric not positive definite");
  const MatrixX<Scalar> lt = llt.matrixU();
  const MatrixX<Scalar> uu = lt * orthonormalize(u, g);
  const MatrixX<Scalar> ww = lt * orthonormalize(w, g);
  // sine of the largest angle is the norm of the part of uu outside span(ww)
  const MatrixX<Scalar> resid = uu - ww * (ww.transpose() * uu);
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(resid);
  const Scalar s = std::min<Scalar>(svd.singularValues()(0), Scalar(1));
  return std::asin(s);
}

/// Canonical basis vector.
template <typename Scalar>
VectorX<Scalar> unit_vector(Eigen::Index n, Eigen::Index i) {
  return VectorX<Scalar>::Unit(n, i);
}

}  // namespace nullity

#endif  // NULLITY_LINALG_HPP
