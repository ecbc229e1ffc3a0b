#ifndef NULLITY_POLYNOMIAL_HPP
#define NULLITY_POLYNOMIAL_HPP

#include <vector>

#include <Eigen/Core>

namespace nullity {

/**
 * Characteristic polynomial det(xI - M) by Berkowitz's division-free
 * recurrence. Coefficients are returned highest degree first, so the result
 * is {1, c_1, ..., c_n}. Since no division happens, integer matrices give
 * exact integer coefficients.
 */
template <typename Derived>
std::vector<typename Derived::Scalar> charpoly(const Eigen::MatrixBase<Derived>& m) {
  using T = typename Derived::Scalar;
  const Eigen::Index n = m.rows();
  std::vector<T> poly{T(1)};
  for (Eigen::Index r = 0; r < n; ++r) {
    // Leading (r+1)x(r+1) block split as [[lead, col], [row, a]].
    const auto lead = m.topLeftCorner(r, r);
    const auto row = m.row(r).head(r);
    const auto col = m.col(r).head(r);
    std::vector<T> toeplitz(static_cast<std::size_t>(r + 2));
    toeplitz[0] = T(1);
    toeplitz[1] = -m(r, r);
    Eigen::Matrix<T, Eigen::Dynamic, 1> v = col;
    for (Eigen::Index k = 2; k < r + 2; ++k) {
      toeplitz[static_cast<std::size_t>(k)] = -row.dot(v);
      v = lead * v;
    }
    std::vector<T> next(static_cast<std::size_t>(r + 2), T(0));
    for (std::size_t i = 0; i < next.size(); ++i)
      for (std::size_t j = 0; j <= i && j < poly.size(); ++j) next[i] += toeplitz[i - j] * poly[j];
    poly = std::move(next);
  }
  return poly;
}

/// Product of two coefficient lists (highest degree first).
template <typename T>
std::vector<T> poly_multiply(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<T> out(a.size() + b.size() - 1, T(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

/// Horner evaluation, coefficients highest degree first.
template <typename T, typename X>
X poly_eval(const std::vector<T>& coeffs, X x) {
  X acc = X(0);
  for (const auto& c : coeffs) acc = acc * x + X(c);
  return acc;
}

}  // namespace nullity

#endif  // NULLITY_POLYNOMIAL_HPP
