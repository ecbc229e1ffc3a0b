#ifndef NULLITY_SPLITTING_FLOW_HPP
#define NULLITY_SPLITTING_FLOW_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "nullity/linalg.hpp"
#include "nullity/polynomial.hpp"

namespace nullity {

/// Thrown when the Jacobi tensor J0(t) is singular, i.e. the splitting
/// tensor blows up at time t.
class SingularityError : public NumericalError {
 public:
  explicit SingularityError(double t)
      : NumericalError("splitting tensor singular at t = " + std::to_string(t)), t_(t) {}
  double t() const { return t_; }

 private:
  double t_;
};

/// Splitting tensor C0 = C_{gamma'(0)} on the conullity together with the
/// nullity curvature kappa. Along the nullity geodesic C solves
/// C' = C^2 + kappa I with the closed form C(t) = -J0'(t) J0(t)^{-1}.
template <typename Scalar>
struct SplittingState {
  Scalar kappa;
  MatrixX<Scalar> c0;

  SplittingState(Scalar kappa_, MatrixX<Scalar> c0_) : kappa(kappa_), c0(std::move(c0_)) {
    if (c0.rows() < 1 || c0.rows() != c0.cols())
      throw std::invalid_argument("SplittingState: C0 must be square and nonempty");
    if (!c0.allFinite()) throw std::invalid_argument("SplittingState: C0 has non-finite entries");
  }

  Eigen::Index conullity() const { return c0.rows(); }
};

namespace detail {

// J0(t) = f(t) I - g(t) C0 with scalar coefficient functions; returns
// {f, g, f', g'}.
template <typename Scalar>
std::array<Scalar, 4> jacobi_coefficients(Scalar kappa, Scalar t) {
  if (kappa > Scalar(0)) {
    const Scalar s = std::sqrt(kappa);
    return {std::cos(s * t), std::sin(s * t) / s, -s * std::sin(s * t), std::cos(s * t)};
  }
  if (kappa < Scalar(0)) {
    const Scalar s = std::sqrt(-kappa);
    return {std::cosh(s * t), std::sinh(s * t) / s, s * std::sinh(s * t), std::cosh(s * t)};
  }
  return {Scalar(1), t, Scalar(0), Scalar(1)};
}

}  // namespace detail

template <typename Scalar>
MatrixX<Scalar> j0_matrix(const SplittingState<Scalar>& state, Scalar t) {
  const auto [f, g, df, dg] = detail::jacobi_coefficients(state.kappa, t);
  const auto k = state.conullity();
  return f * MatrixX<Scalar>::Identity(k, k) - g * state.c0;
}

template <typename Scalar>
MatrixX<Scalar> j0_derivative(const SplittingState<Scalar>& state, Scalar t) {
  const auto [f, g, df, dg] = detail::jacobi_coefficients(state.kappa, t);
  const auto k = state.conullity();
  return df * MatrixX<Scalar>::Identity(k, k) - dg * state.c0;
}

inline constexpr double kSingularRcond = 1e-12;

/// C(t) = -J0'(t) J0(t)^{-1}.
template <typename Scalar>
MatrixX<Scalar> splitting_at(const SplittingState<Scalar>& state, Scalar t) {
  const MatrixX<Scalar> j = j0_matrix(state, t);
  Eigen::PartialPivLU<MatrixX<Scalar>> lu(j);
  if (!(lu.rcond() > Scalar(kSingularRcond))) throw SingularityError(static_cast<double>(t));
  // J0 and J0' are both affine in C0, so they commute.
  return lu.solve(MatrixX<Scalar>(-j0_derivative(state, t)));
}

/// Sup-norm of the central-difference defect of C' = C^2 + kappa I.
template <typename Scalar>
Scalar riccati_residual(const SplittingState<Scalar>& state, Scalar t, Scalar h) {
  const MatrixX<Scalar> cp = splitting_at(state, t + h);
  const MatrixX<Scalar> cm = splitting_at(state, t - h);
  const MatrixX<Scalar> c = splitting_at(state, t);
  const auto k = state.conullity();
  const MatrixX<Scalar> defect =
      (cp - cm) / (Scalar(2) * h) - (c * c + state.kappa * MatrixX<Scalar>::Identity(k, k));
  return defect.cwiseAbs().maxCoeff();
}

/// Eigenvalues of C0 that are real up to a relative imaginary part of 1e-6
/// (defective real eigenvalues split into tiny complex pairs numerically).
template <typename Scalar>
std::vector<Scalar> real_eigenvalues(const MatrixX<Scalar>& c0) {
  Eigen::EigenSolver<MatrixX<Scalar>> es(c0, false);
  std::vector<Scalar> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto ev = es.eigenvalues()(i);
    if (std::abs(ev.imag()) <= Scalar(1e-6) * std::max<Scalar>(Scalar(1), std::abs(ev.real())))
      out.push_back(ev.real());
  }
  return out;
}

/// All t in [t_lo, t_hi] where det J0(t) = 0, sorted. Only real eigenvalues
/// of C0 contribute: for a real eigenvalue lambda the factor of det J0 is
///   kappa = 0:  1 - t lambda
///   kappa < 0:  cosh(s t) - sinh(s t) lambda / s,  s = sqrt(-kappa)
///   kappa > 0:  cos(s t)  - sin(s t)  lambda / s,  s = sqrt(kappa)
/// and a nonreal pair never vanishes.
template <typename Scalar>
std::vector<Scalar> singular_times(const SplittingState<Scalar>& state, Scalar t_lo, Scalar t_hi) {
  std::vector<Scalar> out;
  const Scalar kappa = state.kappa;
  for (Scalar lambda : real_eigenvalues(state.c0)) {
    if (kappa == Scalar(0)) {
      if (lambda != Scalar(0)) out.push_back(Scalar(1) / lambda);
    } else if (kappa < Scalar(0)) {
      const Scalar s = std::sqrt(-kappa);
      // |lambda| = s gives an exponential factor; the tolerance keeps
      // rounding noise in a unit eigenvalue from producing a far-off root.
      if (std::abs(lambda) > s * (Scalar(1) + Scalar(1e-8))) out.push_back(std::atanh(s / lambda) / s);
    } else {
      const Scalar s = std::sqrt(kappa);
      const Scalar pi = std::numbers::pi_v<Scalar>;
      const Scalar base = std::atan2(s, lambda) / s;  // first positive root
      const Scalar period = pi / s;
      const Scalar first = base + std::ceil((t_lo - base) / period) * period;
      for (Scalar t = first; t <= t_hi; t += period) out.push_back(t);
      continue;
    }
  }
  out.erase(std::remove_if(out.begin(), out.end(), [&](Scalar t) { return t < t_lo || t > t_hi; }),
            out.end());
  std::sort(out.begin(), out.end());
  return out;
}

/// Smallest t > 0 with det J0(t) = 0, or nothing if the splitting tensor stays
/// finite for all forward time. The closed-form roots are cross-checked by a
/// sign scan of det J0 on a guard grid; an earlier sign change wins.
template <typename Scalar>
std::optional<Scalar> first_singularity(const SplittingState<Scalar>& state) {
  const Scalar scale = state.kappa == Scalar(0) ? Scalar(1) : std::sqrt(std::abs(state.kappa));
  const Scalar horizon = Scalar(50) / scale;
  std::optional<Scalar> best;
  for (Scalar t : singular_times(state, Scalar(0), horizon))
    if (t > Scalar(0)) {
      best = t;
      break;
    }
  if (!best && state.kappa <= Scalar(0)) {
    // kappa <= 0 roots are unique per eigenvalue; a root past the horizon is
    // still the answer.
    for (Scalar t : singular_times(state, Scalar(0), std::numeric_limits<Scalar>::max()))
      if (t > Scalar(0)) {
        best = t;
        break;
      }
  }

  const auto det = [&](Scalar t) { return j0_matrix(state, t).determinant(); };
  // Below this floor the computed det is dominated by cancellation in f - g lambda.
  const Scalar c_norm = state.c0.cwiseAbs().rowwise().sum().maxCoeff();
  const auto noise = [&](Scalar t) {
    const auto fg = detail::jacobi_coefficients(state.kappa, t);
    return Scalar(1e-10) * std::pow(std::abs(fg[0]) + std::abs(fg[1]) * c_norm, Scalar(state.c0.rows()));
  };
  const bool end_is_root = best && *best <= horizon;
  const Scalar end = end_is_root ? *best : horizon;
  const int steps = 4000;
  Scalar prev_t = 0, prev = det(Scalar(0));
  for (int i = 1; i <= steps; ++i) {
    const Scalar t = end * Scalar(i) / Scalar(steps);
    const Scalar d = det(t);
    const bool resolvable = std::max(std::abs(d), std::abs(prev)) > noise(t);
    if ((i < steps || !end_is_root) && resolvable && (d == Scalar(0) || (d < Scalar(0)) != (prev < Scalar(0)))) {
      Scalar lo = prev_t, hi = t;
      for (int it = 0; it < 200 && hi - lo > Scalar(1e-15) * std::max<Scalar>(Scalar(1), hi); ++it) {
        const Scalar mid = (lo + hi) / Scalar(2);
        if ((det(mid) < Scalar(0)) == (prev < Scalar(0))) lo = mid; else hi = mid;
      }
      return (lo + hi) / Scalar(2);
    }
    prev_t = t;
    prev = d;
  }
  return best;
}

/// Asymptotics of tr C(t) for the kappa = -1 flow, through the polynomials
///   Q(xi) = sum_j (-1)^j sigma_j xi^j = det(I - xi C0),
///   P(xi) = sum_j (-1)^j [(m - j) xi^{j+1} + j xi^{j-1}] sigma_j,
/// with tr C(t) = -P(tanh t) / Q(tanh t).
template <typename Scalar>
struct TraceLimitReport {
  int m{0};
  std::vector<Scalar> sigma;  ///< sigma_0 .. sigma_m
  int k_plus{0};
  int k_minus{0};
  std::optional<Scalar> limit_plus;   ///< -(m - 2 k_plus), absent past a forward singularity
  std::optional<Scalar> limit_minus;  ///< m - 2 k_minus, absent past a backward singularity
  std::optional<Scalar> forward_singularity;
  std::optional<Scalar> backward_singularity;
  Scalar identity_residual{0};  ///< max |tr C(t) + P/Q| over the sampled t-grid
  std::vector<std::string> flags;
};

namespace detail {

// P and Q both vanish to high order at xi = +-1, so they are evaluated in
// extended precision.
template <typename Scalar>
using Wide = std::conditional_t<(sizeof(Scalar) < sizeof(long double)), long double, Scalar>;

}  // namespace detail

template <typename Scalar>
Scalar trace_q(const std::vector<Scalar>& sigma, Scalar xi) {
  using W = detail::Wide<Scalar>;
  W acc = 0, p = 1;
  for (std::size_t j = 0; j < sigma.size(); ++j, p *= W(xi)) acc += (j % 2 ? W(-1) : W(1)) * p * W(sigma[j]);
  return static_cast<Scalar>(acc);
}

template <typename Scalar>
Scalar trace_p(const std::vector<Scalar>& sigma, Scalar xi) {
  using W = detail::Wide<Scalar>;
  const int m = static_cast<int>(sigma.size()) - 1;
  const W x = xi;
  W acc = 0;
  for (int j = 0; j <= m; ++j) {
    const W sign = j % 2 ? W(-1) : W(1);
    W term = W(m - j) * std::pow(x, j + 1);
    if (j > 0) term += W(j) * std::pow(x, j - 1);
    acc += sign * term * W(sigma[static_cast<std::size_t>(j)]);
  }
  return static_cast<Scalar>(acc);
}

template <typename Scalar>
Scalar trace_ratio(const std::vector<Scalar>& sigma, Scalar t) {
  const Scalar xi = std::tanh(t);
  return -trace_p(sigma, xi) / trace_q(sigma, xi);
}

inline constexpr double kUnitEigenTol = 1e-8;

template <typename Scalar>
TraceLimitReport<Scalar> trace_limits(const MatrixX<Scalar>& c0, Scalar t_max = Scalar(5), int samples = 201) {
  if (c0.rows() < 1 || c0.rows() != c0.cols()) throw std::invalid_argument("trace_limits: C0 must be square");
  TraceLimitReport<Scalar> r;
  r.m = static_cast<int>(c0.rows());

  // charpoly coefficients are (-1)^j sigma_j
  const auto cp = charpoly(c0);
  r.sigma.resize(cp.size());
  for (std::size_t j = 0; j < cp.size(); ++j) r.sigma[j] = (j % 2 ? -cp[j] : cp[j]);

  Eigen::EigenSolver<MatrixX<Scalar>> es(c0, false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto ev = es.eigenvalues()(i);
    if (std::abs(ev - std::complex<Scalar>(1, 0)) <= Scalar(kUnitEigenTol)) ++r.k_plus;
    else if (std::abs(ev - std::complex<Scalar>(-1, 0)) <= Scalar(kUnitEigenTol)) ++r.k_minus;
    else if (ev.imag() > Scalar(kUnitEigenTol) &&
             std::abs(std::abs(ev.real()) - Scalar(1)) <= Scalar(kUnitEigenTol))
      r.flags.push_back("eigenvalue with real part +-1 and nonzero imaginary part");
  }

  const SplittingState<Scalar> fwd(Scalar(-1), c0);
  const SplittingState<Scalar> bwd(Scalar(-1), MatrixX<Scalar>(-c0));
  r.forward_singularity = first_singularity(fwd);
  if (const auto b = first_singularity(bwd)) r.backward_singularity = -*b;
  if (!r.forward_singularity) r.limit_plus = Scalar(2 * r.k_plus - r.m);
  if (!r.backward_singularity) r.limit_minus = Scalar(r.m - 2 * r.k_minus);
  if (r.forward_singularity) r.flags.push_back("forward singularity: no limit at +infinity");
  if (r.backward_singularity) r.flags.push_back("backward singularity: no limit at -infinity");

  for (int i = 0; i < samples; ++i) {
    const Scalar t = samples == 1 ? Scalar(0) : -t_max + Scalar(2) * t_max * Scalar(i) / Scalar(samples - 1);
    MatrixX<Scalar> c;
    try {
      c = splitting_at(fwd, t);
    } catch (const SingularityError&) {
      continue;
    }
    const Scalar q = trace_q(r.sigma, std::tanh(t));
    if (q == Scalar(0)) continue;
    r.identity_residual = std::max(r.identity_residual, std::abs(c.trace() - trace_ratio(r.sigma, t)));
  }
  return r;
}

/// det J0(t) for a 2x2 splitting tensor in closed form:
///   kappa = 0: 1 - tr(C0) t + det(C0) t^2
///   kappa < 0: 1/2 (1 + det/kappa) + 1/4 (1 - det/kappa - tr/s) e^{2st}
///              + 1/4 (1 - det/kappa + tr/s) e^{-2st},  s = sqrt(-kappa)
template <typename Scalar>
Scalar det_j0_closed_form(Scalar kappa, const MatrixX<Scalar>& c0, Scalar t) {
  if (c0.rows() != 2 || c0.cols() != 2) throw std::invalid_argument("det_j0_closed_form: C0 must be 2x2");
  const Scalar tr = c0.trace(), det = c0.determinant();
  if (kappa == Scalar(0)) return Scalar(1) - tr * t + det * t * t;
  if (kappa < Scalar(0)) {
    const Scalar s = std::sqrt(-kappa);
    return (Scalar(1) + det / kappa) / Scalar(2) +
           (Scalar(1) - det / kappa - tr / s) * std::exp(Scalar(2) * s * t) / Scalar(4) +
           (Scalar(1) - det / kappa + tr / s) * std::exp(-Scalar(2) * s * t) / Scalar(4);
  }
  throw std::invalid_argument("det_j0_closed_form: kappa must be <= 0");
}

/// Sectional curvature of the conullity plane along the nullity geodesic:
/// K_D(t) - kappa = (K_D(0) - kappa) / |det J0(t)|.
template <typename Scalar>
Scalar conullity2_evolution(Scalar kd0, Scalar kappa, const MatrixX<Scalar>& c0, Scalar t) {
  if (kappa > Scalar(0)) throw std::invalid_argument("conullity2_evolution: kappa must be <= 0");
  const Scalar d = det_j0_closed_form(kappa, c0, t);
  if (!(std::abs(d) > Scalar(1e-12))) throw SingularityError(static_cast<double>(t));
  return kappa + (kd0 - kappa) / std::abs(d);
}

template <typename Scalar>
struct BlowupEstimate {
  Scalar bound;           ///< (pi/2 - atan(beta0/delta)) / delta
  Scalar numeric_blowup;  ///< escape time of beta' = delta^2 + beta^2 past the threshold
  int steps{0};
};

inline constexpr double kEscapeThreshold = 1e8;

/// Compares the arctan bound on the blow-up time of beta' >= delta^2 + beta^2
/// with an adaptive Dormand-Prince 5(4) integration of the equality case.
template <typename Scalar>
BlowupEstimate<Scalar> scalar_riccati_blowup(Scalar beta0, Scalar delta, Scalar rtol = Scalar(1e-10)) {
  if (!(delta > Scalar(0))) throw std::invalid_argument("scalar_riccati_blowup: delta must be positive");
  const Scalar pi = std::numbers::pi_v<Scalar>;
  BlowupEstimate<Scalar> out{(pi / 2 - std::atan(beta0 / delta)) / delta, Scalar(0), 0};
  const Scalar escape = Scalar(kEscapeThreshold);
  if (std::abs(beta0) > escape) return out;

  const Scalar d2 = delta * delta;
  const auto f = [d2](Scalar y) { return d2 + y * y; };

  // Dormand-Prince tableau
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  Scalar t = 0, y = beta0;
  Scalar h = Scalar(1e-3) * std::min<Scalar>(Scalar(1), out.bound);
  Scalar k1 = f(y);
  for (int iter = 0; iter < 1000000; ++iter) {
    const Scalar k2 = f(y + h * Scalar(a21) * k1);
    const Scalar k3 = f(y + h * (Scalar(a31) * k1 + Scalar(a32) * k2));
    const Scalar k4 = f(y + h * (Scalar(a41) * k1 + Scalar(a42) * k2 + Scalar(a43) * k3));
    const Scalar k5 = f(y + h * (Scalar(a51) * k1 + Scalar(a52) * k2 + Scalar(a53) * k3 + Scalar(a54) * k4));
    const Scalar k6 = f(y + h * (Scalar(a61) * k1 + Scalar(a62) * k2 + Scalar(a63) * k3 + Scalar(a64) * k4 +
                                 Scalar(a65) * k5));
    const Scalar yn = y + h * (Scalar(b1) * k1 + Scalar(b3) * k3 + Scalar(b4) * k4 + Scalar(b5) * k5 +
                               Scalar(b6) * k6);
    const Scalar k7 = f(yn);
    const Scalar err = std::abs(h * (Scalar(e1) * k1 + Scalar(e3) * k3 + Scalar(e4) * k4 + Scalar(e5) * k5 +
                                     Scalar(e6) * k6 + Scalar(e7) * k7));
    const Scalar sc = Scalar(1e-14) + rtol * std::max(std::abs(y), std::abs(yn));
    const Scalar ratio = std::isfinite(err) ? err / sc : std::numeric_limits<Scalar>::infinity();
    if (ratio <= Scalar(1)) {
      ++out.steps;
      if (std::abs(yn) > escape) {
        // near the pole 1/beta is close to linear in t
        const Scalar u0 = Scalar(1) / y, u1 = Scalar(1) / yn, ue = std::copysign(Scalar(1) / escape, yn);
        const Scalar frac = (u0 == u1) ? Scalar(1) : std::clamp((u0 - ue) / (u0 - u1), Scalar(0), Scalar(1));
        out.numeric_blowup = t + frac * h;
        return out;
      }
      t += h;
      y = yn;
      k1 = k7;
    }
    const Scalar fac = ratio == Scalar(0) ? Scalar(5)
                                          : std::clamp(Scalar(0.9) * std::pow(ratio, Scalar(-0.2)), Scalar(0.2),
                                                       Scalar(5));
    h *= fac;
  }
  throw NumericalError("scalar_riccati_blowup: step limit reached");
}

}  // namespace nullity

#endif  // NULLITY_SPLITTING_FLOW_HPP
