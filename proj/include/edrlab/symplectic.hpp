#pragma once

// Exact Heisenberg-picture dynamics of the linear position measurement
//
//   H(alpha, beta, gamma) = alpha (Q P - Qb Pb) + beta Qb P + gamma Q Pb
//
// acting for unit coupling time (K * dt = 1). The object/probe positions
// transform as
//
//   Q(dt)  = a Q(0) + b Qb(0),     Qb(dt) = c Q(0) + d Qb(0),
//   P(dt)  = d P(0) - c Pb(0),     Pb(dt) = -b P(0) + a Pb(0),
//
// with [[a, b], [c, d]] = exp([[alpha, beta], [gamma, -alpha]]), ad - bc = 1.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <numbers>
#include <string>
#include <string_view>

#include "edrlab/errors.hpp"

namespace edrlab {

// Working precision of the coupling dynamics. Entries of the transfer
// matrix reach ~10^3 for couplings of order 5; rounding those to double
// leaves |ad - bc - 1| around 1e-10, so the core runs in extended precision.
using core_real = long double;

// |alpha^2 + beta gamma| at or below this is treated as the nilpotent case.
inline constexpr core_real kRegimeTolerance = 1e-12L;

// Below this |alpha^2 + beta gamma| the propagator weights use their Taylor
// series rather than sin(D)/D, sinh(E)/E.
inline constexpr core_real kSeriesThreshold = 1e-4L;

struct CouplingParams {
  // The coupling constant and duration enter only through K * dt, fixed to 1.
  static constexpr double kCouplingTime = 1.0;

  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double hbar = 1.0;

  CouplingParams() = default;
  CouplingParams(double alpha_, double beta_, double gamma_, double hbar_ = 1.0)
      : alpha(alpha_), beta(beta_), gamma(gamma_), hbar(hbar_) {
    validate();
  }

  void validate() const {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma))
      throw DomainError("coupling parameters must be finite");
    if (!std::isfinite(hbar) || hbar <= 0.0)
      throw DomainError("hbar must be positive and finite");
  }

  // alpha^2 + beta gamma, evaluated in core precision.
  core_real discriminant() const {
    const core_real a = alpha, b = beta, g = gamma;
    return a * a + b * g;
  }

  friend bool operator==(const CouplingParams&, const CouplingParams&) = default;
};

template <std::floating_point T>
struct BasicTransferMatrix {
  T a = 1;
  T b = 0;
  T c = 0;
  T d = 1;

  T determinant() const { return a * d - b * c; }
  T det_residual() const { return std::abs(determinant() - T(1)); }

  template <std::floating_point U>
  BasicTransferMatrix<U> as() const {
    return {static_cast<U>(a), static_cast<U>(b), static_cast<U>(c), static_cast<U>(d)};
  }

  friend bool operator==(const BasicTransferMatrix&, const BasicTransferMatrix&) = default;
};

using TransferMatrix = BasicTransferMatrix<core_real>;

template <std::floating_point T, std::floating_point U>
T max_coefficient_gap(const BasicTransferMatrix<T>& x, const BasicTransferMatrix<U>& y) {
  return std::max({std::abs(x.a - static_cast<T>(y.a)), std::abs(x.b - static_cast<T>(y.b)),
                   std::abs(x.c - static_cast<T>(y.c)), std::abs(x.d - static_cast<T>(y.d))});
}

enum class RegimeTag { Nilpotent, Elliptic, Hyperbolic };

inline std::string_view to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::Nilpotent: return "nilpotent";
    case RegimeTag::Elliptic: return "elliptic";
    case RegimeTag::Hyperbolic: return "hyperbolic";
  }
  return "unknown";
}

inline RegimeTag regime_from_string(std::string_view s) {
  if (s == "nilpotent") return RegimeTag::Nilpotent;
  if (s == "elliptic") return RegimeTag::Elliptic;
  if (s == "hyperbolic") return RegimeTag::Hyperbolic;
  throw ParseError("unknown regime '" + std::string(s) + "'");
}

struct Regime {
  RegimeTag tag = RegimeTag::Nilpotent;
  core_real discriminant = 0;
};

inline Regime classify_regime(const CouplingParams& p) {
  const core_real disc = p.discriminant();
  if (std::abs(disc) <= kRegimeTolerance) return {RegimeTag::Nilpotent, disc};
  return {disc < 0 ? RegimeTag::Elliptic : RegimeTag::Hyperbolic, disc};
}

namespace detail {

// exp(M) = diagonal * I + scale * M for M^2 = disc * I. Both weights are
// entire functions of disc:
//   scale    = sum disc^k / (2k+1)!   (sin D / D or sinh E / E)
//   diagonal = sum disc^k / (2k)!     (cos D or cosh E)
template <std::floating_point T>
struct PropagatorWeights {
  T scale;
  T diagonal;
};

template <std::floating_point T>
PropagatorWeights<T> series_weights(T disc) {
  // Five terms; the first neglected term is below 1e-27 for |disc| < 1e-4.
  const T x = disc;
  const T scale = T(1) + x / 6 * (T(1) + x / 20 * (T(1) + x / 42 * (T(1) + x / 72)));
  const T diagonal = T(1) + x / 2 * (T(1) + x / 12 * (T(1) + x / 30 * (T(1) + x / 56)));
  return {scale, diagonal};
}

template <std::floating_point T>
PropagatorWeights<T> elliptic_weights(T disc) {
  if (std::abs(disc) < T(kSeriesThreshold)) return series_weights(disc);
  const T D = std::sqrt(-disc);
  return {std::sin(D) / D, std::cos(D)};
}

template <std::floating_point T>
PropagatorWeights<T> hyperbolic_weights(T disc) {
  if (std::abs(disc) < T(kSeriesThreshold)) return series_weights(disc);
  const T E = std::sqrt(disc);
  return {std::sinh(E) / E, std::cosh(E)};
}

template <std::floating_point T>
BasicTransferMatrix<T> assemble(const CouplingParams& p, PropagatorWeights<T> w) {
  const T alpha = p.alpha, beta = p.beta, gamma = p.gamma;
  return {w.diagonal + w.scale * alpha, w.scale * beta, w.scale * gamma,
          w.diagonal - w.scale * alpha};
}

}  // namespace detail

// Evaluates one regime's closed form regardless of how the parameters
// classify. Elliptic requires alpha^2 + beta gamma <= 0 and hyperbolic >= 0;
// the nilpotent form (M + I) ignores the discriminant. Used to study the
// agreement of the three formulas near the regime boundary.
template <std::floating_point T = core_real>
BasicTransferMatrix<T> regime_formula(const CouplingParams& p, RegimeTag tag) {
  p.validate();
  const T disc = static_cast<T>(p.discriminant());
  switch (tag) {
    case RegimeTag::Nilpotent:
      return detail::assemble<T>(p, {T(1), T(1)});
    case RegimeTag::Elliptic:
      if (disc > 0) throw DomainError("elliptic formula needs alpha^2 + beta gamma <= 0");
      return detail::assemble<T>(p, detail::elliptic_weights(disc));
    case RegimeTag::Hyperbolic:
      if (disc < 0) throw DomainError("hyperbolic formula needs alpha^2 + beta gamma >= 0");
      return detail::assemble<T>(p, detail::hyperbolic_weights(disc));
  }
  throw DomainError("unknown regime");
}

template <std::floating_point T = core_real>
BasicTransferMatrix<T> solve_dynamics(const CouplingParams& p) {
  return regime_formula<T>(p, classify_regime(p).tag);
}

// Omega(a): the interaction strength that realises the error-free matrix
// (a, -1, 1, 0) through H(a) = Omega(a) [a/2 (QP - Qb Pb) - Qb P + Q Pb].
//
//   arccos(a/2)  / sqrt(1 - (a/2)^2)   -2 < a < 2
//   1                                  a = 2
//   arccosh(a/2) / sqrt((a/2)^2 - 1)   a > 2
template <std::floating_point T = core_real>
T omega(T a) {
  if (!std::isfinite(a) || a <= T(-2)) throw DomainError("omega(a) requires finite a > -2");
  const T x = a / 2;
  if (x == T(1)) return T(1);
  if (x < T(1)) {
    // arccos(x) = 2 asin(sqrt((1-x)/2)) keeps full relative accuracy near x = 1.
    const T angle = 2 * std::asin(std::sqrt((T(1) - x) / 2));
    return angle / std::sqrt((T(1) - x) * (T(1) + x));
  }
  const T root = std::sqrt((x - T(1)) * (x + T(1)));
  // log(x + sqrt(x^2 - 1)) written through log1p for accuracy near x = 1.
  return std::log1p((x - T(1)) + root) / root;
}

inline void require_error_free_domain(double a) {
  if (!std::isfinite(a) || a <= -2.0)
    throw DomainError("error-free family is defined for a > -2 (got " + std::to_string(a) + ")");
}

// Coupling triple whose solved dynamics is (a, -1, 1, 0).
inline CouplingParams error_free_params(double a, double hbar = 1.0) {
  require_error_free_domain(a);
  const double w = static_cast<double>(omega<core_real>(a));
  return CouplingParams(w * a / 2, -w, w, hbar);
}

// The exact error-free constraint matrix b = -1, c = 1, d = 0.
inline TransferMatrix error_free_matrix(double a) {
  require_error_free_domain(a);
  return {static_cast<core_real>(a), -1, 1, 0};
}

struct SharpBound {
  double value = 0;             // |1 - c - d| hbar / 2
  bool full_heisenberg = false;  // c + d <= 0 or c + d >= 2
};

// [(c-1) Q + d Qb, (d-1) P - c Pb] = (1 - c - d) i hbar, so the Schwarz
// inequality bounds eps * eta from below by |1 - c - d| hbar / 2.
inline SharpBound heisenberg_bound(const TransferMatrix& m, double hbar) {
  const core_real sum = m.c + m.d;
  return {static_cast<double>(std::abs(1 - sum) * hbar / 2), sum <= 0 || sum >= 2};
}

inline bool is_error_free(const TransferMatrix& m, core_real tol) {
  return std::abs(m.b + 1) <= tol && std::abs(m.c - 1) <= tol && std::abs(m.d) <= tol;
}

}  // namespace edrlab
