#pragma once

// Supremum-based error measures of linear position measurements.
//
// Uniform (state-independent) rms error and disturbance are the suprema of
// eps(Q, psi) and eta(P, psi) over all input states. From the closed forms,
//
//   sup eps = |d| ||Qb xi||  if c = 1,   +inf otherwise
//   sup eta = |c| ||Pb xi||  if d = 1,   +inf otherwise.
//
// The approximate-eigenstate measure Delta_c takes the supremum of the rms
// deviation D(psi, Q'; theta) of the meter from theta over states with
// ||(Q - theta) psi|| <= eps, in the limit eps -> 0. Since
// |D(psi, Q'; theta) - eps(Q, psi)| <= ||(Q - theta) psi|| it coincides with
// the uniform error, and likewise for the momentum side.
//
// Analytic suprema are ExtendedValues. The numeric sweep only reports a
// trend: a finite sweep cannot certify an infinite supremum.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edrlab/errors.hpp"
#include "edrlab/gaussian.hpp"
#include "edrlab/moments.hpp"
#include "edrlab/symplectic.hpp"

namespace edrlab {

// c = 1 and d = 1 tests in the case split, and zero tests on |d|, |c|.
inline constexpr core_real kCoefficientTolerance = 1e-12L;

class ExtendedValue {
 public:
  static ExtendedValue finite(double v) {
    if (!(v >= 0) || !std::isfinite(v))
      throw DomainError("finite extended value must be a non-negative real");
    return ExtendedValue(false, v);
  }
  static ExtendedValue infinite() { return ExtendedValue(true, 0); }

  bool is_finite() const { return !infinite_; }
  bool is_infinite() const { return infinite_; }
  bool is_zero() const { return !infinite_ && value_ == 0; }

  // +inf for Infinite.
  double value() const { return infinite_ ? HUGE_VAL : value_; }

  friend bool operator==(const ExtendedValue&, const ExtendedValue&) = default;

 private:
  ExtendedValue(bool inf, double v) : infinite_(inf), value_(v) {}
  bool infinite_;
  double value_;
};

enum class VerdictKind { Finite, Infinite, Indeterminate };

inline std::string_view to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Finite: return "finite";
    case VerdictKind::Infinite: return "infinite";
    case VerdictKind::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

struct ProductVerdict {
  VerdictKind kind = VerdictKind::Finite;
  double value = 0;  // meaningful for Finite only

  // Whether the product is at least hbar / 2; empty when indeterminate.
  std::optional<bool> satisfies(double hbar) const {
    switch (kind) {
      case VerdictKind::Finite: return value >= hbar / 2;
      case VerdictKind::Infinite: return true;
      case VerdictKind::Indeterminate: return std::nullopt;
    }
    return std::nullopt;
  }

  friend bool operator==(const ProductVerdict&, const ProductVerdict&) = default;
};

// 0 * inf stays Indeterminate; it is never folded into 0 or inf.
inline ProductVerdict multiply(const ExtendedValue& x, const ExtendedValue& y) {
  if ((x.is_zero() && y.is_infinite()) || (x.is_infinite() && y.is_zero()))
    return {VerdictKind::Indeterminate, 0};
  if (x.is_infinite() || y.is_infinite()) return {VerdictKind::Infinite, 0};
  return {VerdictKind::Finite, x.value() * y.value()};
}

namespace detail {

inline ExtendedValue scaled_norm(core_real coef, const Moments& m) {
  if (std::abs(coef) <= kCoefficientTolerance) return ExtendedValue::finite(0);
  return ExtendedValue::finite(static_cast<double>(std::abs(coef)) * std::sqrt(m.second_moment));
}

}  // namespace detail

inline ExtendedValue uniform_error(const TransferMatrix& m, const GaussianState& xi) {
  if (std::abs(m.c - 1) > kCoefficientTolerance) return ExtendedValue::infinite();
  return detail::scaled_norm(m.d, xi.position());
}

inline ExtendedValue uniform_disturbance(const TransferMatrix& m, const GaussianState& xi) {
  if (std::abs(m.d - 1) > kCoefficientTolerance) return ExtendedValue::infinite();
  return detail::scaled_norm(m.c, xi.momentum());
}

inline ProductVerdict appleby_product(const TransferMatrix& m, const GaussianState& xi) {
  return multiply(uniform_error(m, xi), uniform_disturbance(m, xi));
}

enum class Quantity { Error, Disturbance };

// A displaced ground state whose rms error (or disturbance) exceeds target:
// a finite certificate that the corresponding supremum is unbounded.
inline GaussianState divergence_witness(const TransferMatrix& m, const GaussianState& xi,
                                        double target, Quantity which, double hbar = 1.0) {
  if (!(target > 0) || !std::isfinite(target))
    throw DomainError("divergence target must be positive and finite");
  // eps^2 = ((c-1) <Q> + d <Qb>)^2 + ...,  eta^2 = ((d-1) <P> - c <Pb>)^2 + ...
  const bool error = which == Quantity::Error;
  const core_real coef = error ? m.c - 1 : m.d - 1;
  const core_real cross = error ? m.d * xi.mean_q() : -m.c * xi.mean_p();
  if (std::abs(coef) <= kCoefficientTolerance)
    throw NotDivergent(error ? "rms error does not depend on psi when c = 1"
                             : "rms disturbance does not depend on psi when d = 1");
  // Align the displacement term with the probe's cross term; positive when there is none.
  const double sign = (cross == 0 || (cross > 0) == (coef > 0)) ? 1.0 : -1.0;
  double shift = static_cast<double>((target + std::abs(cross)) / std::abs(coef)) * sign;
  for (;;) {
    const auto psi = error ? GaussianState::displaced(shift, 0, hbar)
                           : GaussianState::displaced(0, shift, hbar);
    const double value = error ? rms_error(m, psi, xi) : rms_disturbance(m, psi, xi);
    if (value > target) return psi;
    if (!std::isfinite(shift * 2)) throw DomainError("divergence target unreachable");
    shift *= 2;
  }
}

// [max over F of eps] * [max over F of eta] for a finite family F.
inline double finite_family_sup(const TransferMatrix& m, const GaussianState& xi,
                                std::span<const GaussianState> family) {
  if (family.empty()) throw ConfigError("state family must be non-empty");
  double max_eps = 0, max_eta = 0;
  for (const auto& psi : family) {
    max_eps = std::max(max_eps, rms_error(m, psi, xi));
    max_eta = std::max(max_eta, rms_disturbance(m, psi, xi));
  }
  return max_eps * max_eta;
}

// D(psi, Q'; theta) = ||(c Q + d Qb - theta) psi x xi||.
inline double blw_deviation(const TransferMatrix& m, const GaussianState& psi,
                            const GaussianState& xi, double theta) {
  const core_real mean = m.c * psi.mean_q() + m.d * xi.mean_q() - theta;
  return static_cast<double>(
      std::sqrt(mean * mean + m.c * m.c * psi.var_q() + m.d * m.d * xi.var_q()));
}

// D(psi, P'; theta) = ||(d P - c Pb - theta) psi x xi||.
inline double blw_momentum_deviation(const TransferMatrix& m, const GaussianState& psi,
                                     const GaussianState& xi, double theta) {
  const core_real mean = m.d * psi.mean_p() - m.c * xi.mean_p() - theta;
  return static_cast<double>(
      std::sqrt(mean * mean + m.d * m.d * psi.var_p() + m.c * m.c * xi.var_p()));
}

struct SweepConfig {
  // |theta| runs over scale * 10^k for k = 0 .. decades-1, both signs, with
  // scale = max(1, rms of the probe quadrature).
  int decades = 4;
  // Width ladder of approximate eigenstates, as fractions of eps_eig.
  std::vector<double> width_fractions{1.0, 0.25, 0.0625};
  // When positive, extra decades are swept until the estimate reaches this
  // bound or max_decades is hit.
  double probe_bound = 0;
  int max_decades = 12;
  // Minimum relative increase per decade that counts as growth.
  double growth_tolerance = 1e-6;

  void validate() const {
    if (decades <= 0 || width_fractions.empty()) throw ConfigError("sweep is empty");
    if (max_decades < decades) throw ConfigError("sweep max_decades must be >= decades");
    for (double f : width_fractions)
      if (!(f > 0) || f > 1) throw ConfigError("sweep width fractions must lie in (0, 1]");
    if (!(growth_tolerance >= 0)) throw ConfigError("sweep growth tolerance must be >= 0");
  }
};

enum class Trend { Converged, Diverging };

inline std::string_view to_string(Trend t) {
  return t == Trend::Converged ? "converged" : "diverging";
}

struct SupremumEstimate {
  double value = 0;      // largest deviation found
  double sweep_max = 0;  // largest |theta| probed
  Trend trend = Trend::Converged;
  std::vector<double> decade_values;  // per-decade maxima, increasing |theta|
};

namespace detail {

template <class Probe>
SupremumEstimate sweep_approximate_eigenstates(double scale, double eps_eig,
                                               const SweepConfig& sweep, Probe probe) {
  sweep.validate();
  if (!(eps_eig > 0) || !std::isfinite(eps_eig))
    throw DomainError("approximate-eigenstate tolerance must be positive");
  SupremumEstimate est;
  for (int k = 0; k < sweep.max_decades; ++k) {
    const double magnitude = scale * std::pow(10.0, k);
    double decade_max = 0;
    for (double sign : {1.0, -1.0})
      for (double f : sweep.width_fractions)
        decade_max = std::max(decade_max, probe(sign * magnitude, f * eps_eig));
    est.decade_values.push_back(decade_max);
    est.value = std::max(est.value, decade_max);
    est.sweep_max = magnitude;
    if (k + 1 >= sweep.decades && (sweep.probe_bound <= 0 || est.value >= sweep.probe_bound))
      break;
  }
  const auto& v = est.decade_values;
  const std::size_t n = v.size();
  const double grow = 1 + sweep.growth_tolerance;
  est.trend = (n >= 3 && v[n - 2] > v[n - 3] * grow && v[n - 1] > v[n - 2] * grow)
                  ? Trend::Diverging
                  : Trend::Converged;
  return est;
}

}  // namespace detail

// Delta_c(Q, Q'; eps) estimated over narrow Gaussians centred at theta. For
// such a state ||(Q - theta) psi|| is exactly its position spread.
inline SupremumEstimate blw_delta_c_estimate(const TransferMatrix& m, const GaussianState& xi,
                                             double eps_eig, const SweepConfig& sweep = {},
                                             double hbar = 1.0) {
  const double scale = std::max(1.0, std::sqrt(xi.position().second_moment));
  return detail::sweep_approximate_eigenstates(scale, eps_eig, sweep, [&](double theta, double w) {
    const auto psi = GaussianState::make(theta, 0, w * w, hbar * hbar / (4 * w * w), 0, hbar);
    return blw_deviation(m, psi, xi, theta);
  });
}

inline SupremumEstimate blw_delta_c_disturbance_estimate(const TransferMatrix& m,
                                                         const GaussianState& xi, double eps_eig,
                                                         const SweepConfig& sweep = {},
                                                         double hbar = 1.0) {
  const double scale = std::max(1.0, std::sqrt(xi.momentum().second_moment));
  return detail::sweep_approximate_eigenstates(scale, eps_eig, sweep, [&](double theta, double w) {
    const auto psi = GaussianState::make(0, theta, hbar * hbar / (4 * w * w), w * w, 0, hbar);
    return blw_momentum_deviation(m, psi, xi, theta);
  });
}

// Delta_c(Q, Q') from the eps -> 0 limit of the approximate-eigenstate
// supremum: D^2 = ((c-1) theta + d <Qb>)^2 + c^2 w^2 + d^2 var(Qb) is
// unbounded in theta unless c = 1, when it tends to d^2 <Qb^2>.
inline ExtendedValue blw_delta_c_position(const TransferMatrix& m, const GaussianState& xi) {
  if (std::abs(m.c - 1) > kCoefficientTolerance) return ExtendedValue::infinite();
  if (std::abs(m.d) <= kCoefficientTolerance) return ExtendedValue::finite(0);
  const double mean = xi.mean_q();
  return ExtendedValue::finite(static_cast<double>(std::abs(m.d)) *
                               std::sqrt(mean * mean + xi.var_q()));
}

inline ExtendedValue blw_delta_c_momentum(const TransferMatrix& m, const GaussianState& xi) {
  if (std::abs(m.d - 1) > kCoefficientTolerance) return ExtendedValue::infinite();
  if (std::abs(m.c) <= kCoefficientTolerance) return ExtendedValue::finite(0);
  const double mean = xi.mean_p();
  return ExtendedValue::finite(static_cast<double>(std::abs(m.c)) *
                               std::sqrt(mean * mean + xi.var_p()));
}

inline ProductVerdict blw_product_verdict(const TransferMatrix& m, const GaussianState& xi) {
  return multiply(blw_delta_c_position(m, xi), blw_delta_c_momentum(m, xi));
}

}  // namespace edrlab
