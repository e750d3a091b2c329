#pragma once

// Closed-form root-mean-square error and disturbance for product input
// states psi (object) and xi (probe):
//
//   eps(Q, psi)^2 = || [(c-1) Q + d Qb] psi x xi ||^2
//   eta(P, psi)^2 = || [(d-1) P - c Pb] psi x xi ||^2
//
// Each is the squared mean of the combined operator plus its variance. The
// product form makes the cross-covariance vanish, so only single-quadrature
// moments of psi and xi enter.

#include <cmath>

#include "edrlab/gaussian.hpp"
#include "edrlab/symplectic.hpp"

namespace edrlab {

namespace detail {

// <(u X + v Y)^2> for independent X, Y.
inline core_real combined_square(core_real u, core_real v, double mean_x, double var_x,
                                 double mean_y, double var_y) {
  const core_real mean = u * mean_x + v * mean_y;
  return mean * mean + u * u * var_x + v * v * var_y;
}

inline core_real error_square(const TransferMatrix& m, const GaussianState& psi,
                              const GaussianState& xi) {
  return combined_square(m.c - 1, m.d, psi.mean_q(), psi.var_q(), xi.mean_q(), xi.var_q());
}

inline core_real disturbance_square(const TransferMatrix& m, const GaussianState& psi,
                                    const GaussianState& xi) {
  return combined_square(m.d - 1, -m.c, psi.mean_p(), psi.var_p(), xi.mean_p(), xi.var_p());
}

}  // namespace detail

inline double rms_error(const TransferMatrix& m, const GaussianState& psi,
                        const GaussianState& xi) {
  return static_cast<double>(std::sqrt(detail::error_square(m, psi, xi)));
}

inline double rms_disturbance(const TransferMatrix& m, const GaussianState& psi,
                              const GaussianState& xi) {
  return static_cast<double>(std::sqrt(detail::disturbance_square(m, psi, xi)));
}

// Disturbance of every error-free model (b = -1, c = 1, d = 0): P(dt) = -Pb(0),
// so eta^2 = sigma(P)^2 + sigma(Pb)^2 + (<P> + <Pb>)^2, independent of a.
inline double error_free_disturbance(const GaussianState& psi, const GaussianState& xi) {
  const double shift = psi.mean_p() + xi.mean_p();
  return std::sqrt(psi.var_p() + xi.var_p() + shift * shift);
}

struct EDRCheck {
  double epsilon = 0;
  double eta = 0;
  double product = 0;
  double sharp_bound = 0;       // |1 - c - d| hbar / 2
  double heisenberg_bound = 0;  // hbar / 2
  bool full_heisenberg = false;  // c + d <= 0 or c + d >= 2
  bool satisfies_sharp = false;
  bool satisfies_heisenberg = false;
  bool violates_heisenberg = false;
};

inline EDRCheck edr_check(const TransferMatrix& m, const GaussianState& psi,
                          const GaussianState& xi, double hbar) {
  EDRCheck r;
  r.epsilon = rms_error(m, psi, xi);
  r.eta = rms_disturbance(m, psi, xi);
  // Rounded once from core precision, so sqrt(1/2) * sqrt(1/2) gives exactly 1/2.
  r.product = static_cast<double>(
      std::sqrt(detail::error_square(m, psi, xi) * detail::disturbance_square(m, psi, xi)));
  const SharpBound bound = heisenberg_bound(m, hbar);
  r.sharp_bound = bound.value;
  r.full_heisenberg = bound.full_heisenberg;
  r.heisenberg_bound = hbar / 2;
  r.satisfies_sharp = r.product >= r.sharp_bound;
  r.satisfies_heisenberg = r.product >= r.heisenberg_bound;
  r.violates_heisenberg = r.product < r.heisenberg_bound;
  return r;
}

inline bool kennard_check(const GaussianState& s, double hbar) {
  return std::sqrt(s.var_q()) * std::sqrt(s.var_p()) >= hbar / 2 - 1e-12;
}

}  // namespace edrlab
