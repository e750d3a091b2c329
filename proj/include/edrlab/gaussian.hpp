#pragma once

#include <cmath>
#include <string>

#include "edrlab/errors.hpp"

namespace edrlab {

// Relative slack on var_q var_p - cov^2 >= hbar^2 / 4, absorbing the
// rounding of minimum-uncertainty states built from exp(+-2r).
inline constexpr double kAdmissibilitySlack = 1e-12;

struct Moments {
  double mean = 0;
  double second_moment = 0;  // mean^2 + variance

  double variance() const { return second_moment - mean * mean; }
};

// First and second moments of a single mode. The same type describes the
// object state psi and the probe state xi. cov_qp is the symmetrised
// covariance <{Q - <Q>, P - <P>}> / 2.
class GaussianState {
 public:
  static GaussianState make(double mean_q, double mean_p, double var_q, double var_p,
                            double cov_qp, double hbar = 1.0) {
    GaussianState s(mean_q, mean_p, var_q, var_p, cov_qp);
    s.require_admissible(hbar);
    return s;
  }

  static GaussianState ground(double hbar = 1.0) {
    return make(0, 0, hbar / 2, hbar / 2, 0, hbar);
  }

  static GaussianState displaced(double q, double p, double hbar = 1.0) {
    return make(q, p, hbar / 2, hbar / 2, 0, hbar);
  }

  // Position squeezed for r > 0.
  static GaussianState squeezed(double r, double hbar = 1.0) {
    return make(0, 0, hbar / 2 * std::exp(-2 * r), hbar / 2 * std::exp(2 * r), 0, hbar);
  }

  // Minimum-uncertainty state squeezed along the phase-space diagonal, with
  // negative position-momentum covariance for r > 0. Free evolution narrows
  // its position spread before it widens again.
  static GaussianState contractive(double r, double hbar = 1.0) {
    const double ch = std::cosh(2 * r), sh = std::sinh(2 * r);
    return make(0, 0, hbar / 2 * ch, hbar / 2 * ch, -hbar / 2 * sh, hbar);
  }

  double mean_q() const { return mean_q_; }
  double mean_p() const { return mean_p_; }
  double var_q() const { return var_q_; }
  double var_p() const { return var_p_; }
  double cov_qp() const { return cov_qp_; }

  Moments position() const { return {mean_q_, mean_q_ * mean_q_ + var_q_}; }
  Moments momentum() const { return {mean_p_, mean_p_ * mean_p_ + var_p_}; }

  // Robertson-Schroedinger determinant var_q var_p - cov^2.
  double uncertainty_determinant() const { return var_q_ * var_p_ - cov_qp_ * cov_qp_; }

  // True for a pure Gaussian (determinant equal to hbar^2 / 4).
  bool is_pure(double hbar, double rel_tol = 1e-9) const {
    const double target = hbar * hbar / 4;
    return std::abs(uncertainty_determinant() - target) <= rel_tol * target;
  }

  friend bool operator==(const GaussianState&, const GaussianState&) = default;

 private:
  GaussianState(double mq, double mp, double vq, double vp, double c)
      : mean_q_(mq), mean_p_(mp), var_q_(vq), var_p_(vp), cov_qp_(c) {}

  void require_admissible(double hbar) const {
    if (!(hbar > 0) || !std::isfinite(hbar)) throw StateError("hbar must be positive");
    if (!std::isfinite(mean_q_) || !std::isfinite(mean_p_) || !std::isfinite(var_q_) ||
        !std::isfinite(var_p_) || !std::isfinite(cov_qp_))
      throw StateError("state moments must be finite");
    if (!(var_q_ > 0) || !(var_p_ > 0)) throw StateError("state variances must be positive");
    const double bound = hbar * hbar / 4;
    if (uncertainty_determinant() < bound * (1 - kAdmissibilitySlack))
      throw StateError("moments violate var_q var_p - cov_qp^2 >= hbar^2/4 (det = " +
                       std::to_string(uncertainty_determinant()) + ")");
  }

  double mean_q_;
  double mean_p_;
  double var_q_;
  double var_p_;
  double cov_qp_;
};

// Moments of the k-th oscillator eigenstate (unit mass and frequency):
// <Q^2> = <P^2> = (2k + 1) hbar / 2, zero means and covariance.
inline GaussianState hermite_moments(int k, double hbar = 1.0) {
  if (k < 0) throw StateError("hermite level must be non-negative");
  const double v = (2.0 * k + 1.0) * hbar / 2;
  return GaussianState::make(0, 0, v, v, 0, hbar);
}

// Moments of the even superposition of ground states centred at +d and -d.
// With overlap s = exp(-d^2 / hbar):
//   <Q^2> = hbar/2 + d^2 / (1 + s),   <P^2> = hbar/2 - s d^2 / (1 + s).
inline GaussianState cat_moments(double d, double hbar = 1.0) {
  const double s = std::exp(-d * d / hbar);
  const double vq = hbar / 2 + d * d / (1 + s);
  const double vp = hbar / 2 - s * d * d / (1 + s);
  return GaussianState::make(0, 0, vq, vp, 0, hbar);
}

}  // namespace edrlab
