#pragma once

// Brute-force route to eps and eta: sampled wavefunctions, FFT momentum
// densities and explicit quadrature over the joint outcome distributions.
//
// Q(0) and Qb(dt) = c Q(0) + d Qb(0) are both functions of the commuting
// positions, so their joint distribution on psi x xi is the push-forward of
// |psi(q)|^2 |xi(qb)|^2 under (q, qb) -> (q, c q + d qb). The same holds for
// P(0) and P(dt) = d P(0) - c Pb(0) in the momentum representation. No
// time stepping is required.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "edrlab/errors.hpp"
#include "edrlab/fft.hpp"
#include "edrlab/gaussian.hpp"
#include "edrlab/symplectic.hpp"

namespace edrlab {

inline constexpr std::size_t kDefaultGridSize = 4096;
inline constexpr double kDefaultSpanSigmas = 12.0;
inline constexpr double kNormalizationTolerance = 1e-9;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

class GridWavefunction {
 public:
  using amplitude_type = std::complex<double>;

  // Amplitudes must already be normalised: sum |w|^2 dx = 1 within 1e-9.
  static GridWavefunction make(std::vector<amplitude_type> amplitudes, double x_min, double dx) {
    GridWavefunction w(std::move(amplitudes), x_min, dx);
    w.validate_layout();
    const double norm = w.norm_squared();
    if (std::abs(norm - 1) > kNormalizationTolerance)
      throw GridError("wavefunction is not normalised (norm^2 = " + std::to_string(norm) + ")");
    return w;
  }

  static GridWavefunction normalized(std::vector<amplitude_type> amplitudes, double x_min,
                                     double dx) {
    GridWavefunction w(std::move(amplitudes), x_min, dx);
    w.validate_layout();
    const double norm = w.norm_squared();
    if (!(norm > 0) || !std::isfinite(norm)) throw GridError("wavefunction has zero norm");
    const double scale = 1 / std::sqrt(norm);
    for (auto& a : w.amplitudes_) a *= scale;
    return w;
  }

  std::size_t size() const { return amplitudes_.size(); }
  double x_min() const { return x_min_; }
  double dx() const { return dx_; }
  double position(std::size_t i) const { return x_min_ + static_cast<double>(i) * dx_; }
  std::span<const amplitude_type> amplitudes() const { return amplitudes_; }

  double norm_squared() const {
    double s = 0;
    for (const auto& a : amplitudes_) s += std::norm(a);
    return s * dx_;
  }

  std::vector<double> positions() const {
    std::vector<double> q(size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = position(i);
    return q;
  }

  friend bool operator==(const GridWavefunction&, const GridWavefunction&) = default;

 private:
  GridWavefunction(std::vector<amplitude_type> a, double x_min, double dx)
      : amplitudes_(std::move(a)), x_min_(x_min), dx_(dx) {}

  void validate_layout() const {
    if (amplitudes_.size() < 16 || !is_power_of_two(amplitudes_.size()))
      throw GridError("grid size must be a power of two >= 16 (got " +
                      std::to_string(amplitudes_.size()) + ")");
    if (!(dx_ > 0) || !std::isfinite(dx_) || !std::isfinite(x_min_))
      throw GridError("grid spacing must be positive and finite");
  }

  std::vector<amplitude_type> amplitudes_;
  double x_min_ = 0;
  double dx_ = 1;
};

namespace detail {

inline void require_grid_size(std::size_t n) {
  if (n < 16 || !is_power_of_two(n))
    throw GridError("grid size must be a power of two >= 16 (got " + std::to_string(n) + ")");
}

// Gaussian mass outside +-span standard deviations must stay below the
// normalisation tolerance.
inline void require_span(double span_sigmas) {
  if (!(span_sigmas > 0) || std::erfc(span_sigmas / std::numbers::sqrt2) > kNormalizationTolerance)
    throw GridError("grid span of " + std::to_string(span_sigmas) +
                    " sigma truncates more than 1e-9 of the state");
}

template <class F>
GridWavefunction sample(std::size_t n, double x_min, double dx, F&& f) {
  std::vector<std::complex<double>> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = f(x_min + static_cast<double>(i) * dx);
  return GridWavefunction::normalized(std::move(a), x_min, dx);
}

}  // namespace detail

// Pure Gaussian psi(q) ~ exp(-(q - q0)^2 (1 - i kappa) / (4 var_q) + i p0 (q - q0) / hbar)
// with kappa = 2 cov_qp / hbar. Its momentum variance is
// (hbar^2 / 4 + cov_qp^2) / var_q, so only minimum-uncertainty moments have a
// wavefunction. The grid is centred on mean_q and extends span_sigmas
// standard deviations to each side.
inline GridWavefunction from_gaussian(const GaussianState& s, std::size_t n = kDefaultGridSize,
                                      double span_sigmas = kDefaultSpanSigmas,
                                      double hbar = 1.0) {
  detail::require_grid_size(n);
  detail::require_span(span_sigmas);
  if (!s.is_pure(hbar))
    throw GridError("only minimum-uncertainty (pure) Gaussian moments have a wavefunction");
  const double sigma = std::sqrt(s.var_q());
  const double half = span_sigmas * sigma;
  const double dx = 2 * half / static_cast<double>(n);
  const double q0 = s.mean_q(), p0 = s.mean_p();
  const std::complex<double> width(1.0 / (4 * s.var_q()), -s.cov_qp() / (hbar * 2 * s.var_q()));
  return detail::sample(n, q0 - half, dx, [&](double q) {
    const double y = q - q0;
    return std::exp(-width * y * y + std::complex<double>(0, p0 * y / hbar));
  });
}

// k-th oscillator eigenstate H_k(q / sqrt(hbar)) exp(-q^2 / (2 hbar)), with
// <Q^2> = (2k + 1) hbar / 2.
inline GridWavefunction hermite_state(int k, std::size_t n = kDefaultGridSize,
                                      double span_sigmas = kDefaultSpanSigmas,
                                      double hbar = 1.0) {
  if (k < 0) throw GridError("hermite level must be non-negative");
  detail::require_grid_size(n);
  detail::require_span(span_sigmas);
  const double half = span_sigmas * std::sqrt((2.0 * k + 1.0) * hbar / 2);
  const double dx = 2 * half / static_cast<double>(n);
  const double scale = 1 / std::sqrt(hbar);
  return detail::sample(n, -half, dx, [&](double q) {
    // Normalised Hermite-function recurrence; avoids overflow of H_k.
    const double x = q * scale;
    double prev = 0;
    double cur = std::exp(-x * x / 2);
    for (int j = 0; j < k; ++j) {
      const double next = std::sqrt(2.0 / (j + 1)) * x * cur - std::sqrt(double(j) / (j + 1)) * prev;
      prev = cur;
      cur = next;
    }
    return std::complex<double>(cur, 0);
  });
}

// Even superposition of ground states centred at +d and -d.
inline GridWavefunction cat_state(double d, std::size_t n = kDefaultGridSize,
                                  double span_sigmas = kDefaultSpanSigmas, double hbar = 1.0) {
  detail::require_grid_size(n);
  detail::require_span(span_sigmas);
  const double half = std::abs(d) + span_sigmas * std::sqrt(hbar / 2);
  const double dx = 2 * half / static_cast<double>(n);
  return detail::sample(n, -half, dx, [&](double q) {
    return std::complex<double>(
        std::exp(-(q - d) * (q - d) / (2 * hbar)) + std::exp(-(q + d) * (q + d) / (2 * hbar)), 0);
  });
}

inline std::vector<double> position_density(const GridWavefunction& w) {
  std::vector<double> rho(w.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(w.amplitudes()[i]);
  return rho;
}

struct MomentumDensity {
  std::vector<double> p_values;
  std::vector<double> density;
  double dp = 0;

  // Index of -p_k on the same grid. p_{-n/2} has no mirror image inside the
  // grid; it maps onto itself (the Nyquist bin).
  std::size_t mirror_index(std::size_t k) const {
    const std::size_t n = density.size();
    return (n - k) % n;
  }
};

// |w^(p)|^2 with w^(p) = (2 pi hbar)^(-1/2) int w(q) exp(-i p q / hbar) dq on
// the centred conjugate grid p_k = (k - n/2) dp, dp = 2 pi hbar / (n dx).
//
// With q_j = x_min + j dx the kernel factors as
//   exp(-i p_k x_min / hbar) * (-1)^j * exp(-2 pi i j k / n),
// so a plain DFT of (-1)^j w_j yields the centred spectrum directly; the
// leading phase drops out of the density.
inline MomentumDensity momentum_density(const GridWavefunction& w, double hbar = 1.0) {
  const std::size_t n = w.size();
  std::vector<std::complex<double>> alternating(w.amplitudes().begin(), w.amplitudes().end());
  for (std::size_t j = 1; j < n; j += 2) alternating[j] = -alternating[j];
  const auto spectrum = fft::forward(alternating);

  MomentumDensity out;
  out.dp = 2 * std::numbers::pi * hbar / (static_cast<double>(n) * w.dx());
  out.p_values.resize(n);
  out.density.resize(n);
  const double scale = w.dx() * w.dx() / (2 * std::numbers::pi * hbar);
  for (std::size_t k = 0; k < n; ++k) {
    out.p_values[k] = (static_cast<double>(k) - static_cast<double>(n / 2)) * out.dp;
    out.density[k] = scale * std::norm(spectrum[k]);
  }
  return out;
}

struct DensityStats {
  double mass = 0;
  double mean = 0;
  double variance = 0;
};

inline DensityStats density_stats(std::span<const double> values, std::span<const double> density,
                                  double spacing) {
  DensityStats s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    s.mass += density[i] * spacing;
    s.mean += values[i] * density[i] * spacing;
  }
  s.mean /= s.mass;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double y = values[i] - s.mean;
    s.variance += y * y * density[i] * spacing;
  }
  s.variance /= s.mass;
  return s;
}

enum class Sector { Position, Momentum };

namespace detail {

// sqrt( sum_ij w_i v_j (omega(i, j) - theta_i)^2 ), inner sums first so the
// reduction order is fixed.
template <class Omega>
double quadrature_rms(std::span<const double> theta, std::span<const double> w,
                      std::span<const double> probe, std::span<const double> v, Omega omega) {
  double total = 0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (w[i] == 0) continue;
    double inner = 0;
    for (std::size_t j = 0; j < probe.size(); ++j) {
      const double err = omega(theta[i], probe[j]) - theta[i];
      inner += v[j] * err * err;
    }
    total += w[i] * inner;
  }
  return std::sqrt(total);
}

inline std::vector<double> scaled(std::vector<double> x, double s) {
  for (auto& v : x) v *= s;
  return x;
}

}  // namespace detail

// Gauss rms error of the meter Qb(dt) = c q + d qb for the true value q.
inline double oracle_rms_error(const TransferMatrix& m, const GridWavefunction& psi,
                               const GridWavefunction& xi) {
  const double c = static_cast<double>(m.c), d = static_cast<double>(m.d);
  const auto q = psi.positions();
  const auto qb = xi.positions();
  const auto w = detail::scaled(position_density(psi), psi.dx());
  const auto v = detail::scaled(position_density(xi), xi.dx());
  return detail::quadrature_rms(q, w, qb, v, [=](double x, double y) { return c * x + d * y; });
}

// Gauss rms error of P(dt) = d p - c pb for P(0) = p.
inline double oracle_rms_disturbance(const TransferMatrix& m, const GridWavefunction& psi,
                                     const GridWavefunction& xi, double hbar = 1.0) {
  const double c = static_cast<double>(m.c), d = static_cast<double>(m.d);
  const auto mp = momentum_density(psi, hbar);
  const auto mx = momentum_density(xi, hbar);
  const auto w = detail::scaled(mp.density, mp.dp);
  const auto v = detail::scaled(mx.density, mx.dp);
  return detail::quadrature_rms(mp.p_values, w, mx.p_values, v,
                                [=](double x, double y) { return d * x - c * y; });
}

// Discrete joint distribution of (theta, omega) = (Q(0), Qb(dt)) or
// (P(0), P(dt)). Row i belongs to theta_values[i]; column j to the j-th
// probe grid point. omega_values and weights are row-major rows x cols.
struct JointDistribution {
  std::vector<double> theta_values;
  std::vector<double> omega_values;
  std::vector<double> weights;
  std::size_t rows = 0;
  std::size_t cols = 0;

  double omega(std::size_t i, std::size_t j) const { return omega_values[i * cols + j]; }
  double weight(std::size_t i, std::size_t j) const { return weights[i * cols + j]; }

  double total_weight() const {
    double s = 0;
    for (double w : weights) s += w;
    return s;
  }

  std::vector<double> theta_marginal() const {
    std::vector<double> m(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m[i] += weight(i, j);
    return m;
  }

  // Mean of (omega - theta)^2.
  double mean_square_deviation() const {
    double s = 0;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        const double e = omega(i, j) - theta_values[i];
        s += weight(i, j) * e * e;
      }
    return s;
  }
};

inline JointDistribution joint_outcome_distribution(const TransferMatrix& m,
                                                    const GridWavefunction& psi,
                                                    const GridWavefunction& xi, Sector which,
                                                    double hbar = 1.0) {
  const double c = static_cast<double>(m.c), d = static_cast<double>(m.d);
  std::vector<double> theta, probe, w, v;
  double u_theta, u_probe;
  if (which == Sector::Position) {
    theta = psi.positions();
    probe = xi.positions();
    w = detail::scaled(position_density(psi), psi.dx());
    v = detail::scaled(position_density(xi), xi.dx());
    u_theta = c;
    u_probe = d;
  } else {
    auto mp = momentum_density(psi, hbar);
    auto mx = momentum_density(xi, hbar);
    theta = std::move(mp.p_values);
    probe = std::move(mx.p_values);
    w = detail::scaled(std::move(mp.density), mp.dp);
    v = detail::scaled(std::move(mx.density), mx.dp);
    u_theta = d;
    u_probe = -c;
  }
  JointDistribution out;
  out.rows = theta.size();
  out.cols = probe.size();
  out.omega_values.resize(out.rows * out.cols);
  out.weights.resize(out.rows * out.cols);
  for (std::size_t i = 0; i < out.rows; ++i)
    for (std::size_t j = 0; j < out.cols; ++j) {
      out.omega_values[i * out.cols + j] = u_theta * theta[i] + u_probe * probe[j];
      out.weights[i * out.cols + j] = w[i] * v[j];
    }
  out.theta_values = std::move(theta);
  return out;
}

// Density of the joint POVM of the commuting pair (Qb(dt), P(dt)) = (Q(0), -Pb(0))
// realised by every error-free model: |psi(q)|^2 |xi^(-p)|^2.
struct PhaseSpaceDensity {
  std::vector<double> q_values;
  std::vector<double> p_values;
  std::vector<double> density;  // row-major, q index major
  double dq = 0;
  double dp = 0;

  double at(std::size_t i, std::size_t k) const { return density[i * p_values.size() + k]; }

  std::vector<double> q_marginal() const {
    std::vector<double> m(q_values.size(), 0.0);
    for (std::size_t i = 0; i < q_values.size(); ++i)
      for (std::size_t k = 0; k < p_values.size(); ++k) m[i] += at(i, k) * dp;
    return m;
  }

  std::vector<double> p_marginal() const {
    std::vector<double> m(p_values.size(), 0.0);
    for (std::size_t i = 0; i < q_values.size(); ++i)
      for (std::size_t k = 0; k < p_values.size(); ++k) m[k] += at(i, k) * dq;
    return m;
  }
};

inline PhaseSpaceDensity error_free_joint_povm_density(const GridWavefunction& psi,
                                                      const GridWavefunction& xi,
                                                      double hbar = 1.0) {
  const auto rho = position_density(psi);
  const auto probe = momentum_density(xi, hbar);
  PhaseSpaceDensity out;
  out.q_values = psi.positions();
  out.p_values = probe.p_values;
  out.dq = psi.dx();
  out.dp = probe.dp;
  const std::size_t np = probe.density.size();
  out.density.resize(rho.size() * np);
  for (std::size_t i = 0; i < rho.size(); ++i)
    for (std::size_t k = 0; k < np; ++k)
      out.density[i * np + k] = rho[i] * probe.density[probe.mirror_index(k)];
  return out;
}

}  // namespace edrlab
