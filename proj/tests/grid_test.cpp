#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "edrlab/errors.hpp"
#include "edrlab/gaussian.hpp"
#include "edrlab/grid.hpp"
#include "edrlab/grid_io.hpp"
#include "edrlab/moments.hpp"
#include "edrlab/symplectic.hpp"

using namespace edrlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const TransferMatrix kIdentity{1, 0, 0, 1};
const TransferMatrix kVonNeumann{1, 0, 1, 1};

// Direct O(n^2) transform with the unitary exp(-i p q / hbar) kernel.
std::vector<double> direct_momentum_density(const GridWavefunction& w, double hbar,
                                            const std::vector<double>& p) {
  std::vector<double> out(p.size());
  const double norm = w.dx() / std::sqrt(2 * std::numbers::pi * hbar);
  for (std::size_t k = 0; k < p.size(); ++k) {
    std::complex<double> acc = 0;
    for (std::size_t j = 0; j < w.size(); ++j)
      acc += w.amplitudes()[j] * std::polar(1.0, -p[k] * w.position(j) / hbar);
    out[k] = std::norm(acc * norm);
  }
  return out;
}

// Symmetrised <{Q - <Q>, P - <P>}>/2 from -i hbar psi* psi' by central differences.
double grid_covariance(const GridWavefunction& w, double hbar) {
  const auto a = w.amplitudes();
  const auto rho = position_density(w);
  const auto s = density_stats(w.positions(), rho, w.dx());
  double mixed = 0;
  for (std::size_t j = 1; j + 1 < w.size(); ++j) {
    const auto deriv = (a[j + 1] - a[j - 1]) / (2 * w.dx());
    const double p_local = hbar * (std::conj(a[j]) * deriv).imag();
    mixed += (w.position(j) - s.mean) * p_local * w.dx();
  }
  return mixed;
}

}  // namespace

TEST_CASE("grid construction guards", "[grid]") {
  const auto g = GaussianState::ground();
  CHECK_THROWS_AS(from_gaussian(g, 1000), GridError);
  CHECK_THROWS_AS(from_gaussian(g, 8), GridError);
  CHECK_THROWS_AS(from_gaussian(g, 1024, 3.0), GridError);
  CHECK_THROWS_AS(from_gaussian(GaussianState::make(0, 0, 1, 1, 0), 1024), GridError);
  CHECK_NOTHROW(from_gaussian(g, 1024, 7.0));

  std::vector<std::complex<double>> amps(16, {1.0, 0.0});
  CHECK_THROWS_AS(GridWavefunction::make(amps, 0, 1), GridError);
  CHECK_NOTHROW(GridWavefunction::make(amps, 0, 1.0 / 16));
  CHECK_THROWS_AS(GridWavefunction::make(amps, 0, -1), GridError);
  CHECK_THROWS_AS(GridWavefunction::normalized(std::vector<std::complex<double>>(16), 0, 1),
                  GridError);
}

TEST_CASE("gaussian sampling fidelity", "[grid]") {
  const auto g = from_gaussian(GaussianState::ground(), 1024, 10);
  const auto s = density_stats(g.positions(), position_density(g), g.dx());
  CHECK_THAT(s.mass, WithinAbs(1.0, 1e-12));
  CHECK_THAT(s.mean, WithinAbs(0.0, 1e-8));
  CHECK_THAT(s.variance, WithinAbs(0.5, 1e-8));

  const auto shifted = from_gaussian(GaussianState::displaced(2, 0), 1024, 10);
  const auto t = density_stats(shifted.positions(), position_density(shifted), shifted.dx());
  CHECK_THAT(t.mean, WithinAbs(2.0, 1e-8));
}

TEST_CASE("momentum density of standard states", "[grid]") {
  const auto g = from_gaussian(GaussianState::ground());
  const auto mg = momentum_density(g);
  const auto sg = density_stats(mg.p_values, mg.density, mg.dp);
  CHECK_THAT(sg.mass, WithinAbs(1.0, 1e-9));
  CHECK_THAT(sg.variance, WithinAbs(0.5, 1e-6));

  // exp(i k q) times the ground state moves the momentum mean to hbar k.
  for (double hbar : {1.0, 0.5}) {
    const double k = 1.7;
    const auto w = from_gaussian(GaussianState::displaced(0, hbar * k, hbar), 4096, 12, hbar);
    const auto m = momentum_density(w, hbar);
    CHECK_THAT(density_stats(m.p_values, m.density, m.dp).mean, WithinAbs(hbar * k, 1e-6));
  }

  const auto c = from_gaussian(GaussianState::make(0, 0, 0.5, 0.68, -0.3));
  const auto mc = momentum_density(c);
  CHECK_THAT(density_stats(mc.p_values, mc.density, mc.dp).variance, WithinAbs(0.68, 1e-6));
  CHECK_THAT(grid_covariance(c, 1.0), WithinAbs(-0.3, 1e-5));
}

TEST_CASE("FFT momentum density matches the direct transform", "[grid]") {
  for (const auto& s : {GaussianState::displaced(0.7, -1.3), GaussianState::contractive(0.5),
                        GaussianState::squeezed(-0.6)}) {
    const auto w = from_gaussian(s, 128, 9);
    const auto m = momentum_density(w);
    const auto direct = direct_momentum_density(w, 1.0, m.p_values);
    for (std::size_t k = 0; k < direct.size(); ++k)
      REQUIRE_THAT(m.density[k], WithinAbs(direct[k], 1e-12));
  }
}

TEST_CASE("mirror index reflects momentum", "[grid]") {
  const auto m = momentum_density(from_gaussian(GaussianState::ground(), 64, 9));
  CHECK(m.mirror_index(32) == 32);
  CHECK(m.mirror_index(0) == 0);
  for (std::size_t k = 1; k < 64; ++k) REQUIRE(m.p_values[m.mirror_index(k)] == -m.p_values[k]);
}

TEST_CASE("Parseval on every constructor", "[grid][property]") {
  std::vector<GridWavefunction> states{
      from_gaussian(GaussianState::ground()), from_gaussian(GaussianState::contractive(0.8)),
      from_gaussian(GaussianState::displaced(-3, 4)), hermite_state(1), hermite_state(5),
      cat_state(2.5), cat_state(0.3)};
  for (const auto& w : states) {
    const auto m = momentum_density(w);
    double mass = 0;
    for (double d : m.density) mass += d * m.dp;
    REQUIRE_THAT(mass, WithinAbs(w.norm_squared(), 1e-9));
  }
}

TEST_CASE("non-Gaussian states reproduce their moments", "[grid]") {
  for (int k : {0, 1, 2, 6}) {
    const auto w = hermite_state(k);
    const auto s = density_stats(w.positions(), position_density(w), w.dx());
    const auto m = momentum_density(w);
    const auto sp = density_stats(m.p_values, m.density, m.dp);
    const double want = (2.0 * k + 1) / 2;
    REQUIRE_THAT(s.variance, WithinRel(want, 1e-9));
    REQUIRE_THAT(sp.variance, WithinRel(want, 1e-9));
  }
  for (double d : {0.4, 1.0, 2.5}) {
    const auto w = cat_state(d);
    const auto twin = cat_moments(d);
    const auto s = density_stats(w.positions(), position_density(w), w.dx());
    const auto m = momentum_density(w);
    const auto sp = density_stats(m.p_values, m.density, m.dp);
    REQUIRE_THAT(s.variance, WithinRel(twin.var_q(), 1e-9));
    REQUIRE_THAT(sp.variance, WithinRel(twin.var_p(), 1e-9));
  }
}

TEST_CASE("oracle examples", "[grid][oracle]") {
  const std::size_t n = 1024;
  const auto g = from_gaussian(GaussianState::ground(), n);
  const auto c = from_gaussian(GaussianState::contractive(0.3), n);

  CHECK_THAT(oracle_rms_error(error_free_matrix(1), c, g), WithinAbs(0.0, 1e-9));
  CHECK_THAT(oracle_rms_error(kVonNeumann, c, g), WithinAbs(std::sqrt(0.5), 1e-6));
  CHECK_THAT(oracle_rms_error(kIdentity, hermite_state(1, n), g), WithinAbs(std::sqrt(2.0), 1e-6));

  CHECK_THAT(oracle_rms_disturbance(kIdentity, c, g), WithinAbs(0.0, 1e-9));
  CHECK_THAT(oracle_rms_disturbance(error_free_matrix(1), g, g), WithinAbs(1.0, 1e-6));
  CHECK_THAT(oracle_rms_disturbance(kVonNeumann, c, g), WithinAbs(std::sqrt(0.5), 1e-6));
}

TEST_CASE("oracle agrees with the closed forms", "[grid][oracle][property]") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-2, 2), r(-0.8, 0.8), ang(-1.5, 1.5);
  auto pure = [&] {
    const double rr = r(rng), phi = ang(rng);
    const double ch = std::cosh(2 * rr), sh = std::sinh(2 * rr);
    return GaussianState::make(u(rng), u(rng), (ch + sh * std::cos(2 * phi)) / 2,
                               (ch - sh * std::cos(2 * phi)) / 2, sh * std::sin(2 * phi) / 2);
  };
  for (int i = 0; i < 8; ++i) {
    const auto m = solve_dynamics(CouplingParams(u(rng), u(rng), u(rng)));
    const auto psi = pure(), xi = pure();
    const auto wp = from_gaussian(psi, 1024), wx = from_gaussian(xi, 1024);
    const double eps = rms_error(m, psi, xi), eta = rms_disturbance(m, psi, xi);
    REQUIRE(std::abs(oracle_rms_error(m, wp, wx) - eps) <= 1e-6 * std::max(eps, 1e-6));
    REQUIRE(std::abs(oracle_rms_disturbance(m, wp, wx) - eta) <= 1e-6 * std::max(eta, 1e-6));
  }
}

TEST_CASE("grid refinement is stable", "[grid][oracle]") {
  const auto m = solve_dynamics(CouplingParams(0.3, -0.7, 1.1));
  const auto psi = GaussianState::contractive(0.4), xi = GaussianState::displaced(0.5, -0.2);
  const double e1 = oracle_rms_error(m, from_gaussian(psi, 512), from_gaussian(xi, 512));
  const double e2 = oracle_rms_error(m, from_gaussian(psi, 1024), from_gaussian(xi, 1024));
  const double h1 = oracle_rms_disturbance(m, from_gaussian(psi, 512), from_gaussian(xi, 512));
  const double h2 = oracle_rms_disturbance(m, from_gaussian(psi, 1024), from_gaussian(xi, 1024));
  CHECK(std::abs(e1 - e2) < 1e-7);
  CHECK(std::abs(h1 - h2) < 1e-7);
}

TEST_CASE("joint outcome distributions", "[grid]") {
  const std::size_t n = 128;
  const auto psi = from_gaussian(GaussianState::displaced(0.5, 1.0), n, 9);
  const auto xi = from_gaussian(GaussianState::ground(), n, 9);

  const auto id = joint_outcome_distribution(kIdentity, psi, xi, Sector::Position);
  CHECK_THAT(id.total_weight(), WithinAbs(1.0, 1e-9));
  double mt = 0, mo = 0, mto = 0;
  for (std::size_t i = 0; i < id.rows; ++i)
    for (std::size_t j = 0; j < id.cols; ++j) {
      REQUIRE(id.weight(i, j) >= 0);
      REQUIRE(id.omega(i, j) == xi.position(j));
      mt += id.weight(i, j) * id.theta_values[i];
      mo += id.weight(i, j) * id.omega(i, j);
      mto += id.weight(i, j) * id.theta_values[i] * id.omega(i, j);
    }
  CHECK_THAT(mto - mt * mo, WithinAbs(0.0, 1e-12));

  const auto ef = joint_outcome_distribution(error_free_matrix(1), psi, xi, Sector::Position);
  for (std::size_t i = 0; i < ef.rows; ++i)
    for (std::size_t j = 0; j < ef.cols; ++j) REQUIRE(ef.omega(i, j) == ef.theta_values[i]);

  const auto g = from_gaussian(GaussianState::ground(), 1024);
  const auto vn = joint_outcome_distribution(kVonNeumann, g, g, Sector::Position);
  CHECK_THAT(vn.mean_square_deviation(), WithinAbs(0.5, 1e-6));

  const auto marg = id.theta_marginal();
  const auto rho = position_density(psi);
  for (std::size_t i = 0; i < marg.size(); ++i)
    REQUIRE_THAT(marg[i], WithinAbs(rho[i] * psi.dx(), 1e-9));

  const auto mom = joint_outcome_distribution(kVonNeumann, psi, xi, Sector::Momentum);
  CHECK_THAT(mom.total_weight(), WithinAbs(1.0, 1e-9));
  const auto mp = momentum_density(psi);
  const auto pm = mom.theta_marginal();
  for (std::size_t i = 0; i < pm.size(); ++i)
    REQUIRE_THAT(pm[i], WithinAbs(mp.density[i] * mp.dp, 1e-9));
}

TEST_CASE("error-free joint POVM density", "[grid]") {
  const std::size_t n = 256;
  const auto psi = from_gaussian(GaussianState::contractive(0.3), n, 10);
  for (double p0 : {0.0, 2.0, -1.5}) {
    const auto xi = from_gaussian(GaussianState::displaced(0.4, p0), n, 10);
    const auto d = error_free_joint_povm_density(psi, xi);
    const auto qm = d.q_marginal();
    const auto pm = d.p_marginal();
    const auto rho = position_density(psi);
    const auto xm = momentum_density(xi);
    for (std::size_t i = 0; i < n; ++i) REQUIRE_THAT(qm[i], WithinAbs(rho[i], 1e-9));
    for (std::size_t k = 0; k < n; ++k)
      REQUIRE_THAT(pm[k], WithinAbs(xm.density[xm.mirror_index(k)], 1e-9));
    CHECK_THAT(density_stats(d.p_values, pm, d.dp).mean, WithinAbs(-p0, 1e-6));
  }
}

TEST_CASE("wavefunction CSV and JSON round trips", "[grid][io]") {
  const auto w = from_gaussian(GaussianState::contractive(0.2), 64, 9);

  const auto back = wavefunction_from_json(to_json(w));
  CHECK(back == w);
  const auto reparsed = wavefunction_from_json(nlohmann::ordered_json::parse(to_json(w).dump()));
  CHECK(reparsed == w);

  std::stringstream ss;
  write_csv(ss, w);
  const auto csv = read_csv(ss);
  REQUIRE(csv.size() == w.size());
  CHECK(csv.x_min() == w.x_min());
  CHECK_THAT(csv.dx(), WithinRel(w.dx(), 1e-14));
  for (std::size_t i = 0; i < w.size(); ++i) REQUIRE(csv.amplitudes()[i] == w.amplitudes()[i]);

  std::istringstream bad_header("x,re,im\n0,1,0\n");
  CHECK_THROWS_AS(read_csv(bad_header), GridError);
  std::istringstream bad_row("q,re,im\n0,1\n");
  CHECK_THROWS_AS(read_csv(bad_row), GridError);
  auto j = to_json(w);
  j["n"] = 63;
  CHECK_THROWS_AS(wavefunction_from_json(j), GridError);
}
