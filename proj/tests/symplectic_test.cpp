#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "edrlab/errors.hpp"
#include "edrlab/symplectic.hpp"

using namespace edrlab;
using Catch::Matchers::WithinAbs;

namespace {

using Mat = std::array<long double, 4>;  // row-major 2x2

Mat mul(const Mat& x, const Mat& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
          x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

// exp([[alpha, beta], [gamma, -alpha]]) by scaling, 30-term Taylor and squaring.
Mat expm_oracle(long double alpha, long double beta, long double gamma) {
  const long double norm = std::abs(alpha) + std::abs(beta) + std::abs(gamma);
  int squarings = 0;
  while (norm / std::ldexp(1.0L, squarings) > 0.25L) ++squarings;
  const long double s = std::ldexp(1.0L, -squarings);
  const Mat a{alpha * s, beta * s, gamma * s, -alpha * s};
  Mat sum{1, 0, 0, 1}, term{1, 0, 0, 1};
  for (int k = 1; k <= 30; ++k) {
    term = mul(term, a);
    for (auto& t : term) t /= k;
    for (int i = 0; i < 4; ++i) sum[i] += term[i];
  }
  for (int i = 0; i < squarings; ++i) sum = mul(sum, sum);
  return sum;
}

void require_matrix(const TransferMatrix& m, const Mat& want, double tol) {
  CHECK_THAT(static_cast<double>(m.a), WithinAbs(static_cast<double>(want[0]), tol));
  CHECK_THAT(static_cast<double>(m.b), WithinAbs(static_cast<double>(want[1]), tol));
  CHECK_THAT(static_cast<double>(m.c), WithinAbs(static_cast<double>(want[2]), tol));
  CHECK_THAT(static_cast<double>(m.d), WithinAbs(static_cast<double>(want[3]), tol));
}

}  // namespace

TEST_CASE("regime classification", "[symplectic]") {
  const auto vn = classify_regime(CouplingParams(0, 0, 1));
  CHECK(vn.tag == RegimeTag::Nilpotent);
  CHECK(vn.discriminant == 0);
  const auto hyp = classify_regime(CouplingParams(0, 1, 1));
  CHECK(hyp.tag == RegimeTag::Hyperbolic);
  CHECK(hyp.discriminant == 1);
  const auto ell = classify_regime(CouplingParams(0, -1, 1));
  CHECK(ell.tag == RegimeTag::Elliptic);
  CHECK(ell.discriminant == -1);

  CHECK(classify_regime(CouplingParams(0, 1e-13, 1)).tag == RegimeTag::Nilpotent);
  CHECK(classify_regime(CouplingParams(0, 1e-11, 1)).tag == RegimeTag::Hyperbolic);
  CHECK(classify_regime(CouplingParams(0, -1e-11, 1)).tag == RegimeTag::Elliptic);
}

TEST_CASE("coupling validation", "[symplectic]") {
  CHECK_THROWS_AS(CouplingParams(0, 0, 1, 0), DomainError);
  CHECK_THROWS_AS(CouplingParams(0, 0, 1, -1), DomainError);
  CHECK_THROWS_AS(CouplingParams(NAN, 0, 1), DomainError);
  CHECK_THROWS_AS(CouplingParams(0, INFINITY, 1), DomainError);
}

TEST_CASE("solve_dynamics on named couplings", "[symplectic]") {
  require_matrix(solve_dynamics(CouplingParams(0, 0, 1)), {1, 0, 1, 1}, 0);
  require_matrix(solve_dynamics(CouplingParams(0, 0, 0)), {1, 0, 0, 1}, 0);
  require_matrix(solve_dynamics(error_free_params(1)), {1, -1, 1, 0}, 1e-15);

  // exp of [[0,1],[1,0]] and [[0,-1],[1,0]].
  const double e = std::numbers::e;
  require_matrix(solve_dynamics(CouplingParams(0, 1, 1)),
                 {(e + 1 / e) / 2, (e - 1 / e) / 2, (e - 1 / e) / 2, (e + 1 / e) / 2}, 1e-15);
  require_matrix(solve_dynamics(CouplingParams(0, -1, 1)),
                 {std::cos(1.0), -std::sin(1.0), std::sin(1.0), std::cos(1.0)}, 1e-15);
}

TEST_CASE("solve_dynamics matches a Taylor-series exponential", "[symplectic][property]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 2000; ++i) {
    const double al = u(rng), be = u(rng), ga = u(rng);
    const auto m = solve_dynamics(CouplingParams(al, be, ga));
    const auto want = expm_oracle(al, be, ga);
    const long double scale = std::max({1.0L, std::abs(want[0]), std::abs(want[1]),
                                        std::abs(want[2]), std::abs(want[3])});
    const long double gap = std::max({std::abs(m.a - want[0]), std::abs(m.b - want[1]),
                                      std::abs(m.c - want[2]), std::abs(m.d - want[3])});
    INFO(al << " " << be << " " << ga);
    REQUIRE(static_cast<double>(gap / scale) < 1e-14);
  }
}

TEST_CASE("determinant stays one", "[symplectic][property]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5, 5);
  long double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto m = solve_dynamics(CouplingParams(u(rng), u(rng), u(rng)));
    worst = std::max(worst, m.det_residual());
  }
  CHECK(static_cast<double>(worst) <= 1e-12);
}

TEST_CASE("regime formulas agree near the boundary", "[symplectic][property]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3, 3);
  std::uniform_real_distribution<double> off(-1e-10, 1e-10);
  for (int i = 0; i < 200; ++i) {
    const double al = u(rng);
    double be = u(rng);
    if (std::abs(be) < 0.1) be = 0.5;
    const double ga = (-al * al + off(rng)) / be;
    const CouplingParams p(al, be, ga);
    REQUIRE(std::abs(p.discriminant()) <= 1e-10);
    const auto nil = regime_formula(p, RegimeTag::Nilpotent);
    const auto solved = solve_dynamics(p);
    const auto tag = p.discriminant() < 0 ? RegimeTag::Elliptic : RegimeTag::Hyperbolic;
    if (p.discriminant() != 0) {
      const auto branch = regime_formula(p, tag);
      REQUIRE(static_cast<double>(max_coefficient_gap(branch, nil)) <= 1e-8);
    }
    REQUIRE(static_cast<double>(max_coefficient_gap(solved, nil)) <= 1e-8);
  }
}

TEST_CASE("regime_formula rejects the wrong branch", "[symplectic]") {
  CHECK_THROWS_AS(regime_formula(CouplingParams(0, 1, 1), RegimeTag::Elliptic), DomainError);
  CHECK_THROWS_AS(regime_formula(CouplingParams(0, -1, 1), RegimeTag::Hyperbolic), DomainError);
}

TEST_CASE("omega values", "[symplectic]") {
  CHECK(omega(2.0) == 1.0);
  CHECK_THAT(omega(0.0), WithinAbs(std::numbers::pi / 2, 1e-15));
  CHECK_THAT(omega(1.0), WithinAbs(2 * std::numbers::pi / (3 * std::sqrt(3.0)), 1e-15));
  // arccosh(2) / sqrt(3) at a = 4.
  CHECK_THAT(omega(4.0), WithinAbs(std::log(2 + std::sqrt(3.0)) / std::sqrt(3.0), 1e-15));
  CHECK_THROWS_AS(omega(-2.0), DomainError);
  CHECK_THROWS_AS(omega(-3.0), DomainError);
  CHECK_THROWS_AS(omega(NAN), DomainError);

  CHECK_THAT(omega(2.0 + 1e-6), WithinAbs(1.0, 1e-5));
  CHECK_THAT(omega(2.0 - 1e-6), WithinAbs(1.0, 1e-5));
  // Series side of the branch point agrees with the direct formula.
  CHECK_THAT(omega(2.0 - 1e-3),
             WithinAbs(std::acos(1 - 5e-4) / std::sqrt(1 - (1 - 5e-4) * (1 - 5e-4)), 1e-12));
}

TEST_CASE("error-free parameters", "[symplectic]") {
  const auto p2 = error_free_params(2);
  CHECK(p2.alpha == 1);
  CHECK(p2.beta == -1);
  CHECK(p2.gamma == 1);

  const auto p0 = error_free_params(0);
  CHECK(p0.alpha == 0);
  CHECK_THAT(p0.beta, WithinAbs(-std::numbers::pi / 2, 1e-15));
  CHECK_THAT(p0.gamma, WithinAbs(std::numbers::pi / 2, 1e-15));

  CHECK_THROWS_AS(error_free_params(-2), DomainError);
  CHECK_THROWS_AS(error_free_params(-2.5), DomainError);
}

TEST_CASE("error-free family solves to the constraint matrix", "[symplectic][property]") {
  for (int i = 0; i < 400; ++i) {
    const double a = -1.999 + (10 + 1.999) * i / 399.0;
    const auto m = solve_dynamics(error_free_params(a));
    INFO("a = " << a);
    REQUIRE(static_cast<double>(max_coefficient_gap(m, error_free_matrix(a))) <= 1e-9);
    REQUIRE(is_error_free(m, 1e-9L));
    REQUIRE(heisenberg_bound(m, 1.0).value <= 1e-9);
  }
}

TEST_CASE("sharp bound and error-free flag", "[symplectic]") {
  const auto vn = heisenberg_bound(solve_dynamics(CouplingParams(0, 0, 1)), 1.0);
  CHECK(vn.value == 0.5);
  CHECK(vn.full_heisenberg);
  const auto ef = heisenberg_bound(error_free_matrix(1), 1.0);
  CHECK(ef.value == 0);
  CHECK_FALSE(ef.full_heisenberg);
  const auto id = heisenberg_bound(solve_dynamics(CouplingParams(0, 0, 0)), 2.0);
  CHECK(id.value == 0);

  CHECK(is_error_free(error_free_matrix(1), 1e-12L));
  CHECK_FALSE(is_error_free(solve_dynamics(CouplingParams(0, 0, 1)), 1e-12L));
  CHECK_FALSE(is_error_free(solve_dynamics(CouplingParams(0, 0, 0)), 1e-12L));
}
