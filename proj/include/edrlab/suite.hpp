#pragma once

// Reproduction bundle: runs every check against a RunConfig and writes
//
//   manifest.json            per-check pass/fail with metrics
//   reports/<model>.json     EDReport per configured model (oracle included)
//   reports.csv              one row per configured model
//   blw/<model>.json         Delta_c estimates next to the uniform values
//   sweeps/error_free.csv    a in [-1.9, 5]
//   sweeps/von_neumann_gamma.csv   (0, 0, gamma), gamma in [0, 2]
//   oracle_comparison.csv    closed form vs grid quadrature, random cases
//
// Outputs contain no timestamps; identical configs give identical bytes.

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "edrlab/config.hpp"
#include "edrlab/grid.hpp"
#include "edrlab/moments.hpp"
#include "edrlab/presets.hpp"
#include "edrlab/report.hpp"
#include "edrlab/supremum.hpp"
#include "edrlab/symplectic.hpp"

namespace edrlab {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  json metrics = json::object();
};

struct SuiteResult {
  std::vector<CheckResult> checks;
  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
};

namespace suite {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline CouplingParams random_params(Rng& rng, double range, double hbar) {
  return CouplingParams(uniform(rng, -range, range), uniform(rng, -range, range),
                        uniform(rng, -range, range), hbar);
}

// Minimum-uncertainty Gaussian with random width, chirp and displacement.
inline GaussianState random_pure_state(Rng& rng, double hbar) {
  const double vq = hbar / 2 * std::exp(uniform(rng, std::log(0.25), std::log(4.0)));
  const double cov = hbar / 2 * uniform(rng, -0.8, 0.8);
  const double vp = (hbar * hbar / 4 + cov * cov) / vq;
  return GaussianState::make(uniform(rng, -2, 2), uniform(rng, -2, 2), vq, vp, cov, hbar);
}

// Admissible, possibly mixed: a pure state with inflated variances.
inline GaussianState random_admissible_state(Rng& rng, double hbar) {
  const auto s = random_pure_state(rng, hbar);
  return GaussianState::make(s.mean_q(), s.mean_p(), s.var_q() * uniform(rng, 1, 3),
                             s.var_p() * uniform(rng, 1, 3), s.cov_qp(), hbar);
}

inline CheckResult check(std::string name, bool passed, std::string detail, json metrics = {}) {
  return {std::move(name), passed, std::move(detail),
          metrics.is_null() ? json::object() : std::move(metrics)};
}

inline CheckResult symplectic_invariant(const RunConfig& cfg) {
  Rng rng(cfg.samples.seed);
  double worst = 0;
  for (int i = 0; i < cfg.samples.symplectic; ++i)
    worst = std::max(worst, static_cast<double>(
                                solve_dynamics(random_params(rng, 5, cfg.hbar)).det_residual()));
  return check("symplectic_invariant", worst <= cfg.tolerances.determinant,
               fmt::format("max |ad-bc-1| = {:.3g} over {} samples", worst,
                           cfg.samples.symplectic),
               {{"max_det_residual", worst}});
}

inline CheckResult regime_continuity(const RunConfig& cfg) {
  Rng rng(cfg.samples.seed + 1);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const double alpha = uniform(rng, -3, 3);
    double beta = uniform(rng, 0.2, 3) * (i % 2 ? 1 : -1);
    const double offset = uniform(rng, -1e-10, 1e-10);
    const CouplingParams p(alpha, beta, (offset - alpha * alpha) / beta, cfg.hbar);
    const auto disc = p.discriminant();
    const auto nil = regime_formula(p, RegimeTag::Nilpotent);
    const auto side = regime_formula(p, disc < 0 ? RegimeTag::Elliptic : RegimeTag::Hyperbolic);
    worst = std::max({worst, static_cast<double>(max_coefficient_gap(nil, side)),
                      static_cast<double>(max_coefficient_gap(nil, solve_dynamics(p)))});
  }
  return check("regime_continuity", worst <= cfg.tolerances.continuity,
               fmt::format("max coefficient gap {:.3g} at |disc| <= 1e-10", worst),
               {{"max_gap", worst}});
}

inline CheckResult error_free_family(const RunConfig& cfg) {
  Rng rng(cfg.samples.seed + 2);
  const double hbar = cfg.hbar;
  const auto xi = GaussianState::ground(hbar);
  std::vector<GaussianState> states;
  for (int i = 0; i < 20; ++i) states.push_back(random_admissible_state(rng, hbar));
  double worst_matrix = 0, worst_eps = 0, worst_eta_gap = 0, max_product = 0;
  for (int k = 0; k < 50; ++k) {
    const double a = -1.99 + (k + 1) * (10.0 + 1.99) / 50;
    const auto m = solve_dynamics(error_free_params(a, hbar));
    worst_matrix = std::max(worst_matrix,
                            static_cast<double>(max_coefficient_gap(m, error_free_matrix(a))));
    for (const auto& psi : states) {
      const auto r = edr_check(m, psi, xi, hbar);
      worst_eps = std::max(worst_eps, r.epsilon);
      max_product = std::max(max_product, r.product);
      worst_eta_gap = std::max(worst_eta_gap, std::abs(r.eta - error_free_disturbance(psi, xi)));
    }
  }
  const bool ok = worst_matrix <= cfg.tolerances.error_free && worst_eps <= 1e-9 &&
                  max_product < hbar / 2 && worst_eta_gap <= 1e-12;
  return check("error_free_family", ok,
               fmt::format("matrix gap {:.3g}, max eps {:.3g}, max eps*eta {:.3g}, eta gap {:.3g}",
                           worst_matrix, worst_eps, max_product, worst_eta_gap),
               {{"max_matrix_gap", worst_matrix},
                {"max_epsilon", worst_eps},
                {"max_product", max_product},
                {"max_eta_gap", worst_eta_gap}});
}

inline CheckResult sharp_bound(const RunConfig& cfg) {
  Rng rng(cfg.samples.seed + 3);
  const double hbar = cfg.hbar, tol = cfg.tolerances.sharp_bound;
  int violations = 0, full = 0, full_violations = 0;
  for (int i = 0; i < cfg.samples.sharp_bound; ++i) {
    const auto m = solve_dynamics(random_params(rng, 2, hbar));
    const auto psi = random_admissible_state(rng, hbar);
    const auto xi = random_admissible_state(rng, hbar);
    const auto r = edr_check(m, psi, xi, hbar);
    if (r.product < r.sharp_bound - tol) ++violations;
    if (r.full_heisenberg) {
      ++full;
      if (r.product < hbar / 2 - tol) ++full_violations;
    }
  }
  return check("sharp_bound", violations == 0 && full_violations == 0 && full > 0,
               fmt::format("{} samples, {} violations; {} with c+d outside (0,2), {} violations",
                           cfg.samples.sharp_bound, violations, full, full_violations),
               {{"violations", violations}, {"full_subsample", full},
                {"full_violations", full_violations}});
}

inline CheckResult oracle_equivalence(const RunConfig& cfg, std::ostream* csv) {
  Rng rng(cfg.samples.seed + 4);
  const double hbar = cfg.hbar;
  double worst = 0;
  if (csv) *csv << "case,epsilon,oracle_epsilon,eta,oracle_eta,relative_gap\n";
  for (int i = 0; i < cfg.samples.oracle; ++i) {
    const auto m = solve_dynamics(random_params(rng, 2, hbar));
    const auto psi = random_pure_state(rng, hbar);
    const auto xi = random_pure_state(rng, hbar);
    const auto gpsi = from_gaussian(psi, cfg.grid_n, cfg.grid_span_sigmas, hbar);
    const auto gxi = from_gaussian(xi, cfg.grid_n, cfg.grid_span_sigmas, hbar);
    const double eps = rms_error(m, psi, xi), eta = rms_disturbance(m, psi, xi);
    const double oeps = oracle_rms_error(m, gpsi, gxi);
    const double oeta = oracle_rms_disturbance(m, gpsi, gxi, hbar);
    const double gap = std::max(std::abs(oeps - eps) / std::max(eps, 1e-6),
                                std::abs(oeta - eta) / std::max(eta, 1e-6));
    worst = std::max(worst, gap);
    if (csv)
      *csv << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", i, eps, oeps, eta, oeta,
                          gap);
  }
  return check("oracle_equivalence", worst <= cfg.tolerances.oracle_relative,
               fmt::format("max relative gap {:.3g} over {} cases (n={}, span={})", worst,
                           cfg.samples.oracle, cfg.grid_n, cfg.grid_span_sigmas),
               {{"max_relative_gap", worst}});
}

inline CheckResult von_neumann_benchmark(const RunConfig& cfg) {
  const double hbar = cfg.hbar;
  const auto model = von_neumann_model(hbar);
  const auto g = GaussianState::ground(hbar);
  const double expected = std::sqrt(hbar / 2);
  const auto r = edr_check(model.matrix, g, g, hbar);
  const auto grid = from_gaussian(g, cfg.grid_n, cfg.grid_span_sigmas, hbar);
  const double oeps = oracle_rms_error(model.matrix, grid, grid);
  const double oeta = oracle_rms_disturbance(model.matrix, grid, grid, hbar);
  const bool ok = std::abs(r.epsilon - expected) <= 1e-12 && std::abs(r.eta - expected) <= 1e-12 &&
                  std::abs(oeps - expected) <= 1e-6 && std::abs(oeta - expected) <= 1e-6 &&
                  std::abs(r.product - hbar / 2) <= 1e-12;
  return check("von_neumann_benchmark", ok,
               fmt::format("eps {:.17g}, eta {:.17g}, oracle {:.17g}/{:.17g}, product {:.17g}",
                           r.epsilon, r.eta, oeps, oeta, r.product),
               {{"epsilon", r.epsilon}, {"eta", r.eta}, {"oracle_epsilon", oeps},
                {"oracle_eta", oeta}, {"product", r.product}});
}

inline CheckResult verdicts(const RunConfig& cfg) {
  Rng rng(cfg.samples.seed + 5);
  const double hbar = cfg.hbar;
  const auto xi = GaussianState::ground(hbar);
  int failures = 0;
  for (double a : {-1.5, 0.0, 1.0, 2.0, 5.0}) {
    const auto m = error_free_model(a, hbar).matrix;
    const bool ok = uniform_error(m, xi) == ExtendedValue::finite(0) &&
                    uniform_disturbance(m, xi).is_infinite() &&
                    appleby_product(m, xi).kind == VerdictKind::Indeterminate &&
                    blw_product_verdict(m, xi).kind == VerdictKind::Indeterminate;
    failures += !ok;
  }
  for (int i = 0; i < 100; ++i) {
    const auto m = solve_dynamics(random_params(rng, 2, hbar));
    if (std::abs(m.c - 1) < 1e-6 || std::abs(m.d - 1) < 1e-6) continue;
    const bool ok = appleby_product(m, xi).kind == VerdictKind::Infinite &&
                    blw_product_verdict(m, xi).kind == VerdictKind::Infinite;
    failures += !ok;
  }
  const auto vn = von_neumann_model(hbar).matrix;
  const auto ap = appleby_product(vn, xi), bl = blw_product_verdict(vn, xi);
  failures += !(ap.kind == VerdictKind::Finite && std::abs(ap.value - hbar / 2) <= 1e-12 &&
                ap.satisfies(hbar).value_or(false) && bl == ap);
  return check("appleby_blw_verdicts", failures == 0, fmt::format("{} mismatched verdicts", failures),
               {{"failures", failures}});
}

inline CheckResult blw_sandwich(const RunConfig& cfg) {
  Rng rng(cfg.samples.seed + 6);
  const double hbar = cfg.hbar;
  int violations = 0;
  const double eps_levels[] = {1e-1, 1e-2, 1e-3};
  for (int i = 0; i < cfg.samples.sandwich; ++i) {
    const double eps = eps_levels[i % 3];
    const auto m = solve_dynamics(random_params(rng, 2, hbar));
    const auto xi = random_pure_state(rng, hbar);
    const double theta = uniform(rng, -100, 100);
    const auto psi = GaussianState::make(theta, uniform(rng, -2, 2), eps * eps,
                                         hbar * hbar / (4 * eps * eps), 0, hbar);
    if (std::abs(blw_deviation(m, psi, xi, theta) - rms_error(m, psi, xi)) > eps + 1e-9)
      ++violations;
  }
  int estimate_failures = 0;
  SweepConfig probe = cfg.sweep;
  probe.probe_bound = std::max(probe.probe_bound, 1e3);
  for (int i = 0; i < 30; ++i) {
    const double eps = eps_levels[i % 3];
    const auto xi = random_pure_state(rng, hbar);
    // c = 1 via the nilpotent family (alpha, -alpha^2, 1); d = 1 via (0, 0, gamma).
    const double alpha = uniform(rng, -2, 2);
    const auto mq = solve_dynamics(CouplingParams(alpha, -alpha * alpha, 1, hbar));
    const auto eq = blw_delta_c_estimate(mq, xi, eps, cfg.sweep, hbar);
    const auto uq = uniform_error(mq, xi);
    estimate_failures += !(uq.is_finite() && eq.trend == Trend::Converged &&
                           std::abs(eq.value - uq.value()) <= eps + 1e-6);
    const auto mp = solve_dynamics(CouplingParams(0, 0, uniform(rng, -2, 2), hbar));
    const auto ep = blw_delta_c_disturbance_estimate(mp, xi, eps, cfg.sweep, hbar);
    const auto up = uniform_disturbance(mp, xi);
    estimate_failures += !(up.is_finite() && ep.trend == Trend::Converged &&
                           std::abs(ep.value - up.value()) <= eps + 1e-6);
    const auto mg = solve_dynamics(random_params(rng, 2, hbar));
    if (std::abs(mg.c - 1) > 1e-6) {
      const auto e = blw_delta_c_estimate(mg, xi, eps, probe, hbar);
      estimate_failures += !(e.trend == Trend::Diverging && e.value >= 1e3);
    }
    if (std::abs(mg.d - 1) > 1e-6) {
      const auto e = blw_delta_c_disturbance_estimate(mg, xi, eps, probe, hbar);
      estimate_failures += !(e.trend == Trend::Diverging && e.value >= 1e3);
    }
  }
  return check("blw_sandwich", violations == 0 && estimate_failures == 0,
               fmt::format("{} sandwich violations over {} triples; {} estimate failures",
                           violations, cfg.samples.sandwich, estimate_failures),
               {{"sandwich_violations", violations}, {"estimate_failures", estimate_failures}});
}

inline CheckResult finite_family(const RunConfig& cfg) {
  Rng rng(cfg.samples.seed + 7);
  const double hbar = cfg.hbar;
  const auto m = error_free_model(1.0, hbar).matrix;
  const auto xi = GaussianState::ground(hbar);
  double worst = 0;
  for (int f = 0; f < 20; ++f) {
    std::vector<GaussianState> family;
    const int size = 1 + f % 10;
    for (int i = 0; i < size; ++i) family.push_back(random_admissible_state(rng, hbar));
    worst = std::max(worst, finite_family_sup(m, xi, family));
  }
  return check("finite_family_identity", worst == 0,
               fmt::format("max over families of sup eps * sup eta = {:.17g}", worst),
               {{"max_value", worst}});
}

inline CheckResult joint_povm(const RunConfig& cfg) {
  Rng rng(cfg.samples.seed + 8);
  const double hbar = cfg.hbar;
  const std::size_t n = std::min<std::size_t>(cfg.grid_n, 512);
  double worst = 0;
  int sign_failures = 0;
  for (int i = 0; i < 10; ++i) {
    const auto psi = random_pure_state(rng, hbar);
    const auto xi = random_pure_state(rng, hbar);
    const auto gpsi = from_gaussian(psi, n, cfg.grid_span_sigmas, hbar);
    const auto gxi = from_gaussian(xi, n, cfg.grid_span_sigmas, hbar);
    const auto joint = error_free_joint_povm_density(gpsi, gxi, hbar);
    const auto rho = position_density(gpsi);
    const auto mom = momentum_density(gxi, hbar);
    const auto qm = joint.q_marginal();
    const auto pm = joint.p_marginal();
    for (std::size_t k = 0; k < qm.size(); ++k) worst = std::max(worst, std::abs(qm[k] - rho[k]));
    for (std::size_t k = 0; k < pm.size(); ++k)
      worst = std::max(worst, std::abs(pm[k] - mom.density[mom.mirror_index(k)]));
    const auto stats = density_stats(joint.p_values, pm, joint.dp);
    if (std::abs(stats.mean + xi.mean_p()) > 1e-6) ++sign_failures;
  }
  return check("joint_povm_product_form", worst <= 1e-9 && sign_failures == 0,
               fmt::format("max marginal gap {:.3g}; {} sign-flip failures (n={})", worst,
                           sign_failures, n),
               {{"max_marginal_gap", worst}, {"sign_failures", sign_failures}});
}

inline CheckResult guarded(const std::string& name, const std::function<CheckResult()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return check(name, false, std::string("error: ") + e.what());
  }
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace suite

inline SuiteResult run_suite(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  using suite::guarded;
  cfg.validate();
  SuiteResult result;
  auto& checks = result.checks;

  checks.push_back(guarded("symplectic_invariant", [&] { return suite::symplectic_invariant(cfg); }));
  checks.push_back(guarded("regime_continuity", [&] { return suite::regime_continuity(cfg); }));
  checks.push_back(guarded("error_free_family", [&] { return suite::error_free_family(cfg); }));
  checks.push_back(guarded("sharp_bound", [&] { return suite::sharp_bound(cfg); }));
  std::ostringstream oracle_csv;
  checks.push_back(
      guarded("oracle_equivalence", [&] { return suite::oracle_equivalence(cfg, &oracle_csv); }));
  checks.push_back(guarded("von_neumann_benchmark", [&] { return suite::von_neumann_benchmark(cfg); }));
  checks.push_back(guarded("appleby_blw_verdicts", [&] { return suite::verdicts(cfg); }));
  checks.push_back(guarded("blw_sandwich", [&] { return suite::blw_sandwich(cfg); }));
  checks.push_back(guarded("finite_family_identity", [&] { return suite::finite_family(cfg); }));
  checks.push_back(guarded("joint_povm_product_form", [&] { return suite::joint_povm(cfg); }));

  // Per-model reports; a failure to build or analyse a model is a failed check.
  std::string reports_csv = report_csv_header() + "\n";
  AnalyzeOptions opt;
  opt.oracle = true;
  opt.grid_n = cfg.grid_n;
  opt.span_sigmas = cfg.grid_span_sigmas;
  opt.oracle_tolerance = cfg.tolerances.oracle_relative;
  for (const auto& [name, spec] : cfg.models) {
    checks.push_back(guarded("model:" + name, [&] {
      const auto model = parse_model(spec, cfg.hbar);
      const auto psi = parse_state(cfg.psi, cfg.hbar);
      const auto xi = parse_state(cfg.xi, cfg.hbar);
      const auto report = analyze(model, psi, xi, cfg.hbar, opt);
      suite::write_file(out_dir / "reports" / (name + ".json"), to_json(report).dump(2) + "\n");
      reports_csv += report_csv_row(report) + "\n";
      const auto blw = blw_summary(model, xi, cfg.eps_eig, cfg.sweep, cfg.hbar);
      suite::write_file(out_dir / "blw" / (name + ".json"), to_json(blw, cfg.hbar).dump(2) + "\n");
      const bool ok = report.oracle_agrees() &&
                      report.product >= report.sharp_bound - cfg.tolerances.sharp_bound &&
                      blw.position.consistent && blw.momentum.consistent &&
                      blw.verdict == report.appleby;
      return suite::check("model:" + name, ok,
                          fmt::format("eps {:.6g}, eta {:.6g}, oracle gap {:.3g}, appleby {}",
                                      report.epsilon, report.eta, report.oracle_gap().value_or(-1),
                                      to_string(report.appleby.kind)));
    }));
  }

  const auto psi = parse_state(cfg.psi, cfg.hbar).moments;
  const auto xi = parse_state(cfg.xi, cfg.hbar).moments;
  std::vector<Model> ef, vn;
  for (double a : parse_range("-1.9:5:24")) ef.push_back(error_free_model(a, cfg.hbar));
  for (double g : parse_range("0:2:21")) vn.push_back(model_from_triple(0, 0, g, cfg.hbar));
  auto sweep_text = [&](const std::vector<Model>& models) {
    std::string s = sweep_csv_header() + "\n";
    for (const auto& row : sweep_models(models, psi, xi, cfg.hbar)) s += sweep_csv_row(row) + "\n";
    return s;
  };
  suite::write_file(out_dir / "sweeps" / "error_free.csv", sweep_text(ef));
  suite::write_file(out_dir / "sweeps" / "von_neumann_gamma.csv", sweep_text(vn));
  suite::write_file(out_dir / "reports.csv", reports_csv);
  suite::write_file(out_dir / "oracle_comparison.csv", oracle_csv.str());

  json manifest;
  manifest["hbar"] = cfg.hbar;
  manifest["grid"] = {{"n", cfg.grid_n}, {"span_sigmas", cfg.grid_span_sigmas}};
  manifest["seed"] = cfg.samples.seed;
  auto list = json::array();
  for (const auto& c : checks)
    list.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail},
                    {"metrics", c.metrics}});
  manifest["checks"] = std::move(list);
  manifest["all_passed"] = result.all_passed();
  suite::write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

}  // namespace edrlab
