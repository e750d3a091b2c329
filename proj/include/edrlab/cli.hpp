#pragma once

// Command-line front end. Exit codes:
//   0 success (scientific verdicts never change the exit code)
//   1 report: at least one check failed
//   2 malformed arguments, specs or config
//   3 domain error or inadmissible state
//   4 wavefunction grid failure (oracle)

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "edrlab/config.hpp"
#include "edrlab/errors.hpp"
#include "edrlab/presets.hpp"
#include "edrlab/report.hpp"
#include "edrlab/suite.hpp"
#include "edrlab/supremum.hpp"
#include "edrlab/symplectic.hpp"

namespace edrlab::cli {

enum ExitCode : int {
  kOk = 0,
  kChecksFailed = 1,
  kParseError = 2,
  kDomainError = 3,
  kGridError = 4,
};

struct ModelFlags {
  std::string preset;
  std::optional<double> alpha, beta, gamma;

  void attach(CLI::App* app) {
    app->add_option("--preset", preset, "von-neumann | error-free:a=<x> | <alpha>,<beta>,<gamma>");
    app->add_option("--alpha", alpha, "coupling alpha");
    app->add_option("--beta", beta, "coupling beta");
    app->add_option("--gamma", gamma, "coupling gamma");
  }

  Model resolve(double hbar) const {
    const bool triple = alpha || beta || gamma;
    if (!preset.empty() && triple) throw ParseError("give either --preset or --alpha/--beta/--gamma");
    if (preset.empty() && !triple) throw ParseError("a model is required (--preset or --alpha/--beta/--gamma)");
    if (!preset.empty()) return parse_model(preset, hbar);
    return model_from_triple(alpha.value_or(0), beta.value_or(0), gamma.value_or(0), hbar);
  }
};

inline std::string num(double v) { return fmt::format("{:.17g}", v); }

inline int solve_command(const ModelFlags& flags, double hbar, bool as_json, std::ostream& out) {
  const Model model = flags.resolve(hbar);
  const auto regime = classify_regime(model.params);
  const auto m = model.matrix.as<double>();
  const double residual = static_cast<double>(model.matrix.det_residual());
  const double solved_gap =
      static_cast<double>(max_coefficient_gap(solve_dynamics(model.params), model.matrix));
  if (as_json) {
    json j;
    j["model"] = model.name;
    j["coupling"] = {{"alpha", model.params.alpha}, {"beta", model.params.beta},
                     {"gamma", model.params.gamma}};
    j["matrix"] = {{"a", m.a}, {"b", m.b}, {"c", m.c}, {"d", m.d}};
    j["regime"] = {{"tag", std::string(to_string(regime.tag))},
                   {"discriminant", static_cast<double>(regime.discriminant)}};
    j["det_residual"] = residual;
    j["solved_gap"] = solved_gap;
    out << j.dump(2) << "\n";
  } else {
    out << fmt::format("model={}\n", model.name);
    out << fmt::format("alpha={} beta={} gamma={}\n", num(model.params.alpha),
                       num(model.params.beta), num(model.params.gamma));
    out << fmt::format("a={} b={} c={} d={}\n", num(m.a), num(m.b), num(m.c), num(m.d));
    out << fmt::format("regime={} discriminant={}\n", to_string(regime.tag),
                       num(static_cast<double>(regime.discriminant)));
    out << fmt::format("det_residual={}\n", num(residual));
    out << fmt::format("solved_gap={}\n", num(solved_gap));
  }
  return kOk;
}

struct AnalyzeFlags {
  std::string psi = "ground";
  std::string xi = "ground";
  bool oracle = false;
  std::size_t grid_n = kDefaultGridSize;
  double span = kDefaultSpanSigmas;
  double tolerance = 1e-6;
  std::string csv;
};

inline int analyze_command(const ModelFlags& mf, const AnalyzeFlags& f, double hbar,
                           std::ostream& out) {
  const Model model = mf.resolve(hbar);
  const auto psi = parse_state(f.psi, hbar);
  const auto xi = parse_state(f.xi, hbar);
  AnalyzeOptions opt;
  opt.oracle = f.oracle;
  opt.grid_n = f.grid_n;
  opt.span_sigmas = f.span;
  opt.oracle_tolerance = f.tolerance;
  const auto report = analyze(model, psi, xi, hbar, opt);
  out << to_json(report).dump(2) << "\n";
  if (!f.csv.empty()) {
    const bool fresh = !std::filesystem::exists(f.csv) || std::filesystem::file_size(f.csv) == 0;
    std::ofstream csv(f.csv, std::ios::app | std::ios::binary);
    if (!csv) throw ConfigError("cannot write '" + f.csv + "'");
    if (fresh) csv << report_csv_header() << "\n";
    csv << report_csv_row(report) << "\n";
  }
  return kOk;
}

struct SweepFlags {
  std::string family = "coupling";
  std::string a_range;
  std::string alpha = "0", beta = "0", gamma = "0";
  std::string psi = "ground", xi = "ground";
  std::string output;
};

inline std::vector<Model> sweep_family(const SweepFlags& f, double hbar) {
  std::vector<Model> models;
  if (f.family == "error-free") {
    if (f.a_range.empty()) throw ParseError("error-free sweep needs --a <lo:hi:count>");
    for (double a : parse_range(f.a_range)) models.push_back(error_free_model(a, hbar));
  } else if (f.family == "coupling") {
    const auto as = parse_range(f.alpha), bs = parse_range(f.beta), gs = parse_range(f.gamma);
    for (double a : as)
      for (double b : bs)
        for (double g : gs) models.push_back(model_from_triple(a, b, g, hbar));
  } else {
    throw ParseError("unknown sweep family '" + f.family + "'");
  }
  if (models.empty()) throw ParseError("sweep family is empty");
  return models;
}

inline int sweep_command(const SweepFlags& f, double hbar, std::ostream& out) {
  const auto models = sweep_family(f, hbar);
  const auto psi = parse_state(f.psi, hbar).moments;
  const auto xi = parse_state(f.xi, hbar).moments;
  std::string text = sweep_csv_header() + "\n";
  for (const auto& row : sweep_models(models, psi, xi, hbar)) text += sweep_csv_row(row) + "\n";
  if (f.output.empty()) {
    out << text;
  } else {
    std::ofstream file(f.output, std::ios::binary);
    if (!file) throw ConfigError("cannot write '" + f.output + "'");
    file << text;
  }
  return kOk;
}

struct BlwFlags {
  std::string xi = "ground";
  double eps_eig = 0.01;
  SweepConfig sweep;
};

inline int blw_command(const ModelFlags& mf, const BlwFlags& f, double hbar, std::ostream& out) {
  if (!(f.eps_eig > 0) || !std::isfinite(f.eps_eig)) throw ParseError("--eps-eig must be > 0");
  const Model model = mf.resolve(hbar);
  const auto xi = parse_state(f.xi, hbar);
  const auto summary = blw_summary(model, xi, f.eps_eig, f.sweep, hbar);
  out << to_json(summary, hbar).dump(2) << "\n";
  return kOk;
}

inline int report_command(const std::string& config_path, const std::string& output,
                          std::ostream& out) {
  std::string path = config_path;
  if (path.empty())
    if (const char* env = std::getenv("EDRLAB_CONFIG")) path = env;
  const RunConfig cfg = path.empty() ? RunConfig{} : load_config(path);
  const auto start = std::chrono::steady_clock::now();
  const auto result = run_suite(cfg, output);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& c : result.checks)
    out << fmt::format("[{}] {}: {}\n", c.passed ? "PASS" : "FAIL", c.name, c.detail);
  out << fmt::format("{} checks, {} failed, {:.1f} s; bundle written to {}\n",
                     result.checks.size(),
                     std::count_if(result.checks.begin(), result.checks.end(),
                                   [](const auto& c) { return !c.passed; }),
                     seconds, output);
  return result.all_passed() ? kOk : kChecksFailed;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Error-disturbance laboratory for linear position measurements", "edrlab"};
  app.require_subcommand(1);
  double hbar = 1.0;
  app.add_option("--hbar", hbar, "reduced Planck constant (default 1)");

  ModelFlags solve_model;
  bool solve_json = false;
  auto* solve = app.add_subcommand("solve", "solve the coupling dynamics and classify the regime");
  solve_model.attach(solve);
  solve->add_flag("--json", solve_json, "emit JSON");

  ModelFlags analyze_model;
  AnalyzeFlags analyze_flags;
  auto* an = app.add_subcommand("analyze", "rms error/disturbance report for one model and state pair");
  analyze_model.attach(an);
  an->add_option("--psi", analyze_flags.psi, "object state");
  an->add_option("--xi", analyze_flags.xi, "probe state");
  an->add_flag("--oracle", analyze_flags.oracle, "cross-check with the wavefunction grid");
  an->add_option("--grid-n", analyze_flags.grid_n, "grid points (power of two)");
  an->add_option("--span", analyze_flags.span, "grid half-width in standard deviations");
  an->add_option("--tolerance", analyze_flags.tolerance, "oracle relative tolerance");
  an->add_option("--csv", analyze_flags.csv, "append a CSV row to this file");

  SweepFlags sweep_flags;
  auto* sw = app.add_subcommand("sweep", "CSV table over a model family");
  sw->add_option("--family", sweep_flags.family, "coupling | error-free");
  sw->add_option("--a", sweep_flags.a_range, "error-free a values, lo:hi:count");
  sw->add_option("--alpha", sweep_flags.alpha, "alpha value or lo:hi:count");
  sw->add_option("--beta", sweep_flags.beta, "beta value or lo:hi:count");
  sw->add_option("--gamma", sweep_flags.gamma, "gamma value or lo:hi:count");
  sw->add_option("--psi", sweep_flags.psi, "object state");
  sw->add_option("--xi", sweep_flags.xi, "probe state");
  sw->add_option("--output", sweep_flags.output, "CSV path (default stdout)");

  ModelFlags blw_model;
  BlwFlags blw_flags;
  auto* blw = app.add_subcommand("blw", "Delta_c estimates against the uniform error/disturbance");
  blw_model.attach(blw);
  blw->add_option("--xi", blw_flags.xi, "probe state");
  blw->add_option("--eps-eig", blw_flags.eps_eig, "approximate-eigenstate tolerance (> 0)");
  blw->add_option("--decades", blw_flags.sweep.decades, "theta decades");
  blw->add_option("--probe-bound", blw_flags.sweep.probe_bound, "extend sweep until this value");
  blw->add_option("--max-decades", blw_flags.sweep.max_decades, "cap on theta decades");

  std::string config_path, output = "edrlab-report";
  auto* rep = app.add_subcommand("report", "run every check and write the reproduction bundle");
  rep->add_option("--config", config_path, "run config (falls back to $EDRLAB_CONFIG)");
  rep->add_option("--output", output, "bundle directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  try {
    if (*solve) return solve_command(solve_model, hbar, solve_json, out);
    if (*an) return analyze_command(analyze_model, analyze_flags, hbar, out);
    if (*sw) return sweep_command(sweep_flags, hbar, out);
    if (*blw) return blw_command(blw_model, blw_flags, hbar, out);
    if (*rep) return report_command(config_path, output, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  } catch (const StateError& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  } catch (const GridError& e) {
    err << "error: " << e.what() << "\n";
    return kGridError;
  }
  return kParseError;
}

}  // namespace edrlab::cli
