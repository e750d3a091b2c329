#pragma once

#include <fmt/format.h>

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "edrlab/grid.hpp"
#include "edrlab/moments.hpp"
#include "edrlab/presets.hpp"
#include "edrlab/supremum.hpp"
#include "edrlab/symplectic.hpp"

namespace edrlab {

struct EDReport {
  std::string model;
  std::string psi;
  std::string xi;
  CouplingParams params;
  double hbar = 1;
  BasicTransferMatrix<double> matrix;
  RegimeTag regime = RegimeTag::Nilpotent;
  double discriminant = 0;
  double det_residual = 0;

  double epsilon = 0;
  double eta = 0;
  double product = 0;
  double sharp_bound = 0;
  double heisenberg_bound = 0;
  bool full_heisenberg = false;
  bool violates_heisenberg = false;

  std::optional<double> oracle_epsilon;
  std::optional<double> oracle_eta;
  std::optional<double> oracle_tolerance;  // relative

  ExtendedValue uniform_error = ExtendedValue::finite(0);
  ExtendedValue uniform_disturbance = ExtendedValue::finite(0);
  ProductVerdict appleby;
  ProductVerdict blw;

  // |oracle - closed| / max(closed, 1e-6) for each present oracle field.
  std::optional<double> oracle_gap() const {
    if (!oracle_epsilon || !oracle_eta) return std::nullopt;
    return std::max(std::abs(*oracle_epsilon - epsilon) / std::max(epsilon, 1e-6),
                    std::abs(*oracle_eta - eta) / std::max(eta, 1e-6));
  }

  bool oracle_agrees() const {
    const auto gap = oracle_gap();
    return gap && oracle_tolerance && *gap <= *oracle_tolerance;
  }

  friend bool operator==(const EDReport&, const EDReport&) = default;
};

struct AnalyzeOptions {
  bool oracle = false;
  std::size_t grid_n = kDefaultGridSize;
  double span_sigmas = kDefaultSpanSigmas;
  double oracle_tolerance = 1e-6;
};

inline EDReport analyze(const Model& model, const StateSpec& psi, const StateSpec& xi,
                        double hbar, const AnalyzeOptions& opt = {}) {
  EDReport r;
  r.model = model.name;
  r.psi = psi.text;
  r.xi = xi.text;
  r.params = model.params;
  r.hbar = hbar;
  r.matrix = model.matrix.as<double>();
  const Regime regime = classify_regime(model.params);
  r.regime = regime.tag;
  r.discriminant = static_cast<double>(regime.discriminant);
  r.det_residual = static_cast<double>(model.matrix.det_residual());

  const EDRCheck check = edr_check(model.matrix, psi.moments, xi.moments, hbar);
  r.epsilon = check.epsilon;
  r.eta = check.eta;
  r.product = check.product;
  r.sharp_bound = check.sharp_bound;
  r.heisenberg_bound = check.heisenberg_bound;
  r.full_heisenberg = check.full_heisenberg;
  r.violates_heisenberg = check.violates_heisenberg;

  r.uniform_error = uniform_error(model.matrix, xi.moments);
  r.uniform_disturbance = uniform_disturbance(model.matrix, xi.moments);
  r.appleby = multiply(r.uniform_error, r.uniform_disturbance);
  r.blw = blw_product_verdict(model.matrix, xi.moments);

  if (opt.oracle) {
    const auto psi_grid = to_grid(psi, opt.grid_n, opt.span_sigmas, hbar);
    const auto xi_grid = to_grid(xi, opt.grid_n, opt.span_sigmas, hbar);
    r.oracle_epsilon = oracle_rms_error(model.matrix, psi_grid, xi_grid);
    r.oracle_eta = oracle_rms_disturbance(model.matrix, psi_grid, xi_grid, hbar);
    r.oracle_tolerance = opt.oracle_tolerance;
  }
  return r;
}

using json = nlohmann::ordered_json;

inline json to_json(const ExtendedValue& v) {
  if (v.is_infinite()) return json{{"kind", "infinite"}};
  return json{{"kind", "finite"}, {"value", v.value()}};
}

inline ExtendedValue extended_value_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "infinite") return ExtendedValue::infinite();
  if (kind == "finite") return ExtendedValue::finite(j.at("value").get<double>());
  throw ParseError("unknown extended value kind '" + kind + "'");
}

inline json to_json(const ProductVerdict& v, double hbar) {
  json j{{"kind", std::string(to_string(v.kind))}};
  if (v.kind == VerdictKind::Finite) j["value"] = v.value;
  const auto ok = v.satisfies(hbar);
  j["satisfies_hbar_half"] = ok ? json(*ok) : json(nullptr);
  return j;
}

inline ProductVerdict product_verdict_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "finite") return {VerdictKind::Finite, j.at("value").get<double>()};
  if (kind == "infinite") return {VerdictKind::Infinite, 0};
  if (kind == "indeterminate") return {VerdictKind::Indeterminate, 0};
  throw ParseError("unknown verdict kind '" + kind + "'");
}

inline json to_json(const EDReport& r) {
  json j;
  j["model"] = r.model;
  j["psi"] = r.psi;
  j["xi"] = r.xi;
  j["hbar"] = r.hbar;
  j["coupling"] = {{"alpha", r.params.alpha}, {"beta", r.params.beta}, {"gamma", r.params.gamma}};
  j["matrix"] = {{"a", r.matrix.a}, {"b", r.matrix.b}, {"c", r.matrix.c}, {"d", r.matrix.d}};
  j["regime"] = {{"tag", std::string(to_string(r.regime))}, {"discriminant", r.discriminant}};
  j["det_residual"] = r.det_residual;
  j["epsilon"] = r.epsilon;
  j["eta"] = r.eta;
  j["product"] = r.product;
  j["sharp_bound"] = r.sharp_bound;
  j["heisenberg_bound"] = r.heisenberg_bound;
  j["full_heisenberg"] = r.full_heisenberg;
  j["violates_heisenberg"] = r.violates_heisenberg;
  if (r.oracle_epsilon) {
    j["oracle"] = {{"epsilon", *r.oracle_epsilon},
                   {"eta", *r.oracle_eta},
                   {"tolerance", *r.oracle_tolerance},
                   {"agrees", r.oracle_agrees()}};
  }
  j["uniform_error"] = to_json(r.uniform_error);
  j["uniform_disturbance"] = to_json(r.uniform_disturbance);
  j["appleby"] = to_json(r.appleby, r.hbar);
  j["blw"] = to_json(r.blw, r.hbar);
  return j;
}

inline EDReport report_from_json(const json& j) {
  try {
    EDReport r;
    r.model = j.at("model").get<std::string>();
    r.psi = j.at("psi").get<std::string>();
    r.xi = j.at("xi").get<std::string>();
    r.hbar = j.at("hbar").get<double>();
    const auto& c = j.at("coupling");
    r.params = CouplingParams(c.at("alpha").get<double>(), c.at("beta").get<double>(),
                              c.at("gamma").get<double>(), r.hbar);
    const auto& m = j.at("matrix");
    r.matrix = {m.at("a").get<double>(), m.at("b").get<double>(), m.at("c").get<double>(),
                m.at("d").get<double>()};
    r.regime = regime_from_string(j.at("regime").at("tag").get<std::string>());
    r.discriminant = j.at("regime").at("discriminant").get<double>();
    r.det_residual = j.at("det_residual").get<double>();
    r.epsilon = j.at("epsilon").get<double>();
    r.eta = j.at("eta").get<double>();
    r.product = j.at("product").get<double>();
    r.sharp_bound = j.at("sharp_bound").get<double>();
    r.heisenberg_bound = j.at("heisenberg_bound").get<double>();
    r.full_heisenberg = j.at("full_heisenberg").get<bool>();
    r.violates_heisenberg = j.at("violates_heisenberg").get<bool>();
    if (j.contains("oracle")) {
      const auto& o = j.at("oracle");
      r.oracle_epsilon = o.at("epsilon").get<double>();
      r.oracle_eta = o.at("eta").get<double>();
      r.oracle_tolerance = o.at("tolerance").get<double>();
    }
    r.uniform_error = extended_value_from_json(j.at("uniform_error"));
    r.uniform_disturbance = extended_value_from_json(j.at("uniform_disturbance"));
    r.appleby = product_verdict_from_json(j.at("appleby"));
    r.blw = product_verdict_from_json(j.at("blw"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed report JSON: ") + e.what());
  }
}

inline std::string csv_number(double v) { return fmt::format("{:.17g}", v); }

inline std::string report_csv_header() {
  return "model,psi,xi,a,b,c,d,epsilon,eta,product,sharp_bound,heisenberg_bound,"
         "violates_heisenberg,uniform_error,uniform_disturbance,appleby,blw";
}

// RFC 4180 quoting for free-text fields.
inline std::string csv_quote(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

inline std::string csv_extended(const ExtendedValue& v) {
  return v.is_infinite() ? "inf" : csv_number(v.value());
}

inline std::string csv_verdict(const ProductVerdict& v) {
  return v.kind == VerdictKind::Finite ? csv_number(v.value) : std::string(to_string(v.kind));
}

inline std::string report_csv_row(const EDReport& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", csv_quote(r.model),
                     csv_quote(r.psi), csv_quote(r.xi), csv_number(r.matrix.a),
                     csv_number(r.matrix.b), csv_number(r.matrix.c), csv_number(r.matrix.d),
                     csv_number(r.epsilon), csv_number(r.eta), csv_number(r.product),
                     csv_number(r.sharp_bound), csv_number(r.heisenberg_bound),
                     r.violates_heisenberg ? "true" : "false", csv_extended(r.uniform_error),
                     csv_extended(r.uniform_disturbance), csv_verdict(r.appleby),
                     csv_verdict(r.blw));
}

// One row of a parameter sweep.
struct SweepRow {
  CouplingParams params;
  BasicTransferMatrix<double> matrix;
  EDRCheck check;
};

inline std::vector<SweepRow> sweep_models(const std::vector<Model>& models,
                                          const GaussianState& psi, const GaussianState& xi,
                                          double hbar) {
  std::vector<SweepRow> rows;
  rows.reserve(models.size());
  for (const auto& m : models)
    rows.push_back({m.params, m.matrix.as<double>(), edr_check(m.matrix, psi, xi, hbar)});
  return rows;
}

inline std::string sweep_csv_header() {
  return "alpha,beta,gamma,a,b,c,d,c_plus_d,epsilon,eta,product,sharp_bound,violates_heisenberg";
}

inline std::string sweep_csv_row(const SweepRow& row) {
  const auto& m = row.matrix;
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}", csv_number(row.params.alpha),
                     csv_number(row.params.beta), csv_number(row.params.gamma), csv_number(m.a),
                     csv_number(m.b), csv_number(m.c), csv_number(m.d), csv_number(m.c + m.d),
                     csv_number(row.check.epsilon), csv_number(row.check.eta),
                     csv_number(row.check.product), csv_number(row.check.sharp_bound),
                     row.check.violates_heisenberg ? "true" : "false");
}

// Delta_c estimates for both sides next to the analytic uniform values.
// A side is consistent when a finite uniform value is matched by a converged
// estimate within eps_eig + 1e-6, or an infinite one by a diverging trend.
struct BlwSide {
  ExtendedValue uniform = ExtendedValue::finite(0);
  SupremumEstimate estimate;
  bool consistent = false;
};

struct BlwSummary {
  std::string model;
  std::string xi;
  double eps_eig = 0;
  BlwSide position;
  BlwSide momentum;
  ProductVerdict verdict;
};

inline bool side_consistent(const ExtendedValue& uniform, const SupremumEstimate& est,
                            double eps_eig) {
  if (uniform.is_infinite()) return est.trend == Trend::Diverging;
  return est.trend == Trend::Converged && std::abs(est.value - uniform.value()) <= eps_eig + 1e-6;
}

inline BlwSummary blw_summary(const Model& model, const StateSpec& xi, double eps_eig,
                              const SweepConfig& sweep, double hbar) {
  BlwSummary s;
  s.model = model.name;
  s.xi = xi.text;
  s.eps_eig = eps_eig;
  s.position.uniform = uniform_error(model.matrix, xi.moments);
  s.position.estimate = blw_delta_c_estimate(model.matrix, xi.moments, eps_eig, sweep, hbar);
  s.position.consistent = side_consistent(s.position.uniform, s.position.estimate, eps_eig);
  s.momentum.uniform = uniform_disturbance(model.matrix, xi.moments);
  s.momentum.estimate =
      blw_delta_c_disturbance_estimate(model.matrix, xi.moments, eps_eig, sweep, hbar);
  s.momentum.consistent = side_consistent(s.momentum.uniform, s.momentum.estimate, eps_eig);
  s.verdict = blw_product_verdict(model.matrix, xi.moments);
  return s;
}

inline json to_json(const SupremumEstimate& e) {
  return json{{"value", e.value},
              {"sweep_max", e.sweep_max},
              {"trend", std::string(to_string(e.trend))},
              {"decade_values", e.decade_values}};
}

inline json to_json(const BlwSummary& s, double hbar) {
  auto side = [](const BlwSide& b) {
    return json{{"delta_c_estimate", to_json(b.estimate)},
                {"uniform_value", to_json(b.uniform)},
                {"consistent", b.consistent}};
  };
  json j;
  j["model"] = s.model;
  j["xi"] = s.xi;
  j["eps_eig"] = s.eps_eig;
  j["position"] = side(s.position);
  j["momentum"] = side(s.momentum);
  j["blw_product"] = to_json(s.verdict, hbar);
  j["equivalent_to_uniform"] = s.position.consistent && s.momentum.consistent;
  return j;
}

}  // namespace edrlab
