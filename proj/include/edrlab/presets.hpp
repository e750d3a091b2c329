#pragma once

// Textual model and state specifications shared by the CLI and run configs.
//
// Models:  von-neumann | error-free:a=<x> | <alpha>,<beta>,<gamma>
// States:  ground | squeezed:r=<x> | displaced:q=<x>,p=<y> | contractive:r=<x>
//          | hermite:n=<k> | cat:d=<x> | moments:q=..,p=..,vq=..,vp=..,cov=..

#include <fmt/format.h>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "edrlab/errors.hpp"
#include "edrlab/gaussian.hpp"
#include "edrlab/grid.hpp"
#include "edrlab/symplectic.hpp"

namespace edrlab {

inline double parse_number(std::string_view text, std::string_view what) {
  const std::string s(text);
  if (s.empty()) throw ParseError(fmt::format("missing value for {}", what));
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    throw ParseError(fmt::format("invalid number '{}' for {}", s, what));
  return v;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// "k1=v1,k2=v2" -> map; every key must be in `allowed`.
inline std::map<std::string, double> parse_fields(std::string_view body, std::string_view spec,
                                                  std::initializer_list<std::string_view> allowed) {
  std::map<std::string, double> out;
  if (trim(body).empty()) return out;
  for (const auto& item : split(body, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError(fmt::format("expected key=value in '{}'", spec));
    const auto key = trim(std::string_view(item).substr(0, eq));
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) throw ParseError(fmt::format("unknown field '{}' in '{}'", key, spec));
    if (out.count(key)) throw ParseError(fmt::format("duplicate field '{}' in '{}'", key, spec));
    out[key] = parse_number(std::string_view(item).substr(eq + 1), key);
  }
  return out;
}

inline double require_field(const std::map<std::string, double>& f, const std::string& key,
                            std::string_view spec) {
  const auto it = f.find(key);
  if (it == f.end()) throw ParseError(fmt::format("'{}' requires field {}", spec, key));
  return it->second;
}

inline double field_or(const std::map<std::string, double>& f, const std::string& key, double v) {
  const auto it = f.find(key);
  return it == f.end() ? v : it->second;
}

}  // namespace detail

struct Model {
  std::string name;
  CouplingParams params;
  TransferMatrix matrix;
};

inline Model model_from_triple(double alpha, double beta, double gamma, double hbar = 1.0) {
  Model m;
  m.name = fmt::format("{:.17g},{:.17g},{:.17g}", alpha, beta, gamma);
  m.params = CouplingParams(alpha, beta, gamma, hbar);
  m.matrix = solve_dynamics(m.params);
  return m;
}

inline Model von_neumann_model(double hbar = 1.0) {
  Model m = model_from_triple(0, 0, 1, hbar);
  m.name = "von-neumann";
  return m;
}

// Error-free models carry the exact constraint matrix (a, -1, 1, 0); their
// Hamiltonian triple solves to it within rounding.
inline Model error_free_model(double a, double hbar = 1.0) {
  Model m;
  m.params = error_free_params(a, hbar);
  m.matrix = error_free_matrix(a);
  m.name = fmt::format("error-free:a={:.17g}", a);
  return m;
}

inline Model parse_model(std::string_view spec, double hbar = 1.0) {
  const auto s = detail::trim(spec);
  if (s == "von-neumann") return von_neumann_model(hbar);
  if (s.rfind("error-free", 0) == 0) {
    const auto colon = s.find(':');
    if (colon == std::string::npos || s.substr(0, colon) != "error-free")
      throw ParseError(fmt::format("error-free preset needs ':a=<x>' in '{}'", s));
    const auto f = detail::parse_fields(std::string_view(s).substr(colon + 1), s, {"a"});
    return error_free_model(detail::require_field(f, "a", s), hbar);
  }
  const auto parts = detail::split(s, ',');
  if (parts.size() == 3) {
    try {
      return model_from_triple(parse_number(parts[0], "alpha"), parse_number(parts[1], "beta"),
                               parse_number(parts[2], "gamma"), hbar);
    } catch (const DomainError& e) {
      throw ParseError(e.what());
    }
  }
  throw ParseError(fmt::format("unknown model '{}'", s));
}

enum class StateKind { Gaussian, Hermite, Cat };

struct StateSpec {
  std::string text;
  StateKind kind = StateKind::Gaussian;
  // Gaussian: the state itself. Hermite/cat: a Gaussian with the same first
  // and second moments, which is all the closed forms consume.
  GaussianState moments = GaussianState::ground();
  int level = 0;       // hermite
  double offset = 0;   // cat
};

inline StateSpec parse_state(std::string_view spec, double hbar = 1.0) {
  const auto s = detail::trim(spec);
  const auto colon = s.find(':');
  const auto head = s.substr(0, colon);
  const std::string_view body =
      colon == std::string::npos ? std::string_view{} : std::string_view(s).substr(colon + 1);
  StateSpec out;
  out.text = s;
  if (head == "ground") {
    if (!detail::trim(body).empty()) throw ParseError("'ground' takes no fields");
    out.moments = GaussianState::ground(hbar);
  } else if (head == "squeezed") {
    const auto f = detail::parse_fields(body, s, {"r"});
    out.moments = GaussianState::squeezed(detail::require_field(f, "r", s), hbar);
  } else if (head == "displaced") {
    const auto f = detail::parse_fields(body, s, {"q", "p"});
    out.moments =
        GaussianState::displaced(detail::field_or(f, "q", 0), detail::field_or(f, "p", 0), hbar);
  } else if (head == "contractive") {
    const auto f = detail::parse_fields(body, s, {"r"});
    out.moments = GaussianState::contractive(detail::require_field(f, "r", s), hbar);
  } else if (head == "hermite") {
    const auto f = detail::parse_fields(body, s, {"n"});
    const double n = detail::require_field(f, "n", s);
    if (n < 0 || n != std::floor(n) || n > 1000)
      throw ParseError(fmt::format("hermite level must be an integer in [0, 1000] in '{}'", s));
    out.kind = StateKind::Hermite;
    out.level = static_cast<int>(n);
    out.moments = hermite_moments(out.level, hbar);
  } else if (head == "cat") {
    const auto f = detail::parse_fields(body, s, {"d"});
    out.kind = StateKind::Cat;
    out.offset = detail::require_field(f, "d", s);
    out.moments = cat_moments(out.offset, hbar);
  } else if (head == "moments") {
    const auto f = detail::parse_fields(body, s, {"q", "p", "vq", "vp", "cov"});
    out.moments = GaussianState::make(detail::field_or(f, "q", 0), detail::field_or(f, "p", 0),
                                      detail::require_field(f, "vq", s),
                                      detail::require_field(f, "vp", s),
                                      detail::field_or(f, "cov", 0), hbar);
  } else {
    throw ParseError(fmt::format("unknown state '{}'", s));
  }
  return out;
}

inline GridWavefunction to_grid(const StateSpec& spec, std::size_t n, double span_sigmas,
                                double hbar) {
  switch (spec.kind) {
    case StateKind::Hermite: return hermite_state(spec.level, n, span_sigmas, hbar);
    case StateKind::Cat: return cat_state(spec.offset, n, span_sigmas, hbar);
    case StateKind::Gaussian: break;
  }
  return from_gaussian(spec.moments, n, span_sigmas, hbar);
}

// "<x>" or "<lo>:<hi>:<count>" (count >= 1, inclusive endpoints).
inline std::vector<double> parse_range(std::string_view text) {
  const auto parts = detail::split(text, ':');
  if (parts.size() == 1) return {parse_number(parts[0], "value")};
  if (parts.size() != 3) throw ParseError(fmt::format("range must be lo:hi:count, got '{}'", text));
  const double lo = parse_number(parts[0], "range start");
  const double hi = parse_number(parts[1], "range end");
  const double count = parse_number(parts[2], "range count");
  if (count < 1 || count != std::floor(count) || count > 1e6)
    throw ParseError(fmt::format("range count must be a positive integer in '{}'", text));
  const auto n = static_cast<std::size_t>(count);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

}  // namespace edrlab
