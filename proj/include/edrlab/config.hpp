#pragma once

// Run configuration: INI-style sections of key = value pairs. Every key is
// optional; unknown sections or keys are rejected.
//
//   hbar = 1
//
//   [grid]
//   n = 4096               ; power of two >= 16
//   span_sigmas = 12       ; half-width of each grid in standard deviations
//
//   [tolerances]
//   oracle_relative = 1e-6
//   sharp_bound = 1e-9
//   determinant = 1e-12
//   error_free = 1e-9
//   continuity = 1e-8
//
//   [sweep]
//   decades = 4
//   width_fractions = 1 0.25 0.0625
//   eps_eig = 0.01
//   probe_bound = 1000
//   max_decades = 12
//
//   [samples]
//   seed = 20131016
//   symplectic = 10000
//   sharp_bound = 5000
//   oracle = 100
//   sandwich = 1000
//
//   [states]
//   psi = ground
//   xi = ground
//
//   [models]               ; name = model spec, reported in file order
//   von-neumann = von-neumann
//   error-free-1 = error-free:a=1

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdint>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "edrlab/errors.hpp"
#include "edrlab/grid.hpp"
#include "edrlab/presets.hpp"
#include "edrlab/supremum.hpp"

namespace edrlab {

struct Tolerances {
  double oracle_relative = 1e-6;
  double sharp_bound = 1e-9;
  double determinant = 1e-12;
  double error_free = 1e-9;
  double continuity = 1e-8;
};

struct SampleCounts {
  std::uint64_t seed = 20131016;
  int symplectic = 10000;
  int sharp_bound = 5000;
  int oracle = 100;
  int sandwich = 1000;
};

struct RunConfig {
  double hbar = 1.0;
  std::size_t grid_n = kDefaultGridSize;
  double grid_span_sigmas = kDefaultSpanSigmas;
  Tolerances tolerances;
  SweepConfig sweep;
  double eps_eig = 0.01;
  SampleCounts samples;
  std::string psi = "ground";
  std::string xi = "ground";
  std::vector<std::pair<std::string, std::string>> models{
      {"von-neumann", "von-neumann"},
      {"error-free-1", "error-free:a=1"},
      {"error-free-2", "error-free:a=2"},
      {"hyperbolic", "0,1,1"},
      {"elliptic", "0,-1,1"},
  };

  void validate() const {
    if (!(hbar > 0)) throw ConfigError("hbar must be positive");
    if (grid_n < 16 || !is_power_of_two(grid_n))
      throw ConfigError("grid n must be a power of two >= 16");
    if (!(grid_span_sigmas > 0)) throw ConfigError("grid span must be positive");
    for (double t : {tolerances.oracle_relative, tolerances.sharp_bound, tolerances.determinant,
                     tolerances.error_free, tolerances.continuity})
      if (!(t > 0)) throw ConfigError("tolerances must be positive");
    if (!(eps_eig > 0)) throw ConfigError("eps_eig must be positive");
    if (samples.symplectic <= 0 || samples.sharp_bound <= 0 || samples.oracle <= 0 ||
        samples.sandwich <= 0)
      throw ConfigError("sample counts must be positive");
    if (models.empty()) throw ConfigError("at least one model is required");
    sweep.validate();
  }
};

namespace detail {

using boost::property_tree::ptree;

template <class T>
T config_value(const ptree& node, const std::string& path) {
  try {
    return node.get_value<T>();
  } catch (const boost::property_tree::ptree_error&) {
    throw ConfigError(fmt::format("invalid value '{}' for {}", node.data(), path));
  }
}

inline std::vector<double> config_list(const std::string& text, const std::string& path) {
  std::istringstream is(text);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    try {
      out.push_back(parse_number(tok, path));
    } catch (const ParseError& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

}  // namespace detail

inline RunConfig parse_config(std::istream& is) {
  using detail::config_value;
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  RunConfig cfg;
  bool models_seen = false;
  for (const auto& [key, node] : tree) {
    if (node.empty() && key == "hbar") {
      cfg.hbar = config_value<double>(node, key);
      continue;
    }
    if (node.empty()) throw ConfigError("unknown top-level key '" + key + "'");
    for (const auto& [k, v] : node) {
      const std::string path = key + "." + k;
      if (key == "grid" && k == "n") cfg.grid_n = config_value<std::size_t>(v, path);
      else if (key == "grid" && k == "span_sigmas") cfg.grid_span_sigmas = config_value<double>(v, path);
      else if (key == "tolerances" && k == "oracle_relative") cfg.tolerances.oracle_relative = config_value<double>(v, path);
      else if (key == "tolerances" && k == "sharp_bound") cfg.tolerances.sharp_bound = config_value<double>(v, path);
      else if (key == "tolerances" && k == "determinant") cfg.tolerances.determinant = config_value<double>(v, path);
      else if (key == "tolerances" && k == "error_free") cfg.tolerances.error_free = config_value<double>(v, path);
      else if (key == "tolerances" && k == "continuity") cfg.tolerances.continuity = config_value<double>(v, path);
      else if (key == "sweep" && k == "decades") cfg.sweep.decades = config_value<int>(v, path);
      else if (key == "sweep" && k == "width_fractions") cfg.sweep.width_fractions = detail::config_list(v.data(), path);
      else if (key == "sweep" && k == "eps_eig") cfg.eps_eig = config_value<double>(v, path);
      else if (key == "sweep" && k == "probe_bound") cfg.sweep.probe_bound = config_value<double>(v, path);
      else if (key == "sweep" && k == "max_decades") cfg.sweep.max_decades = config_value<int>(v, path);
      else if (key == "samples" && k == "seed") cfg.samples.seed = config_value<std::uint64_t>(v, path);
      else if (key == "samples" && k == "symplectic") cfg.samples.symplectic = config_value<int>(v, path);
      else if (key == "samples" && k == "sharp_bound") cfg.samples.sharp_bound = config_value<int>(v, path);
      else if (key == "samples" && k == "oracle") cfg.samples.oracle = config_value<int>(v, path);
      else if (key == "samples" && k == "sandwich") cfg.samples.sandwich = config_value<int>(v, path);
      else if (key == "states" && k == "psi") cfg.psi = v.data();
      else if (key == "states" && k == "xi") cfg.xi = v.data();
      else if (key == "models") {
        if (!models_seen) cfg.models.clear();
        models_seen = true;
        cfg.models.emplace_back(k, v.data());
      } else {
        throw ConfigError("unknown config key '" + path + "'");
      }
    }
  }
  cfg.validate();
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  return parse_config(in);
}

}  // namespace edrlab
