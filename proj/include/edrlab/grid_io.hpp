#pragma once

// Wavefunction exchange formats.
//
// CSV: header "q,re,im", one row per grid point in increasing q.
// JSON: {"x_min": ..., "dx": ..., "n": ..., "amplitudes": [[re, im], ...]}

#include <fmt/format.h>

#include <cmath>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "edrlab/grid.hpp"

namespace edrlab {

inline void write_csv(std::ostream& os, const GridWavefunction& w) {
  os << "q,re,im\n";
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto a = w.amplitudes()[i];
    os << fmt::format("{:.17g},{:.17g},{:.17g}\n", w.position(i), a.real(), a.imag());
  }
}

inline GridWavefunction read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw GridError("empty wavefunction CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "q,re,im") throw GridError("wavefunction CSV must start with header q,re,im");

  std::vector<double> q;
  std::vector<std::complex<double>> amps;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::string field[3];
    for (auto& f : field)
      if (!std::getline(row, f, ',')) throw GridError("malformed CSV row: " + line);
    try {
      q.push_back(std::stod(field[0]));
      amps.emplace_back(std::stod(field[1]), std::stod(field[2]));
    } catch (const std::exception&) {
      throw GridError("non-numeric CSV row: " + line);
    }
  }
  if (q.size() < 2) throw GridError("wavefunction CSV needs at least two rows");
  const double dx = (q.back() - q.front()) / static_cast<double>(q.size() - 1);
  for (std::size_t i = 0; i < q.size(); ++i)
    if (std::abs(q[i] - (q.front() + static_cast<double>(i) * dx)) > 1e-9 * std::abs(dx) * q.size())
      throw GridError("wavefunction CSV grid is not uniform");
  return GridWavefunction::make(std::move(amps), q.front(), dx);
}

inline nlohmann::ordered_json to_json(const GridWavefunction& w) {
  nlohmann::ordered_json j;
  j["x_min"] = w.x_min();
  j["dx"] = w.dx();
  j["n"] = w.size();
  auto amps = nlohmann::ordered_json::array();
  for (const auto& a : w.amplitudes()) amps.push_back({a.real(), a.imag()});
  j["amplitudes"] = std::move(amps);
  return j;
}

inline GridWavefunction wavefunction_from_json(const nlohmann::ordered_json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    const auto& arr = j.at("amplitudes");
    if (arr.size() != n) throw GridError("amplitude count does not match n");
    std::vector<std::complex<double>> amps;
    amps.reserve(n);
    for (const auto& a : arr) {
      if (!a.is_array() || a.size() != 2) throw GridError("amplitude must be [re, im]");
      amps.emplace_back(a[0].get<double>(), a[1].get<double>());
    }
    return GridWavefunction::make(std::move(amps), j.at("x_min").get<double>(),
                                  j.at("dx").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw GridError(std::string("malformed wavefunction JSON: ") + e.what());
  }
}

}  // namespace edrlab
