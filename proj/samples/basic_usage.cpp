// Solve a coupling, evaluate the rms error and disturbance for a ground-state
// object and probe, and compare the product with the sharp bound.

#include <fmt/format.h>

#include "edrlab/moments.hpp"
#include "edrlab/presets.hpp"
#include "edrlab/supremum.hpp"

int main() {
  using namespace edrlab;
  const double hbar = 1.0;
  const auto psi = GaussianState::ground(hbar);
  const auto xi = GaussianState::ground(hbar);

  for (const auto& spec : {"von-neumann", "error-free:a=1", "0,1,1"}) {
    const Model model = parse_model(spec, hbar);
    const auto m = model.matrix.as<double>();
    const auto check = edr_check(model.matrix, psi, xi, hbar);
    fmt::print("{:<16} a={:+.6f} b={:+.6f} c={:+.6f} d={:+.6f}\n", model.name, m.a, m.b, m.c, m.d);
    fmt::print("{:<16} eps={:.6f} eta={:.6f} product={:.6f} bound={:.6f}\n", "", check.epsilon,
               check.eta, check.product, check.sharp_bound);
    const auto verdict = appleby_product(model.matrix, xi);
    fmt::print("{:<16} uniform product: {}\n", "", to_string(verdict.kind));
  }
}
