#include "qnnbench/gates.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qnnbench {

std::string_view gate_name(Gate g) noexcept {
  switch (g) {
    case Gate::H: return "h";
    case Gate::X: return "x";
    case Gate::Y: return "y";
    case Gate::Z: return "z";
    case Gate::RX: return "rx";
    case Gate::RY: return "ry";
    case Gate::RZ: return "rz";
    case Gate::Phase: return "p";
    case Gate::CX: return "cx";
    case Gate::CZ: return "cz";
  }
  return "?";
}

Gate gate_from_name(std::string_view name) {
  for (Gate g : {Gate::H, Gate::X, Gate::Y, Gate::Z, Gate::RX, Gate::RY, Gate::RZ, Gate::Phase,
                 Gate::CX, Gate::CZ}) {
    if (gate_name(g) == name) return g;
  }
  throw std::invalid_argument("unknown gate name '" + std::string(name) + "'");
}

std::vector<cplx> gate_matrix(Gate g, double angle) {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  const cplx i{0.0, 1.0};
  const double r = 1.0 / std::sqrt(2.0);
  switch (g) {
    case Gate::H: return {r, r, r, -r};
    case Gate::X: return {0.0, 1.0, 1.0, 0.0};
    case Gate::Y: return {0.0, -i, i, 0.0};
    case Gate::Z: return {1.0, 0.0, 0.0, -1.0};
    case Gate::RX: return {c, -i * s, -i * s, c};
    case Gate::RY: return {c, -s, s, c};
    case Gate::RZ: return {std::polar(1.0, -angle / 2.0), 0.0, 0.0, std::polar(1.0, angle / 2.0)};
    case Gate::Phase: return {1.0, 0.0, 0.0, std::polar(1.0, angle)};
    case Gate::CX:
      // |c t>: 0 -> 0, 1 (c=1,t=0) -> 3, 2 -> 2, 3 -> 1
      return {1, 0, 0, 0,  //
              0, 0, 0, 1,  //
              0, 0, 1, 0,  //
              0, 1, 0, 0};
    case Gate::CZ:
      return {1, 0, 0, 0,  //
              0, 1, 0, 0,  //
              0, 0, 1, 0,  //
              0, 0, 0, -1};
  }
  throw std::invalid_argument("unhandled gate");
}

}  // namespace qnnbench
