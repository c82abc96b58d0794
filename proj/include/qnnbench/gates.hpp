#pragma once

#include <array>
#include <complex>
#include <string_view>
#include <vector>

namespace qnnbench {

using cplx = std::complex<double>;

enum class Gate { H, X, Y, Z, RX, RY, RZ, Phase, CX, CZ };

constexpr int gate_arity(Gate g) noexcept { return (g == Gate::CX || g == Gate::CZ) ? 2 : 1; }

constexpr bool gate_is_parametric(Gate g) noexcept {
  return g == Gate::RX || g == Gate::RY || g == Gate::RZ || g == Gate::Phase;
}

std::string_view gate_name(Gate g) noexcept;

/// Parses the names produced by gate_name ("h", "rx", "cx", ...).
Gate gate_from_name(std::string_view name);

/// Row-major unitary of the gate. 2x2 for single-qubit gates; 4x4 for
/// two-qubit gates, where the local basis index is
/// bit(qubits[0]) | bit(qubits[1]) << 1 (control first for CX).
std::vector<cplx> gate_matrix(Gate g, double angle = 0.0);

}  // namespace qnnbench
