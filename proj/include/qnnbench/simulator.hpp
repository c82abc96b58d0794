#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qnnbench/circuit.hpp"
#include "qnnbench/gates.hpp"
#include "qnnbench/noise.hpp"
#include "qnnbench/rng.hpp"

namespace qnnbench {

inline constexpr int kMaxQubits = 20;

/// Dense n-qubit state. Qubit 0 is the least significant bit of the basis
/// index; bitstrings are printed most significant qubit first.
class StateVector {
 public:
  /// |0...0>
  explicit StateVector(int n_qubits);

  /// Takes ownership of amplitudes; size must be a power of two.
  static StateVector from_amplitudes(std::vector<cplx> amplitudes);

  int n_qubits() const { return n_qubits_; }
  std::size_t size() const { return amps_.size(); }
  std::span<const cplx> amplitudes() const { return amps_; }
  cplx amplitude(std::uint64_t basis_index) const { return amps_.at(basis_index); }

  double norm() const;
  std::vector<double> probabilities() const;

  /// Applies a gate in place. Qubits must be distinct, in range, and match
  /// the gate arity.
  void apply(Gate g, std::span<const int> qubits, double angle = 0.0);
  void apply(const BoundInstruction& ins);

 private:
  void apply_1q(Gate g, int q, double angle);
  void apply_2q(Gate g, int q0, int q1);

  int n_qubits_;
  std::vector<cplx> amps_;
};

/// Bitstring of `basis_index`, most significant qubit first.
std::string to_bitstring(std::uint64_t basis_index, int n_qubits);

struct CountsHistogram {
  int n_qubits = 0;
  std::uint64_t shots = 0;
  std::map<std::uint64_t, std::uint64_t> counts;  // basis index -> occurrences

  std::uint64_t total() const;
  std::map<std::string, std::uint64_t> by_bitstring() const;
  friend bool operator==(const CountsHistogram&, const CountsHistogram&) = default;
};

StateVector apply_instruction(StateVector state, Gate g, std::span<const int> qubits,
                              double angle = 0.0);

/// Runs every instruction on |0...0>.
StateVector run_statevector(const BoundCircuit& circuit);
/// Throws std::invalid_argument if the circuit still has parameter slots.
StateVector run_statevector(const ParamCircuit& circuit);

/// Applies instructions to an existing state (used to resume from a cached
/// encoding).
void run_on(StateVector& state, const BoundCircuit& circuit);

/// Born-rule sampling. Draws exactly one uniform from `rng` per shot, in
/// shot order.
CountsHistogram sample_counts(const StateVector& state, std::uint64_t shots, Rng& rng);

/// Stochastic Pauli-trajectory execution. For every shot, after each gate,
/// with the gate's depolarizing probability, a Pauli drawn uniformly from all
/// 4^k Paulis on its k qubits (identity included) is inserted; the measured bitstring then passes
/// through independent per-qubit readout flips. Random draws are only made
/// for non-zero probabilities, so an all-zero model consumes `rng` exactly
/// like sample_counts on the noiseless state.
CountsHistogram run_noisy_trajectories(const BoundCircuit& circuit, const NoiseModel& noise,
                                       std::uint64_t shots, Rng& rng);

}  // namespace qnnbench
