#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "qnnbench/circuit.hpp"
#include "qnnbench/topology.hpp"

namespace qnnbench {

enum class FeatureMapKind { Z, ZZ };
enum class AnsatzKind { RealAmplitudes, EfficientSU2, TwoLocal, PauliTwoDesign };

std::string_view feature_map_name(FeatureMapKind k) noexcept;
FeatureMapKind feature_map_from_name(std::string_view name);
std::string_view ansatz_name(AnsatzKind k) noexcept;
AnsatzKind ansatz_from_name(std::string_view name);

struct FeatureMapSpec {
  FeatureMapKind kind = FeatureMapKind::Z;
  int n_features = 2;
  int reps = 2;
  std::optional<Topology> topology;  // ZZ only

  /// Interaction order of the Pauli expansion: 1 for Z, 2 for ZZ.
  int connectivity() const { return kind == FeatureMapKind::Z ? 1 : 2; }
  void validate() const;
};

struct AnsatzSpec {
  AnsatzKind kind = AnsatzKind::RealAmplitudes;
  int n_qubits = 2;
  int reps = 3;
  std::optional<Topology> topology;  // absent for PauliTwoDesign
  std::uint64_t structure_seed = 0;  // PauliTwoDesign rotation choices

  void validate() const;
};

bool topology_allowed(FeatureMapKind k, Topology t) noexcept;
bool topology_allowed(AnsatzKind k, Topology t) noexcept;

/// Pauli-expansion encoding. Each repetition applies H on every qubit, then
/// P(2 x_i) on qubit i; the ZZ map additionally applies, for every topology
/// pair (i, j), CX(i,j) P(2 (pi - x_i)(pi - x_j)) on j, CX(i,j).
/// The returned circuit has n_features data slots and no weight slots.
ParamCircuit build_feature_map(const FeatureMapSpec& spec);

/// Alternating rotation/entanglement ansatz; weight slots only.
///   RealAmplitudes, TwoLocal  reps x [RY layer, CX pairs] + final RY layer
///   EfficientSU2              reps x [RY layer, RZ layer, CX pairs] + final RY, RZ
///   PauliTwoDesign            RY(pi/4) on all, reps x [random RX/RY/RZ layer,
///                             CZ on staggered pairs] + final random layer
ParamCircuit build_ansatz(const AnsatzSpec& spec);

/// Closed-form number of trainable angles for a spec.
int expected_weight_count(const AnsatzSpec& spec);

}  // namespace qnnbench
