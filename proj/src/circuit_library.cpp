#include "qnnbench/circuit_library.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

#include "qnnbench/rng.hpp"

namespace qnnbench {

std::string_view feature_map_name(FeatureMapKind k) noexcept {
  return k == FeatureMapKind::Z ? "ZFeatureMap" : "ZZFeatureMap";
}

FeatureMapKind feature_map_from_name(std::string_view name) {
  if (name == "ZFeatureMap") return FeatureMapKind::Z;
  if (name == "ZZFeatureMap") return FeatureMapKind::ZZ;
  throw std::invalid_argument("unknown feature map '" + std::string(name) + "'");
}

std::string_view ansatz_name(AnsatzKind k) noexcept {
  switch (k) {
    case AnsatzKind::RealAmplitudes: return "RealAmplitudes";
    case AnsatzKind::EfficientSU2: return "EfficientSU2";
    case AnsatzKind::TwoLocal: return "TwoLocal";
    case AnsatzKind::PauliTwoDesign: return "PauliTwoDesign";
  }
  return "?";
}

AnsatzKind ansatz_from_name(std::string_view name) {
  for (AnsatzKind k : {AnsatzKind::RealAmplitudes, AnsatzKind::EfficientSU2, AnsatzKind::TwoLocal,
                       AnsatzKind::PauliTwoDesign}) {
    if (ansatz_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown ansatz '" + std::string(name) + "'");
}

bool topology_allowed(FeatureMapKind k, Topology) noexcept { return k == FeatureMapKind::ZZ; }

bool topology_allowed(AnsatzKind k, Topology t) noexcept {
  switch (k) {
    case AnsatzKind::TwoLocal: return true;
    case AnsatzKind::RealAmplitudes:
    case AnsatzKind::EfficientSU2: return t != Topology::Pairwise;
    case AnsatzKind::PauliTwoDesign: return false;
  }
  return false;
}

void FeatureMapSpec::validate() const {
  if (n_features < 1) throw std::invalid_argument("feature_map.n_features must be >= 1");
  if (reps < 1) throw std::invalid_argument("feature_map.reps must be >= 1");
  if (kind == FeatureMapKind::Z) {
    if (topology) {
      throw std::invalid_argument("feature_map.kind=ZFeatureMap does not take feature_map.topology=" +
                                  std::string(topology_name(*topology)));
    }
    return;
  }
  if (n_features < 2) throw std::invalid_argument("ZZFeatureMap needs at least two features");
  if (!topology) throw std::invalid_argument("feature_map.kind=ZZFeatureMap requires feature_map.topology");
}

void AnsatzSpec::validate() const {
  if (n_qubits < 1) throw std::invalid_argument("ansatz.n_qubits must be >= 1");
  if (reps < 1) throw std::invalid_argument("ansatz.reps must be >= 1");
  if (kind == AnsatzKind::PauliTwoDesign) {
    if (topology) {
      throw std::invalid_argument("ansatz.kind=PauliTwoDesign does not take ansatz.topology=" +
                                  std::string(topology_name(*topology)));
    }
  } else {
    if (!topology) {
      throw std::invalid_argument("ansatz.kind=" + std::string(ansatz_name(kind)) +
                                  " requires ansatz.topology");
    }
    if (!topology_allowed(kind, *topology)) {
      throw std::invalid_argument("ansatz.kind=" + std::string(ansatz_name(kind)) +
                                  " does not support ansatz.topology=" +
                                  std::string(topology_name(*topology)));
    }
  }
  if (n_qubits < 2) throw std::invalid_argument(std::string(ansatz_name(kind)) + " needs at least two qubits");
}

ParamCircuit build_feature_map(const FeatureMapSpec& spec) {
  spec.validate();
  const int n = spec.n_features;
  ParamCircuit c(n);
  std::vector<Slot> x;
  for (int i = 0; i < n; ++i) x.push_back(c.new_data_slot());

  for (int r = 0; r < spec.reps; ++r) {
    for (int q = 0; q < n; ++q) c.add(Gate::H, q);
    for (int q = 0; q < n; ++q) c.add(Gate::Phase, q, ParamExpression::scaled(x[q], 2.0));
    if (spec.kind == FeatureMapKind::ZZ) {
      for (auto [i, j] : entanglement_pairs(*spec.topology, n, r)) {
        c.add(Gate::CX, i, j);
        c.add(Gate::Phase, j, ParamExpression::pi_minus_product({x[i], x[j]}, 2.0));
        c.add(Gate::CX, i, j);
      }
    }
  }
  return c;
}

namespace {

void rotation_layer(ParamCircuit& c, Gate g) {
  for (int q = 0; q < c.n_qubits(); ++q) c.add(g, q, ParamExpression::scaled(c.new_weight_slot()));
}

void random_rotation_layer(ParamCircuit& c, Rng& rng) {
  static constexpr Gate kChoices[3] = {Gate::RX, Gate::RY, Gate::RZ};
  for (int q = 0; q < c.n_qubits(); ++q) {
    c.add(kChoices[rng.below(3)], q, ParamExpression::scaled(c.new_weight_slot()));
  }
}

void entangle(ParamCircuit& c, Topology t, int block, Gate g) {
  for (auto [i, j] : entanglement_pairs(t, c.n_qubits(), block)) c.add(g, i, j);
}

}  // namespace

ParamCircuit build_ansatz(const AnsatzSpec& spec) {
  spec.validate();
  ParamCircuit c(spec.n_qubits);
  switch (spec.kind) {
    case AnsatzKind::RealAmplitudes:
    case AnsatzKind::TwoLocal:
      for (int r = 0; r < spec.reps; ++r) {
        rotation_layer(c, Gate::RY);
        entangle(c, *spec.topology, r, Gate::CX);
      }
      rotation_layer(c, Gate::RY);
      break;
    case AnsatzKind::EfficientSU2:
      for (int r = 0; r < spec.reps; ++r) {
        rotation_layer(c, Gate::RY);
        rotation_layer(c, Gate::RZ);
        entangle(c, *spec.topology, r, Gate::CX);
      }
      rotation_layer(c, Gate::RY);
      rotation_layer(c, Gate::RZ);
      break;
    case AnsatzKind::PauliTwoDesign: {
      Rng rng(spec.structure_seed);
      for (int q = 0; q < spec.n_qubits; ++q) {
        c.add(Gate::RY, q, ParamExpression::fixed(std::numbers::pi / 4.0));
      }
      for (int r = 0; r < spec.reps; ++r) {
        random_rotation_layer(c, rng);
        entangle(c, Topology::Pairwise, r, Gate::CZ);
      }
      random_rotation_layer(c, rng);
      break;
    }
  }
  return c;
}

int expected_weight_count(const AnsatzSpec& spec) {
  const int per_layer = spec.kind == AnsatzKind::EfficientSU2 ? 2 * spec.n_qubits : spec.n_qubits;
  return (spec.reps + 1) * per_layer;
}

}  // namespace qnnbench
