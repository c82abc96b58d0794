#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qnnbench/gates.hpp"

namespace qnnbench {

/// Reference to a circuit parameter. Data slots carry feature values x,
/// weight slots carry the trainable angles.
struct Slot {
  enum class Kind { Data, Weight };
  Kind kind = Kind::Weight;
  int index = 0;

  static Slot data(int i) { return {Kind::Data, i}; }
  static Slot weight(int i) { return {Kind::Weight, i}; }
  friend bool operator==(const Slot&, const Slot&) = default;
};

/// Angle expression of the form
///   constant + sum_i coeff_i * slot_i + product_coeff * prod_j (pi - slot_j).
/// The product term is only present when product_slots is non-empty.
struct ParamExpression {
  double constant = 0.0;
  std::vector<std::pair<Slot, double>> linear;
  double product_coeff = 0.0;
  std::vector<Slot> product_slots;

  static ParamExpression fixed(double angle);
  static ParamExpression scaled(Slot s, double coeff = 1.0);
  static ParamExpression pi_minus_product(std::vector<Slot> slots, double coeff = 1.0);

  double evaluate(std::span<const double> data, std::span<const double> weights) const;
  std::string to_string() const;
};

struct Instruction {
  Gate gate = Gate::H;
  std::array<int, 2> qubits{0, 0};
  std::optional<ParamExpression> param;

  int arity() const { return gate_arity(gate); }
};

struct BoundInstruction {
  Gate gate = Gate::H;
  std::array<int, 2> qubits{0, 0};
  double angle = 0.0;
};

/// Fully numeric circuit, ready for simulation.
struct BoundCircuit {
  int n_qubits = 0;
  std::vector<BoundInstruction> instructions;
};

/// Ordered gate list with symbolic parameter slots. Immutable once built and
/// handed out; builders use the add() family.
class ParamCircuit {
 public:
  explicit ParamCircuit(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  int data_slot_count() const { return n_data_; }
  int weight_slot_count() const { return n_weights_; }
  const std::vector<Instruction>& instructions() const { return instructions_; }
  bool empty() const { return instructions_.empty(); }

  Slot new_data_slot() { return Slot::data(n_data_++); }
  Slot new_weight_slot() { return Slot::weight(n_weights_++); }

  /// Appends a fixed gate (H, X, Y, Z, CX, CZ).
  ParamCircuit& add(Gate g, int q0, int q1 = -1);
  /// Appends a rotation whose angle is an expression over declared slots.
  ParamCircuit& add(Gate g, int q, ParamExpression angle);

  /// Number of layers when gates on disjoint qubits are packed greedily.
  int depth() const;

  /// Plain-text listing, one instruction per line.
  std::string dump() const;

  /// Appends `next` after `first`; slot indices of `next` are shifted past
  /// those of `first`.
  static ParamCircuit compose(const ParamCircuit& first, const ParamCircuit& next);

 private:
  void check_qubit(int q) const;
  void check_slots(const ParamExpression& e) const;

  int n_qubits_;
  int n_data_ = 0;
  int n_weights_ = 0;
  std::vector<Instruction> instructions_;
};

BoundCircuit bind(const ParamCircuit& circuit, std::span<const double> data,
                  std::span<const double> weights);

/// Binds a circuit that has no parameter slots; throws if any slot is unbound.
BoundCircuit bind_fixed(const ParamCircuit& circuit);

inline int weight_count(const ParamCircuit& circuit) { return circuit.weight_slot_count(); }

}  // namespace qnnbench
