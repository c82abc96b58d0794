#include "qnnbench/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qnnbench {

namespace {

double slot_value(Slot s, std::span<const double> data, std::span<const double> weights) {
  return s.kind == Slot::Kind::Data ? data[static_cast<std::size_t>(s.index)]
                                    : weights[static_cast<std::size_t>(s.index)];
}

std::string slot_name(Slot s) {
  return (s.kind == Slot::Kind::Data ? "x[" : "w[") + std::to_string(s.index) + "]";
}

Slot shifted(Slot s, int data_offset, int weight_offset) {
  return s.kind == Slot::Kind::Data ? Slot::data(s.index + data_offset)
                                    : Slot::weight(s.index + weight_offset);
}

}  // namespace

ParamExpression ParamExpression::fixed(double angle) {
  ParamExpression e;
  e.constant = angle;
  return e;
}

ParamExpression ParamExpression::scaled(Slot s, double coeff) {
  ParamExpression e;
  e.linear.emplace_back(s, coeff);
  return e;
}

ParamExpression ParamExpression::pi_minus_product(std::vector<Slot> slots, double coeff) {
  if (slots.empty()) throw std::invalid_argument("product term needs at least one slot");
  ParamExpression e;
  e.product_coeff = coeff;
  e.product_slots = std::move(slots);
  return e;
}

double ParamExpression::evaluate(std::span<const double> data,
                                 std::span<const double> weights) const {
  double v = constant;
  for (const auto& [s, c] : linear) v += c * slot_value(s, data, weights);
  if (!product_slots.empty()) {
    double p = product_coeff;
    for (Slot s : product_slots) p *= std::numbers::pi - slot_value(s, data, weights);
    v += p;
  }
  return v;
}

std::string ParamExpression::to_string() const {
  std::ostringstream os;
  bool first = true;
  if (constant != 0.0 || (linear.empty() && product_slots.empty())) {
    os << constant;
    first = false;
  }
  for (const auto& [s, c] : linear) {
    if (!first) os << " + ";
    if (c != 1.0) os << c << "*";
    os << slot_name(s);
    first = false;
  }
  if (!product_slots.empty()) {
    if (!first) os << " + ";
    os << product_coeff;
    for (Slot s : product_slots) os << "*(pi-" << slot_name(s) << ")";
  }
  return os.str();
}

ParamCircuit::ParamCircuit(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("circuit needs at least one qubit");
}

void ParamCircuit::check_qubit(int q) const {
  if (q < 0 || q >= n_qubits_) {
    throw std::out_of_range("qubit index " + std::to_string(q) + " out of range for " +
                            std::to_string(n_qubits_) + "-qubit circuit");
  }
}

void ParamCircuit::check_slots(const ParamExpression& e) const {
  auto check = [&](Slot s) {
    const int limit = s.kind == Slot::Kind::Data ? n_data_ : n_weights_;
    if (s.index < 0 || s.index >= limit) {
      throw std::invalid_argument("expression references undeclared slot " + slot_name(s));
    }
  };
  for (const auto& term : e.linear) check(term.first);
  for (Slot s : e.product_slots) check(s);
}

ParamCircuit& ParamCircuit::add(Gate g, int q0, int q1) {
  if (gate_is_parametric(g)) {
    throw std::invalid_argument(std::string(gate_name(g)) + " needs an angle expression");
  }
  check_qubit(q0);
  if (gate_arity(g) == 2) {
    check_qubit(q1);
    if (q0 == q1) throw std::invalid_argument("two-qubit gate on identical qubits");
  } else if (q1 != -1) {
    throw std::invalid_argument(std::string(gate_name(g)) + " takes one qubit");
  }
  instructions_.push_back({g, {q0, gate_arity(g) == 2 ? q1 : 0}, std::nullopt});
  return *this;
}

ParamCircuit& ParamCircuit::add(Gate g, int q, ParamExpression angle) {
  if (!gate_is_parametric(g)) {
    throw std::invalid_argument(std::string(gate_name(g)) + " takes no angle");
  }
  check_qubit(q);
  check_slots(angle);
  instructions_.push_back({g, {q, 0}, std::move(angle)});
  return *this;
}

int ParamCircuit::depth() const {
  std::vector<int> level(static_cast<std::size_t>(n_qubits_), 0);
  int d = 0;
  for (const auto& ins : instructions_) {
    int l = level[static_cast<std::size_t>(ins.qubits[0])];
    if (ins.arity() == 2) l = std::max(l, level[static_cast<std::size_t>(ins.qubits[1])]);
    ++l;
    level[static_cast<std::size_t>(ins.qubits[0])] = l;
    if (ins.arity() == 2) level[static_cast<std::size_t>(ins.qubits[1])] = l;
    d = std::max(d, l);
  }
  return d;
}

std::string ParamCircuit::dump() const {
  std::ostringstream os;
  for (const auto& ins : instructions_) {
    os << gate_name(ins.gate);
    if (ins.param) os << "(" << ins.param->to_string() << ")";
    os << " q" << ins.qubits[0];
    if (ins.arity() == 2) os << ",q" << ins.qubits[1];
    os << "\n";
  }
  return os.str();
}

ParamCircuit ParamCircuit::compose(const ParamCircuit& first, const ParamCircuit& next) {
  if (first.n_qubits_ != next.n_qubits_) {
    throw std::invalid_argument("cannot compose circuits of different widths");
  }
  ParamCircuit out = first;
  const int doff = first.n_data_;
  const int woff = first.n_weights_;
  out.n_data_ += next.n_data_;
  out.n_weights_ += next.n_weights_;
  for (Instruction ins : next.instructions_) {
    if (ins.param) {
      for (auto& term : ins.param->linear) term.first = shifted(term.first, doff, woff);
      for (auto& s : ins.param->product_slots) s = shifted(s, doff, woff);
    }
    out.instructions_.push_back(std::move(ins));
  }
  return out;
}

BoundCircuit bind(const ParamCircuit& circuit, std::span<const double> data,
                  std::span<const double> weights) {
  if (data.size() != static_cast<std::size_t>(circuit.data_slot_count())) {
    throw std::invalid_argument("data vector has " + std::to_string(data.size()) +
                                " entries, circuit declares " +
                                std::to_string(circuit.data_slot_count()));
  }
  if (weights.size() != static_cast<std::size_t>(circuit.weight_slot_count())) {
    throw std::invalid_argument("weight vector has " + std::to_string(weights.size()) +
                                " entries, circuit declares " +
                                std::to_string(circuit.weight_slot_count()));
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(data.begin(), data.end(), finite) ||
      !std::all_of(weights.begin(), weights.end(), finite)) {
    throw std::invalid_argument("non-finite value passed to bind");
  }
  BoundCircuit out;
  out.n_qubits = circuit.n_qubits();
  out.instructions.reserve(circuit.instructions().size());
  for (const auto& ins : circuit.instructions()) {
    const double angle = ins.param ? ins.param->evaluate(data, weights) : 0.0;
    out.instructions.push_back({ins.gate, ins.qubits, angle});
  }
  return out;
}

BoundCircuit bind_fixed(const ParamCircuit& circuit) {
  if (circuit.data_slot_count() != 0 || circuit.weight_slot_count() != 0) {
    throw std::invalid_argument("circuit has unbound parameter slots");
  }
  return bind(circuit, {}, {});
}

}  // namespace qnnbench
