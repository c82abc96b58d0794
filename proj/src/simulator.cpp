#include "qnnbench/simulator.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace qnnbench {

namespace {

constexpr std::size_t kCheckpointBudgetBytes = std::size_t{64} << 20;

std::vector<double> cumulative(const StateVector& state) {
  std::vector<double> cdf(state.size());
  double acc = 0.0;
  const auto amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    acc += std::norm(amps[i]);
    cdf[i] = acc;
  }
  return cdf;
}

std::uint64_t draw_index(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.uniform() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(
      it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

void apply_pauli(StateVector& s, int pauli, int q) {
  static constexpr std::array<Gate, 4> kPauli{Gate::Z, Gate::X, Gate::Y, Gate::Z};
  if (pauli == 0) return;
  const int qs[1] = {q};
  s.apply(kPauli[static_cast<std::size_t>(pauli)], qs);
}

// Pauli on the instruction's qubits; `code` in [1, 3] or [1, 15].
void apply_error(StateVector& s, const BoundInstruction& ins, int code) {
  if (gate_arity(ins.gate) == 1) {
    apply_pauli(s, code, ins.qubits[0]);
  } else {
    apply_pauli(s, code % 4, ins.qubits[0]);
    apply_pauli(s, code / 4, ins.qubits[1]);
  }
}

struct ErrorEvent {
  std::size_t instruction;
  int code;
};

}  // namespace

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("state vector supports 1.." + std::to_string(kMaxQubits) +
                                " qubits, got " + std::to_string(n_qubits));
  }
  amps_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
  amps_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(std::vector<cplx> amplitudes) {
  if (amplitudes.size() < 2 || !std::has_single_bit(amplitudes.size())) {
    throw std::invalid_argument("amplitude count must be a power of two >= 2");
  }
  StateVector s(std::countr_zero(amplitudes.size()));
  s.amps_ = std::move(amplitudes);
  return s;
}

double StateVector::norm() const {
  double acc = 0.0;
  for (const auto& a : amps_) acc += std::norm(a);
  return std::sqrt(acc);
}

std::vector<double> StateVector::probabilities() const {
  std::vector<double> p(amps_.size());
  std::transform(amps_.begin(), amps_.end(), p.begin(), [](cplx a) { return std::norm(a); });
  return p;
}

void StateVector::apply(Gate g, std::span<const int> qubits, double angle) {
  if (qubits.size() != static_cast<std::size_t>(gate_arity(g))) {
    throw std::invalid_argument(std::string(gate_name(g)) + " expects " +
                                std::to_string(gate_arity(g)) + " qubit(s), got " +
                                std::to_string(qubits.size()));
  }
  for (int q : qubits) {
    if (q < 0 || q >= n_qubits_) {
      throw std::out_of_range("qubit index " + std::to_string(q) + " out of range");
    }
  }
  if (qubits.size() == 2) {
    if (qubits[0] == qubits[1]) throw std::invalid_argument("qubit indices must be distinct");
    apply_2q(g, qubits[0], qubits[1]);
  } else {
    apply_1q(g, qubits[0], angle);
  }
}

void StateVector::apply(const BoundInstruction& ins) {
  apply(ins.gate, std::span<const int>(ins.qubits.data(), static_cast<std::size_t>(gate_arity(ins.gate))),
        ins.angle);
}

void StateVector::apply_1q(Gate g, int q, double angle) {
  const std::size_t mask = std::size_t{1} << q;
  const std::size_t n = amps_.size();
  cplx* a = amps_.data();

  // Diagonal gates only touch the |1> half (up to a global phase for RZ).
  if (g == Gate::Z || g == Gate::Phase || g == Gate::RZ) {
    cplx d0 = 1.0, d1 = -1.0;
    if (g == Gate::Phase) d1 = std::polar(1.0, angle);
    if (g == Gate::RZ) {
      d0 = std::polar(1.0, -angle / 2.0);
      d1 = std::polar(1.0, angle / 2.0);
    }
    for (std::size_t base = 0; base < n; base += 2 * mask) {
      for (std::size_t i = base; i < base + mask; ++i) {
        if (g == Gate::RZ) a[i] *= d0;
        a[i | mask] *= d1;
      }
    }
    return;
  }
  if (g == Gate::X) {
    for (std::size_t base = 0; base < n; base += 2 * mask)
      for (std::size_t i = base; i < base + mask; ++i) std::swap(a[i], a[i | mask]);
    return;
  }

  const auto m = gate_matrix(g, angle);
  const cplx m00 = m[0], m01 = m[1], m10 = m[2], m11 = m[3];
  for (std::size_t base = 0; base < n; base += 2 * mask) {
    for (std::size_t i = base; i < base + mask; ++i) {
      const cplx v0 = a[i];
      const cplx v1 = a[i | mask];
      a[i] = m00 * v0 + m01 * v1;
      a[i | mask] = m10 * v0 + m11 * v1;
    }
  }
}

void StateVector::apply_2q(Gate g, int q0, int q1) {
  const std::size_t m0 = std::size_t{1} << q0;
  const std::size_t m1 = std::size_t{1} << q1;
  const std::size_t n = amps_.size();
  if (g == Gate::CX) {
    // control q0, target q1: swap |c=1,t=0> with |c=1,t=1>
    for (std::size_t i = 0; i < n; ++i) {
      if ((i & m0) && !(i & m1)) std::swap(amps_[i], amps_[i | m1]);
    }
  } else if (g == Gate::CZ) {
    for (std::size_t i = 0; i < n; ++i) {
      if ((i & m0) && (i & m1)) amps_[i] = -amps_[i];
    }
  } else {
    throw std::invalid_argument(std::string(gate_name(g)) + " is not a two-qubit gate");
  }
}

std::string to_bitstring(std::uint64_t basis_index, int n_qubits) {
  std::string s(static_cast<std::size_t>(n_qubits), '0');
  for (int q = 0; q < n_qubits; ++q) {
    if ((basis_index >> q) & 1U) s[static_cast<std::size_t>(n_qubits - 1 - q)] = '1';
  }
  return s;
}

std::uint64_t CountsHistogram::total() const {
  std::uint64_t t = 0;
  for (const auto& [_, c] : counts) t += c;
  return t;
}

std::map<std::string, std::uint64_t> CountsHistogram::by_bitstring() const {
  std::map<std::string, std::uint64_t> out;
  for (const auto& [idx, c] : counts) out[to_bitstring(idx, n_qubits)] = c;
  return out;
}

StateVector apply_instruction(StateVector state, Gate g, std::span<const int> qubits,
                              double angle) {
  state.apply(g, qubits, angle);
  return state;
}

void run_on(StateVector& state, const BoundCircuit& circuit) {
  if (circuit.n_qubits != state.n_qubits()) {
    throw std::invalid_argument("circuit and state widths differ");
  }
  for (const auto& ins : circuit.instructions) state.apply(ins);
}

StateVector run_statevector(const BoundCircuit& circuit) {
  StateVector s(circuit.n_qubits);
  run_on(s, circuit);
  return s;
}

StateVector run_statevector(const ParamCircuit& circuit) {
  return run_statevector(bind_fixed(circuit));
}

CountsHistogram sample_counts(const StateVector& state, std::uint64_t shots, Rng& rng) {
  if (shots == 0) throw std::invalid_argument("shots must be positive");
  const auto cdf = cumulative(state);
  CountsHistogram h{state.n_qubits(), shots, {}};
  for (std::uint64_t s = 0; s < shots; ++s) ++h.counts[draw_index(cdf, rng)];
  return h;
}

CountsHistogram run_noisy_trajectories(const BoundCircuit& circuit, const NoiseModel& noise,
                                       std::uint64_t shots, Rng& rng) {
  if (shots == 0) throw std::invalid_argument("shots must be positive");
  noise.validate();
  if (noise.n_qubits < circuit.n_qubits) {
    throw std::invalid_argument("noise model covers " + std::to_string(noise.n_qubits) +
                                " qubits, circuit needs " + std::to_string(circuit.n_qubits));
  }
  const auto& ins = circuit.instructions;
  const int n = circuit.n_qubits;

  // Noiseless checkpoints: state after instruction i, so a trajectory whose
  // first error follows instruction i resumes from there.
  StateVector ideal(n);
  std::vector<StateVector> checkpoints;
  const bool gate_noise = noise.p1 > 0.0 || noise.p2 > 0.0;
  const bool keep_checkpoints =
      gate_noise && ins.size() * ideal.size() * sizeof(cplx) <= kCheckpointBudgetBytes;
  if (keep_checkpoints) checkpoints.reserve(ins.size());
  for (const auto& g : ins) {
    ideal.apply(g);
    if (keep_checkpoints) checkpoints.push_back(ideal);
  }
  const auto ideal_cdf = cumulative(ideal);

  CountsHistogram h{n, shots, {}};
  std::vector<ErrorEvent> events;
  for (std::uint64_t shot = 0; shot < shots; ++shot) {
    events.clear();
    if (gate_noise) {
      for (std::size_t i = 0; i < ins.size(); ++i) {
        const bool two = gate_arity(ins[i].gate) == 2;
        const double p = two ? noise.p2 : noise.p1;
        if (rng.bernoulli(p)) {
          // Identity is one of the draws, so p = 1 is fully depolarizing.
          const int code = static_cast<int>(rng.below(two ? 16 : 4));
          if (code != 0) events.push_back({i, code});
        }
      }
    }

    std::uint64_t outcome = 0;
    if (events.empty()) {
      outcome = draw_index(ideal_cdf, rng);
    } else {
      const std::size_t first = events.front().instruction;
      StateVector traj = keep_checkpoints ? checkpoints[first] : StateVector(n);
      if (!keep_checkpoints) {
        for (std::size_t i = 0; i <= first; ++i) traj.apply(ins[i]);
      }
      std::size_t next_event = 0;
      for (std::size_t i = first; i < ins.size(); ++i) {
        if (i != first) traj.apply(ins[i]);
        while (next_event < events.size() && events[next_event].instruction == i) {
          apply_error(traj, ins[i], events[next_event].code);
          ++next_event;
        }
      }
      outcome = draw_index(cumulative(traj), rng);
    }

    for (int q = 0; q < n; ++q) {
      const bool bit = (outcome >> q) & 1U;
      const double p_flip = noise.readout[static_cast<std::size_t>(q)][bit ? 1 : 0];
      if (rng.bernoulli(p_flip)) outcome ^= std::uint64_t{1} << q;
    }
    ++h.counts[outcome];
  }
  return h;
}

}  // namespace qnnbench
