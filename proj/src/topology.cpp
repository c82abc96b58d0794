#include "qnnbench/topology.hpp"

#include <stdexcept>
#include <string>

namespace qnnbench {

std::string_view topology_name(Topology t) noexcept {
  switch (t) {
    case Topology::Full: return "full";
    case Topology::Linear: return "linear";
    case Topology::Circular: return "circular";
    case Topology::Sca: return "sca";
    case Topology::Pairwise: return "pairwise";
  }
  return "?";
}

Topology topology_from_name(std::string_view name) {
  for (Topology t : {Topology::Full, Topology::Linear, Topology::Circular, Topology::Sca,
                     Topology::Pairwise}) {
    if (topology_name(t) == name) return t;
  }
  throw std::invalid_argument("unknown entanglement topology '" + std::string(name) + "'");
}

std::vector<QubitPair> entanglement_pairs(Topology t, int n, int block_index) {
  if (n < 2) throw std::invalid_argument("entanglement needs at least two qubits");
  if (block_index < 0) throw std::invalid_argument("negative block index");

  std::vector<QubitPair> pairs;
  switch (t) {
    case Topology::Full:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
      break;
    case Topology::Linear:
      for (int i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
      break;
    case Topology::Circular:
      pairs.emplace_back(n - 1, 0);
      for (int i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
      break;
    case Topology::Sca: {
      const auto wrap_pos = static_cast<std::size_t>(block_index % n);
      for (int i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
      pairs.insert(pairs.begin() + static_cast<std::ptrdiff_t>(wrap_pos), QubitPair{n - 1, 0});
      if (block_index % 2 == 1) {
        for (auto& p : pairs) std::swap(p.first, p.second);
      }
      break;
    }
    case Topology::Pairwise:
      for (int i = block_index % 2; i + 1 < n; i += 2) pairs.emplace_back(i, i + 1);
      break;
  }
  return pairs;
}

}  // namespace qnnbench
