#pragma once

#include <string_view>
#include <utility>
#include <vector>

namespace qnnbench {

enum class Topology { Full, Linear, Circular, Sca, Pairwise };

std::string_view topology_name(Topology t) noexcept;
Topology topology_from_name(std::string_view name);

using QubitPair = std::pair<int, int>;  // (control, target)

/// Two-qubit gate pairs for repetition block `block_index` of an
/// entangling layer on `n` qubits.
///
///   full      every (i, j) with i < j, lexicographic
///   linear    (0,1), (1,2), ..., (n-2,n-1)
///   circular  (n-1,0) followed by linear
///   sca       circular with the (n-1,0) pair moved to position
///             block_index mod n, control/target swapped on odd blocks
///   pairwise  (0,1), (2,3), ... on even blocks; (1,2), (3,4), ... on odd
///
/// Throws std::invalid_argument if n < 2 or block_index < 0.
std::vector<QubitPair> entanglement_pairs(Topology t, int n, int block_index);

}  // namespace qnnbench
