#pragma once

#include <string_view>
#include <vector>

#include "qnnbench/rng.hpp"

namespace qnnbench {

enum class InitKind { Uniform01, Beta, NormalSigmaInvL, ConstantBetaMean, NormalMatchedToBeta };

std::string_view init_name(InitKind k) noexcept;
InitKind init_from_name(std::string_view name);

struct InitializerSpec {
  InitKind kind = InitKind::Beta;
  double alpha = 2.0;
  double beta = 2.0;
  /// Layer count for NormalSigmaInvL (variance 1/L). Callers set it to the
  /// ansatz repetition count.
  int layers = 3;

  void validate() const;
  double beta_mean() const { return alpha / (alpha + beta); }
  double beta_stddev() const;
};

/// `count` i.i.d. draws. ConstantBetaMean consumes no randomness.
std::vector<double> initialize_params(const InitializerSpec& spec, int count, Rng& rng);

}  // namespace qnnbench
