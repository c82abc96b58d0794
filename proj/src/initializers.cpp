#include "qnnbench/initializers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qnnbench {

std::string_view init_name(InitKind k) noexcept {
  switch (k) {
    case InitKind::Uniform01: return "Uniform01";
    case InitKind::Beta: return "Beta";
    case InitKind::NormalSigmaInvL: return "NormalSigmaInvL";
    case InitKind::ConstantBetaMean: return "ConstantBetaMean";
    case InitKind::NormalMatchedToBeta: return "NormalMatchedToBeta";
  }
  return "?";
}

InitKind init_from_name(std::string_view name) {
  for (InitKind k : {InitKind::Uniform01, InitKind::Beta, InitKind::NormalSigmaInvL,
                     InitKind::ConstantBetaMean, InitKind::NormalMatchedToBeta}) {
    if (init_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown initializer '" + std::string(name) + "'");
}

void InitializerSpec::validate() const {
  const bool uses_beta = kind == InitKind::Beta || kind == InitKind::ConstantBetaMean ||
                         kind == InitKind::NormalMatchedToBeta;
  if (uses_beta && !(alpha > 0.0 && beta > 0.0 && std::isfinite(alpha) && std::isfinite(beta))) {
    throw std::invalid_argument("initializer.alpha and initializer.beta must be positive");
  }
  if (kind == InitKind::NormalSigmaInvL && layers <= 0) {
    throw std::invalid_argument("initializer.layers must be positive");
  }
}

double InitializerSpec::beta_stddev() const {
  const double s = alpha + beta;
  return std::sqrt(alpha * beta / (s * s * (s + 1.0)));
}

std::vector<double> initialize_params(const InitializerSpec& spec, int count, Rng& rng) {
  spec.validate();
  if (count < 1) throw std::invalid_argument("parameter count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (double& v : out) {
    switch (spec.kind) {
      case InitKind::Uniform01: v = rng.uniform(); break;
      case InitKind::Beta: v = rng.beta(spec.alpha, spec.beta); break;
      case InitKind::NormalSigmaInvL: v = rng.normal(0.0, 1.0 / std::sqrt(spec.layers)); break;
      case InitKind::ConstantBetaMean: v = spec.beta_mean(); break;
      case InitKind::NormalMatchedToBeta: v = rng.normal(spec.beta_mean(), spec.beta_stddev()); break;
    }
  }
  return out;
}

}  // namespace qnnbench
