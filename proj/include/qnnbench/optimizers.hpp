#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qnnbench/rng.hpp"

namespace qnnbench {

enum class OptimizerKind { COBYLA, SPSA, NelderMead };
enum class Termination { Budget, EarlyStop, InternalConvergence };

std::string_view optimizer_name(OptimizerKind k) noexcept;
OptimizerKind optimizer_from_name(std::string_view name);
std::string_view termination_name(Termination t) noexcept;

struct SpsaGains {
  double a = 0.2;
  double c = 0.1;
  double alpha = 0.602;
  double gamma = 0.101;
  /// Stability constant as a fraction of max_iterations.
  double stability_fraction = 0.01;
};

struct CobylaRadii {
  double rho_begin = 1.0;
  double rho_end = 1e-4;
};

struct NelderMeadTolerances {
  double xatol = 1e-4;
  double fatol = 1e-4;
};

struct OptimizerSpec {
  OptimizerKind kind = OptimizerKind::COBYLA;
  int max_iterations = 500;
  /// Stop once the best loss falls to or below this value. COBYLA and
  /// Nelder-Mead only.
  std::optional<double> early_stop_tolerance;
  bool adaptive = true;  // Nelder-Mead
  SpsaGains spsa;
  CobylaRadii cobyla;
  NelderMeadTolerances nelder_mead;

  /// Budgets at the upper end of the convergence ranges used in the study:
  /// COBYLA 500, SPSA 300, Nelder-Mead 250. Early stop at 0.1 where supported.
  static OptimizerSpec defaults(OptimizerKind kind);
  void validate() const;
};

struct OptimizeResult {
  std::vector<double> best_point;
  double best_value = 0.0;
  int iterations_used = 0;
  /// Candidate points probed after initialization.
  int steps_used = 0;
  int evaluations_used = 0;
  /// Evaluations outside the iteration loop (SPSA's readout of its final
  /// iterate). Not included in evaluations_used.
  int extra_evaluations = 0;
  /// Best-so-far value after each completed iteration.
  std::vector<double> loss_trace;
  Termination terminated_by = Termination::Budget;
};

using Objective = std::function<double(std::span<const double>)>;

/// Two-sided simultaneous perturbation. Exactly two objective evaluations
/// per iteration, then one readout of the final iterate (extra_evaluations).
/// The returned point is the better of the final iterate and the best probe.
OptimizeResult minimize_spsa(const Objective& f, std::vector<double> theta0,
                             const OptimizerSpec& spec, Rng& rng);

/// Nelder-Mead with optional dimension-adaptive coefficients.
OptimizeResult minimize_nelder_mead(const Objective& f, std::vector<double> theta0,
                                    const OptimizerSpec& spec);

/// Unconstrained linear-approximation trust-region method (Powell's COBYLA
/// without constraint handling). One iteration is one evaluation after the
/// initial d+1 point simplex.
OptimizeResult minimize_cobyla(const Objective& f, std::vector<double> theta0,
                               const OptimizerSpec& spec);

/// Dispatches on spec.kind.
OptimizeResult minimize(const Objective& f, std::vector<double> theta0, const OptimizerSpec& spec,
                        Rng& rng);

}  // namespace qnnbench
