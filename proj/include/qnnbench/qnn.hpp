#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qnnbench/circuit_library.hpp"
#include "qnnbench/dataset.hpp"
#include "qnnbench/initializers.hpp"
#include "qnnbench/noise.hpp"
#include "qnnbench/optimizers.hpp"
#include "qnnbench/simulator.hpp"

namespace qnnbench {

/// Bitstring -> class map. ModuloIndex: basis index mod n_classes.
/// Parity: number of set bits mod 2 (binary tasks only).
enum class Decode { ModuloIndex, Parity };

std::string_view decode_name(Decode d) noexcept;
Decode decode_from_name(std::string_view name);

struct QnnModel {
  FeatureMapSpec feature_map;
  AnsatzSpec ansatz;
  int n_classes = 2;
  std::uint64_t shots = 1024;
  Decode decode = Decode::ModuloIndex;
  std::optional<NoiseModel> noise;  // absent = noiseless backend
  /// Worker threads for per-sample evaluation inside one objective call.
  /// Results do not depend on this value.
  int threads = 1;

  int n_qubits() const { return ansatz.n_qubits; }
  void validate() const;
};

/// Class frequencies of a histogram under `decode`. Sums to 1.
std::vector<double> decode_counts(const CountsHistogram& counts, int n_classes, Decode decode);

/// Runs V(x) followed by U(theta) for model.shots shots and returns class
/// frequencies.
std::vector<double> predict_proba(const QnnModel& model, std::span<const double> x,
                                  std::span<const double> theta, Rng& rng);

/// Mean of -log(p[label] + 1e-10).
double cross_entropy_loss(const std::vector<std::vector<double>>& probabilities,
                          const std::vector<int>& labels);

struct TrainedModel {
  QnnModel model;
  std::vector<double> initial_theta;
  std::vector<double> theta;
  OptimizeResult trace;
  double wall_time = 0.0;  // seconds
};

/// Minimizes the full-batch cross-entropy. Every random draw derives from
/// `seed`: initialization, optimizer perturbations and the shot stream of
/// each objective evaluation (one sub-stream per sample).
TrainedModel train(const QnnModel& model, const Dataset& train_set, const OptimizerSpec& optimizer,
                   const InitializerSpec& init, std::uint64_t seed);

/// Argmax of predict_proba per row (lowest class on ties). Row i uses the
/// stream derive_seed(seed, i).
std::vector<int> predict(const TrainedModel& trained, const Matrix& x, std::uint64_t seed);

}  // namespace qnnbench
