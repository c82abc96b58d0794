#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qnnbench/config.hpp"

namespace qnnbench {

inline constexpr int kRecordSchemaVersion = 1;
inline constexpr const char* kToolkitVersion = "0.1.0";
inline constexpr std::size_t kTracePoints = 100;

/// One line of a results file.
///
/// Fields: schema_version, config_hash (16 hex digits), config (full echo),
/// status ("ok" | "failed"), error, accuracy, weighted_f1, train_loss,
/// wall_time_s, iterations, steps, evaluations, extra_evaluations,
/// terminated_by, loss_trace (at most 100 evenly spaced points, last point
/// always kept), n_qubits, n_train, n_test, toolkit_version, timestamp.
struct RunRecord {
  std::string config_hash;
  nlohmann::json config;
  bool ok = true;
  std::string error;
  double accuracy = 0.0;
  double weighted_f1 = 0.0;
  double train_loss = 0.0;
  double wall_time_s = 0.0;
  int iterations = 0;
  int steps = 0;
  int evaluations = 0;
  int extra_evaluations = 0;
  std::string terminated_by;
  std::vector<double> loss_trace;
  int n_qubits = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::string toolkit_version = kToolkitVersion;
  std::string timestamp;

  nlohmann::json to_json() const;
  /// Throws on a schema version other than kRecordSchemaVersion.
  static RunRecord from_json(const nlohmann::json& j);
  /// Single-line JSON.
  std::string to_line() const;
};

/// Every entry of `trace` when short, otherwise `points` evenly spaced
/// entries that include the first and last.
std::vector<double> downsample(const std::vector<double>& trace, std::size_t points = kTracePoints);

/// Trains and evaluates one configuration on an already loaded dataset.
/// Never throws for per-run failures: those produce a failed record.
RunRecord run_config(const ModelConfig& config, const Dataset& data);

/// Convenience overload that loads the dataset itself.
RunRecord run_config(const ModelConfig& config);

/// Datasets the grid knows about.
bool known_dataset(const std::string& dataset);

/// Cartesian product of 6 feature maps, 14 ansatz variants, 3 optimizers,
/// 3 initializers and the allowed preprocessing methods (PCA and LDA; PCA
/// only for rice). Every other field is copied from `base`. Optimizers get
/// their default budgets, lowered to `iteration_cap` when one is given.
std::vector<ModelConfig> generate_grid(const std::string& dataset, const std::string& noise,
                                       const ModelConfig& base = {}, std::optional<int> iteration_cap = std::nullopt);

struct SweepOptions {
  int parallelism = 1;
  std::uint64_t global_seed = 0;
  std::filesystem::path output;
  bool resume = false;
  /// Fraction of the grid to run, chosen by a seeded shuffle. 1 = all.
  double subsample = 1.0;
  /// Stop scheduling after this many new runs (simulated interruption).
  std::optional<std::size_t> max_new_runs;
  /// Called after each appended record.
  std::function<void(const RunRecord&)> on_record;
};

struct SweepSummary {
  std::size_t grid = 0;
  std::size_t selected = 0;
  std::size_t completed = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;
  /// "completed: X failed: Y skipped: Z grid: N selected: S"
  std::string line() const;
};

/// Indices of the configs a subsample fraction selects, ascending.
std::vector<std::size_t> subsample_grid(std::size_t grid_size, double fraction, std::uint64_t seed);

/// Runs the selected configs with `parallelism` workers; one writer appends
/// completed records. Every config gets seed = global_seed before running.
/// With resume, configs whose hash is already in the file are skipped and a
/// torn final line is discarded; without it, the file is replaced.
SweepSummary run_sweep(const std::vector<ModelConfig>& grid, const Dataset& data, const SweepOptions& options);

/// Writes the reduced, scaled train/test splits of every distinct
/// (preprocessing, seed) setting in `configs` to dir/<dataset>-<key>/
/// {train.csv, test.csv, labels.json, preprocessing.json}. The seed used is
/// `seed`, as run_sweep assigns it. Returns the directories written.
std::vector<std::filesystem::path> write_split_cache(const std::vector<ModelConfig>& configs, const Dataset& data,
                                                     std::uint64_t seed, const std::filesystem::path& dir);

/// Reads a results file. A torn (unterminated, unparseable) last line is
/// ignored; any other bad line throws.
std::vector<RunRecord> read_records(const std::filesystem::path& path);

}  // namespace qnnbench
