#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "qnnbench/circuit_library.hpp"
#include "qnnbench/dataset.hpp"
#include "qnnbench/initializers.hpp"
#include "qnnbench/noise.hpp"
#include "qnnbench/optimizers.hpp"
#include "qnnbench/qnn.hpp"
#include "qnnbench/reduction.hpp"

namespace qnnbench {

inline constexpr int kConfigSchemaVersion = 1;

/// One point of the hyperparameter grid plus every knob needed to run it.
/// Circuit widths are not stored: they follow from the reduced data.
///
/// JSON layout (unknown keys are rejected at every level):
///   schema_version, dataset, data_path, noise, seed,
///   preprocessing {method, out_dims, n_train, n_test, stratified, scale_lo, scale_hi},
///   feature_map   {kind, reps, topology},
///   ansatz        {kind, reps, topology, structure_seed},
///   optimizer     {kind, max_iterations, early_stop_tolerance, adaptive,
///                  spsa {a, c, alpha, gamma, stability_fraction},
///                  cobyla {rho_begin, rho_end}, nelder_mead {xatol, fatol}},
///   initializer   {kind, alpha, beta, layers},
///   model         {shots, decode, threads},
///   blobs         {n_samples, n_classes, n_features, separation, spread, seed}
struct ModelConfig {
  std::string dataset = "synthetic";
  std::optional<std::string> data_path;
  /// "none", "perth-like", or a noise file path.
  std::string noise = "none";
  /// Global seed: fixes the train/test split; the run seed is derived from
  /// it and the config hash.
  std::uint64_t seed = 0;

  PrepareOptions preprocessing;
  FeatureMapKind feature_map = FeatureMapKind::Z;
  int feature_map_reps = 2;
  std::optional<Topology> feature_map_topology;
  AnsatzKind ansatz = AnsatzKind::RealAmplitudes;
  int ansatz_reps = 3;
  std::optional<Topology> ansatz_topology = Topology::Full;
  /// PauliTwoDesign rotation choices; defaults to the run seed.
  std::optional<std::uint64_t> structure_seed;
  OptimizerSpec optimizer = OptimizerSpec::defaults(OptimizerKind::COBYLA);
  InitializerSpec initializer;
  std::uint64_t shots = 1024;
  Decode decode = Decode::ModuloIndex;
  int threads = 1;
  std::optional<BlobSpec> blobs;
  std::uint64_t blobs_seed = 42;

  /// Checks everything that does not depend on the data width.
  void validate() const;
  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);

  /// Sorted-key JSON without the seed; identical configs give identical text.
  std::string canonical() const;
  std::uint64_t hash() const;
  std::string hash_hex() const;
  /// Seed of the training run: derive_seed(seed, hash()).
  std::uint64_t run_seed() const;

  /// Short label such as "ZZFeatureMap/sca".
  std::string feature_map_label() const;
  std::string ansatz_label() const;
};

ModelConfig load_config(const std::filesystem::path& path);

/// Default location of a raw dataset file: $QNNBENCH_DATA_DIR (or data/)
/// plus <dataset>.csv or <dataset>.data.
std::filesystem::path default_data_path(const std::string& dataset);

/// Loads the config's dataset: generated for "synthetic" and "blobs",
/// otherwise read through the dataset's schema.
Dataset load_dataset(const ModelConfig& config);

/// nullopt for "none".
std::optional<NoiseModel> resolve_noise(const std::string& id);

}  // namespace qnnbench
