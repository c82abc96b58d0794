#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace qnnbench {

/// Depolarizing gate noise plus independent per-qubit readout flips.
///
/// File format (JSON object, unknown keys rejected):
///   {
///     "schema_version": 1,          optional
///     "name": "perth-like",         optional
///     "n_qubits": 7,
///     "p1": 5e-4,                   single-qubit gate depolarizing probability
///     "p2": 1e-2,                   two-qubit gate depolarizing probability
///     "readout": [[p01, p10], ...]  one entry per qubit; p01 = P(read 1 | 0)
///   }
struct NoiseModel {
  std::string name;
  int n_qubits = 0;
  double p1 = 0.0;
  double p2 = 0.0;
  std::vector<std::array<double, 2>> readout;

  /// Throws std::invalid_argument when a probability leaves [0, 1] or the
  /// readout table does not have n_qubits rows.
  void validate() const;

  bool is_noiseless() const;

  static NoiseModel zero(int n_qubits);

  /// Engineering defaults of the right magnitude for a 7-qubit
  /// superconducting device. Not calibration data.
  static NoiseModel perth_like();

  static NoiseModel from_json_text(const std::string& text);
  std::string to_json_text() const;
};

NoiseModel load_noise_model(const std::filesystem::path& path);
void save_noise_model(const NoiseModel& model, const std::filesystem::path& path);

}  // namespace qnnbench
