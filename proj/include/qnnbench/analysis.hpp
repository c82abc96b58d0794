#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qnnbench/stats.hpp"
#include "qnnbench/sweep.hpp"

namespace qnnbench {

inline constexpr double kAlpha = 0.05;

/// Reads a results file and keeps status=ok records. Throws on unknown
/// schema versions and when no usable record remains.
std::vector<RunRecord> load_results(const std::filesystem::path& path);

/// Records with accuracy >= max - band (absolute). Input order is kept.
std::vector<RunRecord> best_set(const std::vector<RunRecord>& records, double band = 0.10);
/// Records with accuracy <= min + band.
std::vector<RunRecord> worst_set(const std::vector<RunRecord>& records, double band = 0.10);

/// Supported factor names: feature_map, feature_map_kind, ansatz,
/// ansatz_kind, entanglement, optimizer, initialization, preprocessing, noise.
const std::vector<std::string>& known_factors();
std::string factor_level(const RunRecord& record, const std::string& factor);
/// Config text with the factor's fields (and the seed) removed. Records
/// that differ only in the factor share a key.
std::string pairing_key(const RunRecord& record, const std::string& factor);
/// "none" or the noise id of the record.
std::string noise_setting(const RunRecord& record);

enum class Verdict { Better, Worse, NoDifference, Insufficient };
std::string_view verdict_name(Verdict v) noexcept;

struct PairCell {
  double p_value = 1.0;
  Verdict verdict = Verdict::NoDifference;
  int n_pairs = 0;
};

/// cells[i][j] compares levels[i] (row) against levels[j] (column);
/// "better" means the row has significantly higher accuracy. Diagonal empty.
struct PairwiseMatrix {
  std::string factor;
  std::string noise;
  std::vector<std::string> levels;
  std::vector<std::vector<std::optional<PairCell>>> cells;
  /// Records without a partner at some other level.
  std::size_t unpaired = 0;
};

/// One matrix per noise setting (a single matrix when factor = noise).
/// Wilcoxon signed-rank on the accuracy of aligned configs; duplicates
/// under one key are averaged. Fewer than 5 non-zero differences gives
/// Insufficient; no non-zero difference gives NoDifference with p = 1.
std::vector<PairwiseMatrix> pairwise_matrix(const std::vector<RunRecord>& records, const std::string& factor);

struct FactorSummary {
  std::string factor;
  std::string noise;
  std::vector<std::string> levels;
  std::vector<std::size_t> counts;
  std::vector<double> mean_accuracy;
  std::size_t aligned_blocks = 0;
  /// Wilcoxon (2 levels) or Friedman (3+) over aligned blocks.
  std::optional<SignificanceResult> dependent;
  std::string dependent_error;
  /// Mann-Whitney (2 levels) or Kruskal-Wallis (3+) over all records.
  std::optional<SignificanceResult> independent;
  std::string independent_error;
};

/// Throws std::invalid_argument("insufficient levels ...") when the factor
/// has fewer than 2 levels in every noise setting.
std::vector<FactorSummary> factor_significance(const std::vector<RunRecord>& records, const std::string& factor);

/// Top-k per noise setting ranked by weighted F1, then accuracy.
std::string top_k_csv(const std::vector<RunRecord>& records, std::size_t k);
std::string top_k_text(const std::vector<RunRecord>& records, std::size_t k);
std::string matrix_csv(const std::vector<PairwiseMatrix>& matrices);
std::string matrix_text(const std::vector<PairwiseMatrix>& matrices);
std::string factor_csv(const std::vector<FactorSummary>& summaries);
std::string factor_text(const std::vector<FactorSummary>& summaries);

}  // namespace qnnbench
