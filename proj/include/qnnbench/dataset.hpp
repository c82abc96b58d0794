#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qnnbench {

/// Row-major sample matrix: one inner vector per sample.
using Matrix = std::vector<std::vector<double>>;

struct Dataset {
  std::string name;
  Matrix features;
  std::vector<int> labels;  // dense in [0, n_classes)
  int n_classes = 0;
  std::vector<std::string> class_names;    // index -> original label text
  std::vector<std::string> feature_names;  // after one-hot expansion

  std::size_t size() const { return labels.size(); }
  std::size_t dims() const { return features.empty() ? 0 : features.front().size(); }
  /// Throws when shapes disagree, values are non-finite or labels are out of range.
  void validate() const;
  Dataset subset(std::span<const std::size_t> rows) const;
};

enum class UnknownCategory { Error, Ignore };

/// Describes a delimiter-separated raw file. Column indices are 0-based;
/// a negative label_column counts from the end (-1 = last column).
///
/// JSON keys: name, delimiter, header, label_column, categorical_columns,
/// ignore_columns, categories ({"<col>": [values...]}), unknown_category
/// ("error" | "ignore"), strip_label_suffix, label_order.
struct DatasetSchema {
  std::string name;
  char delimiter = ',';
  bool header = false;
  int label_column = -1;
  std::vector<int> categorical_columns;
  std::vector<int> ignore_columns;
  /// Fixed category lists. Columns without an entry learn their categories
  /// from the file (sorted).
  std::map<int, std::vector<std::string>> categories;
  UnknownCategory unknown_category = UnknownCategory::Error;
  /// Removed from the end of label text when present (KDD labels end in '.').
  std::string strip_label_suffix;
  /// Optional fixed label order; otherwise labels are sorted.
  std::vector<std::string> label_order;

  static DatasetSchema from_json_text(const std::string& text);
};

DatasetSchema load_schema(const std::filesystem::path& path);

/// Schema shipped in data/schemas/<name>.json for kdd, covertype, glass and rice.
DatasetSchema builtin_schema(const std::string& name);

/// Parses the file, one-hot expands categorical columns (indicator columns
/// in category order) and maps labels to dense indices.
Dataset load_and_encode(const std::filesystem::path& path, const DatasetSchema& schema);
Dataset load_and_encode(const std::filesystem::path& path, const std::string& name);

/// Label text -> index as a JSON object, for persisting next to caches.
std::string label_mapping_json(const Dataset& ds);

/// Isotropic Gaussian blobs with class centres on a scaled simplex-like
/// layout. Deterministic per seed.
struct BlobSpec {
  int n_samples = 200;
  int n_classes = 2;
  int n_features = 3;
  double separation = 3.0;  // distance scale of class centres
  double spread = 1.0;      // per-feature standard deviation
};
Dataset make_blobs(const BlobSpec& spec, std::uint64_t seed);

/// Plain numeric CSV: header "f0,...,f{d-1},label", one sample per line.
void write_csv(const Dataset& ds, const std::filesystem::path& path);
Dataset read_csv(const std::filesystem::path& path, const std::string& name);

/// Synthetic dataset used for desk-scale sweeps: 4 Gaussian classes in 10
/// dimensions.
Dataset synthetic_dataset(std::uint64_t seed = 7);

}  // namespace qnnbench
