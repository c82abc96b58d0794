#include "qnnbench/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qnnbench/rng.hpp"

namespace qnnbench {

using json = nlohmann::json;

void Dataset::validate() const {
  if (features.size() != labels.size()) throw std::invalid_argument(name + ": feature/label count mismatch");
  const std::size_t d = dims();
  for (const auto& row : features) {
    if (row.size() != d) throw std::invalid_argument(name + ": ragged feature matrix");
    for (double v : row) {
      if (!std::isfinite(v)) throw std::invalid_argument(name + ": non-finite feature value");
    }
  }
  for (int y : labels) {
    if (y < 0 || y >= n_classes) throw std::invalid_argument(name + ": label out of range");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.name = name;
  out.n_classes = n_classes;
  out.class_names = class_names;
  out.feature_names = feature_names;
  out.features.reserve(rows.size());
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) {
    out.features.push_back(features.at(r));
    out.labels.push_back(labels.at(r));
  }
  return out;
}

DatasetSchema DatasetSchema::from_json_text(const std::string& text) {
  const json j = json::parse(text);
  static const std::set<std::string> known{"name",          "delimiter",         "header",
                                           "label_column",  "categorical_columns", "ignore_columns",
                                           "categories",    "unknown_category",  "strip_label_suffix",
                                           "label_order",   "description",       "schema_version"};
  for (const auto& [k, _] : j.items()) {
    if (!known.count(k)) throw std::invalid_argument("unknown schema key '" + k + "'");
  }
  DatasetSchema s;
  s.name = j.value("name", "");
  const std::string delim = j.value("delimiter", ",");
  if (delim.size() != 1) throw std::invalid_argument("schema delimiter must be one character");
  s.delimiter = delim[0];
  s.header = j.value("header", false);
  s.label_column = j.value("label_column", -1);
  s.categorical_columns = j.value("categorical_columns", std::vector<int>{});
  s.ignore_columns = j.value("ignore_columns", std::vector<int>{});
  if (j.contains("categories")) {
    for (const auto& [k, v] : j.at("categories").items()) {
      s.categories[std::stoi(k)] = v.get<std::vector<std::string>>();
    }
  }
  const std::string policy = j.value("unknown_category", "error");
  if (policy == "error") {
    s.unknown_category = UnknownCategory::Error;
  } else if (policy == "ignore") {
    s.unknown_category = UnknownCategory::Ignore;
  } else {
    throw std::invalid_argument("unknown_category must be 'error' or 'ignore'");
  }
  s.strip_label_suffix = j.value("strip_label_suffix", "");
  s.label_order = j.value("label_order", std::vector<std::string>{});
  return s;
}

DatasetSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schema " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return DatasetSchema::from_json_text(ss.str());
}

DatasetSchema builtin_schema(const std::string& name) {
  std::filesystem::path dir = QNNBENCH_SOURCE_DIR "/data/schemas";
  if (const char* env = std::getenv("QNNBENCH_SCHEMA_DIR")) dir = env;
  const auto path = dir / (name + ".json");
  if (!std::filesystem::exists(path)) throw std::invalid_argument("no schema for dataset '" + name + "'");
  return load_schema(path);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  if (delim == ' ') {
    while (ss >> field) out.push_back(field);
    return out;
  }
  while (std::getline(ss, field, delim)) out.push_back(trim(field));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": cannot parse '" + s + "' as a number");
  }
  return v;
}

}  // namespace

Dataset load_and_encode(const std::filesystem::path& path, const DatasetSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset " + path.string());

  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::vector<std::string> header;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_line(line, schema.delimiter);
    if (schema.header && header.empty()) {
      header = std::move(fields);
      continue;
    }
    if (!rows.empty() && fields.size() != rows.front().size()) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(rows.front().size()) + " fields, got " +
                               std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw std::runtime_error("dataset " + path.string() + " has no rows");

  const int width = static_cast<int>(rows.front().size());
  auto resolve = [&](int c) {
    const int r = c < 0 ? width + c : c;
    if (r < 0 || r >= width) throw std::invalid_argument("schema column " + std::to_string(c) + " out of range");
    return r;
  };
  const int label_col = resolve(schema.label_column);
  std::set<int> categorical, ignored;
  for (int c : schema.categorical_columns) categorical.insert(resolve(c));
  for (int c : schema.ignore_columns) ignored.insert(resolve(c));

  auto label_text = [&](const std::string& raw) {
    std::string t = raw;
    const auto& suf = schema.strip_label_suffix;
    if (!suf.empty() && t.size() >= suf.size() && t.compare(t.size() - suf.size(), suf.size(), suf) == 0) {
      t.resize(t.size() - suf.size());
    }
    return t;
  };

  // Category lists per categorical column.
  std::map<int, std::vector<std::string>> cats;
  for (int c : categorical) {
    auto fixed = schema.categories.find(c);
    if (fixed == schema.categories.end()) fixed = schema.categories.find(c - width);
    if (fixed != schema.categories.end()) {
      cats[c] = fixed->second;
    } else {
      std::set<std::string> seen;
      for (const auto& r : rows) seen.insert(r[static_cast<std::size_t>(c)]);
      cats[c].assign(seen.begin(), seen.end());
    }
  }

  Dataset ds;
  ds.name = schema.name.empty() ? path.stem().string() : schema.name;
  if (!schema.label_order.empty()) {
    ds.class_names = schema.label_order;
  } else {
    std::set<std::string> seen;
    for (const auto& r : rows) seen.insert(label_text(r[static_cast<std::size_t>(label_col)]));
    ds.class_names.assign(seen.begin(), seen.end());
  }
  ds.n_classes = static_cast<int>(ds.class_names.size());
  std::map<std::string, int> label_index;
  for (int i = 0; i < ds.n_classes; ++i) label_index[ds.class_names[static_cast<std::size_t>(i)]] = i;

  for (int c = 0; c < width; ++c) {
    if (c == label_col || ignored.count(c)) continue;
    const std::string base = header.empty() ? "c" + std::to_string(c) : header[static_cast<std::size_t>(c)];
    if (categorical.count(c)) {
      for (const auto& v : cats[c]) ds.feature_names.push_back(base + "=" + v);
    } else {
      ds.feature_names.push_back(base);
    }
  }

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& fields = rows[r];
    std::vector<double> x;
    x.reserve(ds.feature_names.size());
    for (int c = 0; c < width; ++c) {
      if (c == label_col || ignored.count(c)) continue;
      const auto& v = fields[static_cast<std::size_t>(c)];
      if (categorical.count(c)) {
        const auto& list = cats[c];
        const auto it = std::find(list.begin(), list.end(), v);
        if (it == list.end() && schema.unknown_category == UnknownCategory::Error) {
          throw std::runtime_error("line " + std::to_string(line_numbers[r]) + ": unknown category '" + v +
                                   "' in column " + std::to_string(c));
        }
        for (auto k = list.begin(); k != list.end(); ++k) x.push_back(k == it ? 1.0 : 0.0);
      } else {
        x.push_back(parse_number(v, line_numbers[r]));
      }
    }
    const auto lab = label_text(fields[static_cast<std::size_t>(label_col)]);
    const auto li = label_index.find(lab);
    if (li == label_index.end()) {
      throw std::runtime_error("line " + std::to_string(line_numbers[r]) + ": label '" + lab +
                               "' not in label_order");
    }
    ds.features.push_back(std::move(x));
    ds.labels.push_back(li->second);
  }
  ds.validate();
  return ds;
}

Dataset load_and_encode(const std::filesystem::path& path, const std::string& name) {
  auto schema = builtin_schema(name);
  if (schema.name.empty()) schema.name = name;
  return load_and_encode(path, schema);
}

std::string label_mapping_json(const Dataset& ds) {
  json j = json::object();
  for (int i = 0; i < ds.n_classes; ++i) j[ds.class_names[static_cast<std::size_t>(i)]] = i;
  return j.dump(2);
}

Dataset make_blobs(const BlobSpec& spec, std::uint64_t seed) {
  if (spec.n_classes < 2 || spec.n_features < 1 || spec.n_samples < spec.n_classes) {
    throw std::invalid_argument("make_blobs: need >= 2 classes, >= 1 feature, >= 1 sample per class");
  }
  Rng rng(seed);
  Dataset ds;
  ds.name = "blobs";
  ds.n_classes = spec.n_classes;
  for (int c = 0; c < spec.n_classes; ++c) ds.class_names.push_back(std::to_string(c));
  for (int j = 0; j < spec.n_features; ++j) ds.feature_names.push_back("f" + std::to_string(j));

  // Class c sits on axis c mod d, on the negative side for the second wrap.
  Matrix centres(static_cast<std::size_t>(spec.n_classes), std::vector<double>(static_cast<std::size_t>(spec.n_features), 0.0));
  for (int c = 0; c < spec.n_classes; ++c) {
    const int axis = c % spec.n_features;
    const double sign = (c / spec.n_features) % 2 == 0 ? 1.0 : -1.0;
    const double scale = 1.0 + static_cast<double>(c / (2 * spec.n_features));
    centres[static_cast<std::size_t>(c)][static_cast<std::size_t>(axis)] = sign * scale * spec.separation;
  }
  for (int i = 0; i < spec.n_samples; ++i) {
    const int c = i % spec.n_classes;
    std::vector<double> x(static_cast<std::size_t>(spec.n_features));
    for (int j = 0; j < spec.n_features; ++j) {
      x[static_cast<std::size_t>(j)] = centres[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)] +
                                       rng.normal(0.0, spec.spread);
    }
    ds.features.push_back(std::move(x));
    ds.labels.push_back(c);
  }
  return ds;
}

Dataset synthetic_dataset(std::uint64_t seed) {
  BlobSpec spec;
  spec.n_samples = 800;
  spec.n_classes = 4;
  spec.n_features = 10;
  spec.separation = 3.0;
  spec.spread = 1.0;
  auto ds = make_blobs(spec, seed);
  ds.name = "synthetic";
  return ds;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t j = 0; j < ds.dims(); ++j) out << 'f' << j << ',';
  out << "label\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (double v : ds.features[i]) out << v << ',';
    out << ds.labels[i] << '\n';
  }
}

Dataset read_csv(const std::filesystem::path& path, const std::string& name) {
  DatasetSchema s;
  s.name = name;
  s.header = true;
  s.label_column = -1;
  auto ds = load_and_encode(path, s);
  // Cached labels are already indices; restore numeric order.
  std::vector<int> order(static_cast<std::size_t>(ds.n_classes));
  for (int i = 0; i < ds.n_classes; ++i) order[static_cast<std::size_t>(i)] = std::stoi(ds.class_names[static_cast<std::size_t>(i)]);
  for (int& y : ds.labels) y = order[static_cast<std::size_t>(y)];
  const int max_label = *std::max_element(order.begin(), order.end());
  ds.n_classes = max_label + 1;
  ds.class_names.clear();
  for (int i = 0; i < ds.n_classes; ++i) ds.class_names.push_back(std::to_string(i));
  return ds;
}

}  // namespace qnnbench
