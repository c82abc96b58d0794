#include "qnnbench/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qnnbench {

using json = nlohmann::json;

std::vector<RunRecord> load_results(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw std::runtime_error("results file " + path.string() + " not found");
  std::vector<RunRecord> ok;
  for (auto& r : read_records(path)) {
    if (r.ok) ok.push_back(std::move(r));
  }
  if (ok.empty()) throw std::runtime_error("results file " + path.string() + " has no successful records");
  return ok;
}

namespace {
constexpr double kBandEps = 1e-12;
}

std::vector<RunRecord> best_set(const std::vector<RunRecord>& records, double band) {
  if (records.empty()) return {};
  double best = records.front().accuracy;
  for (const auto& r : records) best = std::max(best, r.accuracy);
  std::vector<RunRecord> out;
  for (const auto& r : records) {
    if (r.accuracy >= best - band - kBandEps) out.push_back(r);
  }
  return out;
}

std::vector<RunRecord> worst_set(const std::vector<RunRecord>& records, double band) {
  if (records.empty()) return {};
  double worst = records.front().accuracy;
  for (const auto& r : records) worst = std::min(worst, r.accuracy);
  std::vector<RunRecord> out;
  for (const auto& r : records) {
    if (r.accuracy <= worst + band + kBandEps) out.push_back(r);
  }
  return out;
}

const std::vector<std::string>& known_factors() {
  static const std::vector<std::string> f{"feature_map", "feature_map_kind", "ansatz",        "ansatz_kind", "entanglement",
                                          "optimizer",   "initialization",   "preprocessing", "noise"};
  return f;
}

namespace {

std::string canonical_factor(const std::string& factor) {
  if (factor == "initializer" || factor == "init") return "initialization";
  if (std::find(known_factors().begin(), known_factors().end(), factor) == known_factors().end()) {
    std::string all;
    for (const auto& f : known_factors()) all += (all.empty() ? "" : ", ") + f;
    throw std::invalid_argument("unknown factor '" + factor + "' (known: " + all + ")");
  }
  return factor;
}

std::string str_or(const json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<std::string>();
}

std::string with_topology(const json& part) {
  std::string s = str_or(part, "kind", "?");
  const std::string t = str_or(part, "topology", "");
  return t.empty() ? s : s + "/" + t;
}

}  // namespace

std::string noise_setting(const RunRecord& record) { return str_or(record.config, "noise", "none"); }

std::string factor_level(const RunRecord& record, const std::string& factor_in) {
  const std::string factor = canonical_factor(factor_in);
  const json& c = record.config;
  if (factor == "feature_map") return with_topology(c.at("feature_map"));
  if (factor == "feature_map_kind") return str_or(c.at("feature_map"), "kind", "?");
  if (factor == "ansatz") return with_topology(c.at("ansatz"));
  if (factor == "ansatz_kind") return str_or(c.at("ansatz"), "kind", "?");
  if (factor == "entanglement") return str_or(c.at("ansatz"), "topology", "none");
  if (factor == "optimizer") return str_or(c.at("optimizer"), "kind", "?");
  if (factor == "initialization") return str_or(c.at("initializer"), "kind", "?");
  if (factor == "preprocessing") return str_or(c.at("preprocessing"), "method", "?");
  return noise_setting(record);
}

std::string pairing_key(const RunRecord& record, const std::string& factor_in) {
  const std::string factor = canonical_factor(factor_in);
  json c = record.config;
  c.erase("seed");
  if (c.contains("model")) c["model"].erase("threads");
  if (factor == "feature_map") c.erase("feature_map");
  if (factor == "feature_map_kind") {
    c["feature_map"].erase("kind");
    c["feature_map"].erase("topology");
  }
  if (factor == "ansatz") c.erase("ansatz");
  if (factor == "ansatz_kind") {
    c["ansatz"].erase("kind");
    c["ansatz"].erase("topology");
    c["ansatz"].erase("structure_seed");
  }
  if (factor == "entanglement") c["ansatz"].erase("topology");
  if (factor == "optimizer") c.erase("optimizer");
  if (factor == "initialization") c["initializer"].erase("kind");
  if (factor == "preprocessing") c["preprocessing"].erase("method");
  if (factor == "noise") c.erase("noise");
  return c.dump();
}

std::string_view verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::Better: return "better";
    case Verdict::Worse: return "worse";
    case Verdict::NoDifference: return "no_difference";
    case Verdict::Insufficient: return "insufficient";
  }
  return "?";
}

namespace {

// level -> key -> mean accuracy, for one noise group
struct Aligned {
  std::vector<std::string> levels;
  std::map<std::string, std::map<std::string, double>> by_level;
};

Aligned align(const std::vector<const RunRecord*>& group, const std::string& factor) {
  std::map<std::string, std::map<std::string, std::pair<double, int>>> acc;
  for (const auto* r : group) {
    auto& slot = acc[factor_level(*r, factor)][pairing_key(*r, factor)];
    slot.first += r->accuracy;
    slot.second += 1;
  }
  Aligned a;
  for (const auto& [level, keys] : acc) {
    a.levels.push_back(level);
    for (const auto& [k, v] : keys) a.by_level[level][k] = v.first / v.second;
  }
  return a;
}

std::map<std::string, std::vector<const RunRecord*>> group_by_noise(const std::vector<RunRecord>& records,
                                                                    const std::string& factor) {
  std::map<std::string, std::vector<const RunRecord*>> groups;
  const bool split = canonical_factor(factor) != "noise";
  for (const auto& r : records) groups[split ? noise_setting(r) : "all"].push_back(&r);
  return groups;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

PairCell compare(const std::map<std::string, double>& row, const std::map<std::string, double>& col) {
  std::vector<double> a, b, diff;
  for (const auto& [k, v] : row) {
    const auto it = col.find(k);
    if (it == col.end()) continue;
    a.push_back(v);
    b.push_back(it->second);
    diff.push_back(v - it->second);
  }
  PairCell cell;
  cell.n_pairs = static_cast<int>(a.size());
  const auto nonzero = std::count_if(diff.begin(), diff.end(), [](double d) { return d != 0.0; });
  if (nonzero == 0) {
    cell.p_value = 1.0;
    cell.verdict = a.empty() ? Verdict::Insufficient : Verdict::NoDifference;
    return cell;
  }
  if (nonzero < 5) {
    cell.verdict = Verdict::Insufficient;
    cell.p_value = 1.0;
    return cell;
  }
  const auto res = wilcoxon_signed_rank(a, b);
  cell.p_value = res.p_value;
  if (res.p_value >= kAlpha) {
    cell.verdict = Verdict::NoDifference;
  } else {
    double direction = median(diff);
    if (direction == 0.0) direction = std::accumulate(diff.begin(), diff.end(), 0.0);
    cell.verdict = direction > 0.0 ? Verdict::Better : direction < 0.0 ? Verdict::Worse : Verdict::NoDifference;
  }
  return cell;
}

}  // namespace

std::vector<PairwiseMatrix> pairwise_matrix(const std::vector<RunRecord>& records, const std::string& factor) {
  std::vector<PairwiseMatrix> out;
  for (const auto& [noise, group] : group_by_noise(records, factor)) {
    const auto a = align(group, factor);
    PairwiseMatrix m;
    m.factor = canonical_factor(factor);
    m.noise = noise;
    m.levels = a.levels;
    const std::size_t k = a.levels.size();
    m.cells.assign(k, std::vector<std::optional<PairCell>>(k));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        if (i != j) m.cells[i][j] = compare(a.by_level.at(a.levels[i]), a.by_level.at(a.levels[j]));
      }
    }
    // A key is unpaired when it appears under only one level.
    std::map<std::string, int> seen;
    for (const auto& [level, keys] : a.by_level)
      for (const auto& [key, _] : keys) ++seen[key];
    for (const auto& [_, n] : seen) m.unpaired += n < 2 ? 1 : 0;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<FactorSummary> factor_significance(const std::vector<RunRecord>& records, const std::string& factor) {
  std::vector<FactorSummary> out;
  std::size_t max_levels = 0;
  for (const auto& [noise, group] : group_by_noise(records, factor)) {
    const auto a = align(group, factor);
    FactorSummary s;
    s.factor = canonical_factor(factor);
    s.noise = noise;
    s.levels = a.levels;
    max_levels = std::max(max_levels, a.levels.size());

    std::map<std::string, std::vector<double>> raw;
    for (const auto* r : group) raw[factor_level(*r, factor)].push_back(r->accuracy);
    std::vector<std::vector<double>> samples;
    for (const auto& l : a.levels) {
      const auto& v = raw[l];
      s.counts.push_back(v.size());
      s.mean_accuracy.push_back(std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()));
      samples.push_back(v);
    }
    if (a.levels.size() >= 2) {
      // Blocks: keys present at every level.
      std::vector<std::vector<double>> blocks;
      for (const auto& [key, v0] : a.by_level.at(a.levels[0])) {
        std::vector<double> row{v0};
        for (std::size_t l = 1; l < a.levels.size(); ++l) {
          const auto& m = a.by_level.at(a.levels[l]);
          const auto it = m.find(key);
          if (it == m.end()) break;
          row.push_back(it->second);
        }
        if (row.size() == a.levels.size()) blocks.push_back(std::move(row));
      }
      s.aligned_blocks = blocks.size();
      try {
        if (a.levels.size() == 2) {
          std::vector<double> x, y;
          for (const auto& row : blocks) {
            x.push_back(row[0]);
            y.push_back(row[1]);
          }
          s.dependent = wilcoxon_signed_rank(x, y);
        } else {
          s.dependent = friedman(blocks);
        }
      } catch (const std::exception& e) {
        s.dependent_error = e.what();
      }
      try {
        s.independent = a.levels.size() == 2 ? mann_whitney_u(samples[0], samples[1]) : kruskal_wallis(samples);
      } catch (const std::exception& e) {
        s.independent_error = e.what();
      }
    }
    out.push_back(std::move(s));
  }
  if (max_levels < 2) {
    throw std::invalid_argument("insufficient levels: factor '" + factor + "' has " + std::to_string(max_levels) +
                                " level(s) in the results, at least 2 are needed");
  }
  return out;
}

namespace {

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::map<std::string, std::vector<const RunRecord*>> ranked_by_noise(const std::vector<RunRecord>& records,
                                                                      std::size_t k) {
  std::map<std::string, std::vector<const RunRecord*>> groups;
  for (const auto& r : records) groups[noise_setting(r)].push_back(&r);
  for (auto& [_, g] : groups) {
    std::stable_sort(g.begin(), g.end(), [](const RunRecord* a, const RunRecord* b) {
      if (a->weighted_f1 != b->weighted_f1) return a->weighted_f1 > b->weighted_f1;
      if (a->accuracy != b->accuracy) return a->accuracy > b->accuracy;
      return a->config_hash < b->config_hash;
    });
    if (g.size() > k) g.resize(k);
  }
  return groups;
}

std::vector<std::string> table_row(const RunRecord& r) {
  return {fmt(r.accuracy, 3),
          fmt(r.weighted_f1, 3),
          fmt(r.wall_time_s, r.wall_time_s < 10.0 ? 2 : 0),
          factor_level(r, "ansatz"),
          factor_level(r, "optimizer"),
          factor_level(r, "feature_map"),
          factor_level(r, "preprocessing"),
          factor_level(r, "initialization"),
          r.config_hash};
}

const std::vector<std::string> kTableHeader{"accuracy", "weighted_f1", "time_s", "ansatz", "optimizer",
                                            "feature_map", "preprocessing", "initialization", "config_hash"};

std::string noise_title(const std::string& noise) { return noise == "none" ? "Noiseless" : "Noisy (" + noise + ")"; }

}  // namespace

std::string top_k_csv(const std::vector<RunRecord>& records, std::size_t k) {
  std::ostringstream s;
  s << "noise,rank";
  for (const auto& h : kTableHeader) s << ',' << h;
  s << '\n';
  for (const auto& [noise, rows] : ranked_by_noise(records, k)) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      s << csv_field(noise) << ',' << i + 1;
      for (const auto& f : table_row(*rows[i])) s << ',' << csv_field(f);
      s << '\n';
    }
  }
  return s.str();
}

std::string top_k_text(const std::vector<RunRecord>& records, std::size_t k) {
  std::ostringstream s;
  const std::vector<std::string> header{"Acc.", "F-1", "Time [s]", "Ansatz/Entanglement", "Optimizer",
                                        "Feature Map/Ent.", "Prepr.", "Init"};
  for (const auto& [noise, rows] : ranked_by_noise(records, k)) {
    std::vector<std::vector<std::string>> table{header};
    for (const auto* r : rows) {
      auto row = table_row(*r);
      row.pop_back();
      table.push_back(std::move(row));
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& row : table)
      for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    s << noise_title(noise) << '\n';
    for (const auto& row : table) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        s << row[c] << std::string(width[c] - row[c].size(), ' ') << (c + 1 < row.size() ? "  " : "\n");
      }
    }
    s << '\n';
  }
  return s.str();
}

std::string matrix_csv(const std::vector<PairwiseMatrix>& matrices) {
  std::ostringstream s;
  s << "factor,noise,row,column,p_value,verdict,n_pairs\n";
  for (const auto& m : matrices) {
    for (std::size_t i = 0; i < m.levels.size(); ++i) {
      for (std::size_t j = 0; j < m.levels.size(); ++j) {
        if (!m.cells[i][j]) continue;
        const auto& c = *m.cells[i][j];
        s << csv_field(m.factor) << ',' << csv_field(m.noise) << ',' << csv_field(m.levels[i]) << ','
          << csv_field(m.levels[j]) << ',' << fmt(c.p_value, 4) << ',' << verdict_name(c.verdict) << ','
          << c.n_pairs << '\n';
      }
    }
  }
  return s.str();
}

std::string matrix_text(const std::vector<PairwiseMatrix>& matrices) {
  std::ostringstream s;
  for (const auto& m : matrices) {
    s << m.factor << ", " << (m.noise == "all" ? std::string("all settings") : noise_title(m.noise)) << '\n';
    s << "cell = p-value, + row better, - row worse, ? insufficient pairs\n";
    std::size_t w = 8;  // "0.0078 +"
    for (const auto& l : m.levels) w = std::max(w, l.size());
    s << std::string(w, ' ');
    for (const auto& l : m.levels) s << "  " << l << std::string(w - l.size(), ' ');
    s << '\n';
    for (std::size_t i = 0; i < m.levels.size(); ++i) {
      s << m.levels[i] << std::string(w - m.levels[i].size(), ' ');
      for (std::size_t j = 0; j < m.levels.size(); ++j) {
        std::string cell = "-";
        if (m.cells[i][j]) {
          const auto& c = *m.cells[i][j];
          cell = c.verdict == Verdict::Insufficient ? "?" : fmt(c.p_value, 4);
          if (c.verdict == Verdict::Better) cell += " +";
          if (c.verdict == Verdict::Worse) cell += " -";
        }
        s << "  " << cell << std::string(w > cell.size() ? w - cell.size() : 0, ' ');
      }
      s << '\n';
    }
    s << "unpaired configs: " << m.unpaired << "\n\n";
  }
  return s.str();
}

std::string factor_csv(const std::vector<FactorSummary>& summaries) {
  std::ostringstream s;
  s << "factor,noise,test,statistic,p_value,n,method,levels\n";
  for (const auto& f : summaries) {
    std::string levels;
    for (const auto& l : f.levels) levels += (levels.empty() ? "" : ";") + l;
    for (const auto* r : {&f.dependent, &f.independent}) {
      if (!*r) continue;
      const auto& t = **r;
      s << csv_field(f.factor) << ',' << csv_field(f.noise) << ',' << t.test << ',' << fmt(t.statistic, 4) << ','
        << fmt(t.p_value, 4) << ',' << t.n << ',' << (t.method == PMethod::Exact ? "exact" : "approximate") << ','
        << csv_field(levels) << '\n';
    }
  }
  return s.str();
}

std::string factor_text(const std::vector<FactorSummary>& summaries) {
  std::ostringstream s;
  for (const auto& f : summaries) {
    s << f.factor << " (" << (f.noise == "all" ? std::string("all settings") : noise_title(f.noise)) << ")\n";
    for (std::size_t i = 0; i < f.levels.size(); ++i) {
      s << "  " << f.levels[i] << ": n=" << f.counts[i] << " mean accuracy " << fmt(f.mean_accuracy[i], 3) << '\n';
    }
    auto line = [&](const std::optional<SignificanceResult>& r, const std::string& err, const char* label) {
      s << "  " << label << ": ";
      if (r) {
        s << r->test << " statistic " << fmt(r->statistic, 4) << " p " << fmt(r->p_value, 4)
          << (r->p_value < kAlpha ? " significant" : " not significant") << '\n';
      } else {
        s << (err.empty() ? std::string("not applicable") : err) << '\n';
      }
    };
    line(f.dependent, f.dependent_error, "dependent");
    line(f.independent, f.independent_error, "independent");
    s << "  aligned blocks: " << f.aligned_blocks << "\n\n";
  }
  return s.str();
}

}  // namespace qnnbench
