#include "qnnbench/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qnnbench/metrics.hpp"
#include "qnnbench/rng.hpp"

namespace qnnbench {

using json = nlohmann::json;

json RunRecord::to_json() const {
  json j;
  j["schema_version"] = kRecordSchemaVersion;
  j["config_hash"] = config_hash;
  j["config"] = config;
  j["status"] = ok ? "ok" : "failed";
  j["error"] = error;
  j["accuracy"] = accuracy;
  j["weighted_f1"] = weighted_f1;
  j["train_loss"] = train_loss;
  j["wall_time_s"] = wall_time_s;
  j["iterations"] = iterations;
  j["steps"] = steps;
  j["evaluations"] = evaluations;
  j["extra_evaluations"] = extra_evaluations;
  j["terminated_by"] = terminated_by;
  j["loss_trace"] = loss_trace;
  j["n_qubits"] = n_qubits;
  j["n_train"] = n_train;
  j["n_test"] = n_test;
  j["toolkit_version"] = toolkit_version;
  j["timestamp"] = timestamp;
  return j;
}

RunRecord RunRecord::from_json(const json& j) {
  if (!j.is_object() || !j.contains("schema_version")) throw std::invalid_argument("record without schema_version");
  const int v = j.at("schema_version").get<int>();
  if (v != kRecordSchemaVersion) {
    throw std::invalid_argument("unsupported record schema_version " + std::to_string(v) + " (expected " +
                                std::to_string(kRecordSchemaVersion) + ")");
  }
  RunRecord r;
  r.config_hash = j.at("config_hash").get<std::string>();
  r.config = j.at("config");
  r.ok = j.at("status").get<std::string>() == "ok";
  r.error = j.value("error", "");
  r.accuracy = j.value("accuracy", 0.0);
  r.weighted_f1 = j.value("weighted_f1", 0.0);
  r.train_loss = j.value("train_loss", 0.0);
  r.wall_time_s = j.value("wall_time_s", 0.0);
  r.iterations = j.value("iterations", 0);
  r.steps = j.value("steps", 0);
  r.evaluations = j.value("evaluations", 0);
  r.extra_evaluations = j.value("extra_evaluations", 0);
  r.terminated_by = j.value("terminated_by", "");
  r.loss_trace = j.value("loss_trace", std::vector<double>{});
  r.n_qubits = j.value("n_qubits", 0);
  r.n_train = j.value("n_train", std::size_t{0});
  r.n_test = j.value("n_test", std::size_t{0});
  r.toolkit_version = j.value("toolkit_version", "");
  r.timestamp = j.value("timestamp", "");
  if (r.ok && (r.accuracy < 0.0 || r.accuracy > 1.0 || r.weighted_f1 < 0.0 || r.weighted_f1 > 1.0)) {
    throw std::invalid_argument("record " + r.config_hash + " has metrics outside [0, 1]");
  }
  return r;
}

std::string RunRecord::to_line() const { return to_json().dump(); }

std::vector<double> downsample(const std::vector<double>& trace, std::size_t points) {
  if (trace.size() <= points || points < 2) return trace;
  std::vector<double> out;
  out.reserve(points);
  const double step = static_cast<double>(trace.size() - 1) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) {
    out.push_back(trace[static_cast<std::size_t>(std::llround(step * static_cast<double>(k)))]);
  }
  return out;
}

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunRecord run_config(const ModelConfig& config, const Dataset& data) {
  RunRecord rec;
  rec.config = config.to_json();
  rec.config_hash = config.hash_hex();
  const auto start = std::chrono::steady_clock::now();
  try {
    config.validate();
    const auto prepared = prepare(data, config.preprocessing, config.seed);
    const int nq = prepared.n_qubits();
    const std::uint64_t run_seed = config.run_seed();

    QnnModel model;
    model.feature_map = {config.feature_map, nq, config.feature_map_reps, config.feature_map_topology};
    model.ansatz = {config.ansatz, nq, config.ansatz_reps, config.ansatz_topology,
                    config.structure_seed.value_or(run_seed)};
    model.n_classes = data.n_classes;
    model.shots = config.shots;
    model.decode = config.decode;
    model.noise = resolve_noise(config.noise);
    model.threads = config.threads;

    const auto trained = train(model, prepared.train, config.optimizer, config.initializer, run_seed);
    const auto pred = predict(trained, prepared.test.features, derive_seed(run_seed, 4));

    rec.accuracy = accuracy(pred, prepared.test.labels);
    rec.weighted_f1 = weighted_f1(pred, prepared.test.labels);
    rec.train_loss = trained.trace.best_value;
    rec.iterations = trained.trace.iterations_used;
    rec.steps = trained.trace.steps_used;
    rec.evaluations = trained.trace.evaluations_used;
    rec.extra_evaluations = trained.trace.extra_evaluations;
    rec.terminated_by = std::string(termination_name(trained.trace.terminated_by));
    rec.loss_trace = downsample(trained.trace.loss_trace);
    rec.n_qubits = nq;
    rec.n_train = prepared.train.size();
    rec.n_test = prepared.test.size();
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rec.timestamp = utc_timestamp();
  return rec;
}

RunRecord run_config(const ModelConfig& config) {
  Dataset data;
  try {
    data = load_dataset(config);
  } catch (const std::exception& e) {
    RunRecord rec;
    rec.config = config.to_json();
    rec.config_hash = config.hash_hex();
    rec.ok = false;
    rec.error = e.what();
    rec.timestamp = utc_timestamp();
    return rec;
  }
  return run_config(config, data);
}

bool known_dataset(const std::string& dataset) {
  static const std::set<std::string> known{"kdd", "covertype", "glass", "rice", "synthetic", "blobs"};
  return known.count(dataset) > 0;
}

std::vector<ModelConfig> generate_grid(const std::string& dataset, const std::string& noise, const ModelConfig& base,
                                       std::optional<int> iteration_cap) {
  if (iteration_cap && *iteration_cap < 0) throw std::invalid_argument("iteration cap must be >= 0");
  if (!known_dataset(dataset)) throw std::invalid_argument("unknown dataset '" + dataset + "'");
  constexpr Topology kAll[] = {Topology::Full, Topology::Linear, Topology::Circular, Topology::Sca, Topology::Pairwise};
  constexpr Topology kNoPairwise[] = {Topology::Full, Topology::Linear, Topology::Circular, Topology::Sca};

  std::vector<std::pair<FeatureMapKind, std::optional<Topology>>> maps{{FeatureMapKind::Z, std::nullopt}};
  for (auto t : kAll) maps.emplace_back(FeatureMapKind::ZZ, t);

  std::vector<std::pair<AnsatzKind, std::optional<Topology>>> ansatzes;
  for (auto t : kNoPairwise) ansatzes.emplace_back(AnsatzKind::RealAmplitudes, t);
  for (auto t : kNoPairwise) ansatzes.emplace_back(AnsatzKind::EfficientSU2, t);
  for (auto t : kAll) ansatzes.emplace_back(AnsatzKind::TwoLocal, t);
  ansatzes.emplace_back(AnsatzKind::PauliTwoDesign, std::nullopt);

  std::vector<Reduction> reductions{Reduction::PCA};
  if (dataset != "rice") reductions.push_back(Reduction::LDA);

  std::vector<ModelConfig> grid;
  for (auto [fm, fm_topo] : maps) {
    for (auto [an, an_topo] : ansatzes) {
      for (auto opt : {OptimizerKind::COBYLA, OptimizerKind::SPSA, OptimizerKind::NelderMead}) {
        for (auto init : {InitKind::Uniform01, InitKind::Beta, InitKind::NormalSigmaInvL}) {
          for (auto red : reductions) {
            ModelConfig c = base;
            c.dataset = dataset;
            c.noise = noise;
            c.feature_map = fm;
            c.feature_map_topology = fm_topo;
            c.ansatz = an;
            c.ansatz_topology = an_topo;
            c.optimizer = OptimizerSpec::defaults(opt);
            if (iteration_cap) c.optimizer.max_iterations = std::min(c.optimizer.max_iterations, *iteration_cap);
            c.initializer.kind = init;
            c.initializer.layers = c.ansatz_reps;
            c.preprocessing.reduction = red;
            grid.push_back(std::move(c));
          }
        }
      }
    }
  }
  return grid;
}

std::string SweepSummary::line() const {
  std::ostringstream s;
  s << "completed: " << completed << " failed: " << failed << " skipped: " << skipped << " grid: " << grid
    << " selected: " << selected;
  return s.str();
}

std::vector<std::size_t> subsample_grid(std::size_t grid_size, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("subsample fraction must be in (0, 1]");
  std::vector<std::size_t> idx(grid_size);
  std::iota(idx.begin(), idx.end(), 0);
  if (fraction >= 1.0) return idx;
  Rng rng(derive_seed(seed, 0x5b5a));
  for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
  const auto take = std::max<std::size_t>(
      grid_size == 0 ? 0 : 1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(grid_size))));
  idx.resize(std::min(take, grid_size));
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

struct ParsedFile {
  std::vector<RunRecord> records;
  std::uintmax_t valid_bytes = 0;  // prefix made of complete, parseable lines
};

ParsedFile parse_results(const std::filesystem::path& path) {
  ParsedFile out;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read results file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    ++line_no;
    const auto nl = text.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    const std::string line = text.substr(pos, terminated ? nl - pos : std::string::npos);
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      pos = terminated ? nl + 1 : text.size();
      if (terminated) out.valid_bytes = pos;
      continue;
    }
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      if (!terminated) break;  // torn final write
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": malformed record");
    }
    if (!terminated) break;  // parseable but unterminated: treat as torn too
    out.records.push_back(RunRecord::from_json(j));
    pos = nl + 1;
    out.valid_bytes = pos;
  }
  return out;
}

}  // namespace

std::vector<RunRecord> read_records(const std::filesystem::path& path) { return parse_results(path).records; }

SweepSummary run_sweep(const std::vector<ModelConfig>& grid, const Dataset& data, const SweepOptions& options) {
  if (options.parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
  SweepSummary summary;
  summary.grid = grid.size();
  const auto selection = subsample_grid(grid.size(), options.subsample, options.global_seed);
  summary.selected = selection.size();

  std::set<std::string> done;
  if (options.resume && std::filesystem::exists(options.output)) {
    const auto parsed = parse_results(options.output);
    if (parsed.valid_bytes != std::filesystem::file_size(options.output)) {
      std::filesystem::resize_file(options.output, parsed.valid_bytes);
    }
    for (const auto& r : parsed.records) done.insert(r.config_hash);
  } else {
    std::ofstream truncate(options.output, std::ios::trunc);
    if (!truncate) throw std::runtime_error("cannot write results file " + options.output.string());
  }
  std::ofstream out(options.output, std::ios::app | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write results file " + options.output.string());

  std::vector<ModelConfig> todo;
  for (auto i : selection) {
    ModelConfig c = grid[i];
    c.seed = options.global_seed;
    if (done.count(c.hash_hex())) {
      ++summary.skipped;
    } else {
      todo.push_back(std::move(c));
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex writer;
  std::exception_ptr write_error;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= todo.size()) return;
      if (options.max_new_runs && i >= *options.max_new_runs) return;
      const RunRecord rec = run_config(todo[i], data);
      std::lock_guard lock(writer);
      try {
        out << rec.to_line() << '\n';
        out.flush();
        if (!out) throw std::runtime_error("write to " + options.output.string() + " failed");
        (rec.ok ? summary.completed : summary.failed) += 1;
        if (options.on_record) options.on_record(rec);
      } catch (...) {
        if (!write_error) write_error = std::current_exception();
        next = todo.size();
      }
    }
  };
  const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(options.parallelism),
                                                             std::max<std::size_t>(todo.size(), 1)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (write_error) std::rethrow_exception(write_error);
  return summary;
}

std::vector<std::filesystem::path> write_split_cache(const std::vector<ModelConfig>& configs, const Dataset& data,
                                                     std::uint64_t seed, const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  std::set<std::string> seen;
  for (const auto& c : configs) {
    auto key = c.to_json().at("preprocessing");
    key["seed"] = seed;
    const std::string text = key.dump();
    if (!seen.insert(text).second) continue;
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
    const auto sub = dir / (c.dataset + "-" + hex);
    std::filesystem::create_directories(sub);
    const auto prepared = prepare(data, c.preprocessing, seed);
    write_csv(prepared.train, sub / "train.csv");
    write_csv(prepared.test, sub / "test.csv");
    std::ofstream(sub / "labels.json") << label_mapping_json(data) << '\n';
    std::ofstream meta(sub / "preprocessing.json");
    if (!(meta << key.dump(2) << '\n')) throw std::runtime_error("cannot write " + (sub / "preprocessing.json").string());
    written.push_back(sub);
  }
  return written;
}

}  // namespace qnnbench
