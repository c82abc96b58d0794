// qnnbench command-line frontend: run, sweep, grid, analyze, noise-validate.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qnnbench/analysis.hpp"
#include "qnnbench/config.hpp"
#include "qnnbench/noise.hpp"
#include "qnnbench/sweep.hpp"

namespace {

using json = nlohmann::json;
using namespace qnnbench;

// Sweep file: {schema_version, dataset, noise, seed, subsample, parallel,
// max_iterations, base: <config>}. Every key is optional; flags win.
struct SweepFile {
  std::optional<std::string> dataset;
  std::optional<std::string> noise;
  std::optional<std::uint64_t> seed;
  std::optional<double> subsample;
  std::optional<int> parallel;
  std::optional<int> max_iterations;
  ModelConfig base;
};

SweepFile load_sweep_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sweep file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("sweep file " + path + ": " + e.what());
  }
  static const std::set<std::string> keys{"schema_version", "dataset", "noise",          "seed",
                                          "subsample",      "parallel", "max_iterations", "base", "description"};
  for (const auto& [k, _] : j.items()) {
    if (!keys.count(k)) throw std::runtime_error("sweep file " + path + ": unknown key '" + k + "'");
  }
  if (j.value("schema_version", kConfigSchemaVersion) != kConfigSchemaVersion) {
    throw std::runtime_error("sweep file " + path + ": unsupported schema_version");
  }
  SweepFile f;
  if (j.contains("dataset")) f.dataset = j["dataset"].get<std::string>();
  if (j.contains("noise")) f.noise = j["noise"].get<std::string>();
  if (j.contains("seed")) f.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("subsample")) f.subsample = j["subsample"].get<double>();
  if (j.contains("parallel")) f.parallel = j["parallel"].get<int>();
  if (j.contains("max_iterations")) f.max_iterations = j["max_iterations"].get<int>();
  if (j.contains("base")) f.base = ModelConfig::from_json(j["base"]);
  return f;
}

int env_parallelism() {
  if (const char* v = std::getenv("QNNBENCH_PARALLEL")) {
    try {
      return std::stoi(v);
    } catch (const std::exception&) {
      throw std::runtime_error(std::string("QNNBENCH_PARALLEL is not an integer: ") + v);
    }
  }
  return 1;
}

void append_line(const std::string& path, const std::string& line) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << line << '\n';
  if (!out.flush()) throw std::runtime_error("write to " + path + " failed");
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out || !(out << text) || !out.flush()) throw std::runtime_error("cannot write " + path.string());
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out) {
  ModelConfig config = load_config(config_path);
  if (seed) config.seed = *seed;
  const RunRecord rec = run_config(config);
  const std::string line = rec.to_line();
  std::cout << line << '\n';
  if (!out.empty()) append_line(out, line);
  if (!rec.ok) {
    std::cerr << "run failed: " << rec.error << '\n';
    return 1;
  }
  return 0;
}

struct SweepArgs {
  std::string config;
  std::string dataset;
  std::string noise;
  std::string out;
  std::optional<int> parallel;
  std::optional<std::uint64_t> seed;
  bool resume = false;
  std::optional<double> subsample;
  std::optional<int> max_iterations;
  std::string data_path;
  std::string cache_dir;
};

int cmd_sweep(const SweepArgs& a) {
  SweepFile f;
  if (!a.config.empty()) f = load_sweep_file(a.config);
  const std::string dataset = !a.dataset.empty() ? a.dataset : f.dataset.value_or("");
  if (dataset.empty()) throw std::runtime_error("sweep needs --dataset (or a dataset in --config)");
  if (!known_dataset(dataset)) throw std::runtime_error("unknown dataset '" + dataset + "'");
  const std::string noise = !a.noise.empty() ? a.noise : f.noise.value_or("none");
  resolve_noise(noise);  // fail before any work on a bad noise file
  if (a.out.empty()) throw std::runtime_error("sweep needs --out");

  ModelConfig base = f.base;
  base.dataset = dataset;
  base.noise = noise;
  if (!a.data_path.empty()) base.data_path = a.data_path;
  const auto max_it = a.max_iterations ? a.max_iterations : f.max_iterations;
  const auto grid = generate_grid(dataset, noise, base, max_it);

  SweepOptions opt;
  opt.parallelism = a.parallel ? *a.parallel : f.parallel.value_or(env_parallelism());
  if (opt.parallelism < 1) throw std::runtime_error("--parallel must be >= 1");
  opt.global_seed = a.seed ? *a.seed : f.seed.value_or(0);
  opt.output = a.out;
  opt.resume = a.resume;
  opt.subsample = a.subsample ? *a.subsample : f.subsample.value_or(1.0);
  {
    // Probe writability before loading data.
    std::ofstream probe(opt.output, std::ios::app);
    if (!probe) throw std::runtime_error("cannot write " + opt.output.string());
  }
  const Dataset data = load_dataset(base);
  if (!a.cache_dir.empty()) {
    for (const auto& d : write_split_cache(grid, data, opt.global_seed, a.cache_dir)) {
      std::cerr << "cached " << d.string() << '\n';
    }
  }
  opt.on_record = [](const RunRecord& r) {
    std::cerr << (r.ok ? "ok     " : "FAILED ") << r.config_hash;
    if (r.ok) {
      std::cerr << " acc " << r.accuracy << " f1 " << r.weighted_f1;
    } else {
      std::cerr << ' ' << r.error;
    }
    std::cerr << '\n';
  };
  const auto summary = run_sweep(grid, data, opt);
  std::cout << summary.line() << '\n';
  return summary.failed == 0 ? 0 : 1;
}

int cmd_grid(const std::string& dataset, const std::string& noise, const std::string& out) {
  const auto grid = generate_grid(dataset, noise.empty() ? "none" : noise);
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    for (const auto& c : grid) f << c.to_json().dump() << '\n';
  }
  std::cout << "grid: " << grid.size() << '\n';
  return 0;
}

struct AnalyzeArgs {
  std::string results;
  std::vector<std::string> factors;
  std::optional<std::size_t> top;
  std::vector<std::string> matrices;
  std::string report;
};

int cmd_analyze(const AnalyzeArgs& a) {
  const auto records = load_results(a.results);
  const bool none = a.factors.empty() && !a.top && a.matrices.empty();
  std::filesystem::path dir;
  if (!a.report.empty()) {
    dir = a.report;
    std::filesystem::create_directories(dir);
  }
  if (a.top || none) {
    const std::size_t k = a.top.value_or(5);
    if (k == 0) throw std::runtime_error("--top must be >= 1");
    std::cout << top_k_text(records, k);
    if (!dir.empty()) {
      write_file(dir / "top.csv", top_k_csv(records, k));
      write_file(dir / "top.txt", top_k_text(records, k));
    }
  }
  for (const auto& f : a.factors) {
    const auto s = factor_significance(records, f);
    std::cout << factor_text(s);
    if (!dir.empty()) {
      write_file(dir / ("factor_" + f + ".csv"), factor_csv(s));
      write_file(dir / ("factor_" + f + ".txt"), factor_text(s));
    }
  }
  for (const auto& f : a.matrices) {
    const auto m = pairwise_matrix(records, f);
    bool usable = false;
    for (const auto& mm : m) usable = usable || mm.levels.size() >= 2;
    if (!usable) throw std::runtime_error("insufficient levels: factor '" + f + "' has fewer than 2 levels");
    std::cout << matrix_text(m);
    if (!dir.empty()) {
      write_file(dir / ("matrix_" + f + ".csv"), matrix_csv(m));
      write_file(dir / ("matrix_" + f + ".txt"), matrix_text(m));
    }
  }
  return 0;
}

int cmd_noise_validate(const std::string& path, std::optional<int> n_qubits) {
  const NoiseModel m = path == "perth-like" ? NoiseModel::perth_like() : load_noise_model(path);
  if (n_qubits && m.n_qubits != *n_qubits) {
    throw std::runtime_error("noise model has " + std::to_string(m.n_qubits) + " qubits, expected " +
                             std::to_string(*n_qubits));
  }
  std::cout << "ok: n_qubits " << m.n_qubits << " p1 " << m.p1 << " p2 " << m.p2
            << (m.is_noiseless() ? " (noiseless)" : "") << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qnnbench: quantum neural network benchmark toolkit"};
  app.require_subcommand(1);

  std::string run_config_path, run_out;
  std::optional<std::uint64_t> run_seed;
  auto* run = app.add_subcommand("run", "Train and evaluate one config");
  run->add_option("--config", run_config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", run_seed, "Override the config seed");
  run->add_option("--out", run_out, "Append the record to this results file");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Run the hyperparameter grid");
  sweep->add_option("--config", sweep_args.config, "Sweep file")->check(CLI::ExistingFile);
  sweep->add_option("--dataset", sweep_args.dataset, "kdd, covertype, glass, rice, synthetic or blobs");
  sweep->add_option("--noise", sweep_args.noise, "none, perth-like or a noise file");
  sweep->add_option("--out", sweep_args.out, "Results file (JSON lines)");
  sweep->add_option("--parallel", sweep_args.parallel, "Workers (default $QNNBENCH_PARALLEL or 1)");
  sweep->add_option("--seed", sweep_args.seed, "Global seed");
  sweep->add_flag("--resume", sweep_args.resume, "Skip configs already in --out");
  sweep->add_option("--subsample", sweep_args.subsample, "Fraction of the grid to run");
  sweep->add_option("--max-iterations", sweep_args.max_iterations, "Cap every optimizer budget");
  sweep->add_option("--data", sweep_args.data_path, "Raw dataset file");
  sweep->add_option("--cache", sweep_args.cache_dir, "Write the reduced train/test splits as CSV here");

  std::string grid_dataset, grid_noise, grid_out;
  auto* grid = app.add_subcommand("grid", "Print the grid size, optionally dump the configs");
  grid->add_option("--dataset", grid_dataset, "Dataset id")->required();
  grid->add_option("--noise", grid_noise, "Noise setting");
  grid->add_option("--out", grid_out, "Write one config per line");

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Report tables, factor tests and pairwise matrices");
  analyze->add_option("--results", analyze_args.results, "Results file")->required();
  analyze->add_option("--factor", analyze_args.factors, "Factor significance summary (repeatable)");
  analyze->add_option("--top", analyze_args.top, "Top-k table per noise setting");
  analyze->add_option("--matrix", analyze_args.matrices, "Pairwise significance matrix for a factor (repeatable)");
  analyze->add_option("--report", analyze_args.report, "Directory for CSV and text reports");

  std::string noise_path;
  std::optional<int> noise_qubits;
  auto* noise = app.add_subcommand("noise-validate", "Check a noise file");
  noise->add_option("path", noise_path, "Noise file or perth-like")->required();
  noise->add_option("--n-qubits", noise_qubits, "Expected qubit count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_config_path, run_seed, run_out);
    if (*sweep) return cmd_sweep(sweep_args);
    if (*grid) return cmd_grid(grid_dataset, grid_noise, grid_out);
    if (*analyze) return cmd_analyze(analyze_args);
    if (*noise) return cmd_noise_validate(noise_path, noise_qubits);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
