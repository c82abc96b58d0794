#include "qnnbench/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>

#include "qnnbench/rng.hpp"

namespace qnnbench {

using json = nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be an object");
  for (const auto& [k, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw std::invalid_argument("unknown key '" + (where.empty() ? k : where + "." + k) + "'");
  }
}

json topo_json(const std::optional<Topology>& t) {
  return t ? json(std::string(topology_name(*t))) : json(nullptr);
}

std::optional<Topology> topo_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return topology_from_name(j.at(key).get<std::string>());
}

}  // namespace

void ModelConfig::validate() const {
  if (dataset.empty()) throw std::invalid_argument("dataset must be set");
  if (dataset == "rice" && preprocessing.reduction == Reduction::LDA) {
    throw std::invalid_argument("preprocessing.method=LDA is not available for dataset=rice (2 classes give one direction)");
  }
  if (preprocessing.out_dims < 1) throw std::invalid_argument("preprocessing.out_dims must be >= 1");
  if (preprocessing.n_train < 1) throw std::invalid_argument("preprocessing.n_train must be >= 1");
  if (!(preprocessing.scale_hi > preprocessing.scale_lo)) {
    throw std::invalid_argument("preprocessing.scale_hi must exceed preprocessing.scale_lo");
  }
  FeatureMapSpec fm{feature_map, 2, feature_map_reps, feature_map_topology};
  fm.validate();
  if (feature_map_topology && !topology_allowed(feature_map, *feature_map_topology)) {
    throw std::invalid_argument("feature_map.kind=" + std::string(feature_map_name(feature_map)) +
                                " does not support feature_map.topology=" +
                                std::string(topology_name(*feature_map_topology)));
  }
  AnsatzSpec an{ansatz, 2, ansatz_reps, ansatz_topology, 0};
  an.validate();
  optimizer.validate();
  initializer.validate();
  if (shots == 0) throw std::invalid_argument("model.shots must be positive");
  if (threads < 1) throw std::invalid_argument("model.threads must be >= 1");
}

json ModelConfig::to_json() const {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["dataset"] = dataset;
  j["data_path"] = data_path ? json(*data_path) : json(nullptr);
  j["noise"] = noise;
  j["seed"] = seed;
  j["preprocessing"] = {{"method", std::string(reduction_name(preprocessing.reduction))},
                        {"out_dims", preprocessing.out_dims},
                        {"n_train", preprocessing.n_train},
                        {"n_test", preprocessing.n_test},
                        {"stratified", preprocessing.stratified},
                        {"scale_lo", preprocessing.scale_lo},
                        {"scale_hi", preprocessing.scale_hi}};
  j["feature_map"] = {{"kind", std::string(feature_map_name(feature_map))},
                      {"reps", feature_map_reps},
                      {"topology", topo_json(feature_map_topology)}};
  j["ansatz"] = {{"kind", std::string(ansatz_name(ansatz))},
                 {"reps", ansatz_reps},
                 {"topology", topo_json(ansatz_topology)},
                 {"structure_seed", structure_seed ? json(*structure_seed) : json(nullptr)}};
  const auto& o = optimizer;
  j["optimizer"] = {
      {"kind", std::string(optimizer_name(o.kind))},
      {"max_iterations", o.max_iterations},
      {"early_stop_tolerance", o.early_stop_tolerance ? json(*o.early_stop_tolerance) : json(nullptr)},
      {"adaptive", o.adaptive},
      {"spsa",
       {{"a", o.spsa.a},
        {"c", o.spsa.c},
        {"alpha", o.spsa.alpha},
        {"gamma", o.spsa.gamma},
        {"stability_fraction", o.spsa.stability_fraction}}},
      {"cobyla", {{"rho_begin", o.cobyla.rho_begin}, {"rho_end", o.cobyla.rho_end}}},
      {"nelder_mead", {{"xatol", o.nelder_mead.xatol}, {"fatol", o.nelder_mead.fatol}}}};
  j["initializer"] = {{"kind", std::string(init_name(initializer.kind))},
                      {"alpha", initializer.alpha},
                      {"beta", initializer.beta},
                      {"layers", initializer.layers}};
  j["model"] = {{"shots", shots}, {"decode", std::string(decode_name(decode))}, {"threads", threads}};
  if (blobs) {
    j["blobs"] = {{"n_samples", blobs->n_samples}, {"n_classes", blobs->n_classes},
                  {"n_features", blobs->n_features}, {"separation", blobs->separation},
                  {"spread", blobs->spread}, {"seed", blobs_seed}};
  }
  return j;
}

ModelConfig ModelConfig::from_json(const json& j) {
  check_keys(j, {"schema_version", "dataset", "data_path", "noise", "seed", "preprocessing", "feature_map", "ansatz",
                 "optimizer", "initializer", "model", "blobs"},
             "");
  if (j.contains("schema_version") && j.at("schema_version").get<int>() != kConfigSchemaVersion) {
    throw std::invalid_argument("unsupported config schema_version " + j.at("schema_version").dump());
  }
  ModelConfig c;
  c.dataset = j.value("dataset", c.dataset);
  if (j.contains("data_path") && !j.at("data_path").is_null()) c.data_path = j.at("data_path").get<std::string>();
  c.noise = j.value("noise", c.noise);
  c.seed = j.value("seed", c.seed);

  if (j.contains("preprocessing")) {
    const auto& p = j.at("preprocessing");
    check_keys(p, {"method", "out_dims", "n_train", "n_test", "stratified", "scale_lo", "scale_hi"}, "preprocessing");
    auto& o = c.preprocessing;
    o.reduction = reduction_from_name(p.value("method", std::string(reduction_name(o.reduction))));
    o.out_dims = p.value("out_dims", o.out_dims);
    o.n_train = p.value("n_train", o.n_train);
    o.n_test = p.value("n_test", o.n_test);
    o.stratified = p.value("stratified", o.stratified);
    o.scale_lo = p.value("scale_lo", o.scale_lo);
    o.scale_hi = p.value("scale_hi", o.scale_hi);
  }
  if (j.contains("feature_map")) {
    const auto& f = j.at("feature_map");
    check_keys(f, {"kind", "reps", "topology"}, "feature_map");
    c.feature_map = feature_map_from_name(f.value("kind", std::string(feature_map_name(c.feature_map))));
    c.feature_map_reps = f.value("reps", c.feature_map_reps);
    c.feature_map_topology = topo_from(f, "topology");
  }
  if (j.contains("ansatz")) {
    const auto& a = j.at("ansatz");
    check_keys(a, {"kind", "reps", "topology", "structure_seed"}, "ansatz");
    c.ansatz = ansatz_from_name(a.value("kind", std::string(ansatz_name(c.ansatz))));
    c.ansatz_reps = a.value("reps", c.ansatz_reps);
    c.ansatz_topology = a.contains("topology") ? topo_from(a, "topology")
                        : c.ansatz == AnsatzKind::PauliTwoDesign ? std::nullopt
                                                                 : c.ansatz_topology;
    if (a.contains("structure_seed") && !a.at("structure_seed").is_null()) {
      c.structure_seed = a.at("structure_seed").get<std::uint64_t>();
    }
  }
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    check_keys(o, {"kind", "max_iterations", "early_stop_tolerance", "adaptive", "spsa", "cobyla", "nelder_mead"},
               "optimizer");
    c.optimizer = OptimizerSpec::defaults(optimizer_from_name(o.value("kind", std::string("COBYLA"))));
    auto& s = c.optimizer;
    s.max_iterations = o.value("max_iterations", s.max_iterations);
    if (o.contains("early_stop_tolerance")) {
      const auto& t = o.at("early_stop_tolerance");
      s.early_stop_tolerance = t.is_null() ? std::nullopt : std::optional<double>(t.get<double>());
    }
    s.adaptive = o.value("adaptive", s.adaptive);
    if (o.contains("spsa")) {
      const auto& g = o.at("spsa");
      check_keys(g, {"a", "c", "alpha", "gamma", "stability_fraction"}, "optimizer.spsa");
      s.spsa.a = g.value("a", s.spsa.a);
      s.spsa.c = g.value("c", s.spsa.c);
      s.spsa.alpha = g.value("alpha", s.spsa.alpha);
      s.spsa.gamma = g.value("gamma", s.spsa.gamma);
      s.spsa.stability_fraction = g.value("stability_fraction", s.spsa.stability_fraction);
    }
    if (o.contains("cobyla")) {
      const auto& g = o.at("cobyla");
      check_keys(g, {"rho_begin", "rho_end"}, "optimizer.cobyla");
      s.cobyla.rho_begin = g.value("rho_begin", s.cobyla.rho_begin);
      s.cobyla.rho_end = g.value("rho_end", s.cobyla.rho_end);
    }
    if (o.contains("nelder_mead")) {
      const auto& g = o.at("nelder_mead");
      check_keys(g, {"xatol", "fatol"}, "optimizer.nelder_mead");
      s.nelder_mead.xatol = g.value("xatol", s.nelder_mead.xatol);
      s.nelder_mead.fatol = g.value("fatol", s.nelder_mead.fatol);
    }
  }
  c.initializer.layers = c.ansatz_reps;
  if (j.contains("initializer")) {
    const auto& i = j.at("initializer");
    check_keys(i, {"kind", "alpha", "beta", "layers"}, "initializer");
    c.initializer.kind = init_from_name(i.value("kind", std::string(init_name(c.initializer.kind))));
    c.initializer.alpha = i.value("alpha", c.initializer.alpha);
    c.initializer.beta = i.value("beta", c.initializer.beta);
    c.initializer.layers = i.value("layers", c.initializer.layers);
  }
  if (j.contains("model")) {
    const auto& m = j.at("model");
    check_keys(m, {"shots", "decode", "threads"}, "model");
    c.shots = m.value("shots", c.shots);
    c.decode = decode_from_name(m.value("decode", std::string(decode_name(c.decode))));
    c.threads = m.value("threads", c.threads);
  }
  if (j.contains("blobs")) {
    const auto& b = j.at("blobs");
    check_keys(b, {"n_samples", "n_classes", "n_features", "separation", "spread", "seed"}, "blobs");
    BlobSpec s;
    s.n_samples = b.value("n_samples", s.n_samples);
    s.n_classes = b.value("n_classes", s.n_classes);
    s.n_features = b.value("n_features", s.n_features);
    s.separation = b.value("separation", s.separation);
    s.spread = b.value("spread", s.spread);
    c.blobs = s;
    c.blobs_seed = b.value("seed", c.blobs_seed);
  }
  c.validate();
  return c;
}

std::string ModelConfig::canonical() const {
  json j = to_json();
  j.erase("seed");
  // Thread count never changes results.
  j["model"].erase("threads");
  return j.dump();
}

std::uint64_t ModelConfig::hash() const { return fnv1a64(canonical()); }

std::string ModelConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

std::uint64_t ModelConfig::run_seed() const { return derive_seed(seed, hash()); }

std::string ModelConfig::feature_map_label() const {
  std::string s(feature_map_name(feature_map));
  if (feature_map_topology) s += "/" + std::string(topology_name(*feature_map_topology));
  return s;
}

std::string ModelConfig::ansatz_label() const {
  std::string s(ansatz_name(ansatz));
  if (ansatz_topology) s += "/" + std::string(topology_name(*ansatz_topology));
  return s;
}

ModelConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ModelConfig::from_json(json::parse(ss.str()));
}

std::filesystem::path default_data_path(const std::string& dataset) {
  std::filesystem::path dir = QNNBENCH_SOURCE_DIR "/data";
  if (const char* env = std::getenv("QNNBENCH_DATA_DIR")) dir = env;
  for (const char* ext : {".csv", ".data"}) {
    auto p = dir / (dataset + ext);
    if (std::filesystem::exists(p)) return p;
  }
  return dir / (dataset + ".csv");
}

Dataset load_dataset(const ModelConfig& config) {
  if (config.dataset == "synthetic") return synthetic_dataset();
  if (config.dataset == "blobs") {
    auto ds = make_blobs(config.blobs.value_or(BlobSpec{}), config.blobs_seed);
    return ds;
  }
  const auto path = config.data_path ? std::filesystem::path(*config.data_path) : default_data_path(config.dataset);
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("dataset file for '" + config.dataset + "' not found at " + path.string());
  }
  return load_and_encode(path, config.dataset);
}

std::optional<NoiseModel> resolve_noise(const std::string& id) {
  if (id.empty() || id == "none") return std::nullopt;
  if (id == "perth-like") return NoiseModel::perth_like();
  return load_noise_model(id);
}

}  // namespace qnnbench
