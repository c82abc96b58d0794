#include "qnnbench/noise.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qnnbench {

using nlohmann::json;

namespace {

void check_probability(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("noise model: " + what + " = " + std::to_string(p) +
                                " is outside [0, 1]");
  }
}

}  // namespace

void NoiseModel::validate() const {
  if (n_qubits < 1) throw std::invalid_argument("noise model: n_qubits must be positive");
  check_probability(p1, "p1");
  check_probability(p2, "p2");
  if (readout.size() != static_cast<std::size_t>(n_qubits)) {
    throw std::invalid_argument("noise model: readout has " + std::to_string(readout.size()) +
                                " rows, expected n_qubits = " + std::to_string(n_qubits));
  }
  for (std::size_t q = 0; q < readout.size(); ++q) {
    check_probability(readout[q][0], "readout[" + std::to_string(q) + "][0]");
    check_probability(readout[q][1], "readout[" + std::to_string(q) + "][1]");
  }
}

bool NoiseModel::is_noiseless() const {
  if (p1 != 0.0 || p2 != 0.0) return false;
  for (const auto& r : readout)
    if (r[0] != 0.0 || r[1] != 0.0) return false;
  return true;
}

NoiseModel NoiseModel::zero(int n_qubits) {
  NoiseModel m;
  m.name = "zero";
  m.n_qubits = n_qubits;
  m.readout.assign(static_cast<std::size_t>(n_qubits), {0.0, 0.0});
  return m;
}

NoiseModel NoiseModel::perth_like() {
  NoiseModel m;
  m.name = "perth-like";
  m.n_qubits = 7;
  m.p1 = 5e-4;
  m.p2 = 1e-2;
  m.readout.assign(7, {2e-2, 2e-2});
  return m;
}

NoiseModel NoiseModel::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("noise model: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("noise model: top level must be an object");
  static const std::set<std::string> known{"schema_version", "name", "n_qubits", "p1", "p2",
                                           "readout"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw std::invalid_argument("noise model: unknown key '" + key + "'");
  }
  for (const char* required : {"n_qubits", "p1", "p2", "readout"}) {
    if (!j.contains(required)) {
      throw std::invalid_argument(std::string("noise model: missing key '") + required + "'");
    }
  }
  if (j.contains("schema_version") && j.at("schema_version") != 1) {
    throw std::invalid_argument("noise model: unsupported schema_version");
  }
  NoiseModel m;
  try {
    m.name = j.value("name", std::string{});
    m.n_qubits = j.at("n_qubits").get<int>();
    m.p1 = j.at("p1").get<double>();
    m.p2 = j.at("p2").get<double>();
    for (const auto& row : j.at("readout")) {
      if (!row.is_array() || row.size() != 2) {
        throw std::invalid_argument("noise model: readout rows must be [p01, p10]");
      }
      m.readout.push_back({row[0].get<double>(), row[1].get<double>()});
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("noise model: ") + e.what());
  }
  m.validate();
  return m;
}

std::string NoiseModel::to_json_text() const {
  json j;
  j["schema_version"] = 1;
  if (!name.empty()) j["name"] = name;
  j["n_qubits"] = n_qubits;
  j["p1"] = p1;
  j["p2"] = p2;
  j["readout"] = json::array();
  for (const auto& r : readout) j["readout"].push_back({r[0], r[1]});
  return j.dump(2) + "\n";
}

NoiseModel load_noise_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open noise model " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return NoiseModel::from_json_text(ss.str());
}

void save_noise_model(const NoiseModel& model, const std::filesystem::path& path) {
  model.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write noise model " + path.string());
  out << model.to_json_text();
}

}  // namespace qnnbench
