#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qnnbench/noise.hpp"
#include "qnnbench/simulator.hpp"

using namespace qnnbench;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path temp_dir() {
  const auto d = fs::temp_directory_path() / "qnnbench_noise";
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("perth-like preset values") {
  const auto m = NoiseModel::perth_like();
  CHECK(m.n_qubits == 7);
  CHECK(m.p1 == 5e-4);
  CHECK(m.p2 == 1e-2);
  REQUIRE(m.readout.size() == 7);
  for (const auto& r : m.readout) CHECK(r == std::array<double, 2>{2e-2, 2e-2});
  CHECK_FALSE(m.is_noiseless());
  CHECK(NoiseModel::zero(3).is_noiseless());
}

TEST_CASE("bundled noise file equals the preset") {
  const auto m = load_noise_model(fs::path(QNNBENCH_SOURCE_DIR) / "configs" / "perth_like.json");
  const auto p = NoiseModel::perth_like();
  CHECK(m.n_qubits == p.n_qubits);
  CHECK(m.p1 == p.p1);
  CHECK(m.p2 == p.p2);
  CHECK(m.readout == p.readout);
}

TEST_CASE("preset round-trips load -> save -> load bit-identically") {
  const auto dir = temp_dir();
  save_noise_model(NoiseModel::perth_like(), dir / "a.json");
  const auto a = load_noise_model(dir / "a.json");
  save_noise_model(a, dir / "b.json");
  const auto b = load_noise_model(dir / "b.json");
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  CHECK(a.p1 == b.p1);
  CHECK(a.p2 == b.p2);
  CHECK(a.readout == b.readout);
  // awkward doubles survive as well
  NoiseModel odd = NoiseModel::zero(2);
  odd.p1 = 0.1 + 0.2;
  odd.readout[1] = {1.0 / 3.0, 2.0 / 7.0};
  const auto back = NoiseModel::from_json_text(odd.to_json_text());
  CHECK(back.p1 == odd.p1);
  CHECK(back.readout == odd.readout);
}

TEST_CASE("noise file validation") {
  CHECK_THROWS_AS(NoiseModel::from_json_text(R"({"n_qubits":1,"p1":1.5,"p2":0,"readout":[[0,0]]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel::from_json_text(R"({"n_qubits":1,"p1":0,"p2":-0.1,"readout":[[0,0]]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel::from_json_text(R"({"n_qubits":2,"p1":0,"p2":0,"readout":[[0,0]]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel::from_json_text(R"({"n_qubits":1,"p1":0,"p2":0,"readout":[[0,0]],"t1":5})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel::from_json_text(R"({"n_qubits":1,"p1":0,"readout":[[0,0]]})"), std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel::from_json_text("{not json"), std::invalid_argument);
  CHECK_THROWS(load_noise_model(temp_dir() / "missing.json"));
}

TEST_CASE("p2 = 1 inserts a uniformly random two-qubit Pauli") {
  // On |00>, a qubit's outcome flips iff its Pauli factor is X or Y, so all
  // 16 Pauli pairs spread evenly over the four outcomes.
  NoiseModel m = NoiseModel::zero(2);
  m.p2 = 1.0;
  BoundCircuit c{2, {{Gate::CX, {0, 1}, 0.0}}};
  Rng rng(17);
  const std::uint64_t shots = 16000;
  const auto h = run_noisy_trajectories(c, m, shots, rng);
  const double expect[4] = {0.25, 0.25, 0.25, 0.25};
  for (std::uint64_t k = 0; k < 4; ++k) {
    const double p = expect[k];
    const double got = h.counts.count(k) ? static_cast<double>(h.counts.at(k)) : 0.0;
    CHECK(std::abs(got - shots * p) < 4 * std::sqrt(shots * p * (1 - p)));
  }
}

TEST_CASE("readout flips are independent per qubit") {
  NoiseModel m = NoiseModel::zero(2);
  m.readout = {{0.3, 0.0}, {0.0, 0.0}};
  BoundCircuit c{2, {}};
  Rng rng(5);
  const std::uint64_t shots = 20000;
  const auto h = run_noisy_trajectories(c, m, shots, rng);
  const auto by = h.by_bitstring();
  CHECK(by.count("10") == 0);
  CHECK(by.count("11") == 0);
  const double p = 0.3;
  CHECK(std::abs(static_cast<double>(by.at("01")) - shots * p) < 4 * std::sqrt(shots * p * (1 - p)));
}

TEST_CASE("noisy runs are seed-deterministic") {
  BoundCircuit c{3, {{Gate::H, {0, 0}, 0.0}, {Gate::CX, {0, 1}, 0.0}, {Gate::RY, {2, 0}, 0.4}, {Gate::CZ, {1, 2}, 0.0}}};
  Rng a(7), b(7);
  CHECK(run_noisy_trajectories(c, NoiseModel::perth_like(), 1000, a) ==
        run_noisy_trajectories(c, NoiseModel::perth_like(), 1000, b));
}
