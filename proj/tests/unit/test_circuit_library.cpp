#include <doctest.h>

#include <cmath>
#include <set>

#include "qnnbench/circuit_library.hpp"
#include "qnnbench/simulator.hpp"

using namespace qnnbench;

namespace {

// Counting oracle: walk the built circuit and count distinct weight slots.
int count_weight_gates(const ParamCircuit& c) {
  std::set<int> slots;
  for (const auto& ins : c.instructions()) {
    if (!ins.param) continue;
    for (const auto& [s, _] : ins.param->linear) {
      if (s.kind == Slot::Kind::Weight) slots.insert(s.index);
    }
  }
  return static_cast<int>(slots.size());
}

int count_gate(const ParamCircuit& c, Gate g) {
  int n = 0;
  for (const auto& ins : c.instructions()) n += ins.gate == g ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("ZFeatureMap gate sequence") {
  const auto fm = build_feature_map({FeatureMapKind::Z, 2, 2, std::nullopt});
  const std::vector<Gate> want{Gate::H, Gate::H, Gate::Phase, Gate::Phase, Gate::H, Gate::H, Gate::Phase, Gate::Phase};
  REQUIRE(fm.instructions().size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(fm.instructions()[i].gate == want[i]);
  CHECK(fm.data_slot_count() == 2);
  CHECK(fm.weight_slot_count() == 0);
  const double x[] = {0.3, 0.8};
  const auto b = qnnbench::bind(fm, x, {});
  CHECK(b.instructions[2].angle == doctest::Approx(0.6));
  CHECK(b.instructions[3].angle == doctest::Approx(1.6));
  CHECK(b.instructions[3].qubits[0] == 1);
}

TEST_CASE("ZZFeatureMap pair angle and identity at (pi, pi)") {
  const auto fm = build_feature_map({FeatureMapKind::ZZ, 2, 1, Topology::Linear});
  // H H P P CX P CX
  REQUIRE(fm.instructions().size() == 7);
  CHECK(fm.instructions()[4].gate == Gate::CX);
  CHECK(fm.instructions()[5].gate == Gate::Phase);
  CHECK(fm.instructions()[5].qubits[0] == 1);
  const double x[] = {0.4, 1.1};
  const auto b = qnnbench::bind(fm, x, {});
  CHECK(b.instructions[5].angle == doctest::Approx(2.0 * (M_PI - 0.4) * (M_PI - 1.1)));
  const double pi2[] = {M_PI, M_PI};
  CHECK(qnnbench::bind(fm, pi2, {}).instructions[5].angle == 0.0);
}

TEST_CASE("feature map validation") {
  CHECK_THROWS_AS(build_feature_map({FeatureMapKind::ZZ, 1, 2, Topology::Linear}), std::invalid_argument);
  CHECK_THROWS_AS(build_feature_map({FeatureMapKind::Z, 2, 2, Topology::Linear}), std::invalid_argument);
  CHECK_THROWS_AS(build_feature_map({FeatureMapKind::Z, 2, 0, std::nullopt}), std::invalid_argument);
  CHECK(FeatureMapSpec{FeatureMapKind::Z}.connectivity() == 1);
  CHECK(FeatureMapSpec{FeatureMapKind::ZZ}.connectivity() == 2);
}

TEST_CASE("ZZ depth exceeds Z depth") {
  for (int n = 2; n <= 7; ++n) {
    for (Topology t : {Topology::Full, Topology::Linear, Topology::Circular, Topology::Sca, Topology::Pairwise}) {
      const auto z = build_feature_map({FeatureMapKind::Z, n, 2, std::nullopt});
      const auto zz = build_feature_map({FeatureMapKind::ZZ, n, 2, t});
      CHECK(zz.depth() > z.depth());
    }
  }
}

TEST_CASE("weight counts match the counting oracle") {
  AnsatzSpec ra{AnsatzKind::RealAmplitudes, 7, 3, Topology::Linear};
  const auto c = build_ansatz(ra);
  CHECK(count_weight_gates(c) == 28);
  CHECK(weight_count(c) == 28);
  CHECK(count_gate(c, Gate::CX) == 18);
  AnsatzSpec su2{AnsatzKind::EfficientSU2, 7, 3, Topology::Full};
  CHECK(count_weight_gates(build_ansatz(su2)) == 56);
  CHECK(weight_count(build_ansatz(su2)) == 2 * weight_count(c));

  for (int n = 2; n <= 7; ++n) {
    for (int reps = 1; reps <= 4; ++reps) {
      for (AnsatzKind k : {AnsatzKind::RealAmplitudes, AnsatzKind::EfficientSU2, AnsatzKind::TwoLocal}) {
        AnsatzSpec s{k, n, reps, Topology::Circular};
        const auto built = build_ansatz(s);
        CHECK(count_weight_gates(built) == expected_weight_count(s));
        CHECK(built.data_slot_count() == 0);
      }
      AnsatzSpec p{AnsatzKind::PauliTwoDesign, n, reps, std::nullopt, 11};
      CHECK(count_weight_gates(build_ansatz(p)) == (reps + 1) * n);
    }
  }
}

TEST_CASE("topology legality per ansatz") {
  CHECK(topology_allowed(AnsatzKind::TwoLocal, Topology::Pairwise));
  CHECK_FALSE(topology_allowed(AnsatzKind::RealAmplitudes, Topology::Pairwise));
  CHECK_FALSE(topology_allowed(AnsatzKind::EfficientSU2, Topology::Pairwise));
  CHECK(topology_allowed(FeatureMapKind::ZZ, Topology::Pairwise));
  CHECK_THROWS_AS(build_ansatz({AnsatzKind::RealAmplitudes, 4, 3, Topology::Pairwise}), std::invalid_argument);
  CHECK_THROWS_AS(build_ansatz({AnsatzKind::PauliTwoDesign, 4, 3, Topology::Full}), std::invalid_argument);
  CHECK_THROWS_AS(build_ansatz({AnsatzKind::RealAmplitudes, 4, 3, std::nullopt}), std::invalid_argument);
}

TEST_CASE("PauliTwoDesign is deterministic in its structure seed") {
  AnsatzSpec s{AnsatzKind::PauliTwoDesign, 4, 2, std::nullopt, 1234};
  CHECK(build_ansatz(s).dump() == build_ansatz(s).dump());
  const auto c = build_ansatz(s);
  // RY(pi/4) prelude
  for (int q = 0; q < 4; ++q) {
    CHECK(c.instructions()[static_cast<std::size_t>(q)].gate == Gate::RY);
    CHECK(c.instructions()[static_cast<std::size_t>(q)].param->constant == doctest::Approx(M_PI / 4));
  }
  CHECK(count_gate(c, Gate::CZ) > 0);
  CHECK(count_gate(c, Gate::CX) == 0);
  bool differs = false;
  for (std::uint64_t seed = 0; seed < 10 && !differs; ++seed) {
    AnsatzSpec t = s;
    t.structure_seed = seed;
    differs = build_ansatz(t).dump() != c.dump();
  }
  CHECK(differs);
}

TEST_CASE("EfficientSU2 layer structure") {
  const auto c = build_ansatz({AnsatzKind::EfficientSU2, 3, 1, Topology::Linear});
  // RY x3, RZ x3, CX x2, RY x3, RZ x3
  const std::vector<Gate> want{Gate::RY, Gate::RY, Gate::RY, Gate::RZ, Gate::RZ, Gate::RZ, Gate::CX,
                               Gate::CX, Gate::RY, Gate::RY, Gate::RY, Gate::RZ, Gate::RZ, Gate::RZ};
  REQUIRE(c.instructions().size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(c.instructions()[i].gate == want[i]);
}
