#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qnnbench/circuit.hpp"
#include "qnnbench/topology.hpp"

using namespace qnnbench;

namespace {
using Pairs = std::vector<QubitPair>;
}

TEST_CASE("topology examples") {
  CHECK(entanglement_pairs(Topology::Linear, 4, 0) == Pairs{{0, 1}, {1, 2}, {2, 3}});
  CHECK(entanglement_pairs(Topology::Circular, 4, 0) == Pairs{{3, 0}, {0, 1}, {1, 2}, {2, 3}});
  CHECK(entanglement_pairs(Topology::Sca, 4, 1) == Pairs{{1, 0}, {0, 3}, {2, 1}, {3, 2}});
  CHECK(entanglement_pairs(Topology::Full, 3, 0) == Pairs{{0, 1}, {0, 2}, {1, 2}});
  CHECK(entanglement_pairs(Topology::Pairwise, 4, 0) == Pairs{{0, 1}, {2, 3}});
  CHECK(entanglement_pairs(Topology::Pairwise, 4, 1) == Pairs{{1, 2}});
  CHECK(entanglement_pairs(Topology::Sca, 4, 0) == entanglement_pairs(Topology::Circular, 4, 0));
}

TEST_CASE("topology errors") {
  CHECK_THROWS_AS(entanglement_pairs(Topology::Linear, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(entanglement_pairs(Topology::Full, 3, -1), std::invalid_argument);
  CHECK_THROWS_AS(topology_from_name("reverse_linear"), std::invalid_argument);
}

TEST_CASE("topology properties over n and block") {
  for (int n = 2; n <= 9; ++n) {
    const auto lin = entanglement_pairs(Topology::Linear, n, 0);
    const auto circ = entanglement_pairs(Topology::Circular, n, 0);
    CHECK(entanglement_pairs(Topology::Full, n, 0).size() == static_cast<std::size_t>(n * (n - 1) / 2));
    CHECK(circ.size() == lin.size() + 1);
    for (int b = 0; b < 2 * n + 1; ++b) {
      CHECK(entanglement_pairs(Topology::Linear, n, b) == lin);
      CHECK(entanglement_pairs(Topology::Circular, n, b) == circ);
      CHECK(entanglement_pairs(Topology::Full, n, b) == entanglement_pairs(Topology::Full, n, 0));
      // sca: same unordered pairs as circular
      auto norm = [](Pairs p) {
        for (auto& [a, c] : p) {
          if (a > c) std::swap(a, c);
        }
        std::sort(p.begin(), p.end());
        return p;
      };
      const auto sca = entanglement_pairs(Topology::Sca, n, b);
      CHECK(norm(sca) == norm(circ));
      // the wrap pair sits at position b mod n
      const auto wrap = sca[static_cast<std::size_t>(b % n)];
      CHECK(((wrap == QubitPair{n - 1, 0}) || (wrap == QubitPair{0, n - 1})));
      CHECK((wrap.first == n - 1) == (b % 2 == 0));
      for (const auto& [c, t] : entanglement_pairs(Topology::Pairwise, n, b)) {
        CHECK(t == c + 1);
        CHECK(c % 2 == b % 2);
      }
    }
  }
}

TEST_CASE("bind substitutes weights") {
  ParamCircuit c(1);
  const Slot w = c.new_weight_slot();
  c.add(Gate::RY, 0, ParamExpression::scaled(w));
  const double theta[] = {M_PI};
  const auto b = qnnbench::bind(c, {}, theta);
  REQUIRE(b.instructions.size() == 1);
  CHECK(b.instructions[0].gate == Gate::RY);
  CHECK(b.instructions[0].angle == doctest::Approx(M_PI).epsilon(1e-15));
}

TEST_CASE("product expression vanishes at x = (pi, pi)") {
  const auto e = ParamExpression::pi_minus_product({Slot::data(0), Slot::data(1)}, 2.0);
  const double x[] = {M_PI, M_PI};
  CHECK(e.evaluate(x, {}) == 0.0);
  const double y[] = {0.5, 1.0};
  CHECK(e.evaluate(y, {}) == doctest::Approx(2.0 * (M_PI - 0.5) * (M_PI - 1.0)));
}

TEST_CASE("bind checks lengths and finiteness") {
  ParamCircuit c(2);
  const Slot x0 = c.new_data_slot();
  const Slot w0 = c.new_weight_slot();
  c.add(Gate::Phase, 0, ParamExpression::scaled(x0, 2.0));
  c.add(Gate::RY, 1, ParamExpression::scaled(w0));
  const double x[] = {0.1};
  const double w[] = {0.2};
  const double two[] = {0.1, 0.2};
  CHECK_NOTHROW(qnnbench::bind(c, x, w));
  CHECK_THROWS_AS(qnnbench::bind(c, x, two), std::invalid_argument);
  CHECK_THROWS_AS(qnnbench::bind(c, two, w), std::invalid_argument);
  const double bad[] = {std::nan("")};
  CHECK_THROWS_AS(qnnbench::bind(c, bad, w), std::invalid_argument);
}

TEST_CASE("weight counting and slot checks") {
  CHECK(weight_count(ParamCircuit(3)) == 0);
  ParamCircuit c(2);
  CHECK_THROWS(c.add(Gate::RY, 0, ParamExpression::scaled(Slot::weight(0))));  // undeclared
  CHECK_THROWS(c.add(Gate::H, 2));
  CHECK_THROWS(c.add(Gate::CX, 0, 0));
}

TEST_CASE("compose shifts slots and dump lists one line per gate") {
  ParamCircuit a(2);
  a.add(Gate::RY, 0, ParamExpression::scaled(a.new_weight_slot()));
  ParamCircuit b(2);
  b.add(Gate::RY, 1, ParamExpression::scaled(b.new_weight_slot()));
  b.add(Gate::CX, 0, 1);
  const auto c = ParamCircuit::compose(a, b);
  CHECK(c.weight_slot_count() == 2);
  CHECK(c.instructions().size() == 3);
  const double w[] = {0.5, 0.7};
  const auto bound = qnnbench::bind(c, {}, w);
  CHECK(bound.instructions[1].angle == doctest::Approx(0.7));
  const auto text = c.dump();
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(c.depth() == 2);
}
