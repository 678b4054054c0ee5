#include <doctest.h>

#include "levelgen/cppn.hpp"
#include "levelgen/errors.hpp"

#include <cmath>
#include <algorithm>
#include <map>
#include <set>

using namespace levelgen;

namespace {

CppnGenome grown(int inputs, int outputs, std::uint64_t seed, int generations)
{
  Rng rng(seed);
  CppnGenome g = CppnGenome::initial(inputs, outputs, rng);
  for (int i = 0; i < generations; ++i) g = mutate(g, rng);
  return g;
}

/// Naive recursive evaluation used as the reference for query().
double reference_value(const CppnGenome& g, std::uint64_t id, std::span<const double> in)
{
  const int idx = g.node_index(id);
  const auto& node = g.nodes()[static_cast<std::size_t>(idx)];
  if (node.role == NodeRole::Input) return in[static_cast<std::size_t>(id)];
  double sum = 0.0;
  for (const auto& l : g.links()) {
    if (l.enabled && l.target == id) sum += l.weight * reference_value(g, l.source, in);
  }
  const double v = activate(node.activation, sum);
  return node.role == NodeRole::Output ? std::clamp(v, -1.0, 1.0) : v;
}

}  // namespace

TEST_CASE("Activation/KnownValues")
{
  using A = ActivationKind;
  CHECK(activate(A::Sawtooth, 0.5) == doctest::Approx(0.5));
  CHECK(activate(A::Sawtooth, 1.5) == doctest::Approx(-0.5));
  CHECK(activate(A::Sawtooth, 1.0) == doctest::Approx(-1.0));
  CHECK(activate(A::LinearPiecewise, 3.0) == 1.0);
  CHECK(activate(A::LinearPiecewise, -0.25) == -0.25);
  CHECK(activate(A::Identity, 7.0) == 7.0);
  CHECK(activate(A::Square, 0.5) == 1.0);
  CHECK(activate(A::Square, 1.5) == -1.0);
  CHECK(activate(A::Sigmoid, 0.0) == 0.0);
  CHECK(activate(A::Gaussian, 0.0) == 1.0);
  CHECK(activate(A::Triangle, 0.0) == 1.0);
  CHECK(activate(A::Triangle, 1.0) == doctest::Approx(-1.0));
  CHECK(activate(A::Absolute, -2.0) == 2.0);
  for (auto k : kAllActivations) {
    CHECK(parse_activation(to_string(k)) == k);
  }
}

TEST_CASE("Cppn/InitialTopology")
{
  Rng rng(3);
  const auto g = CppnGenome::initial(3, 17, rng);
  CHECK(g.input_count() == 3);
  CHECK(g.output_count() == 17);
  CHECK(g.hidden_count() == 0);
  CHECK(g.links().size() == 3 * 17);
  for (const auto& l : g.links()) {
    CHECK(l.weight >= -1.0);
    CHECK(l.weight <= 1.0);
    CHECK(l.innovation == link_innovation(l.source, l.target));
  }
}

TEST_CASE("Cppn/QueryMatchesHandComputation")
{
  // in0 -> hidden(sine) -> out(identity), plus in0 -> out directly.
  const std::uint64_t h = (1ULL << 63) | 5;
  std::vector<CppnNode> nodes{{0, NodeRole::Input, ActivationKind::Identity},
                              {1, NodeRole::Output, ActivationKind::Identity},
                              {h, NodeRole::Hidden, ActivationKind::Sine}};
  std::vector<CppnLink> links{{link_innovation(0, h), 0, h, 2.0, true},
                              {link_innovation(h, 1), h, 1, 0.5, true},
                              {link_innovation(0, 1), 0, 1, -0.25, true}};
  const CppnGenome g(1, 1, nodes, links);
  const double x = 0.3;
  const double expected = std::clamp(0.5 * std::sin(2.0 * x) - 0.25 * x, -1.0, 1.0);
  CHECK(g.query(std::vector<double>{x})[0] == doctest::Approx(expected).epsilon(1e-15));

  links[2].enabled = false;
  const CppnGenome off(1, 1, nodes, links);
  CHECK(off.query(std::vector<double>{x})[0] == doctest::Approx(0.5 * std::sin(2.0 * x)).epsilon(1e-15));
}

TEST_CASE("Cppn/OutputsClampedHiddenNot")
{
  const std::uint64_t h = (1ULL << 63) | 9;
  const CppnGenome g(1, 1,
                     {{0, NodeRole::Input, ActivationKind::Identity},
                      {1, NodeRole::Output, ActivationKind::Identity},
                      {h, NodeRole::Hidden, ActivationKind::Identity}},
                     {{link_innovation(0, h), 0, h, 4.0, true}, {link_innovation(h, 1), h, 1, 0.5, true}});
  // hidden = 4 (unclamped), output = 2 -> clamped to 1.
  CHECK(g.query(std::vector<double>{1.0})[0] == 1.0);
  CHECK(g.query(std::vector<double>{0.25})[0] == 0.5);
}

TEST_CASE("Cppn/RejectsCyclesIncludingDisabledLinks")
{
  const std::uint64_t a = (1ULL << 63) | 1, b = (1ULL << 63) | 2;
  std::vector<CppnNode> nodes{{0, NodeRole::Input, ActivationKind::Identity},
                              {1, NodeRole::Output, ActivationKind::Identity},
                              {a, NodeRole::Hidden, ActivationKind::Identity},
                              {b, NodeRole::Hidden, ActivationKind::Identity}};
  std::vector<CppnLink> links{{link_innovation(0, a), 0, a, 1.0, true},
                              {link_innovation(a, b), a, b, 1.0, true},
                              {link_innovation(b, a), b, a, 1.0, false},
                              {link_innovation(b, 1), b, 1, 1.0, true}};
  CHECK_THROWS_AS(CppnGenome(1, 1, nodes, links), InvalidGenome);
  links.erase(links.begin() + 2);
  CHECK_NOTHROW(CppnGenome(1, 1, nodes, links));
}

TEST_CASE("Cppn/ArityMismatch")
{
  Rng rng(1);
  const auto g = CppnGenome::initial(3, 4, rng);
  CHECK_THROWS_AS(g.query(std::vector<double>{0.0}), ArityMismatch);
}

TEST_CASE("Cppn/SpliceKeepsFunctionShape")
{
  Rng rng(11);
  const auto g = CppnGenome::initial(1, 1, rng);
  CppnMutationRates only_splice{1.0, 0.0, 0.0, 0.0, 0.5, 5.0};
  CppnMutationLog log;
  const auto s = mutate(g, rng, only_splice, &log);
  REQUIRE(log.spliced);
  CHECK(s.hidden_count() == 1);
  CHECK(s.links().size() == 3);
  CHECK_FALSE(s.links()[0].enabled);
  const auto& hidden = s.nodes().back();
  for (const auto& l : s.links()) {
    if (l.target == hidden.id) CHECK(l.weight == 1.0);
    if (l.source == hidden.id) CHECK(l.weight == g.links()[0].weight);
  }
  CHECK((hidden.id >> 63) == 1);
}

TEST_CASE("Cppn/MutationPreservesValidityAndMatchesReference")
{
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = grown(3, 5, seed, 40);
    // The constructor re-validates; round trip through JSON as well.
    const auto back = CppnGenome::from_json(g.to_json());
    CHECK(back == g);
    Rng in_rng(seed + 100);
    for (int q = 0; q < 5; ++q) {
      const std::vector<double> in{in_rng.uniform(-1, 1), in_rng.uniform(-1, 1), in_rng.uniform(0, 1)};
      const auto out = g.query(in);
      for (int o = 0; o < 5; ++o) {
        const double ref = reference_value(g, static_cast<std::uint64_t>(3 + o), in);
        CHECK(out[static_cast<std::size_t>(o)] == doctest::Approx(ref).epsilon(1e-12));
        CHECK(std::abs(out[static_cast<std::size_t>(o)]) <= 1.0);
      }
    }
  }
}

TEST_CASE("Cppn/AddLinkNeverTargetsInputsOrLeavesOutputs")
{
  Rng rng(5);
  CppnGenome g = CppnGenome::initial(2, 3, rng);
  CppnMutationRates rates{0.5, 1.0, 0.0, 0.0, 0.5, 5.0};
  for (int i = 0; i < 60; ++i) g = mutate(g, rng, rates);
  for (const auto& l : g.links()) {
    CHECK(g.nodes()[static_cast<std::size_t>(g.node_index(l.target))].role != NodeRole::Input);
    CHECK(g.nodes()[static_cast<std::size_t>(g.node_index(l.source))].role != NodeRole::Output);
  }
}

TEST_CASE("Cppn/ActivationSwapPicksADifferentFunction")
{
  Rng rng(8);
  const auto g = CppnGenome::initial(1, 1, rng);
  CppnMutationRates only_swap{0.0, 0.0, 1.0, 0.0, 0.5, 5.0};
  std::set<ActivationKind> seen;
  for (int i = 0; i < 500; ++i) {
    const auto s = mutate(g, rng, only_swap);
    CHECK(s.nodes()[1].activation != g.nodes()[1].activation);
    seen.insert(s.nodes()[1].activation);
  }
  CHECK(seen.size() == 9);
}

TEST_CASE("Cppn/WeightsStayWithinLimit")
{
  Rng rng(9);
  CppnGenome g = CppnGenome::initial(1, 2, rng);
  CppnMutationRates heavy{0.0, 0.0, 0.0, 1.0, 10.0, 5.0};
  for (int i = 0; i < 50; ++i) g = mutate(g, rng, heavy);
  for (const auto& l : g.links()) CHECK(std::abs(l.weight) <= 5.0);
}

TEST_CASE("Cppn/CrossoverKeepsFirstParentStructure")
{
  const auto a = grown(3, 4, 1, 30);
  Rng rng(2);
  CppnGenome b = a;
  for (int i = 0; i < 30; ++i) b = mutate(b, rng);
  const auto child = crossover(a, b, rng);
  CHECK(child.nodes() == a.nodes());
  REQUIRE(child.links().size() == a.links().size());
  std::map<std::uint64_t, CppnLink> in_b;
  for (const auto& l : b.links()) in_b[l.innovation] = l;
  for (std::size_t i = 0; i < a.links().size(); ++i) {
    const auto& c = child.links()[i];
    const auto& pa = a.links()[i];
    CHECK(c.innovation == pa.innovation);
    const bool from_a = c.weight == pa.weight && c.enabled == pa.enabled;
    const bool from_b = in_b.count(c.innovation) && c.weight == in_b[c.innovation].weight &&
                        c.enabled == in_b[c.innovation].enabled;
    CHECK((from_a || from_b));
  }
}
