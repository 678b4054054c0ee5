#include <doctest.h>

#include "levelgen/assembly.hpp"
#include "levelgen/errors.hpp"
#include "levelgen/genome.hpp"
#include "support.hpp"

using namespace levelgen;

namespace {

Genome cppn_individual(const LevelLayout& layout, std::uint64_t seed, int generations)
{
  Rng rng(seed);
  CppnGenome g = CppnGenome::initial(layout.cppn_inputs(), layout.segment_width(), rng);
  for (int i = 0; i < generations; ++i) g = mutate(g, rng);
  return {g, Provenance::Initial};
}

}  // namespace

TEST_CASE("Genome/ExpressMatchesSegmentInputs")
{
  const auto layout = LevelLayout::zelda(2, 3);
  const auto g = cppn_individual(layout, 1, 10);
  const auto vectors = express(g, layout);
  REQUIRE(vectors.size() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(vectors[static_cast<std::size_t>(i)] == g.cppn().query(segment_inputs(layout, i)));
  }
}

TEST_CASE("Genome/ConvertExpressesIdentically")
{
  for (const auto& layout : {LevelLayout::mario(10), LevelLayout::zelda(5, 5)}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto g = cppn_individual(layout, seed, 25);
      const Genome d{convert(g.cppn(), layout), Provenance::Converted};
      CHECK(express(d, layout) == express(g, layout));
    }
  }
  Rng rng(1);
  CHECK_THROWS_AS(convert(CppnGenome::initial(1, 30, rng), LevelLayout::zelda(2, 2)), ArityMismatch);
}

TEST_CASE("Genome/ConvertedPhenotypeIsIdentical")
{
  const StubDecoder zelda(Game::Zelda, 10);
  const auto zl = LevelLayout::zelda(5, 5);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = cppn_individual(zl, seed, 20);
    const Genome d{convert(g.cppn(), zl), Provenance::Converted};
    auto build = [&](const Genome& x) -> std::optional<Dungeon> {
      try {
        return assemble_zelda(x, zelda, zl);
      } catch (const NoRoomsPresent&) {
        return std::nullopt;
      }
    };
    const auto a = build(g), b = build(d);
    REQUIRE(a.has_value() == b.has_value());
    if (a) CHECK(support::same_dungeon(*a, *b));
  }
  const StubDecoder mario(Game::Mario, 30);
  const auto ml = LevelLayout::mario(10);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = cppn_individual(ml, seed, 20);
    const Genome d{convert(g.cppn(), ml), Provenance::Converted};
    CHECK(assemble_mario(g, mario, ml).tiles == assemble_mario(d, mario, ml).tiles);
  }
}

TEST_CASE("Genome/JsonRoundTrip")
{
  const auto layout = LevelLayout::zelda(2, 2);
  const auto g = cppn_individual(layout, 3, 15);
  CHECK(Genome::from_json(g.to_json()) == g);
  Rng rng(4);
  const Genome d{DirectGenome::random(layout, rng), Provenance::Crossed};
  CHECK(Genome::from_json(d.to_json()) == d);
}

TEST_CASE("Genome/ModeDefaults")
{
  CHECK(reproduction_defaults(EncodingMode::Cppn2Gan).conversion_probability == 0.0);
  CHECK(reproduction_defaults(EncodingMode::Direct2Gan).conversion_probability == 0.0);
  CHECK(reproduction_defaults(EncodingMode::CppnThenDirect2Gan).conversion_probability == 0.30);
  for (auto m : {EncodingMode::Cppn2Gan, EncodingMode::Direct2Gan, EncodingMode::CppnThenDirect2Gan}) {
    CHECK(parse_encoding_mode(to_string(m)) == m);
  }
  const auto layout = LevelLayout::mario(3);
  Rng rng(1);
  CHECK(random_genome(EncodingMode::CppnThenDirect2Gan, layout, rng).is_cppn());
  CHECK_FALSE(random_genome(EncodingMode::Direct2Gan, layout, rng).is_cppn());
}

TEST_CASE("Hybrid/ZeroConversionMatchesCppnOnlyReproduction")
{
  // With p = 0 no conversion coin is drawn, so the random stream is untouched.
  const auto layout = LevelLayout::zelda(3, 3);
  const auto parent = cppn_individual(layout, 7, 10);
  const auto mate = cppn_individual(layout, 8, 10);
  ParentSampler sampler = [&](Rng&) -> const Genome& { return mate; };
  auto hybrid = reproduction_defaults(EncodingMode::CppnThenDirect2Gan);
  hybrid.conversion_probability = 0.0;
  const auto plain = reproduction_defaults(EncodingMode::Cppn2Gan);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng a(seed), b(seed);
    const auto ca = reproduce(parent, sampler, layout, a, plain);
    const auto cb = reproduce(parent, sampler, layout, b, hybrid);
    CHECK(ca == cb);
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("Hybrid/ConversionIsOneWay")
{
  const auto layout = LevelLayout::zelda(2, 2);
  const auto parent = cppn_individual(layout, 1, 5);
  Rng rng(2);
  const Genome direct{DirectGenome::random(layout, rng), Provenance::Initial};
  ParentSampler sampler = [&](Rng&) -> const Genome& { return direct; };
  auto config = reproduction_defaults(EncodingMode::CppnThenDirect2Gan);
  config.conversion_probability = 1.0;
  ReproductionLog log;
  const auto child = reproduce(parent, sampler, layout, rng, config, &log);
  CHECK(log.converted);
  CHECK_FALSE(child.is_cppn());
  CHECK(child.provenance == Provenance::Converted);
  for (int i = 0; i < 200; ++i) {
    CHECK_FALSE(reproduce(direct, sampler, layout, rng, config).is_cppn());
  }
}

TEST_CASE("Hybrid/MixedKindCrossoverIsCancelled")
{
  const auto layout = LevelLayout::zelda(2, 2);
  const auto parent = cppn_individual(layout, 1, 5);
  Rng rng(3);
  const Genome direct{DirectGenome::random(layout, rng), Provenance::Initial};
  ParentSampler sampler = [&](Rng&) -> const Genome& { return direct; };
  auto config = reproduction_defaults(EncodingMode::CppnThenDirect2Gan);
  config.conversion_probability = 0.0;
  config.crossover_probability = 1.0;
  ReproductionLog log;
  const auto child = reproduce(parent, sampler, layout, rng, config, &log);
  CHECK(log.crossover_fired);
  CHECK(log.crossover_cancelled);
  CHECK_FALSE(log.crossed);
  CHECK(child.is_cppn());
  CHECK(child.provenance == Provenance::Mutated);
}
