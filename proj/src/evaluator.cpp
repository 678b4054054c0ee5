#include "levelgen/evaluator.hpp"

#include "levelgen/errors.hpp"

namespace levelgen {

std::string_view to_string(Scheme scheme)
{
  switch (scheme) {
    case Scheme::Wwr: return "wwr";
    case Scheme::DistinctBtr: return "distinct_btr";
    case Scheme::SumDsl: return "sum_dsl";
    case Scheme::DistinctAsad: return "distinct_asad";
  }
  return "wwr";
}

Scheme parse_scheme(std::string_view text)
{
  for (auto s : {Scheme::Wwr, Scheme::DistinctBtr, Scheme::SumDsl, Scheme::DistinctAsad}) {
    if (to_string(s) == text) return s;
  }
  throw ConfigError("unknown scheme '" + std::string(text) + "' (expected wwr, distinct_btr, sum_dsl or distinct_asad)");
}

Game game_of(Scheme scheme) noexcept
{
  return scheme == Scheme::Wwr || scheme == Scheme::DistinctBtr ? Game::Zelda : Game::Mario;
}

std::size_t SchemeDescriptor::bin_count() const noexcept
{
  return static_cast<std::size_t>(cardinality[0]) * static_cast<std::size_t>(cardinality[1]) *
         static_cast<std::size_t>(cardinality[2]);
}

std::size_t SchemeDescriptor::flat(const BinIndex& b) const noexcept
{
  return (static_cast<std::size_t>(b[0]) * static_cast<std::size_t>(cardinality[1]) + static_cast<std::size_t>(b[1])) *
             static_cast<std::size_t>(cardinality[2]) +
         static_cast<std::size_t>(b[2]);
}

BinIndex SchemeDescriptor::unflat(std::size_t f) const noexcept
{
  const auto c1 = static_cast<std::size_t>(cardinality[1]);
  const auto c2 = static_cast<std::size_t>(cardinality[2]);
  return {static_cast<int>(f / (c1 * c2)), static_cast<int>(f / c2 % c1), static_cast<int>(f % c2)};
}

bool SchemeDescriptor::valid(const BinIndex& b) const noexcept
{
  for (int i = 0; i < 3; ++i) {
    if (b[static_cast<std::size_t>(i)] < 0 || b[static_cast<std::size_t>(i)] >= cardinality[static_cast<std::size_t>(i)]) {
      return false;
    }
  }
  return true;
}

SchemeDescriptor describe(Scheme scheme, const LevelLayout& layout, const SchemeRanges& ranges)
{
  if (layout.game != game_of(scheme)) {
    throw ConfigError("scheme '" + std::string(to_string(scheme)) + "' does not fit a " +
                      std::string(to_string(layout.game)) + " layout");
  }
  const int segments = layout.segment_count();
  switch (scheme) {
    case Scheme::Wwr: return {scheme, {"wall", "water", "reachable_rooms"}, {10, 10, segments}};
    case Scheme::DistinctBtr:
      if (ranges.backtrack_bins < 1) throw ConfigError("backtrack_bins must be at least 1");
      return {scheme, {"distinct_rooms", "backtracked", "reachable_rooms"}, {segments, ranges.backtrack_bins, segments}};
    case Scheme::SumDsl: return {scheme, {"decoration", "coverage", "leniency"}, {10, 10, 10}};
    case Scheme::DistinctAsad:
      return {scheme, {"coverage_alternation", "decoration_alternation", "distinct_segments"}, {10, 10, segments}};
  }
  return {};
}

Evaluator::Evaluator(Scheme scheme, LevelLayout layout, const SegmentDecoder& decoder, SchemeRanges ranges)
    : layout_(layout), decoder_(&decoder), ranges_(ranges), descriptor_(describe(scheme, layout, ranges))
{
  if (decoder.latent_size() != layout.latent_size) {
    throw ConfigError("decoder latent size " + std::to_string(decoder.latent_size()) + " differs from layout latent size " +
                      std::to_string(layout.latent_size));
  }
}

Evaluation Evaluator::evaluate(const Genome& genome) const
{
  Evaluation e;
  try {
    if (layout_.game == Game::Zelda) {
      const auto dungeon = assemble_zelda(genome, *decoder_, layout_);
      const auto s = evaluate_dungeon(dungeon);
      e.solvable = s.solvable;
      e.fitness = s.fitness;
      e.bin = scheme() == Scheme::Wwr ? wwr_bin(s, layout_) : distinct_btr_bin(s, layout_, ranges_.backtrack_bins);
      e.stats = s.to_json();
    } else {
      const auto level = assemble_mario(genome, *decoder_, layout_);
      const auto s = evaluate_mario(level);
      e.solvable = s.solvable;
      e.fitness = s.fitness;
      e.bin = scheme() == Scheme::SumDsl ? sum_dsl_bin(s, ranges_.mario)
                                         : distinct_asad_bin(s, ranges_.mario, layout_.segment_count());
      e.stats = s.to_json();
    }
  } catch (const Error& ex) {
    e = Evaluation{};
    e.failed = true;
    e.error = ex.what();
  }
  return e;
}

}  // namespace levelgen
