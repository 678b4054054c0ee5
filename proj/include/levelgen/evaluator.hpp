#pragma once

#include "levelgen/decoder.hpp"
#include "levelgen/eval_mario.hpp"
#include "levelgen/eval_zelda.hpp"
#include "levelgen/genome.hpp"
#include "levelgen/layout.hpp"

#include <array>
#include <string>
#include <string_view>

#include <json.hpp>

namespace levelgen {

enum class Scheme { Wwr, DistinctBtr, SumDsl, DistinctAsad };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view text);
Game game_of(Scheme scheme) noexcept;

using BinIndex = std::array<int, 3>;

/// Behaviour-space grid: three named axes with fixed cardinalities.
struct SchemeDescriptor {
  Scheme scheme = Scheme::Wwr;
  std::array<std::string, 3> names;
  std::array<int, 3> cardinality{};

  std::size_t bin_count() const noexcept;
  /// Row-major flat index (last axis fastest).
  std::size_t flat(const BinIndex& bin) const noexcept;
  BinIndex unflat(std::size_t flat) const noexcept;
  bool valid(const BinIndex& bin) const noexcept;
};

struct SchemeRanges {
  MarioRanges mario;
  int backtrack_bins = 25;
};

SchemeDescriptor describe(Scheme scheme, const LevelLayout& layout, const SchemeRanges& ranges);

struct Evaluation {
  bool failed = false;  // the genome produced no level
  std::string error;
  bool solvable = false;
  double fitness = 0.0;
  BinIndex bin{};
  nlohmann::json stats;
};

/// Genome -> level -> (fitness, bin). Stateless and safe to share across threads.
class Evaluator {
public:
  Evaluator(Scheme scheme, LevelLayout layout, const SegmentDecoder& decoder, SchemeRanges ranges = {});

  Evaluation evaluate(const Genome& genome) const;

  const SchemeDescriptor& descriptor() const noexcept { return descriptor_; }
  const LevelLayout& layout() const noexcept { return layout_; }
  Scheme scheme() const noexcept { return descriptor_.scheme; }

private:
  LevelLayout layout_;
  const SegmentDecoder* decoder_;
  SchemeRanges ranges_;
  SchemeDescriptor descriptor_;
};

}  // namespace levelgen
