#pragma once

#include "levelgen/assembly.hpp"
#include "levelgen/corpus.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

namespace levelgen {

struct SegmentStats {
  double decoration = 0.0;
  double coverage = 0.0;
  double leniency = 0.0;
  std::uint64_t hash = 0;
};

/// Fractions of decoration and standable tiles, and leniency as the mean tile
/// leniency with -0.5 added per gap column (bottom tile not solid).
/// Throws VocabMismatch for a non-Mario vocabulary or foreign channels.
SegmentStats segment_stats(const SegmentGrid& seg, const TileVocabulary& vocab = TileVocabulary::mario());

/// Sum of |s[i-1] - s[i]| over neighbouring segments.
double alternation(std::span<const double> scores) noexcept;

/// Number of different segments; one differing tile makes segments distinct.
int distinct_count(const std::vector<SegmentGrid>& segments);

/// Solver path: the standing positions visited and the tiles travelled.
struct MarioPath {
  std::vector<TilePos> stops;
  int cost = 0;
};

struct MarioSolverOptions {
  std::size_t budget = 200'000;  // expanded states
};

/// Movement model: Mario fills one tile and stands on standable tiles. From a
/// standing tile he walks one column, or jumps straight up 1..4 tiles, moves up
/// to 4 columns at that height and falls until he lands. Any solid tile on the
/// way blocks the move; falling out of the bottom is death. Cost is the number
/// of tiles travelled. Start: lowest standing tile in the first column; goal:
/// any standing tile in the last column.
std::optional<MarioPath> solve_mario(const TileGrid& tiles, const MarioSolverOptions& options = {});

/// All moves available from a standing tile, as (landing, cost) pairs.
std::vector<std::pair<TilePos, int>> mario_moves(const TileGrid& tiles, TilePos from);

/// Whether a tile is a place Mario can stand.
bool mario_standing(const TileGrid& tiles, TilePos at);

struct MarioStats {
  std::vector<SegmentStats> segments;
  double decoration_sum = 0.0;
  double coverage_sum = 0.0;
  double leniency_sum = 0.0;
  double decoration_alternation = 0.0;
  double coverage_alternation = 0.0;
  int distinct = 0;
  bool solvable = false;
  int path_cost = 0;
  double fitness = 0.0;

  nlohmann::json to_json() const;
};

MarioStats evaluate_mario(const MarioLevel& level, const MarioSolverOptions& options = {});

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

/// Equal-width bin of v over [lo, hi]; values outside clamp to the end bins.
int interval_bin(double v, Range r, int bins) noexcept;

/// Leniency: bins 0..4 split [lo, 0), bins 5..9 split [0, hi].
int leniency_bin(double v, Range r) noexcept;

struct MarioRanges {
  Range decoration_sum{0.0, 4.0};
  Range coverage_sum{0.0, 8.0};
  Range leniency_sum{-5.0, 5.0};
  Range coverage_alternation{0.0, 3.0};
  Range decoration_alternation{0.0, 3.0};
};

/// (decoration-sum bin, coverage-sum bin, leniency-sum bin).
std::array<int, 3> sum_dsl_bin(const MarioStats& s, const MarioRanges& ranges);

/// (coverage alternation bin, decoration alternation bin, distinct segments - 1).
std::array<int, 3> distinct_asad_bin(const MarioStats& s, const MarioRanges& ranges, int segments);

}  // namespace levelgen
