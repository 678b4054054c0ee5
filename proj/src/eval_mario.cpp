#include "levelgen/eval_mario.hpp"

#include "levelgen/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <tuple>

namespace levelgen {

SegmentStats segment_stats(const SegmentGrid& seg, const TileVocabulary& vocab)
{
  if (vocab.game() != Game::Mario) {
    throw VocabMismatch("segment statistics need the Mario vocabulary");
  }
  SegmentStats s;
  int decoration = 0, standable = 0;
  double leniency = 0.0;
  for (Channel ch : seg.cells()) {
    if (ch >= vocab.channel_count()) {
      throw VocabMismatch("channel " + std::to_string(ch) + " is not in the Mario vocabulary");
    }
    const auto& f = vocab.flags(ch);
    decoration += f.decoration;
    standable += f.standable;
    leniency += f.leniency;
  }
  if (seg.height() > 0) {
    for (int c = 0; c < seg.width(); ++c) {
      if (!vocab.flags(seg.at(seg.height() - 1, c)).solid) leniency -= 0.5;
    }
  }
  const auto n = static_cast<double>(seg.size());
  if (n > 0) {
    s.decoration = decoration / n;
    s.coverage = standable / n;
    s.leniency = leniency / n;
  }
  s.hash = seg.digest();
  return s;
}

double alternation(std::span<const double> scores) noexcept
{
  double sum = 0.0;
  for (std::size_t i = 1; i < scores.size(); ++i) sum += std::abs(scores[i - 1] - scores[i]);
  return sum;
}

int distinct_count(const std::vector<SegmentGrid>& segments)
{
  return static_cast<int>(std::set<SegmentGrid>(segments.begin(), segments.end()).size());
}

namespace {

bool solid_at(const TileGrid& t, int r, int c)
{
  return TileVocabulary::mario().flags(t.at(r, c)).solid;
}

/// Falls from (r, c) to the first tile resting on something solid; nullopt if
/// Mario drops out of the level.
std::optional<int> land(const TileGrid& t, int r, int c)
{
  while (r + 1 < t.height()) {
    if (solid_at(t, r + 1, c)) return r;
    ++r;
  }
  return std::nullopt;
}

constexpr int kMaxRise = 4;
constexpr int kMaxRun = 4;

}  // namespace

bool mario_standing(const TileGrid& tiles, TilePos at)
{
  return tiles.contains(at.row, at.col) && at.row + 1 < tiles.height() && !solid_at(tiles, at.row, at.col) &&
         TileVocabulary::mario().flags(tiles.at(at.row + 1, at.col)).standable;
}

std::vector<std::pair<TilePos, int>> mario_moves(const TileGrid& t, TilePos from)
{
  std::vector<std::pair<TilePos, int>> out;
  for (int rise = 0; rise <= kMaxRise; ++rise) {
    const int row = from.row - rise;
    if (row < 0 || solid_at(t, row, from.col)) break;
    for (int sign : {-1, 1}) {
      const int max_run = rise == 0 ? 1 : kMaxRun;
      for (int run = 1; run <= max_run; ++run) {
        const int col = from.col + sign * run;
        if (col < 0 || col >= t.width() || solid_at(t, row, col)) break;
        if (const auto landing = land(t, row, col)) {
          out.push_back({{*landing, col}, rise + run + (*landing - row)});
        }
      }
    }
  }
  return out;
}

std::optional<MarioPath> solve_mario(const TileGrid& t, const MarioSolverOptions& options)
{
  const int h = t.height(), w = t.width();
  if (h < 2 || w < 1) return std::nullopt;
  int start_row = -1;
  for (int r = h - 2; r >= 0; --r) {
    if (mario_standing(t, {r, 0})) {
      start_row = r;
      break;
    }
  }
  if (start_row < 0) return std::nullopt;

  const auto n = static_cast<std::size_t>(h * w);
  std::vector<int> g(n, std::numeric_limits<int>::max());
  std::vector<int> parent(n, -1);
  std::vector<bool> closed(n, false);
  using Entry = std::tuple<int, int, int>;  // (f, g, position)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  auto idx = [w](TilePos p) { return p.row * w + p.col; };
  const int start = idx({start_row, 0});
  g[static_cast<std::size_t>(start)] = 0;
  open.emplace(w - 1, 0, start);
  std::size_t expanded = 0;

  while (!open.empty()) {
    const auto [f, cost, p] = open.top();
    open.pop();
    if (closed[static_cast<std::size_t>(p)] || cost != g[static_cast<std::size_t>(p)]) continue;
    closed[static_cast<std::size_t>(p)] = true;
    if (++expanded > options.budget) return std::nullopt;
    const TilePos at{p / w, p % w};
    if (at.col == w - 1) {
      MarioPath path;
      path.cost = cost;
      for (int q = p; q >= 0; q = parent[static_cast<std::size_t>(q)]) path.stops.push_back({q / w, q % w});
      std::reverse(path.stops.begin(), path.stops.end());
      return path;
    }
    for (const auto& [next, step] : mario_moves(t, at)) {
      const int q = idx(next);
      const int ng = cost + step;
      if (closed[static_cast<std::size_t>(q)] || ng >= g[static_cast<std::size_t>(q)]) continue;
      g[static_cast<std::size_t>(q)] = ng;
      parent[static_cast<std::size_t>(q)] = p;
      open.emplace(ng + (w - 1 - next.col), ng, q);
    }
  }
  return std::nullopt;
}

nlohmann::json MarioStats::to_json() const
{
  return {{"decoration_sum", decoration_sum},
          {"coverage_sum", coverage_sum},
          {"leniency_sum", leniency_sum},
          {"decoration_alternation", decoration_alternation},
          {"coverage_alternation", coverage_alternation},
          {"distinct_segments", distinct},
          {"solvable", solvable},
          {"path_cost", path_cost},
          {"fitness", fitness}};
}

MarioStats evaluate_mario(const MarioLevel& level, const MarioSolverOptions& options)
{
  MarioStats s;
  std::vector<SegmentGrid> segments;
  std::vector<double> decoration, coverage;
  for (int i = 0; i < level.segments; ++i) {
    segments.push_back(level.segment(i));
    s.segments.push_back(segment_stats(segments.back()));
    decoration.push_back(s.segments.back().decoration);
    coverage.push_back(s.segments.back().coverage);
    s.decoration_sum += s.segments.back().decoration;
    s.coverage_sum += s.segments.back().coverage;
    s.leniency_sum += s.segments.back().leniency;
  }
  s.decoration_alternation = alternation(decoration);
  s.coverage_alternation = alternation(coverage);
  s.distinct = distinct_count(segments);
  if (const auto path = solve_mario(level.tiles, options)) {
    s.solvable = true;
    s.path_cost = path->cost;
    s.fitness = path->cost;
  }
  return s;
}

int interval_bin(double v, Range r, int bins) noexcept
{
  if (!(v > r.lo)) return 0;
  if (v >= r.hi) return bins - 1;
  const int b = static_cast<int>(std::floor((v - r.lo) / (r.hi - r.lo) * bins));
  return std::clamp(b, 0, bins - 1);
}

int leniency_bin(double v, Range r) noexcept
{
  if (v < 0.0) return interval_bin(v, {r.lo, 0.0}, 5);
  return 5 + interval_bin(v, {0.0, r.hi}, 5);
}

std::array<int, 3> sum_dsl_bin(const MarioStats& s, const MarioRanges& ranges)
{
  return {interval_bin(s.decoration_sum, ranges.decoration_sum, 10),
          interval_bin(s.coverage_sum, ranges.coverage_sum, 10), leniency_bin(s.leniency_sum, ranges.leniency_sum)};
}

std::array<int, 3> distinct_asad_bin(const MarioStats& s, const MarioRanges& ranges, int segments)
{
  return {interval_bin(s.coverage_alternation, ranges.coverage_alternation, 10),
          interval_bin(s.decoration_alternation, ranges.decoration_alternation, 10),
          std::clamp(s.distinct - 1, 0, segments - 1)};
}

}  // namespace levelgen
