// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "levelgen/assembly.hpp"
#include "levelgen/errors.hpp"
#include "levelgen/eval_mario.hpp"
#include "levelgen/eval_zelda.hpp"
#include "levelgen/experiment.hpp"
#include "levelgen/mapelites.hpp"
#include "dungeon_suite.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

using namespace levelgen;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances and sizes pinned here.
constexpr double kOracleTolerance = 1e-12;
constexpr int kOracleTrials = 1000;
constexpr double kOracleSeconds = 10.0;
constexpr int kConversionGenomes = 50;
constexpr int kArchiveSteps = 10000;
constexpr std::int64_t kModeIterations = 3000;
constexpr int kDirectionalSeeds = 5;
constexpr int kDirectionalEvaluations = 10000;
constexpr double kDirectionalMinutes = 10.0;
constexpr double kFillRatio = 1.25;
constexpr int kRateTrials = 20000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Genome random_cppn(const LevelLayout& layout, Rng& rng, int generations)
{
  CppnGenome g = CppnGenome::initial(layout.cppn_inputs(), layout.segment_width(), rng);
  for (int i = 0; i < generations; ++i) g = mutate(g, rng);
  return {g, Provenance::Initial};
}

// ---------------------------------------------------------------------------
// 1. Statistics and bin mappings against brute-force oracles

int oracle_decile(int count, int total)
{
  if (total <= 0) return 0;
  int k = 0;
  while (k < 9 && (k + 1) * total <= 10 * count) ++k;
  return k;
}

int oracle_interval(double v, double lo, double hi, int bins)
{
  if (v <= lo) return 0;
  int k = 0;
  const double width = (hi - lo) / bins;
  while (k < bins - 1 && v >= lo + (k + 1) * width) ++k;
  return k;
}

int oracle_leniency(double v, double lo, double hi)
{
  return v < 0.0 ? oracle_interval(v, lo, 0.0, 5) : 5 + oracle_interval(v, 0.0, hi, 5);
}

int clamp_oracle(int v, int lo, int hi)
{
  if (v < lo) return lo;
  if (v > hi) return hi;
  return v;
}

Outcome check_oracles()
{
  const auto t0 = Clock::now();
  Rng rng(101);
  int mismatches = 0;
  double worst = 0.0;

  // Alternation: explicit pairwise sum in long double.
  for (int t = 0; t < kOracleTrials; ++t) {
    std::vector<double> s(1 + rng.index(20));
    for (auto& v : s) v = rng.uniform();
    long double ref = 0.0L;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const long double a = s[i], b = s[i + 1];
      ref += a > b ? a - b : b - a;
    }
    const double err = std::abs(alternation(s) - static_cast<double>(ref));
    worst = std::max(worst, err);
    if (err > kOracleTolerance) ++mismatches;
  }

  // Distinct segments: pairwise cell-by-cell comparison.
  const auto& mv = TileVocabulary::mario();
  for (int t = 0; t < kOracleTrials; ++t) {
    std::vector<SegmentGrid> pool(3, SegmentGrid(14, 28));
    for (auto& p : pool) {
      for (auto& c : p.cells()) c = static_cast<Channel>(rng.below(static_cast<std::uint64_t>(mv.channel_count())));
    }
    std::vector<SegmentGrid> segs;
    for (int i = 0; i < 10; ++i) {
      auto s = pool[rng.index(pool.size())];
      if (rng.chance(0.3)) s.at(static_cast<int>(rng.below(14)), static_cast<int>(rng.below(28))) = 0;
      segs.push_back(s);
    }
    int ref = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      bool seen = false;
      for (std::size_t j = 0; j < i && !seen; ++j) {
        bool same = segs[i].height() == segs[j].height() && segs[i].width() == segs[j].width();
        for (int r = 0; same && r < 14; ++r) {
          for (int c = 0; same && c < 28; ++c) same = segs[i].at(r, c) == segs[j].at(r, c);
        }
        seen = same;
      }
      ref += !seen;
    }
    if (distinct_count(segs) != ref) ++mismatches;
  }

  // Wall/water percentages over reachable rooms, and the WWR bin.
  const auto floor = support::zfloor(), wall = support::zwall(), water = support::zwater();
  for (int t = 0; t < kOracleTrials; ++t) {
    const int rows = 1 + static_cast<int>(rng.below(3)), cols = 1 + static_cast<int>(rng.below(3));
    support::DungeonBuilder b(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (!(r == 0 && c == 0) && rng.chance(0.2)) continue;
        auto g = support::open_room();
        for (int y = 2; y <= 8; ++y) {
          for (int x = 2; x <= 13; ++x) {
            const double u = rng.uniform();
            g.at(y, x) = u < 0.3 ? wall : u < 0.45 ? water : floor;
          }
        }
        b.room(r, c, g);
      }
    }
    auto d = b.start(0, 0).goal(0, 0).build();
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (c + 1 < cols && d.present({r, c}) && d.present({r, c + 1}) && rng.chance(0.6)) {
          d.doors.push_back({{r, c}, Direction::Right, DoorType::Plain});
        }
        if (r + 1 < rows && d.present({r, c}) && d.present({r + 1, c}) && rng.chance(0.6)) {
          d.doors.push_back({{r, c}, Direction::Down, DoorType::Plain});
        }
      }
    }
    const auto reach_set = support::oracle_reachable(d);
    const std::vector<RoomCoord> reach(reach_set.begin(), reach_set.end());
    int walls = 0, waters = 0;
    for (const auto& room : reach) {
      const auto& g = *d.rooms[static_cast<std::size_t>(d.room_index(room))];
      for (int y = 2; y <= 8; ++y) {
        for (int x = 2; x <= 13; ++x) {
          walls += g.at(y, x) == wall;
          waters += g.at(y, x) == water;
        }
      }
    }
    const int region = 84 * static_cast<int>(reach.size());
    const auto got = wall_water(d, reachable_rooms(d));
    const double e1 = std::abs(got.wall_pct() - static_cast<double>(walls) / region);
    const double e2 = std::abs(got.water_pct() - static_cast<double>(waters) / region);
    worst = std::max({worst, e1, e2});
    if (e1 > kOracleTolerance || e2 > kOracleTolerance) ++mismatches;
    DungeonStats s;
    s.wall_water = got;
    s.reachable = static_cast<int>(reach.size());
    const std::array<int, 3> want{oracle_decile(walls, region), oracle_decile(waters, region),
                                  clamp_oracle(s.reachable - 1, 0, rows * cols - 1)};
    if (wwr_bin(s, d.layout) != want) ++mismatches;
  }

  // Remaining bin mappings on random inputs.
  const MarioRanges ranges;
  for (int t = 0; t < kOracleTrials; ++t) {
    MarioStats s;
    s.decoration_sum = rng.uniform(-0.5, 4.5);
    s.coverage_sum = rng.uniform(-0.5, 8.5);
    s.leniency_sum = rng.uniform(-6.0, 6.0);
    s.coverage_alternation = rng.uniform(0.0, 3.5);
    s.decoration_alternation = rng.uniform(0.0, 3.5);
    s.distinct = 1 + static_cast<int>(rng.below(12));
    const std::array<int, 3> dsl{oracle_interval(s.decoration_sum, 0, 4, 10),
                                 oracle_interval(s.coverage_sum, 0, 8, 10), oracle_leniency(s.leniency_sum, -5, 5)};
    const std::array<int, 3> asad{oracle_interval(s.coverage_alternation, 0, 3, 10),
                                  oracle_interval(s.decoration_alternation, 0, 3, 10),
                                  clamp_oracle(s.distinct - 1, 0, 9)};
    if (sum_dsl_bin(s, ranges) != dsl || distinct_asad_bin(s, ranges, 10) != asad) ++mismatches;

    DungeonStats z;
    z.distinct = 1 + static_cast<int>(rng.below(30));
    z.backtracked = static_cast<int>(rng.below(40));
    z.reachable = 1 + static_cast<int>(rng.below(25));
    const std::array<int, 3> btr{clamp_oracle(z.distinct - 1, 0, 24), clamp_oracle(z.backtracked, 0, 24),
                                 clamp_oracle(z.reachable - 1, 0, 24)};
    if (distinct_btr_bin(z, LevelLayout::zelda(5, 5), 25) != btr) ++mismatches;
  }

  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < kOracleSeconds,
          fmt("%d mismatches over %d inputs per check, max error %.3g, %.2f s", mismatches, kOracleTrials, worst, secs)};
}

// ---------------------------------------------------------------------------
// 2. Converted genomes express the same level

Outcome check_conversion()
{
  int differ = 0;
  Rng rng(202);
  const StubDecoder zdec(Game::Zelda, 10);
  const auto zl = LevelLayout::zelda(5, 5);
  int zelda_checked = 0, zelda_items = 0;
  for (int t = 0; t < kConversionGenomes; ++t) {
    const auto g = random_cppn(zl, rng, 5 + static_cast<int>(rng.below(40)));
    const Genome d{convert(g.cppn(), zl), Provenance::Converted};
    std::optional<Dungeon> a, b;
    try {
      a = assemble_zelda(g, zdec, zl);
    } catch (const NoRoomsPresent&) {
    }
    try {
      b = assemble_zelda(d, zdec, zl);
    } catch (const NoRoomsPresent&) {
    }
    if (a.has_value() != b.has_value() || (a && !support::same_dungeon(*a, *b))) ++differ;
    if (a) {
      ++zelda_checked;
      zelda_items += static_cast<int>(a->doors.size() + a->keys.size()) + a->raft.has_value();
    }
  }
  const StubDecoder mdec(Game::Mario, 30);
  const auto ml = LevelLayout::mario(10);
  for (int t = 0; t < kConversionGenomes; ++t) {
    const auto g = random_cppn(ml, rng, 5 + static_cast<int>(rng.below(40)));
    const Genome d{convert(g.cppn(), ml), Provenance::Converted};
    if (!(assemble_mario(g, mdec, ml).tiles == assemble_mario(d, mdec, ml).tiles)) ++differ;
  }
  return {differ == 0 && zelda_checked > 0,
          fmt("%d of %d levels differ; %d dungeons with %d doors/keys/rafts compared", differ,
              2 * kConversionGenomes, zelda_checked, zelda_items)};
}

// ---------------------------------------------------------------------------
// 3. Solver against the uniform-cost oracle

Outcome check_solver()
{
  const auto suite = support::hand_built_dungeons();
  int agree = 0;
  std::string bad;
  for (const auto& c : suite) {
    const auto oracle = support::oracle_shortest(c.dungeon);
    const auto solved = solve_zelda(c.dungeon);
    bool ok = oracle.has_value() == solved.path.has_value() && oracle.has_value() == c.solvable;
    if (ok && oracle) {
      ok = static_cast<int>(solved.path->size()) - 1 == *oracle && support::validate_path(c.dungeon, *solved.path).empty();
    }
    if (ok) ++agree;
    else bad += " [" + c.name + "]";
  }
  const RoomCoord a{0, 0}, b{0, 1};
  const int bt1 = backtrack_count({a, b, a});
  const int bt3 = backtrack_count({a, b, a, b, a});
  const bool pass = agree == static_cast<int>(suite.size()) && suite.size() >= 12 && bt1 == 1 && bt3 == 3;
  return {pass, fmt("%d/%zu dungeons agree%s; backtracks ABA=%d ABABA=%d", agree, suite.size(), bad.c_str(), bt1, bt3)};
}

// ---------------------------------------------------------------------------
// 4. Archive monotonicity and reproducibility

std::string log_text(const MapElites& me)
{
  std::string s;
  for (const auto& row : me.log()) s += to_csv(row) + "\n";
  return s;
}

Outcome check_archive_laws()
{
  const StubDecoder dec(Game::Zelda, 10);
  RunConfig cfg;
  cfg.scheme = Scheme::Wwr;
  cfg.mode = EncodingMode::CppnThenDirect2Gan;
  cfg.iterations = kArchiveSteps;
  cfg.seed = 404;
  MapElites me(cfg, dec);
  me.initialize();
  const std::size_t bins = me.archive().descriptor().bin_count();
  std::vector<double> best(bins, -std::numeric_limits<double>::infinity());
  double qd = me.archive().qd_score();
  std::size_t filled = me.archive().filled();
  for (auto f : me.archive().occupied()) best[f] = me.archive().at(f)->fitness;
  int violations = 0, steps = 0;
  while (me.remaining() > 0) {
    me.step();
    ++steps;
    const auto& ar = me.archive();
    if (ar.qd_score() < qd || ar.filled() < filled) ++violations;
    qd = ar.qd_score();
    filled = ar.filled();
    for (std::size_t f = 0; f < bins; ++f) {
      const auto& e = ar.at(f);
      if (!e) {
        if (best[f] > -std::numeric_limits<double>::infinity()) ++violations;
        continue;
      }
      if (e->fitness < best[f]) ++violations;
      best[f] = e->fitness;
    }
  }
  MapElites again(cfg, dec);
  again.run();
  MapElites first_logged(cfg, dec);
  first_logged.run();
  const bool identical = again.archive() == me.archive() && log_text(again) == log_text(first_logged) &&
                         again.archive().qd_score() == me.archive().qd_score();
  return {violations == 0 && identical && steps == kArchiveSteps,
          fmt("%d steps, %d monotonicity violations, rerun %s (QD %.6f, %zu bins)", steps, violations,
              identical ? "bit-identical" : "DIFFERS", qd, filled)};
}

// ---------------------------------------------------------------------------
// 5. Hybrid with zero conversion equals the CPPN-only run

Outcome check_mode_consistency()
{
  int differ = 0;
  for (Scheme scheme : {Scheme::Wwr, Scheme::SumDsl}) {
    const Game game = game_of(scheme);
    const StubDecoder dec(game, game == Game::Zelda ? 10 : 30);
    RunConfig cfg;
    cfg.scheme = scheme;
    cfg.layout = game == Game::Zelda ? LevelLayout::zelda(5, 5) : LevelLayout::mario(10);
    cfg.iterations = kModeIterations;
    cfg.seed = 505;
    cfg.mode = EncodingMode::Cppn2Gan;
    MapElites plain(cfg, dec);
    plain.run();
    cfg.mode = EncodingMode::CppnThenDirect2Gan;
    cfg.conversion_probability = 0.0;
    MapElites hybrid(cfg, dec);
    hybrid.run();
    if (!(plain.archive() == hybrid.archive()) || log_text(plain) != log_text(hybrid) ||
        hybrid.archive().count(GenomeKind::Direct) != 0) {
      ++differ;
    }
  }
  return {differ == 0, fmt("%d of 2 games differ after %lld offspring", differ, static_cast<long long>(kModeIterations))};
}

// ---------------------------------------------------------------------------
// 6. Directional comparison of the three encodings

Outcome check_directional()
{
  const auto t0 = Clock::now();
  const StubDecoder dec(Game::Zelda, 10);
  const std::array modes{EncodingMode::Cppn2Gan, EncodingMode::Direct2Gan, EncodingMode::CppnThenDirect2Gan};
  // [scheme][mode] -> per-seed values
  std::array<std::array<std::vector<double>, 3>, 2> filled, qd;
  for (int s = 0; s < 2; ++s) {
    const Scheme scheme = s == 0 ? Scheme::Wwr : Scheme::DistinctBtr;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      for (int seed = 1; seed <= kDirectionalSeeds; ++seed) {
        RunConfig cfg;
        cfg.scheme = scheme;
        cfg.mode = modes[m];
        cfg.seed = static_cast<std::uint64_t>(seed);
        cfg.iterations = kDirectionalEvaluations - cfg.initial_population;
        MapElites me(cfg, dec);
        me.run();
        filled[static_cast<std::size_t>(s)][m].push_back(static_cast<double>(me.archive().filled()));
        qd[static_cast<std::size_t>(s)][m].push_back(me.archive().qd_score());
      }
    }
  }
  const double secs = seconds_since(t0);
  auto mean = [](const std::vector<double>& v) { return mean_ci(v).mean; };
  const double wc = mean(filled[0][0]), wd = mean(filled[0][1]), wh = mean(filled[0][2]);
  const double qc = mean(qd[1][0]), qdir = mean(qd[1][1]), qh = mean(qd[1][2]);
  const bool fill_ok = wc >= kFillRatio * wd && wh >= kFillRatio * wd;
  const bool qd_ok = qh >= qc && qh >= qdir;
  const bool time_ok = secs < kDirectionalMinutes * 60.0;
  return {fill_ok && qd_ok && time_ok,
          fmt("WWR filled cppn2gan %.1f, direct2gan %.1f, hybrid %.1f (ratios %.2f, %.2f); "
              "DistinctBTR QD cppn2gan %.2f, direct2gan %.2f, hybrid %.2f; %.0f s",
              wc, wd, wh, wc / wd, wh / wd, qc, qdir, qh, secs)};
}

// ---------------------------------------------------------------------------
// 7. Operator rates

Outcome check_rates()
{
  Rng rng(707);
  const auto layout = LevelLayout::zelda(5, 5);
  int splice = 0, link = 0, swap = 0;
  const auto base = random_cppn(layout, rng, 10).cppn();
  for (int t = 0; t < kRateTrials; ++t) {
    CppnMutationLog log;
    mutate(base, rng, {}, &log);
    splice += log.splice_fired;
    link += log.add_link_fired;
    swap += log.swap_fired;
  }
  std::size_t mutated = 0, genes = 0;
  Rng drng(708);
  const auto direct = DirectGenome::random(LevelLayout::mario(1, 30), drng);
  for (int t = 0; t < kRateTrials; ++t) {
    std::size_t n = 0;
    mutate(direct, drng, {}, &n);
    mutated += n;
    genes += direct.values().size();
  }
  int converted = 0;
  const auto parent = random_cppn(layout, rng, 5);
  const ParentSampler sampler = [&](Rng&) -> const Genome& { return parent; };
  const auto config = reproduction_defaults(EncodingMode::CppnThenDirect2Gan);
  for (int t = 0; t < kRateTrials; ++t) {
    ReproductionLog log;
    reproduce(parent, sampler, layout, rng, config, &log);
    converted += log.converted;
  }
  const double n = kRateTrials;
  const double rs = splice / n, rl = link / n, rw = swap / n, rg = static_cast<double>(mutated) / genes,
               rc = converted / n;
  const bool pass = std::abs(rs - 0.20) <= 0.02 && std::abs(rl - 0.40) <= 0.02 && std::abs(rw - 0.30) <= 0.02 &&
                    std::abs(rg - 0.30) <= 0.01 && std::abs(rc - 0.30) <= 0.02;
  return {pass, fmt("splice %.4f, link-add %.4f, swap %.4f, per-gene %.4f, conversion %.4f over %d trials", rs, rl,
                    rw, rg, rc, kRateTrials)};
}

// ---------------------------------------------------------------------------
// 8. Door bucketing

Outcome check_doors()
{
  const std::array<std::pair<double, DoorType>, 6> cases{{{-1.0, DoorType::Plain},
                                                          {0.0, DoorType::Plain},
                                                          {0.25, DoorType::PuzzleLocked},
                                                          {0.5, DoorType::SoftLocked},
                                                          {0.75, DoorType::Bombable},
                                                          {1.0, DoorType::Locked}}};
  std::string got;
  bool pass = true;
  for (const auto& [v, want] : cases) {
    const auto t = bucket_door(v);
    pass = pass && t == want;
    got += fmt(" %g->%s", v, std::string(to_string(t)).c_str());
  }
  return {pass, "buckets" + got};
}

}  // namespace

int main()
{
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oracle equivalence", check_oracles},     {"conversion fidelity", check_conversion},
      {"solver correctness", check_solver},      {"archive laws", check_archive_laws},
      {"mode consistency", check_mode_consistency}, {"directional result", check_directional},
      {"operator rates", check_rates},           {"door bucketing", check_doors}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
