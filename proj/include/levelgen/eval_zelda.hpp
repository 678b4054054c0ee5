#pragma once

#include "levelgen/assembly.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

namespace levelgen {

/// One step of a dungeon solution: where the player stands and what they carry.
struct SolveStep {
  TilePos pos;
  int keys_held = 0;
  bool raft = false;
};

struct ZeldaSolverOptions {
  std::size_t budget = 100'000;  // expanded states
};

struct ZeldaSolveResult {
  std::optional<std::vector<SolveStep>> path;  // start tile .. Triforce tile
  std::size_t expanded = 0;
  bool budget_exhausted = false;
};

/// Rooms connected to the start room through doors of any type, row-major order.
std::vector<RoomCoord> reachable_rooms(const Dungeon& d);

struct WallWater {
  int wall_tiles = 0;
  int water_tiles = 0;
  int region_tiles = 0;  // 84 per reachable room
  double wall_pct() const noexcept { return region_tiles ? static_cast<double>(wall_tiles) / region_tiles : 0.0; }
  double water_pct() const noexcept { return region_tiles ? static_cast<double>(water_tiles) / region_tiles : 0.0; }
};

/// Wall and water tiles pooled over the central 12x7 region of the given rooms.
WallWater wall_water(const Dungeon& d, const std::vector<RoomCoord>& rooms);

/// Number of different decoded room grids among `rooms` (exact tile equality).
int distinct_rooms(const Dungeon& d, const std::vector<RoomCoord>& rooms);

/// A* from the start tile to the Triforce. Locked doors take one key each and
/// stay open; keys are interchangeable. Water needs the raft and holds the
/// player for one tile only. Other door types are open.
ZeldaSolveResult solve_zelda(const Dungeon& d, const ZeldaSolverOptions& options = {});

/// Room of every step with consecutive repeats collapsed.
std::vector<RoomCoord> room_sequence(const Dungeon& d, const std::vector<SolveStep>& path);

/// Counts entries into rooms that were exited earlier.
int backtrack_count(const std::vector<RoomCoord>& rooms);

struct DungeonStats {
  int reachable = 0;
  WallWater wall_water;
  int distinct = 0;
  bool solvable = false;
  int path_length = 0;  // steps
  int visited = 0;
  int backtracked = 0;
  double fitness = 0.0;

  nlohmann::json to_json() const;
};

DungeonStats evaluate_dungeon(const Dungeon& d, const ZeldaSolverOptions& options = {});

/// floor(10 * count / total) computed exactly, capped at 9.
int decile(int count, int total) noexcept;

/// (wall decile, water decile, reachable rooms - 1).
std::array<int, 3> wwr_bin(const DungeonStats& s, const LevelLayout& layout);

/// (distinct rooms - 1, backtracks clamped to [0, backtrack_bins - 1], reachable rooms - 1).
std::array<int, 3> distinct_btr_bin(const DungeonStats& s, const LevelLayout& layout, int backtrack_bins);

}  // namespace levelgen
