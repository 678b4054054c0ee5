// Builders and reference implementations shared by the unit and acceptance tests.
// The oracles here are written independently of the library's search code.
#pragma once

#include "levelgen/assembly.hpp"
#include "levelgen/corpus.hpp"
#include "levelgen/eval_zelda.hpp"

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

namespace support {

using namespace levelgen;

inline Channel zfloor() { return TileVocabulary::zelda().channel_named("floor"); }
inline Channel zwall() { return TileVocabulary::zelda().channel_named("wall"); }
inline Channel zwater() { return TileVocabulary::zelda().channel_named("water"); }

/// 11x16 room: two-tile wall border around a 12x7 floor interior.
inline SegmentGrid open_room()
{
  SegmentGrid g(kZeldaRoomHeight, kZeldaRoomWidth, zwall());
  for (int r = 2; r <= 8; ++r) {
    for (int c = 2; c <= 13; ++c) g.at(r, c) = zfloor();
  }
  return g;
}

/// Hand assembly of dungeons with explicit item placement.
class DungeonBuilder {
public:
  DungeonBuilder(int rows, int cols)
  {
    d_.layout = LevelLayout::zelda(rows, cols);
    d_.rooms.resize(static_cast<std::size_t>(rows * cols));
    d_.tiles = TileGrid(rows * kZeldaRoomHeight, cols * kZeldaRoomWidth, zwall());
  }

  DungeonBuilder& room(int r, int c, SegmentGrid g = open_room())
  {
    d_.rooms[static_cast<std::size_t>(r * d_.layout.cols + c)] = g;
    d_.tiles.paste(g, r * kZeldaRoomHeight, c * kZeldaRoomWidth);
    return *this;
  }

  DungeonBuilder& door(int r, int c, Direction dir, DoorType type = DoorType::Plain)
  {
    Door door{{r, c}, dir, type};
    d_.doors.push_back(door);
    for (const auto& t : d_.door_tiles(door)) d_.tiles.at(t.row, t.col) = zfloor();
    return *this;
  }

  /// Sets a tile of room (r, c) at local (row, col) in both the room copy and the carved grid.
  DungeonBuilder& tile(int r, int c, int row, int col, Channel ch)
  {
    auto& g = d_.rooms[static_cast<std::size_t>(r * d_.layout.cols + c)];
    g->at(row, col) = ch;
    d_.tiles.at(r * kZeldaRoomHeight + row, c * kZeldaRoomWidth + col) = ch;
    return *this;
  }

  DungeonBuilder& key(int r, int c, int row, int col)
  {
    d_.keys.push_back(global(r, c, row, col));
    return *this;
  }

  DungeonBuilder& raft(int r, int c, int row, int col)
  {
    d_.raft = global(r, c, row, col);
    return *this;
  }

  DungeonBuilder& start(int r, int c, int row = 5, int col = 7)
  {
    d_.start = {r, c};
    d_.start_tile = global(r, c, row, col);
    return *this;
  }

  DungeonBuilder& goal(int r, int c, int row = 5, int col = 8)
  {
    d_.goal = {r, c};
    d_.triforce = global(r, c, row, col);
    return *this;
  }

  Dungeon build() const { return d_; }

  static TilePos global(int r, int c, int row, int col)
  {
    return {r * kZeldaRoomHeight + row, c * kZeldaRoomWidth + col};
  }

private:
  Dungeon d_;
};

/// Whether a single move a -> b crosses a room boundary through a door, and which.
inline std::optional<std::size_t> door_between(const Dungeon& d, TilePos a, TilePos b)
{
  for (std::size_t i = 0; i < d.doors.size(); ++i) {
    const auto t = d.door_tiles(d.doors[i]);
    const bool ab = (t[1] == a && t[2] == b) || (t[1] == b && t[2] == a);
    if (ab) return i;
  }
  return std::nullopt;
}

/// Uniform-cost search over (tile, keys picked, doors opened, raft) with plain
/// BFS; returns the number of steps of a shortest solution.
inline std::optional<int> oracle_shortest(const Dungeon& d)
{
  if (!d.start_tile || !d.triforce) return std::nullopt;
  using Key = std::tuple<TilePos, std::set<std::size_t>, std::set<std::size_t>, bool>;
  auto cell = [&](TilePos p) -> int {
    if (!d.tiles.contains(p.row, p.col) || !d.present(d.room_of(p))) return -1;
    const Channel ch = d.tiles.at(p.row, p.col);
    return ch == zwall() ? -1 : ch == zwater() ? 2 : 1;
  };
  auto pick = [&](Key& k) {
    const TilePos p = std::get<0>(k);
    for (std::size_t i = 0; i < d.keys.size(); ++i) {
      if (d.keys[i] == p) std::get<1>(k).insert(i);
    }
    if (d.raft && *d.raft == p) std::get<3>(k) = true;
  };
  Key init{*d.start_tile, {}, {}, false};
  pick(init);
  std::set<Key> seen{init};
  std::deque<std::pair<Key, int>> queue{{init, 0}};
  const int dr[] = {1, -1, 0, 0};
  const int dc[] = {0, 0, 1, -1};
  while (!queue.empty()) {
    auto [k, dist] = queue.front();
    queue.pop_front();
    const TilePos p = std::get<0>(k);
    if (p == *d.triforce) return dist;
    for (int m = 0; m < 4; ++m) {
      const TilePos q{p.row + dr[m], p.col + dc[m]};
      const int cq = cell(q);
      if (cq < 0) continue;
      if (cq == 2 && (!std::get<3>(k) || cell(p) == 2)) continue;
      Key next = k;
      std::get<0>(next) = q;
      if (d.room_of(p) != d.room_of(q)) {
        const auto door = door_between(d, p, q);
        if (!door) continue;
        if (d.doors[*door].type == DoorType::Locked && !std::get<2>(k).contains(*door)) {
          const auto held = std::get<1>(k).size() - std::get<2>(k).size();
          if (held == 0) continue;
          std::get<2>(next).insert(*door);
        }
      }
      pick(next);
      if (seen.insert(next).second) queue.push_back({next, dist + 1});
    }
  }
  return std::nullopt;
}

/// Replays a solver path against the movement rules; returns an empty string when valid.
inline std::string validate_path(const Dungeon& d, const std::vector<SolveStep>& path)
{
  if (path.empty()) return "empty path";
  if (!d.start_tile || path.front().pos != *d.start_tile) return "does not start on the start tile";
  if (path.back().pos != *d.triforce) return "does not end on the Triforce";
  std::set<std::size_t> keys, opened;
  bool raft = false;
  auto collect = [&](TilePos p) {
    for (std::size_t i = 0; i < d.keys.size(); ++i) {
      if (d.keys[i] == p) keys.insert(i);
    }
    if (d.raft && *d.raft == p) raft = true;
  };
  collect(path.front().pos);
  for (std::size_t i = 1; i < path.size(); ++i) {
    const TilePos a = path[i - 1].pos, b = path[i].pos;
    if (std::abs(a.row - b.row) + std::abs(a.col - b.col) != 1) return "non-adjacent step";
    if (!d.present(d.room_of(b))) return "step into an absent room";
    const Channel ch = d.tiles.at(b.row, b.col);
    if (ch == zwall()) return "step into a wall";
    if (ch == zwater() && (!raft || d.tiles.at(a.row, a.col) == zwater())) return "illegal water step";
    if (d.room_of(a) != d.room_of(b)) {
      const auto door = door_between(d, a, b);
      if (!door) return "room change without a door";
      if (d.doors[*door].type == DoorType::Locked && !opened.contains(*door)) {
        if (keys.size() <= opened.size()) return "locked door without a key";
        opened.insert(*door);
      }
    }
    collect(b);
    if (path[i].keys_held != static_cast<int>(keys.size() - opened.size())) return "key count out of sync";
    if (path[i].keys_held < 0) return "negative key count";
  }
  return {};
}

/// Reachable rooms by flood fill over the door list.
inline std::set<RoomCoord> oracle_reachable(const Dungeon& d)
{
  std::set<RoomCoord> seen{d.start};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& door : d.doors) {
      const RoomCoord a = door.room;
      const RoomCoord b = door.dir == Direction::Right ? RoomCoord{a.row, a.col + 1} : RoomCoord{a.row + 1, a.col};
      if (seen.contains(a) != seen.contains(b)) {
        seen.insert(a);
        seen.insert(b);
        grew = true;
      }
    }
  }
  return seen;
}

/// Field-by-field dungeon comparison.
inline bool same_dungeon(const Dungeon& a, const Dungeon& b)
{
  if (!(a.layout == b.layout) || a.rooms != b.rooms || !(a.tiles == b.tiles) || a.doors.size() != b.doors.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.doors.size(); ++i) {
    if (a.doors[i].room != b.doors[i].room || a.doors[i].dir != b.doors[i].dir || a.doors[i].type != b.doors[i].type) {
      return false;
    }
  }
  if (a.puzzle_blocks.size() != b.puzzle_blocks.size()) return false;
  for (std::size_t i = 0; i < a.puzzle_blocks.size(); ++i) {
    if (a.puzzle_blocks[i].tile != b.puzzle_blocks[i].tile || a.puzzle_blocks[i].push != b.puzzle_blocks[i].push) {
      return false;
    }
  }
  return a.keys == b.keys && a.raft == b.raft && a.start == b.start && a.goal == b.goal &&
         a.start_tile == b.start_tile && a.triforce == b.triforce && a.enemies == b.enemies;
}

}  // namespace support
