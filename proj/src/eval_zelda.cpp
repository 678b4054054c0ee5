#include "levelgen/eval_zelda.hpp"

#include "levelgen/corpus.hpp"
#include "levelgen/errors.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <queue>
#include <set>
#include <tuple>
#include <unordered_map>

namespace levelgen {

namespace {

constexpr int kDr[4] = {0, 1, 0, -1};
constexpr int kDc[4] = {1, 0, -1, 0};
constexpr Direction kDirs[4] = {Direction::Right, Direction::Down, Direction::Left, Direction::Up};

}  // namespace

std::vector<RoomCoord> reachable_rooms(const Dungeon& d)
{
  std::vector<bool> seen(static_cast<std::size_t>(d.layout.segment_count()), false);
  std::deque<RoomCoord> queue{d.start};
  seen[static_cast<std::size_t>(d.room_index(d.start))] = true;
  while (!queue.empty()) {
    const RoomCoord r = queue.front();
    queue.pop_front();
    for (int k = 0; k < 4; ++k) {
      if (!d.door(r, kDirs[k])) continue;
      const RoomCoord n{r.row + kDr[k], r.col + kDc[k]};
      auto&& flag = seen[static_cast<std::size_t>(d.room_index(n))];
      if (!flag) {
        flag = true;
        queue.push_back(n);
      }
    }
  }
  std::vector<RoomCoord> out;
  for (int i = 0; i < d.layout.segment_count(); ++i) {
    if (seen[static_cast<std::size_t>(i)]) out.push_back({i / d.layout.cols, i % d.layout.cols});
  }
  return out;
}

WallWater wall_water(const Dungeon& d, const std::vector<RoomCoord>& rooms)
{
  const auto& vocab = TileVocabulary::zelda();
  const Channel wall = vocab.channel_named("wall");
  const Channel water = vocab.channel_named("water");
  WallWater ww;
  for (const auto& room : rooms) {
    const auto& grid = d.rooms[static_cast<std::size_t>(d.room_index(room))];
    if (!grid) continue;
    for (int r = kZeldaInteriorTop; r < kZeldaInteriorTop + kZeldaInteriorHeight; ++r) {
      for (int c = kZeldaInteriorLeft; c < kZeldaInteriorLeft + kZeldaInteriorWidth; ++c) {
        const Channel ch = grid->at(r, c);
        ww.wall_tiles += ch == wall;
        ww.water_tiles += ch == water;
        ++ww.region_tiles;
      }
    }
  }
  return ww;
}

int distinct_rooms(const Dungeon& d, const std::vector<RoomCoord>& rooms)
{
  std::set<TileGrid> unique;
  for (const auto& room : rooms) {
    if (const auto& grid = d.rooms[static_cast<std::size_t>(d.room_index(room))]) unique.insert(*grid);
  }
  return static_cast<int>(unique.size());
}

namespace {

struct State {
  std::int32_t pos = 0;
  bool raft = false;
  std::uint64_t taken = 0;
  std::uint64_t opened = 0;
  friend bool operator==(const State&, const State&) = default;
};

struct StateHash {
  std::size_t operator()(const State& s) const noexcept
  {
    return static_cast<std::size_t>(
        mix_seed(mix_seed(static_cast<std::uint64_t>(s.pos) * 2 + s.raft, s.taken), s.opened));
  }
};

struct Node {
  State state;
  int g = 0;
  std::int32_t parent = -1;
  bool closed = false;
};

enum Cell : std::uint8_t { kBlocked, kFloor, kWater };

/// Flattened dungeon used by the search.
struct SearchMap {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> cell;
  std::vector<std::int16_t> key_id;
  std::vector<std::int16_t> cross_right;  // door index when crossing from pos to pos+1
  std::vector<std::int16_t> cross_down;   // door index when crossing from pos to pos+width
  std::vector<std::int16_t> lock_id;      // per door, -1 unless locked
  int raft = -1;
  int start = -1;
  int goal = -1;

  explicit SearchMap(const Dungeon& d)
  {
    const auto& vocab = TileVocabulary::zelda();
    const Channel wall = vocab.channel_named("wall");
    const Channel water = vocab.channel_named("water");
    height = d.tiles.height();
    width = d.tiles.width();
    const auto n = static_cast<std::size_t>(height * width);
    cell.assign(n, kBlocked);
    key_id.assign(n, -1);
    cross_right.assign(n, -1);
    cross_down.assign(n, -1);
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        if (!d.present(d.room_of({r, c}))) continue;
        const Channel ch = d.tiles.at(r, c);
        cell[index(r, c)] = ch == wall ? kBlocked : ch == water ? kWater : kFloor;
      }
    }
    int locks = 0;
    for (std::size_t i = 0; i < d.doors.size(); ++i) {
      const auto& door = d.doors[i];
      const auto tiles = d.door_tiles(door);
      // tiles[1] and tiles[2] straddle the shared wall.
      auto& table = door.dir == Direction::Right ? cross_right : cross_down;
      table[index(tiles[1].row, tiles[1].col)] = static_cast<std::int16_t>(i);
      if (door.type == DoorType::Locked) {
        if (locks == 64) throw OutOfRange("solver supports at most 64 locked doors");
        lock_id.push_back(static_cast<std::int16_t>(locks++));
      } else {
        lock_id.push_back(-1);
      }
    }
    for (std::size_t k = 0; k < d.keys.size(); ++k) {
      if (k >= 64) throw OutOfRange("solver supports at most 64 keys");
      key_id[index(d.keys[k].row, d.keys[k].col)] = static_cast<std::int16_t>(k);
    }
    if (d.raft) raft = static_cast<int>(index(d.raft->row, d.raft->col));
    if (d.start_tile) start = static_cast<int>(index(d.start_tile->row, d.start_tile->col));
    if (d.triforce) goal = static_cast<int>(index(d.triforce->row, d.triforce->col));
  }

  std::size_t index(int r, int c) const noexcept { return static_cast<std::size_t>(r * width + c); }

  /// Door crossed when moving from p in direction k, -1 if the move stays in a room,
  /// -2 if it leaves a room without a door.
  int crossing(int p, int k) const noexcept
  {
    const int r = p / width, c = p % width;
    const int nr = r + kDr[k], nc = c + kDc[k];
    const bool new_room = r / kZeldaRoomHeight != nr / kZeldaRoomHeight || c / kZeldaRoomWidth != nc / kZeldaRoomWidth;
    if (!new_room) return -1;
    std::int16_t door = -1;
    switch (k) {
      case 0: door = cross_right[static_cast<std::size_t>(p)]; break;
      case 1: door = cross_down[static_cast<std::size_t>(p)]; break;
      case 2: door = cross_right[static_cast<std::size_t>(p - 1)]; break;
      case 3: door = cross_down[static_cast<std::size_t>(p - width)]; break;
    }
    return door < 0 ? -2 : door;
  }

  bool in_bounds(int p, int k) const noexcept
  {
    const int r = p / width + kDr[k], c = p % width + kDc[k];
    return r >= 0 && c >= 0 && r < height && c < width;
  }

  /// Tile-level reachability ignoring locks and the raft (an over-approximation).
  bool relaxed_reachable() const
  {
    std::vector<bool> seen(cell.size(), false);
    std::vector<int> stack{start};
    seen[static_cast<std::size_t>(start)] = true;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      if (p == goal) return true;
      for (int k = 0; k < 4; ++k) {
        if (!in_bounds(p, k) || crossing(p, k) == -2) continue;
        const int q = p + kDr[k] * width + kDc[k];
        if (cell[static_cast<std::size_t>(q)] == kBlocked || seen[static_cast<std::size_t>(q)]) continue;
        seen[static_cast<std::size_t>(q)] = true;
        stack.push_back(q);
      }
    }
    return false;
  }
};

}  // namespace

ZeldaSolveResult solve_zelda(const Dungeon& d, const ZeldaSolverOptions& options)
{
  ZeldaSolveResult result;
  if (!d.start_tile || !d.triforce) return result;
  const auto reachable = reachable_rooms(d);
  if (!std::binary_search(reachable.begin(), reachable.end(), d.goal)) return result;

  const SearchMap map(d);
  if (!map.relaxed_reachable()) return result;

  const int goal_r = map.goal / map.width, goal_c = map.goal % map.width;
  auto heuristic = [&](int p) { return std::abs(p / map.width - goal_r) + std::abs(p % map.width - goal_c); };

  std::vector<Node> nodes;
  std::unordered_map<State, std::int32_t, StateHash> index;
  // (f, g, position, sequence, node)
  using Entry = std::tuple<int, int, int, std::uint64_t, std::int32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::uint64_t sequence = 0;

  auto push = [&](const State& s, int g, std::int32_t parent) {
    auto [it, inserted] = index.try_emplace(s, static_cast<std::int32_t>(nodes.size()));
    if (inserted) {
      nodes.push_back({s, g, parent, false});
    } else {
      Node& n = nodes[static_cast<std::size_t>(it->second)];
      if (n.closed || g >= n.g) return;
      n.g = g;
      n.parent = parent;
    }
    open.emplace(g + heuristic(s.pos), g, s.pos, sequence++, it->second);
  };

  State initial{map.start, map.start == map.raft, 0, 0};
  if (const auto k = map.key_id[static_cast<std::size_t>(map.start)]; k >= 0) initial.taken = 1ULL << k;
  push(initial, 0, -1);

  while (!open.empty()) {
    const auto [f, g, pos, seq, id] = open.top();
    open.pop();
    Node& node = nodes[static_cast<std::size_t>(id)];
    if (node.closed || g != node.g) continue;
    node.closed = true;
    if (++result.expanded > options.budget) {
      result.budget_exhausted = true;
      return result;
    }
    const State s = node.state;
    if (s.pos == map.goal) {
      std::vector<SolveStep> path;
      for (std::int32_t at = id; at >= 0; at = nodes[static_cast<std::size_t>(at)].parent) {
        const State& st = nodes[static_cast<std::size_t>(at)].state;
        const int held = std::popcount(st.taken) - std::popcount(st.opened);
        path.push_back({{st.pos / map.width, st.pos % map.width}, held, st.raft});
      }
      std::reverse(path.begin(), path.end());
      result.path = std::move(path);
      return result;
    }
    const bool on_water = map.cell[static_cast<std::size_t>(s.pos)] == kWater;
    for (int k = 0; k < 4; ++k) {
      if (!map.in_bounds(s.pos, k)) continue;
      const int door = map.crossing(s.pos, k);
      if (door == -2) continue;
      const int q = s.pos + kDr[k] * map.width + kDc[k];
      const auto cell = map.cell[static_cast<std::size_t>(q)];
      if (cell == kBlocked) continue;
      if (cell == kWater && (!s.raft || on_water)) continue;
      State next = s;
      next.pos = q;
      if (door >= 0) {
        const int lock = map.lock_id[static_cast<std::size_t>(door)];
        if (lock >= 0 && !(s.opened >> lock & 1ULL)) {
          if (std::popcount(s.taken) <= std::popcount(s.opened)) continue;
          next.opened |= 1ULL << lock;
        }
      }
      if (const auto key = map.key_id[static_cast<std::size_t>(q)]; key >= 0) next.taken |= 1ULL << key;
      if (q == map.raft) next.raft = true;
      push(next, g + 1, id);
    }
  }
  return result;
}

std::vector<RoomCoord> room_sequence(const Dungeon& d, const std::vector<SolveStep>& path)
{
  std::vector<RoomCoord> rooms;
  for (const auto& step : path) {
    const RoomCoord r = d.room_of(step.pos);
    if (rooms.empty() || rooms.back() != r) rooms.push_back(r);
  }
  return rooms;
}

int backtrack_count(const std::vector<RoomCoord>& rooms)
{
  std::set<RoomCoord> exited;
  int count = 0;
  for (std::size_t i = 1; i < rooms.size(); ++i) {
    exited.insert(rooms[i - 1]);
    if (exited.contains(rooms[i])) ++count;
  }
  return count;
}

nlohmann::json DungeonStats::to_json() const
{
  return {{"reachable_rooms", reachable},
          {"wall_tiles", wall_water.wall_tiles},
          {"water_tiles", wall_water.water_tiles},
          {"region_tiles", wall_water.region_tiles},
          {"distinct_rooms", distinct},
          {"solvable", solvable},
          {"path_length", path_length},
          {"visited_rooms", visited},
          {"backtracked", backtracked},
          {"fitness", fitness}};
}

DungeonStats evaluate_dungeon(const Dungeon& d, const ZeldaSolverOptions& options)
{
  DungeonStats s;
  const auto reachable = reachable_rooms(d);
  s.reachable = static_cast<int>(reachable.size());
  s.wall_water = wall_water(d, reachable);
  s.distinct = distinct_rooms(d, reachable);
  const auto solved = solve_zelda(d, options);
  if (solved.path) {
    const auto rooms = room_sequence(d, *solved.path);
    s.solvable = true;
    s.path_length = static_cast<int>(solved.path->size()) - 1;
    s.visited = static_cast<int>(std::set<RoomCoord>(rooms.begin(), rooms.end()).size());
    s.backtracked = backtrack_count(rooms);
    s.fitness = static_cast<double>(s.visited) / static_cast<double>(s.reachable);
  }
  return s;
}

int decile(int count, int total) noexcept
{
  if (total <= 0) return 0;
  return std::min(9, 10 * count / total);
}

std::array<int, 3> wwr_bin(const DungeonStats& s, const LevelLayout& layout)
{
  const int rooms = layout.segment_count();
  return {decile(s.wall_water.wall_tiles, s.wall_water.region_tiles),
          decile(s.wall_water.water_tiles, s.wall_water.region_tiles), std::clamp(s.reachable - 1, 0, rooms - 1)};
}

std::array<int, 3> distinct_btr_bin(const DungeonStats& s, const LevelLayout& layout, int backtrack_bins)
{
  const int rooms = layout.segment_count();
  return {std::clamp(s.distinct - 1, 0, rooms - 1), std::clamp(s.backtracked, 0, backtrack_bins - 1),
          std::clamp(s.reachable - 1, 0, rooms - 1)};
}

}  // namespace levelgen
