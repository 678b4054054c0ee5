#include "levelgen/assembly.hpp"

#include "levelgen/corpus.hpp"
#include "levelgen/errors.hpp"
#include "levelgen/rng.hpp"

#include <algorithm>
#include <bit>
#include <set>

namespace levelgen {

using nlohmann::json;

SegmentGrid MarioLevel::segment(int index) const
{
  if (index < 0 || index >= segments) {
    throw IndexOutOfRange("segment " + std::to_string(index) + " of " + std::to_string(segments));
  }
  return tiles.crop(0, index * kMarioSegmentWidth, kMarioSegmentHeight, kMarioSegmentWidth);
}

void extend_pipes(TileGrid& tiles)
{
  const auto& vocab = TileVocabulary::mario();
  const Channel pipe = vocab.channel_named("pipe");
  // Top-down sweep: a pipe tile copies itself into a non-solid cell below, so
  // each column grows until it meets a solid tile or leaves the grid.
  for (int r = 0; r + 1 < tiles.height(); ++r) {
    for (int c = 0; c < tiles.width(); ++c) {
      if (tiles.at(r, c) == pipe && !vocab.flags(tiles.at(r + 1, c)).solid) {
        tiles.at(r + 1, c) = pipe;
      }
    }
  }
}

MarioLevel assemble_mario(const Genome& genome, const SegmentDecoder& decoder, const LevelLayout& layout)
{
  if (layout.game != Game::Mario) {
    throw LayoutMismatch("assemble_mario needs a Mario layout");
  }
  const auto vectors = express(genome, layout);
  MarioLevel level{TileGrid(kMarioSegmentHeight, kMarioSegmentWidth * layout.segment_count()),
                   layout.segment_count()};
  for (int i = 0; i < layout.segment_count(); ++i) {
    const SegmentGrid seg = decoder.decode(vectors[static_cast<std::size_t>(i)]);
    if (seg.height() != kMarioSegmentHeight || seg.width() != kMarioSegmentWidth) {
      throw ShapeMismatch("decoder produced a " + std::to_string(seg.height()) + "x" + std::to_string(seg.width()) +
                          " Mario segment");
    }
    level.tiles.paste(seg, 0, i * kMarioSegmentWidth);
  }
  extend_pipes(level.tiles);
  return level;
}

std::string render_mario(const MarioLevel& level)
{
  const auto& vocab = TileVocabulary::mario();
  std::string out;
  out.reserve(static_cast<std::size_t>(level.tiles.height() * (level.tiles.width() + 1)));
  for (int r = 0; r < level.tiles.height(); ++r) {
    for (int c = 0; c < level.tiles.width(); ++c) out += vocab.symbol_of(level.tiles.at(r, c));
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Zelda

std::string_view to_string(DoorType type)
{
  switch (type) {
    case DoorType::Plain: return "plain";
    case DoorType::PuzzleLocked: return "puzzle_locked";
    case DoorType::SoftLocked: return "soft_locked";
    case DoorType::Bombable: return "bombable";
    case DoorType::Locked: return "locked";
  }
  return "plain";
}

std::string_view to_string(Direction dir)
{
  switch (dir) {
    case Direction::Right: return "right";
    case Direction::Down: return "down";
    case Direction::Left: return "left";
    case Direction::Up: return "up";
  }
  return "right";
}

DoorType bucket_door(double v)
{
  if (!(v >= -1.0 && v <= 1.0)) {
    throw OutOfRange("door type value " + std::to_string(v) + " outside [-1, 1]");
  }
  if (v <= 0.0) return DoorType::Plain;
  if (v <= 0.25) return DoorType::PuzzleLocked;
  if (v <= 0.5) return DoorType::SoftLocked;
  if (v <= 0.75) return DoorType::Bombable;
  return DoorType::Locked;
}

char door_symbol(DoorType type)
{
  switch (type) {
    case DoorType::Plain: return 'D';
    case DoorType::PuzzleLocked: return 'P';
    case DoorType::SoftLocked: return 'S';
    case DoorType::Bombable: return 'B';
    case DoorType::Locked: return 'L';
  }
  return 'D';
}

bool Dungeon::present(RoomCoord r) const
{
  if (r.row < 0 || r.col < 0 || r.row >= layout.rows || r.col >= layout.cols) return false;
  return rooms[static_cast<std::size_t>(room_index(r))].has_value();
}

RoomCoord Dungeon::room_of(TilePos t) const noexcept
{
  return {t.row / kZeldaRoomHeight, t.col / kZeldaRoomWidth};
}

std::optional<DoorType> Dungeon::door(RoomCoord room, Direction dir) const
{
  RoomCoord origin = room;
  Direction stored = dir;
  if (dir == Direction::Left) {
    origin = {room.row, room.col - 1};
    stored = Direction::Right;
  } else if (dir == Direction::Up) {
    origin = {room.row - 1, room.col};
    stored = Direction::Down;
  }
  for (const auto& d : doors) {
    if (d.room == origin && d.dir == stored) return d.type;
  }
  return std::nullopt;
}

std::vector<TilePos> Dungeon::door_tiles(const Door& d) const
{
  const int r0 = d.room.row * kZeldaRoomHeight;
  const int c0 = d.room.col * kZeldaRoomWidth;
  if (d.dir == Direction::Right) {
    const int r = r0 + kZeldaDoorRow;
    return {{r, c0 + kZeldaRoomWidth - 2}, {r, c0 + kZeldaRoomWidth - 1}, {r, c0 + kZeldaRoomWidth},
            {r, c0 + kZeldaRoomWidth + 1}};
  }
  const int c = c0 + kZeldaDoorCol;
  return {{r0 + kZeldaRoomHeight - 2, c}, {r0 + kZeldaRoomHeight - 1, c}, {r0 + kZeldaRoomHeight, c},
          {r0 + kZeldaRoomHeight + 1, c}};
}

int Dungeon::locked_door_count() const
{
  return static_cast<int>(std::count_if(doors.begin(), doors.end(),
                                        [](const Door& d) { return d.type == DoorType::Locked; }));
}

namespace {

std::uint64_t room_seed(double value, RoomCoord room, std::uint64_t salt)
{
  const auto bits = std::bit_cast<std::uint64_t>(value);
  return mix_seed(mix_seed(bits, salt), (static_cast<std::uint64_t>(room.row) << 32) |
                                            static_cast<std::uint32_t>(room.col));
}

class Placer {
public:
  Placer(const Dungeon& d, Channel floor) : d_(d), floor_(floor) {}

  void occupy(TilePos t) { used_.insert(t); }

  std::vector<TilePos> free_floor(RoomCoord room) const
  {
    std::vector<TilePos> out;
    const int r0 = room.row * kZeldaRoomHeight, c0 = room.col * kZeldaRoomWidth;
    for (int r = r0; r < r0 + kZeldaRoomHeight; ++r) {
      for (int c = c0; c < c0 + kZeldaRoomWidth; ++c) {
        if (d_.tiles.at(r, c) == floor_ && !used_.contains(TilePos{r, c})) out.push_back({r, c});
      }
    }
    return out;
  }

  std::vector<TilePos> free_floor_everywhere() const
  {
    std::vector<TilePos> out;
    for (int i = 0; i < d_.layout.segment_count(); ++i) {
      const RoomCoord room{i / d_.layout.cols, i % d_.layout.cols};
      if (!d_.present(room)) continue;
      auto part = free_floor(room);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }

  std::optional<TilePos> pick(const std::vector<TilePos>& candidates, std::uint64_t seed)
  {
    if (candidates.empty()) return std::nullopt;
    Rng rng(seed);
    const TilePos t = candidates[rng.index(candidates.size())];
    occupy(t);
    return t;
  }

  /// Floor tile closest to the room centre (5, 7.5); ties go to row-major order.
  std::optional<TilePos> nearest_centre(RoomCoord room)
  {
    const auto candidates = free_floor(room);
    std::optional<TilePos> best;
    int best_d = 0;
    for (const auto& t : candidates) {
      const int dr = 2 * (t.row - room.row * kZeldaRoomHeight) - (kZeldaRoomHeight - 1);
      const int dc = 2 * (t.col - room.col * kZeldaRoomWidth) - (kZeldaRoomWidth - 1);
      const int dist = dr * dr + dc * dc;
      if (!best || dist < best_d) {
        best = t;
        best_d = dist;
      }
    }
    if (best) occupy(*best);
    return best;
  }

private:
  const Dungeon& d_;
  Channel floor_;
  std::set<TilePos> used_;
};

}  // namespace

Dungeon assemble_zelda_rooms(const LevelLayout& layout, const std::vector<SegmentGrid>& decoded,
                             const std::vector<std::vector<double>>& aux)
{
  const auto n = static_cast<std::size_t>(layout.segment_count());
  if (decoded.size() != n || aux.size() != n) {
    throw LayoutMismatch("dungeon needs one decoded room and one control vector per grid cell");
  }
  const auto& vocab = TileVocabulary::zelda();
  const Channel floor = vocab.channel_named("floor");
  const Channel wall = vocab.channel_named("wall");

  Dungeon d;
  d.layout = layout;
  d.rooms.resize(n);
  d.tiles = TileGrid(layout.rows * kZeldaRoomHeight, layout.cols * kZeldaRoomWidth, wall);
  for (std::size_t i = 0; i < n; ++i) {
    if (aux[i].size() != static_cast<std::size_t>(kZeldaAuxCount)) {
      throw LayoutMismatch("room control vector must hold 7 values");
    }
    if (aux[i][kRoomPresence] <= 0.0) continue;
    if (decoded[i].height() != kZeldaRoomHeight || decoded[i].width() != kZeldaRoomWidth) {
      throw ShapeMismatch("decoded Zelda room must be 11x16");
    }
    d.rooms[i] = decoded[i];
    d.tiles.paste(decoded[i], static_cast<int>(i) / layout.cols * kZeldaRoomHeight,
                  static_cast<int>(i) % layout.cols * kZeldaRoomWidth);
  }
  if (std::none_of(d.rooms.begin(), d.rooms.end(), [](const auto& r) { return r.has_value(); })) {
    throw NoRoomsPresent("every room-presence value is <= 0");
  }

  auto at = [&](RoomCoord r) -> const std::vector<double>& {
    return aux[static_cast<std::size_t>(d.room_index(r))];
  };
  for (int row = 0; row < layout.rows; ++row) {
    for (int col = 0; col < layout.cols; ++col) {
      const RoomCoord room{row, col};
      if (!d.present(room)) continue;
      if (d.present({row, col + 1}) && at(room)[kRightDoorPresence] > 0.0) {
        d.doors.push_back({room, Direction::Right, bucket_door(at(room)[kRightDoorType])});
      }
      if (d.present({row + 1, col}) && at(room)[kDownDoorPresence] > 0.0) {
        d.doors.push_back({room, Direction::Down, bucket_door(at(room)[kDownDoorType])});
      }
    }
  }
  for (const auto& door : d.doors) {
    for (const auto& t : d.door_tiles(door)) d.tiles.at(t.row, t.col) = floor;
  }

  // Start: smallest start/end preference; goal: largest among the others.
  std::optional<RoomCoord> start, goal;
  for (int i = 0; i < layout.segment_count(); ++i) {
    const RoomCoord room{i / layout.cols, i % layout.cols};
    if (d.present(room) && (!start || at(room)[kStartEndPreference] < at(*start)[kStartEndPreference])) {
      start = room;
    }
  }
  for (int i = 0; i < layout.segment_count(); ++i) {
    const RoomCoord room{i / layout.cols, i % layout.cols};
    if (d.present(room) && room != *start &&
        (!goal || at(room)[kStartEndPreference] > at(*goal)[kStartEndPreference])) {
      goal = room;
    }
  }
  d.start = *start;
  d.goal = goal.value_or(*start);

  Placer placer(d, floor);
  d.triforce = placer.nearest_centre(d.goal);
  d.start_tile = placer.nearest_centre(d.start);

  for (const auto& door : d.doors) {
    const double type_value = at(door.room)[door.dir == Direction::Right ? kRightDoorType : kDownDoorType];
    const auto salt = static_cast<std::uint64_t>(door.dir);
    if (door.type == DoorType::Locked) {
      if (auto t = placer.pick(placer.free_floor_everywhere(), room_seed(type_value, door.room, 0x4B45ULL + salt))) {
        d.keys.push_back(*t);
      }
    } else if (door.type == DoorType::PuzzleLocked) {
      if (auto t = placer.pick(placer.free_floor(door.room), room_seed(type_value, door.room, 0x50ULL + salt))) {
        d.puzzle_blocks.push_back({*t, door.dir});
      }
    }
  }

  std::optional<RoomCoord> raft_room;
  for (int i = 0; i < layout.segment_count(); ++i) {
    const RoomCoord room{i / layout.cols, i % layout.cols};
    if (d.present(room) && (!raft_room || at(room)[kRaftPreference] > at(*raft_room)[kRaftPreference])) {
      raft_room = room;
    }
  }
  d.raft = placer.pick(placer.free_floor(*raft_room), room_seed(at(*raft_room)[kRaftPreference], *raft_room, 0x52ULL));

  for (int i = 0; i < layout.segment_count(); ++i) {
    const RoomCoord room{i / layout.cols, i % layout.cols};
    if (!d.present(room)) continue;
    Rng rng(mix_seed(0xE4E3ULL, static_cast<std::uint64_t>(i)));
    const auto count = rng.below(3);
    for (std::uint64_t k = 0; k < count; ++k) {
      if (auto t = placer.pick(placer.free_floor(room), rng.next_u64())) d.enemies.push_back(*t);
    }
  }
  return d;
}

Dungeon assemble_zelda(const Genome& genome, const SegmentDecoder& decoder, const LevelLayout& layout)
{
  if (layout.game != Game::Zelda) {
    throw LayoutMismatch("assemble_zelda needs a Zelda layout");
  }
  const auto vectors = express(genome, layout);
  const auto z = static_cast<std::ptrdiff_t>(layout.latent_size);
  std::vector<SegmentGrid> decoded(vectors.size());
  std::vector<std::vector<double>> aux(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    aux[i].assign(vectors[i].begin() + z, vectors[i].end());
    if (aux[i][kRoomPresence] > 0.0) {
      decoded[i] = decoder.decode(std::span<const double>(vectors[i]).first(static_cast<std::size_t>(z)));
    }
  }
  return assemble_zelda_rooms(layout, decoded, aux);
}

std::string render_zelda(const Dungeon& d)
{
  const auto& vocab = TileVocabulary::zelda();
  const Channel wall = vocab.channel_named("wall");
  const Channel water = vocab.channel_named("water");
  std::vector<std::string> rows(static_cast<std::size_t>(d.tiles.height()),
                                std::string(static_cast<std::size_t>(d.tiles.width()), ' '));
  for (int r = 0; r < d.tiles.height(); ++r) {
    for (int c = 0; c < d.tiles.width(); ++c) {
      if (!d.present(d.room_of({r, c}))) continue;
      const Channel ch = d.tiles.at(r, c);
      rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = ch == wall ? '#' : ch == water ? '~' : '.';
    }
  }
  auto put = [&](TilePos t, char ch) { rows[static_cast<std::size_t>(t.row)][static_cast<std::size_t>(t.col)] = ch; };
  for (const auto& door : d.doors) {
    for (const auto& t : d.door_tiles(door)) put(t, door_symbol(door.type));
  }
  for (const auto& t : d.enemies) put(t, 'e');
  for (const auto& b : d.puzzle_blocks) put(b.tile, '*');
  for (const auto& t : d.keys) put(t, 'K');
  if (d.raft) put(*d.raft, 'R');
  if (d.start_tile) put(*d.start_tile, 'S');
  if (d.triforce) put(*d.triforce, 'T');
  std::string out;
  for (const auto& row : rows) out += row + '\n';
  return out;
}

namespace {

json pos_json(TilePos t) { return json::array({t.row, t.col}); }

std::vector<std::string> grid_lines(const TileGrid& g, const TileVocabulary& vocab)
{
  std::vector<std::string> lines;
  for (int r = 0; r < g.height(); ++r) {
    std::string line;
    for (int c = 0; c < g.width(); ++c) line += vocab.symbol_of(g.at(r, c));
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace

json to_json(const MarioLevel& level)
{
  return {{"game", "mario"}, {"segments", level.segments}, {"tiles", grid_lines(level.tiles, TileVocabulary::mario())}};
}

json to_json(const Dungeon& d)
{
  json j = {{"game", "zelda"}, {"layout", d.layout.to_json()}};
  json present = json::array();
  for (const auto& r : d.rooms) present.push_back(r.has_value());
  j["present"] = present;
  j["tiles"] = grid_lines(d.tiles, TileVocabulary::zelda());
  json doors = json::array();
  for (const auto& door : d.doors) {
    doors.push_back({{"room", {door.room.row, door.room.col}}, {"dir", to_string(door.dir)}, {"type", to_string(door.type)}});
  }
  j["doors"] = doors;
  json keys = json::array();
  for (const auto& k : d.keys) keys.push_back(pos_json(k));
  j["keys"] = keys;
  json blocks = json::array();
  for (const auto& b : d.puzzle_blocks) blocks.push_back({{"tile", pos_json(b.tile)}, {"push", to_string(b.push)}});
  j["puzzle_blocks"] = blocks;
  j["raft"] = d.raft ? pos_json(*d.raft) : json(nullptr);
  j["start_room"] = {d.start.row, d.start.col};
  j["goal_room"] = {d.goal.row, d.goal.col};
  j["start_tile"] = d.start_tile ? pos_json(*d.start_tile) : json(nullptr);
  j["triforce"] = d.triforce ? pos_json(*d.triforce) : json(nullptr);
  json enemies = json::array();
  for (const auto& e : d.enemies) enemies.push_back(pos_json(e));
  j["enemies"] = enemies;
  return j;
}

}  // namespace levelgen
