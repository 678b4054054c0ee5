#pragma once

#include "levelgen/decoder.hpp"
#include "levelgen/genome.hpp"
#include "levelgen/grid.hpp"
#include "levelgen/layout.hpp"

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace levelgen {

// ---------------------------------------------------------------------------
// Mario

struct MarioLevel {
  TileGrid tiles;  // 14 x 28*S
  int segments = 0;

  /// Segment i of the assembled level (after pipe extension).
  SegmentGrid segment(int index) const;
};

/// Extends every pipe tile downward through non-solid tiles until a solid
/// tile or the bottom row.
void extend_pipes(TileGrid& tiles);

MarioLevel assemble_mario(const Genome& genome, const SegmentDecoder& decoder, const LevelLayout& layout);

/// One line per row, canonical vocabulary symbols.
std::string render_mario(const MarioLevel& level);

// ---------------------------------------------------------------------------
// Zelda

enum class DoorType { Plain, PuzzleLocked, SoftLocked, Bombable, Locked };
enum class Direction { Right, Down, Left, Up };

std::string_view to_string(DoorType type);
std::string_view to_string(Direction dir);

/// [-1,0] plain, (0,.25] puzzle, (.25,.5] soft, (.5,.75] bombable, (.75,1] locked.
/// Throws OutOfRange outside [-1, 1].
DoorType bucket_door(double value);

struct RoomCoord {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const RoomCoord&, const RoomCoord&) = default;
};

/// Tile position in dungeon-global coordinates (room row * 11 + tile row, ...).
struct TilePos {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const TilePos&, const TilePos&) = default;
};

/// Door from `room` to its right or lower neighbour; implies the mirrored door.
struct Door {
  RoomCoord room;
  Direction dir = Direction::Right;
  DoorType type = DoorType::Plain;
};

struct PuzzleBlock {
  TilePos tile;
  Direction push = Direction::Right;
};

struct Dungeon {
  LevelLayout layout;
  std::vector<std::optional<SegmentGrid>> rooms;  // decoded rooms before carving, row-major
  TileGrid tiles;                                 // carved global grid; absent rooms are wall
  std::vector<Door> doors;
  std::vector<TilePos> keys;
  std::vector<PuzzleBlock> puzzle_blocks;
  std::optional<TilePos> raft;
  RoomCoord start;
  RoomCoord goal;
  std::optional<TilePos> start_tile;
  std::optional<TilePos> triforce;
  std::vector<TilePos> enemies;

  bool present(RoomCoord r) const;
  RoomCoord room_of(TilePos t) const noexcept;
  int room_index(RoomCoord r) const noexcept { return r.row * layout.cols + r.col; }
  /// Door leaving `room` towards `dir`, mirrored doors included.
  std::optional<DoorType> door(RoomCoord room, Direction dir) const;
  /// The two door tiles on each side of the shared wall (4 tiles).
  std::vector<TilePos> door_tiles(const Door& d) const;
  int locked_door_count() const;
};

/// Door tile rows/columns inside a room: right/left doors sit on row 5,
/// down/up doors on column 8, each two tiles deep.
inline constexpr int kZeldaInteriorTop = 2;
inline constexpr int kZeldaInteriorLeft = 2;
inline constexpr int kZeldaInteriorHeight = 7;
inline constexpr int kZeldaInteriorWidth = 12;

Dungeon assemble_zelda(const Genome& genome, const SegmentDecoder& decoder, const LevelLayout& layout);

/// Builds a dungeon from already decoded rooms plus per-room control values.
/// `aux[i]` holds the seven control values of room i (row-major).
Dungeon assemble_zelda_rooms(const LevelLayout& layout, const std::vector<SegmentGrid>& decoded,
                             const std::vector<std::vector<double>>& aux);

/// Text render: floor '.', wall '#', water '~', absent room ' ', doors D/L/S/B/P,
/// key K, raft R, Triforce T, start S, puzzle block '*', enemy 'e'.
std::string render_zelda(const Dungeon& dungeon);

char door_symbol(DoorType type);

nlohmann::json to_json(const MarioLevel& level);
nlohmann::json to_json(const Dungeon& dungeon);

}  // namespace levelgen
