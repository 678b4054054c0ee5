#pragma once

#include "levelgen/game.hpp"

#include <array>
#include <cstddef>
#include <vector>

#include <json.hpp>

namespace levelgen {

/// Number of per-room control values that follow the latent vector in Zelda.
inline constexpr int kZeldaAuxCount = 7;

/// Positions of the Zelda control values after the latent part.
enum ZeldaAux : int {
  kRoomPresence = 0,
  kRightDoorPresence = 1,
  kDownDoorPresence = 2,
  kRightDoorType = 3,
  kDownDoorType = 4,
  kRaftPreference = 5,
  kStartEndPreference = 6,
};

/// Shape of a level in segments. Mario levels are one row of `cols` segments;
/// Zelda dungeons are `rows` x `cols` rooms, indexed row-major.
struct LevelLayout {
  Game game = Game::Mario;
  int rows = 1;
  int cols = 10;
  int latent_size = 30;

  static LevelLayout mario(int segments, int latent_size = 30) { return {Game::Mario, 1, segments, latent_size}; }
  static LevelLayout zelda(int rows, int cols, int latent_size = 10) { return {Game::Zelda, rows, cols, latent_size}; }

  int segment_count() const noexcept { return rows * cols; }
  int aux_size() const noexcept { return game == Game::Zelda ? kZeldaAuxCount : 0; }
  /// Values per segment: Z for Mario, Z + 7 for Zelda.
  int segment_width() const noexcept { return latent_size + aux_size(); }
  std::size_t genome_length() const noexcept
  {
    return static_cast<std::size_t>(segment_count()) * static_cast<std::size_t>(segment_width());
  }
  /// CPPN inputs: x for Mario; x, y, r for Zelda.
  int cppn_inputs() const noexcept { return game == Game::Zelda ? 3 : 1; }

  nlohmann::json to_json() const;
  static LevelLayout from_json(const nlohmann::json& j);

  friend bool operator==(const LevelLayout&, const LevelLayout&) = default;
};

/// Linear map of index 0..count-1 onto [-1, 1]; a single index maps to 0.
double scale_index(int index, int count) noexcept;

/// CPPN inputs for segment `index` (row-major). Mario: {x}. Zelda: {x, y, r}
/// with r = sqrt(x^2 + y^2) / sqrt(2). Throws IndexOutOfRange.
std::vector<double> segment_inputs(const LevelLayout& layout, int index);

}  // namespace levelgen
