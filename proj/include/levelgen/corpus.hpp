#pragma once

#include "levelgen/game.hpp"
#include "levelgen/grid.hpp"
#include "levelgen/tensor_io.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace levelgen {

struct TileFlags {
  bool solid = false;
  bool decoration = false;
  bool standable = false;
  double leniency = 0.0;
};

struct TileEntry {
  char symbol = '-';
  Channel channel = 0;
  TileFlags flags;
};

/// Symbol <-> channel table for one game. Every channel has one canonical
/// symbol; alias symbols may map onto an existing channel.
class TileVocabulary {
public:
  static constexpr int kMarioChannels = 13;
  static constexpr int kZeldaChannels = 3;

  /// Parses the JSON vocabulary format (see data/*_vocab.json).
  static TileVocabulary from_json_text(std::string_view text);
  static TileVocabulary load(const std::filesystem::path& path);

  /// Vocabularies compiled in from the checked-in data files.
  static const TileVocabulary& mario();
  static const TileVocabulary& zelda();
  static const TileVocabulary& for_game(Game game);

  Game game() const noexcept { return game_; }
  int channel_count() const noexcept { return static_cast<int>(names_.size()); }
  const std::vector<TileEntry>& entries() const noexcept { return entries_; }

  std::optional<Channel> channel_of(char symbol) const noexcept;
  Channel channel_named(std::string_view name) const;
  char symbol_of(Channel channel) const { return canonical_.at(channel); }
  const std::string& name_of(Channel channel) const { return names_.at(channel); }
  const TileFlags& flags(Channel channel) const { return flags_.at(channel); }

private:
  Game game_ = Game::Mario;
  std::vector<TileEntry> entries_;
  std::vector<char> canonical_;
  std::vector<std::string> names_;
  std::vector<TileFlags> flags_;
  std::array<int, 256> lookup_{};
};

struct TrainingSample {
  TileGrid grid;
};

inline constexpr int kMarioSegmentWidth = 28;
inline constexpr int kMarioSegmentHeight = 14;
inline constexpr int kZeldaRoomWidth = 16;
inline constexpr int kZeldaRoomHeight = 11;

/// Raw character rows of an ASCII level file. Trailing '\r' is stripped and a
/// final empty line is ignored. Throws RaggedFile on unequal line lengths.
std::vector<std::string> read_level_lines(const std::filesystem::path& path);

/// Maps character rows through the vocabulary.
TileGrid parse_level_lines(const std::vector<std::string>& lines, const TileVocabulary& vocab);
TileGrid parse_level_file(const std::filesystem::path& path, const TileVocabulary& vocab);

/// Sliding 28x14 windows, one column apart, over the bottom 14 rows.
std::vector<TrainingSample> mario_windows(const TileGrid& level);

/// Splits raw dungeon character grids into 16x11 rooms, reduces them through
/// the Zelda vocabulary (doors become walls) and keeps first occurrences only.
/// Cells consisting solely of void '-' are not rooms.
std::vector<TrainingSample> zelda_unique_rooms(const std::vector<std::vector<std::string>>& dungeons,
                                               const TileVocabulary& vocab = TileVocabulary::zelda());

/// One-hot (N, K, H, W) tensor of the samples.
Tensor one_hot(const std::vector<TrainingSample>& samples, int channels);

/// Per-cell argmax of a (K, H, W) slice at sample index n. Ties go to the lowest channel.
TileGrid argmax_decode(const Tensor& one_hot, std::size_t n);

/// Writes the one-hot tensor to `header_path` (plus payload).
void export_one_hot(const std::vector<TrainingSample>& samples, int channels,
                    const std::filesystem::path& header_path);

/// Sample-count manifest that accompanies a corpus export.
void write_corpus_manifest(const std::filesystem::path& path, Game game, std::size_t sample_count,
                           const std::vector<std::string>& sources, const std::string& tensor_file);

}  // namespace levelgen
