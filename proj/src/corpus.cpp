#include "levelgen/corpus.hpp"

#include "levelgen/errors.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

namespace levelgen {

namespace detail {
extern const char* const kMarioVocabJson;
extern const char* const kZeldaVocabJson;
}  // namespace detail

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Game game)
{
  return game == Game::Mario ? "mario" : "zelda";
}

Game parse_game(std::string_view text)
{
  if (text == "mario") return Game::Mario;
  if (text == "zelda") return Game::Zelda;
  throw ConfigError("unknown game '" + std::string(text) + "' (expected mario or zelda)");
}

namespace {

TileFlags flags_from_json(const json& j)
{
  TileFlags f;
  f.solid = j.value("solid", false);
  f.decoration = j.value("decoration", false);
  f.standable = j.value("standable", false);
  f.leniency = j.value("leniency", 0.0);
  return f;
}

char single_symbol(const json& j)
{
  const auto s = j.at("symbol").get<std::string>();
  if (s.size() != 1) {
    throw BadVocabulary("vocabulary symbol must be one character, got '" + s + "'");
  }
  return s[0];
}

}  // namespace

TileVocabulary TileVocabulary::from_json_text(std::string_view text)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw BadVocabulary(std::string("vocabulary is not valid JSON: ") + e.what());
  }

  TileVocabulary v;
  v.game_ = parse_game(doc.at("game").get<std::string>());
  v.lookup_.fill(-1);

  const auto& channels = doc.at("channels");
  const std::size_t k = channels.size();
  v.canonical_.assign(k, '\0');
  v.names_.assign(k, "");
  v.flags_.assign(k, TileFlags{});
  std::vector<bool> seen(k, false);

  auto add_entry = [&v](char symbol, Channel channel, const TileFlags& flags) {
    auto& slot = v.lookup_[static_cast<unsigned char>(symbol)];
    if (slot != -1) {
      throw BadVocabulary(std::string("duplicate vocabulary symbol '") + symbol + "'");
    }
    slot = channel;
    v.entries_.push_back(TileEntry{symbol, channel, flags});
  };

  for (const auto& c : channels) {
    const int idx = c.at("channel").get<int>();
    if (idx < 0 || static_cast<std::size_t>(idx) >= k || seen[static_cast<std::size_t>(idx)]) {
      throw BadVocabulary("vocabulary channels must be 0..K-1 without gaps or repeats");
    }
    const auto ch = static_cast<std::size_t>(idx);
    seen[ch] = true;
    v.canonical_[ch] = single_symbol(c);
    v.names_[ch] = c.at("name").get<std::string>();
    v.flags_[ch] = flags_from_json(c);
    add_entry(v.canonical_[ch], static_cast<Channel>(idx), v.flags_[ch]);
  }
  if (doc.contains("aliases")) {
    for (const auto& a : doc.at("aliases")) {
      const int idx = a.at("channel").get<int>();
      if (idx < 0 || static_cast<std::size_t>(idx) >= k) {
        throw BadVocabulary("alias refers to unknown channel " + std::to_string(idx));
      }
      add_entry(single_symbol(a), static_cast<Channel>(idx), v.flags_[static_cast<std::size_t>(idx)]);
    }
  }

  const int expected = v.game_ == Game::Mario ? kMarioChannels : kZeldaChannels;
  if (static_cast<int>(k) != expected) {
    throw BadVocabulary(std::string(to_string(v.game_)) + " vocabulary must have " +
                        std::to_string(expected) + " channels, found " + std::to_string(k));
  }
  return v;
}

TileVocabulary TileVocabulary::load(const fs::path& path)
{
  return from_json_text(read_text_file(path));
}

const TileVocabulary& TileVocabulary::mario()
{
  static const TileVocabulary v = from_json_text(detail::kMarioVocabJson);
  return v;
}

const TileVocabulary& TileVocabulary::zelda()
{
  static const TileVocabulary v = from_json_text(detail::kZeldaVocabJson);
  return v;
}

const TileVocabulary& TileVocabulary::for_game(Game game)
{
  return game == Game::Mario ? mario() : zelda();
}

std::optional<Channel> TileVocabulary::channel_of(char symbol) const noexcept
{
  const int c = lookup_[static_cast<unsigned char>(symbol)];
  if (c < 0) return std::nullopt;
  return static_cast<Channel>(c);
}

Channel TileVocabulary::channel_named(std::string_view name) const
{
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<Channel>(i);
  }
  throw BadVocabulary("vocabulary has no channel named '" + std::string(name) + "'");
}

std::vector<std::string> read_level_lines(const fs::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open level file " + path.string());
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) {
    lines.pop_back();
  }
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].size() != lines[0].size()) {
      throw RaggedFile(path.string() + ": row " + std::to_string(r) + " has length " +
                       std::to_string(lines[r].size()) + ", expected " +
                       std::to_string(lines[0].size()));
    }
  }
  return lines;
}

TileGrid parse_level_lines(const std::vector<std::string>& lines, const TileVocabulary& vocab)
{
  const int height = static_cast<int>(lines.size());
  const int width = height == 0 ? 0 : static_cast<int>(lines[0].size());
  TileGrid grid(height, width);
  for (int r = 0; r < height; ++r) {
    const auto& line = lines[static_cast<std::size_t>(r)];
    if (static_cast<int>(line.size()) != width) {
      throw RaggedFile("row " + std::to_string(r) + " has length " + std::to_string(line.size()) +
                       ", expected " + std::to_string(width));
    }
    for (int c = 0; c < width; ++c) {
      const char ch = line[static_cast<std::size_t>(c)];
      const auto channel = vocab.channel_of(ch);
      if (!channel) {
        throw UnknownSymbol(std::string("unknown tile symbol '") + ch + "' at row " +
                            std::to_string(r) + ", col " + std::to_string(c));
      }
      grid.at(r, c) = *channel;
    }
  }
  return grid;
}

TileGrid parse_level_file(const fs::path& path, const TileVocabulary& vocab)
{
  return parse_level_lines(read_level_lines(path), vocab);
}

std::vector<TrainingSample> mario_windows(const TileGrid& level)
{
  if (level.height() < kMarioSegmentHeight || level.width() < kMarioSegmentWidth) {
    throw LevelTooSmall("Mario level must be at least 28x14, got " + std::to_string(level.width()) +
                        "x" + std::to_string(level.height()));
  }
  const int top = level.height() - kMarioSegmentHeight;
  std::vector<TrainingSample> out;
  out.reserve(static_cast<std::size_t>(level.width() - kMarioSegmentWidth + 1));
  for (int c = 0; c + kMarioSegmentWidth <= level.width(); ++c) {
    out.push_back({level.crop(top, c, kMarioSegmentHeight, kMarioSegmentWidth)});
  }
  return out;
}

std::vector<TrainingSample> zelda_unique_rooms(const std::vector<std::vector<std::string>>& dungeons,
                                               const TileVocabulary& vocab)
{
  std::vector<TrainingSample> out;
  std::set<TileGrid> seen;
  for (std::size_t d = 0; d < dungeons.size(); ++d) {
    const auto& lines = dungeons[d];
    const std::size_t height = lines.size();
    const std::size_t width = height == 0 ? 0 : lines[0].size();
    if (height % kZeldaRoomHeight != 0 || width % kZeldaRoomWidth != 0) {
      throw MisalignedDungeon("dungeon " + std::to_string(d) + " is " + std::to_string(width) + "x" +
                              std::to_string(height) + ", not a multiple of 16x11 rooms");
    }
    for (const auto& l : lines) {
      if (l.size() != width) {
        throw MisalignedDungeon("dungeon " + std::to_string(d) + " has ragged rows");
      }
    }
    for (std::size_t rr = 0; rr < height / kZeldaRoomHeight; ++rr) {
      for (std::size_t rc = 0; rc < width / kZeldaRoomWidth; ++rc) {
        std::vector<std::string> cell;
        bool all_void = true;
        for (std::size_t r = 0; r < kZeldaRoomHeight; ++r) {
          cell.push_back(lines[rr * kZeldaRoomHeight + r].substr(rc * kZeldaRoomWidth, kZeldaRoomWidth));
          all_void = all_void && std::all_of(cell.back().begin(), cell.back().end(),
                                             [](char ch) { return ch == '-'; });
        }
        if (all_void) continue;
        TileGrid room = parse_level_lines(cell, vocab);
        if (seen.insert(room).second) {
          out.push_back({std::move(room)});
        }
      }
    }
  }
  return out;
}

Tensor one_hot(const std::vector<TrainingSample>& samples, int channels)
{
  if (samples.empty()) {
    throw ShapeMismatch("one_hot: no samples");
  }
  const int h = samples[0].grid.height();
  const int w = samples[0].grid.width();
  Tensor t;
  t.shape = {samples.size(), static_cast<std::size_t>(channels), static_cast<std::size_t>(h),
             static_cast<std::size_t>(w)};
  t.data.assign(t.element_count(), 0.0f);
  const std::size_t plane = static_cast<std::size_t>(h) * static_cast<std::size_t>(w);
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const auto& g = samples[n].grid;
    if (g.height() != h || g.width() != w) {
      throw ShapeMismatch("one_hot: sample " + std::to_string(n) + " has a different shape");
    }
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const Channel ch = g.at(r, c);
        if (ch >= channels) {
          throw ShapeMismatch("one_hot: channel index out of range");
        }
        const std::size_t idx = (n * static_cast<std::size_t>(channels) + ch) * plane +
                                static_cast<std::size_t>(r * w + c);
        t.data[idx] = 1.0f;
      }
    }
  }
  return t;
}

TileGrid argmax_decode(const Tensor& t, std::size_t n)
{
  if (t.shape.size() != 4 || n >= t.shape[0]) {
    throw ShapeMismatch("argmax_decode: expected (N,K,H,W) tensor and valid sample index");
  }
  const std::size_t k = t.shape[1];
  const int h = static_cast<int>(t.shape[2]);
  const int w = static_cast<int>(t.shape[3]);
  const std::size_t plane = static_cast<std::size_t>(h) * static_cast<std::size_t>(w);
  TileGrid grid(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      std::size_t best = 0;
      for (std::size_t ch = 1; ch < k; ++ch) {
        const std::size_t cell = static_cast<std::size_t>(r * w + c);
        if (t.data[(n * k + ch) * plane + cell] > t.data[(n * k + best) * plane + cell]) {
          best = ch;
        }
      }
      grid.at(r, c) = static_cast<Channel>(best);
    }
  }
  return grid;
}

void export_one_hot(const std::vector<TrainingSample>& samples, int channels, const fs::path& header_path)
{
  write_tensor(header_path, one_hot(samples, channels));
}

void write_corpus_manifest(const fs::path& path, Game game, std::size_t sample_count,
                           const std::vector<std::string>& sources, const std::string& tensor_file)
{
  json m = {
      {"game", to_string(game)},
      {"samples", sample_count},
      {"sources", sources},
      {"tensor", tensor_file},
  };
  write_text_file(path, m.dump(2) + "\n");
}

}  // namespace levelgen
