#include "levelgen/layout.hpp"

#include "levelgen/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace levelgen {

nlohmann::json LevelLayout::to_json() const
{
  return {{"game", to_string(game)}, {"rows", rows}, {"cols", cols}, {"latent_size", latent_size}};
}

LevelLayout LevelLayout::from_json(const nlohmann::json& j)
{
  LevelLayout l;
  l.game = parse_game(j.at("game").get<std::string>());
  l.rows = j.at("rows").get<int>();
  l.cols = j.at("cols").get<int>();
  l.latent_size = j.at("latent_size").get<int>();
  if (l.rows < 1 || l.cols < 1 || l.latent_size < 1 || (l.game == Game::Mario && l.rows != 1)) {
    throw LayoutMismatch("invalid level layout " + j.dump());
  }
  return l;
}

double scale_index(int index, int count) noexcept
{
  if (count <= 1) return 0.0;
  return 2.0 * static_cast<double>(index) / static_cast<double>(count - 1) - 1.0;
}

std::vector<double> segment_inputs(const LevelLayout& layout, int index)
{
  if (index < 0 || index >= layout.segment_count()) {
    throw IndexOutOfRange("segment index " + std::to_string(index) + " outside layout of " +
                          std::to_string(layout.segment_count()));
  }
  const int row = index / layout.cols;
  const int col = index % layout.cols;
  const double x = scale_index(col, layout.cols);
  if (layout.game == Game::Mario) {
    return {x};
  }
  const double y = scale_index(row, layout.rows);
  const double r = std::sqrt(x * x + y * y) / std::numbers::sqrt2;
  return {x, y, r};
}

}  // namespace levelgen
