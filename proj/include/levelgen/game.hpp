#pragma once

#include <string_view>

namespace levelgen {

enum class Game { Mario, Zelda };

std::string_view to_string(Game game);
Game parse_game(std::string_view text);

}  // namespace levelgen
