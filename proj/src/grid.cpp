#include "levelgen/grid.hpp"

namespace levelgen {

TileGrid TileGrid::crop(int row, int col, int height, int width) const
{
  if (row < 0 || col < 0 || height < 0 || width < 0 || row + height > height_ ||
      col + width > width_) {
    throw std::out_of_range("TileGrid::crop: region outside grid");
  }
  TileGrid out(height, width);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      out.at(r, c) = at(row + r, col + c);
    }
  }
  return out;
}

void TileGrid::paste(const TileGrid& src, int row, int col)
{
  if (row < 0 || col < 0 || row + src.height() > height_ || col + src.width() > width_) {
    throw std::out_of_range("TileGrid::paste: region outside grid");
  }
  for (int r = 0; r < src.height(); ++r) {
    for (int c = 0; c < src.width(); ++c) {
      at(row + r, col + c) = src.at(r, c);
    }
  }
}

std::uint64_t TileGrid::digest() const noexcept
{
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto feed = [&h](std::uint64_t byte) {
    h ^= byte;
    h *= 0x100000001B3ULL;
  };
  for (int shift = 0; shift < 32; shift += 8) {
    feed((static_cast<std::uint32_t>(height_) >> shift) & 0xFF);
    feed((static_cast<std::uint32_t>(width_) >> shift) & 0xFF);
  }
  for (Channel c : cells_) {
    feed(c);
  }
  return h;
}

}  // namespace levelgen
