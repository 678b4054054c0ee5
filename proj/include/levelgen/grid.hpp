#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace levelgen {

using Channel = std::uint8_t;

/// Row-major 2D grid of tile channel indices.
class TileGrid {
public:
  TileGrid() = default;
  TileGrid(int height, int width, Channel fill = 0)
      : height_(height), width_(width),
        cells_(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill)
  {
    if (height < 0 || width < 0) {
      throw std::invalid_argument("TileGrid: negative dimension");
    }
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return cells_.size(); }

  bool contains(int row, int col) const noexcept
  {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }

  Channel at(int row, int col) const { return cells_[offset(row, col)]; }
  Channel& at(int row, int col) { return cells_[offset(row, col)]; }

  std::span<const Channel> cells() const noexcept { return cells_; }
  std::span<Channel> cells() noexcept { return cells_; }

  /// Copy of the sub-rectangle starting at (row, col).
  TileGrid crop(int row, int col, int height, int width) const;

  /// Writes `src` with its upper-left corner at (row, col).
  void paste(const TileGrid& src, int row, int col);

  /// 64-bit FNV-1a digest over dimensions and cells.
  std::uint64_t digest() const noexcept;

  friend bool operator==(const TileGrid&, const TileGrid&) = default;
  friend auto operator<=>(const TileGrid& a, const TileGrid& b)
  {
    if (auto c = a.height_ <=> b.height_; c != 0) return c;
    if (auto c = a.width_ <=> b.width_; c != 0) return c;
    return a.cells_ <=> b.cells_;
  }

private:
  std::size_t offset(int row, int col) const
  {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<Channel> cells_;
};

/// One decoded level segment (Mario screen or Zelda room).
using SegmentGrid = TileGrid;

}  // namespace levelgen
