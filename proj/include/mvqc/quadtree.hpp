#pragma once

#include <string_view>
#include <vector>

#include "mvqc/image.hpp"

namespace mvqc {

/// Tile numbering. ZOrder follows recursive quadrant subdivision, visiting
/// top-left, top-right, bottom-left, bottom-right at every level.
enum class TileOrder { ZOrder, RowMajor };

std::string_view to_string(TileOrder order);
TileOrder parse_tile_order(std::string_view text);

/// Pixel origin of a tile.
struct TilePosition {
  int row = 0;
  int col = 0;

  bool operator==(const TilePosition&) const = default;
};

/// L = (side / d1)^2. Throws unless d1 divides side and side / d1 is a power
/// of two.
int tile_count(int side, int d1);

/// Origin of tile `index` (1-based).
TilePosition index_to_position(int index, int side, int d1, TileOrder order = TileOrder::ZOrder);

/// Inverse of index_to_position.
int position_to_index(TilePosition pos, int side, int d1, TileOrder order = TileOrder::ZOrder);

/// Uniform region quadtree cut at depth log2(side / d1).
class TileGrid {
 public:
  TileGrid(int side, int d1, TileOrder order, std::vector<BinaryImage> tiles);

  int side() const noexcept { return side_; }
  int d1() const noexcept { return d1_; }
  int trie_level() const noexcept { return side_ / d1_; }
  int count() const noexcept { return static_cast<int>(tiles_.size()); }
  TileOrder order() const noexcept { return order_; }

  /// 1-based, matching the tile numbering.
  const BinaryImage& tile(int index) const;
  const std::vector<BinaryImage>& tiles() const noexcept { return tiles_; }

 private:
  int side_;
  int d1_;
  TileOrder order_;
  std::vector<BinaryImage> tiles_;
};

/// Splits a square mask into (side / d1)^2 tiles of d1 x d1 pixels.
TileGrid decompose(const BinaryImage& img, int d1, TileOrder order = TileOrder::ZOrder);

BinaryImage reassemble(const TileGrid& grid);

}  // namespace mvqc
