#include "mvqc/quadtree.hpp"

#include <bit>

namespace mvqc {

std::string_view to_string(TileOrder order) {
  return order == TileOrder::ZOrder ? "zorder" : "rowmajor";
}

TileOrder parse_tile_order(std::string_view text) {
  if (text == "zorder") return TileOrder::ZOrder;
  if (text == "rowmajor") return TileOrder::RowMajor;
  throw Error("unknown tile order '" + std::string(text) + "' (expected zorder or rowmajor)");
}

int tile_count(int side, int d1) {
  if (d1 < 1 || side < 1 || side % d1 != 0)
    throw Error("d1=" + std::to_string(d1) + " does not divide side " + std::to_string(side));
  const int per_side = side / d1;
  if (!std::has_single_bit(static_cast<unsigned>(per_side)))
    throw Error("side / d1 = " + std::to_string(per_side) + " is not a power of two");
  return per_side * per_side;
}

TilePosition index_to_position(int index, int side, int d1, TileOrder order) {
  const int count = tile_count(side, d1);
  if (index < 1 || index > count)
    throw Error("tile index " + std::to_string(index) + " outside 1.." + std::to_string(count));
  const auto code = static_cast<unsigned>(index - 1);
  if (order == TileOrder::RowMajor) {
    const int per_side = side / d1;
    return {static_cast<int>(code) / per_side * d1, static_cast<int>(code) % per_side * d1};
  }
  // Each 2-bit Morton digit is (row bit, column bit); even bits form the column.
  unsigned row = 0, col = 0;
  for (unsigned bit = 0; (code >> (2 * bit)) != 0; ++bit) {
    col |= ((code >> (2 * bit)) & 1u) << bit;
    row |= ((code >> (2 * bit + 1)) & 1u) << bit;
  }
  return {static_cast<int>(row) * d1, static_cast<int>(col) * d1};
}

int position_to_index(TilePosition pos, int side, int d1, TileOrder order) {
  tile_count(side, d1);
  if (pos.row < 0 || pos.col < 0 || pos.row >= side || pos.col >= side || pos.row % d1 != 0 ||
      pos.col % d1 != 0)
    throw Error("position is not a tile origin");
  const auto row = static_cast<unsigned>(pos.row / d1);
  const auto col = static_cast<unsigned>(pos.col / d1);
  if (order == TileOrder::RowMajor) return static_cast<int>(row) * (side / d1) + static_cast<int>(col) + 1;
  unsigned code = 0;
  for (unsigned bit = 0; (row >> bit) != 0 || (col >> bit) != 0; ++bit) {
    code |= ((col >> bit) & 1u) << (2 * bit);
    code |= ((row >> bit) & 1u) << (2 * bit + 1);
  }
  return static_cast<int>(code) + 1;
}

TileGrid::TileGrid(int side, int d1, TileOrder order, std::vector<BinaryImage> tiles)
    : side_(side), d1_(d1), order_(order), tiles_(std::move(tiles)) {
  const int count = tile_count(side, d1);
  if (static_cast<int>(tiles_.size()) != count)
    throw Error("tile grid expects " + std::to_string(count) + " tiles, got " +
                std::to_string(tiles_.size()));
  for (const auto& t : tiles_)
    if (t.width() != d1 || t.height() != d1) throw Error("inconsistent tile size in grid");
}

const BinaryImage& TileGrid::tile(int index) const {
  if (index < 1 || index > count())
    throw Error("tile index " + std::to_string(index) + " outside 1.." + std::to_string(count()));
  return tiles_[static_cast<std::size_t>(index - 1)];
}

TileGrid decompose(const BinaryImage& img, int d1, TileOrder order) {
  if (img.width() != img.height())
    throw Error("quadtree decomposition needs a square image, got " + std::to_string(img.width()) +
                "x" + std::to_string(img.height()));
  const int side = img.width();
  const int count = tile_count(side, d1);
  std::vector<BinaryImage> tiles;
  tiles.reserve(static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) {
    const TilePosition pos = index_to_position(i, side, d1, order);
    BinaryImage tile(d1, d1);
    for (int y = 0; y < d1; ++y)
      for (int x = 0; x < d1; ++x) tile(x, y) = img(pos.col + x, pos.row + y);
    tiles.push_back(std::move(tile));
  }
  return TileGrid(side, d1, order, std::move(tiles));
}

BinaryImage reassemble(const TileGrid& grid) {
  const int d1 = grid.d1();
  BinaryImage img(grid.side(), grid.side());
  for (int i = 1; i <= grid.count(); ++i) {
    const TilePosition pos = index_to_position(i, grid.side(), d1, grid.order());
    const BinaryImage& tile = grid.tile(i);
    for (int y = 0; y < d1; ++y)
      for (int x = 0; x < d1; ++x) img(pos.col + x, pos.row + y) = tile(x, y);
  }
  return img;
}

}  // namespace mvqc
