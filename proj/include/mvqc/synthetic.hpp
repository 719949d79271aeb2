#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mvqc/eval.hpp"
#include "mvqc/image.hpp"

namespace mvqc {

/// Tile size at which stable regions are planted.
inline constexpr int kPlantTileSize = 128;

struct SyntheticOptions {
  int subjects = 20;
  int genuine = 15;
  int imposters = 15;
  std::uint64_t seed = 1;
  double margin = 3.0;  // > 0
  int stable_tiles = 4;
};

/// One subject of signature-like 512x512 pages (white paper, black ink).
///
/// Every page carries an ink pixel in each corner, so bounding-box
/// normalization is the identity. A subject owns `stable_tiles` non-corner
/// tiles (d1 = 128, Z-order) each holding a fixed constellation of 5x5 ink
/// dots; genuine pages only translate the constellation, which leaves every
/// moment invariant unchanged. The remaining tiles are redrawn at random on
/// every page. Forgeries spread each stable constellation about its centroid
/// by sqrt(1 + margin), raising Moment_C by roughly (1 + margin)^2.
struct SyntheticSubject {
  std::string id;
  std::vector<int> planted;  // 1-based Z-order tile indices at d1 = 128
  std::vector<GrayImage> genuine;
  std::vector<GrayImage> imposters;
};

/// Deterministic in (options.seed, index); independent of other subjects.
SyntheticSubject synthesize_subject(int index, const SyntheticOptions& options);

struct SyntheticDataset {
  DatasetManifest manifest;
  std::filesystem::path manifest_path;
  std::vector<std::vector<int>> planted;  // per subject
};

/// Writes <out_dir>/<subject>/g##.pgm, f##.pgm and <out_dir>/manifest.txt.
SyntheticDataset gen_synthetic(const std::filesystem::path& out_dir, const SyntheticOptions& options);

}  // namespace mvqc
