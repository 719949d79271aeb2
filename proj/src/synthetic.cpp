#include "mvqc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "mvqc/imaging.hpp"
#include "mvqc/pnm.hpp"
#include "mvqc/quadtree.hpp"

namespace mvqc {
namespace fs = std::filesystem;
namespace {

constexpr int kDot = 5;      // stable dot side
constexpr int kJitter = 6;   // max translation of a stable constellation
constexpr int kCenter = kPlantTileSize / 2;

// mt19937_64 output is fixed by the standard; the std distributions are not,
// so ranges are mapped by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(engine_() % span);
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct Offset {
  int dx;
  int dy;
};

void fill_square(GrayImage& img, int x0, int y0, int side) {
  for (int y = std::max(0, y0); y < std::min(img.height(), y0 + side); ++y)
    for (int x = std::max(0, x0); x < std::min(img.width(), x0 + side); ++x) img(x, y) = 0;
}

// Centered constellation of dots whose pairwise spacing leaves gaps after
// any spread factor >= 1, and whose spread copy still fits inside a tile.
std::vector<Offset> make_constellation(Rng& rng, double spread) {
  const int limit = kCenter - kDot - kJitter - 2;  // max |offset| of a dot corner
  const int radius = std::clamp(static_cast<int>(limit / spread) - 2, kDot + 2, 20);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const int count = rng.uniform_int(4, 7);
    std::vector<Offset> dots;
    for (int tries = 0; tries < 200 && static_cast<int>(dots.size()) < count; ++tries) {
      const Offset o{rng.uniform_int(-radius, radius), rng.uniform_int(-radius, radius)};
      const bool clear = std::all_of(dots.begin(), dots.end(), [&](const Offset& d) {
        return std::max(std::abs(d.dx - o.dx), std::abs(d.dy - o.dy)) >= kDot + 2;
      });
      if (clear) dots.push_back(o);
    }
    if (static_cast<int>(dots.size()) < 3) continue;

    long sx = 0, sy = 0;
    for (const auto& d : dots) {
      sx += d.dx;
      sy += d.dy;
    }
    const int cx = static_cast<int>(std::lround(static_cast<double>(sx) / dots.size()));
    const int cy = static_cast<int>(std::lround(static_cast<double>(sy) / dots.size()));
    bool fits = true;
    for (auto& d : dots) {
      d.dx -= cx;
      d.dy -= cy;
      if (std::lround(std::abs(d.dx) * spread) > limit || std::lround(std::abs(d.dy) * spread) > limit) fits = false;
    }
    if (fits) return dots;
  }
  throw Error("margin too large: spread constellation does not fit a tile");
}

std::vector<Offset> spread_constellation(const std::vector<Offset>& dots, double spread) {
  double mx = 0, my = 0;
  for (const auto& d : dots) {
    mx += d.dx;
    my += d.dy;
  }
  mx /= static_cast<double>(dots.size());
  my /= static_cast<double>(dots.size());
  std::vector<Offset> out;
  for (const auto& d : dots)
    out.push_back({static_cast<int>(std::lround(mx + spread * (d.dx - mx))),
                   static_cast<int>(std::lround(my + spread * (d.dy - my)))});
  return out;
}

void draw_constellation(GrayImage& page, TilePosition tile, const std::vector<Offset>& dots, Rng& rng) {
  const int jx = rng.uniform_int(-kJitter, kJitter);
  const int jy = rng.uniform_int(-kJitter, kJitter);
  for (const auto& d : dots)
    fill_square(page, tile.col + kCenter + jx + d.dx - kDot / 2, tile.row + kCenter + jy + d.dy - kDot / 2, kDot);
}

void draw_volatile(GrayImage& page, TilePosition tile, Rng& rng) {
  const int count = rng.uniform_int(2, 6);
  for (int k = 0; k < count; ++k) {
    const int side = rng.uniform_int(3, 9);
    const int x = rng.uniform_int(4, kPlantTileSize - 4 - side);
    const int y = rng.uniform_int(4, kPlantTileSize - 4 - side);
    fill_square(page, tile.col + x, tile.row + y, side);
  }
}

GrayImage blank_page() {
  GrayImage page(kNormalizedSide, kNormalizedSide, 255);
  const int last = kNormalizedSide - 1;
  page(0, 0) = page(last, 0) = page(0, last) = page(last, last) = 0;
  return page;
}

}  // namespace

SyntheticSubject synthesize_subject(int index, const SyntheticOptions& options) {
  if (!(options.margin > 0.0)) throw Error("margin must be positive");
  const int tiles = tile_count(kNormalizedSide, kPlantTileSize);
  std::vector<int> candidates;
  for (int i = 1; i <= tiles; ++i) {
    const TilePosition p = index_to_position(i, kNormalizedSide, kPlantTileSize);
    const bool corner = (p.row == 0 || p.row == kNormalizedSide - kPlantTileSize) &&
                        (p.col == 0 || p.col == kNormalizedSide - kPlantTileSize);
    if (!corner) candidates.push_back(i);
  }
  if (options.stable_tiles < 1 || options.stable_tiles > static_cast<int>(candidates.size()))
    throw Error("stable_tiles must lie in 1.." + std::to_string(candidates.size()));

  Rng rng(mix(options.seed, static_cast<std::uint64_t>(index)));
  SyntheticSubject s;
  char id[32];
  std::snprintf(id, sizeof id, "s%03d", index + 1);
  s.id = id;

  for (int k = 0; k < options.stable_tiles; ++k) {
    const int pick = rng.uniform_int(k, static_cast<int>(candidates.size()) - 1);
    std::swap(candidates[k], candidates[pick]);
  }
  s.planted.assign(candidates.begin(), candidates.begin() + options.stable_tiles);
  std::sort(s.planted.begin(), s.planted.end());

  const double spread = std::sqrt(1.0 + options.margin);
  std::vector<std::vector<Offset>> genuine_dots, forged_dots;
  for (std::size_t k = 0; k < s.planted.size(); ++k) {
    genuine_dots.push_back(make_constellation(rng, spread));
    forged_dots.push_back(spread_constellation(genuine_dots.back(), spread));
  }

  const auto page = [&](const std::vector<std::vector<Offset>>& stable) {
    GrayImage img = blank_page();
    for (int i = 1; i <= tiles; ++i) {
      const TilePosition pos = index_to_position(i, kNormalizedSide, kPlantTileSize);
      const auto it = std::find(s.planted.begin(), s.planted.end(), i);
      if (it == s.planted.end())
        draw_volatile(img, pos, rng);
      else
        draw_constellation(img, pos, stable[static_cast<std::size_t>(it - s.planted.begin())], rng);
    }
    return img;
  };
  for (int g = 0; g < options.genuine; ++g) s.genuine.push_back(page(genuine_dots));
  for (int f = 0; f < options.imposters; ++f) s.imposters.push_back(page(forged_dots));
  return s;
}

SyntheticDataset gen_synthetic(const fs::path& out_dir, const SyntheticOptions& options) {
  if (options.subjects < 1) throw Error("need at least one subject");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create " + out_dir.string() + ": " + ec.message());

  SyntheticDataset ds;
  ds.manifest.modality = Modality::Signature;
  std::vector<std::string> comments = {
      "synthetic signature dataset: seed " + std::to_string(options.seed) + ", margin " +
      format_double(options.margin)};
  for (int i = 0; i < options.subjects; ++i) {
    const SyntheticSubject subject = synthesize_subject(i, options);
    const fs::path dir = out_dir / subject.id;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());

    SubjectEntry entry{subject.id, {}, {}};
    char name[32];
    for (std::size_t g = 0; g < subject.genuine.size(); ++g) {
      std::snprintf(name, sizeof name, "g%02zu.pgm", g);
      write_pgm(dir / name, subject.genuine[g]);
      entry.genuine.push_back(dir / name);
    }
    for (std::size_t f = 0; f < subject.imposters.size(); ++f) {
      std::snprintf(name, sizeof name, "f%02zu.pgm", f);
      write_pgm(dir / name, subject.imposters[f]);
      entry.imposters.push_back(dir / name);
    }
    std::string planted = "planted " + subject.id + " ";
    for (std::size_t k = 0; k < subject.planted.size(); ++k)
      planted += (k ? "," : "") + std::to_string(subject.planted[k]);
    comments.push_back(planted + " (d1=128, zorder)");
    ds.planted.push_back(subject.planted);
    ds.manifest.subjects.push_back(std::move(entry));
  }

  ds.manifest_path = out_dir / "manifest.txt";
  std::ofstream out(ds.manifest_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + ds.manifest_path.string());
  out << format_manifest(ds.manifest, out_dir, comments);
  if (!out) throw Error("write failed for " + ds.manifest_path.string());
  return ds;
}

}  // namespace mvqc
