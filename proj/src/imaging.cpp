#include "mvqc/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mvqc {
namespace {

class DisjointSets {
 public:
  int make_set() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }

  int find(int v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  void join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }

 private:
  std::vector<int> parent_;
};

template <typename Image>
Image crop_impl(const Image& img, const WindowRect& r) {
  if (r.width < 1 || r.height < 1 || r.x < 0 || r.y < 0 || r.x + r.width > img.width() ||
      r.y + r.height > img.height())
    throw Error("crop rectangle (" + std::to_string(r.x) + "," + std::to_string(r.y) + " " +
                std::to_string(r.width) + "x" + std::to_string(r.height) + ") outside " +
                std::to_string(img.width()) + "x" + std::to_string(img.height()) + " image");
  Image out(r.width, r.height);
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x) out(x, y) = img(r.x + x, r.y + y);
  return out;
}

}  // namespace

Histogram histogram(const GrayImage& img) {
  Histogram counts{};
  for (auto v : img.pixels()) ++counts[v];
  return counts;
}

int dark_peak(const Histogram& counts, int t_dark) {
  if (t_dark < 0 || t_dark > 255) throw Error("t_dark must lie in [0,255]");
  int best = -1;
  std::size_t best_count = 0;
  for (int v = 0; v <= t_dark; ++v) {
    if (counts[v] > best_count) {
      best = v;
      best_count = counts[v];
    }
  }
  if (best < 0) throw Error("no dark pixels");
  return best;
}

BinaryImage threshold_leq(const GrayImage& img, int ind) {
  BinaryImage bw(img.width(), img.height());
  auto dst = bw.pixels();
  const auto src = img.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] <= ind ? 1 : 0;
  return bw;
}

LabelMap label_components(const BinaryImage& bw) {
  const int w = bw.width();
  const int h = bw.height();
  Raster<int, LabelTag> provisional(w, h, -1);
  DisjointSets sets;

  // First pass: provisional labels from the already-visited 8-neighbors
  // (west, north-west, north, north-east).
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!bw(x, y)) continue;
      int label = -1;
      const int nbrs[4][2] = {{x - 1, y}, {x - 1, y - 1}, {x, y - 1}, {x + 1, y - 1}};
      for (const auto& n : nbrs) {
        const int nx = n[0];
        const int ny = n[1];
        if (nx < 0 || ny < 0 || nx >= w) continue;
        const int other = provisional(nx, ny);
        if (other < 0) continue;
        if (label < 0)
          label = other;
        else
          sets.join(label, other);
      }
      provisional(x, y) = label < 0 ? sets.make_set() : label;
    }
  }

  // Second pass: resolve roots and renumber by first raster encounter.
  LabelMap out{Raster<int, LabelTag>(w, h, 0), 0};
  std::vector<int> final_label;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int p = provisional(x, y);
      if (p < 0) continue;
      const int root = sets.find(p);
      if (static_cast<std::size_t>(root) >= final_label.size()) final_label.resize(root + 1, 0);
      if (final_label[root] == 0) final_label[root] = ++out.num;
      out.labels(x, y) = final_label[root];
    }
  }
  return out;
}

std::vector<std::size_t> component_areas(const LabelMap& lm) {
  std::vector<std::size_t> areas(static_cast<std::size_t>(lm.num), 0);
  for (int v : lm.labels.pixels())
    if (v > 0) ++areas[static_cast<std::size_t>(v - 1)];
  return areas;
}

PupilLocation pupil_locate(const GrayImage& img, int t_dark) {
  const int ind = dark_peak(histogram(img), t_dark);
  const LabelMap lm = label_components(threshold_leq(img, ind));
  const auto areas = component_areas(lm);
  // max_element returns the first maximum, i.e. the smallest label.
  const int target = static_cast<int>(std::max_element(areas.begin(), areas.end()) - areas.begin()) + 1;

  PupilLocation p;
  p.x_min = img.width();
  p.y_min = img.height();
  p.x_max = -1;
  p.y_max = -1;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (lm.labels(x, y) != target) continue;
      p.x_min = std::min(p.x_min, x);
      p.x_max = std::max(p.x_max, x);
      p.y_min = std::min(p.y_min, y);
      p.y_max = std::max(p.y_max, y);
    }
  }
  p.radius1 = (p.x_max - p.x_min) / 2.0;
  p.radius2 = (p.y_max - p.y_min) / 2.0;
  p.x_c = (p.x_max + p.x_min) / 2.0;
  p.y_c = (p.y_max + p.y_min) / 2.0;
  p.radius = std::max(p.radius1, p.radius2);
  return p;
}

WindowRect window_rect(const PupilLocation& p, int offset1, int offset2, int image_width,
                       int image_height) {
  if (offset1 < 0 || offset2 < 0) throw Error("window offsets must be non-negative");
  const double x_value = p.y_c - p.radius - offset1;
  const double y_value = p.x_c - p.radius - offset1;
  const double side = 2.0 * p.radius + offset2;

  const long x0 = std::lround(x_value);
  const long y0 = std::lround(y_value);
  const long s = std::lround(side);
  const long left = std::max(0L, x0);
  const long top = std::max(0L, y0);
  const long right = std::min<long>(image_width, x0 + s);
  const long bottom = std::min<long>(image_height, y0 + s);
  if (right - left <= 0 || bottom - top <= 0)
    throw Error("window around pupil is empty after clamping to the image");
  return WindowRect{static_cast<int>(left), static_cast<int>(top), static_cast<int>(right - left),
                    static_cast<int>(bottom - top)};
}

GrayImage crop(const GrayImage& img, const WindowRect& r) { return crop_impl(img, r); }
BinaryImage crop(const BinaryImage& img, const WindowRect& r) { return crop_impl(img, r); }

GrayImage resize(const GrayImage& img, int width, int height) {
  if (width == img.width() && height == img.height()) return img;
  GrayImage out(width, height);
  const double sx = static_cast<double>(img.width()) / width;
  const double sy = static_cast<double>(img.height()) / height;
  const int max_x = img.width() - 1;
  const int max_y = img.height() - 1;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(max_y));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, max_y);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(max_x));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, max_x);
      const double wx = fx - x0;
      const double top = img(x0, y0) * (1.0 - wx) + img(x1, y0) * wx;
      const double bottom = img(x0, y1) * (1.0 - wx) + img(x1, y1) * wx;
      const double v = top * (1.0 - wy) + bottom * wy;
      out(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return out;
}

BinaryImage resize_nearest(const BinaryImage& mask, int width, int height) {
  if (width == mask.width() && height == mask.height()) return mask;
  BinaryImage out(width, height);
  std::vector<int> src_x(static_cast<std::size_t>(width));
  for (int x = 0; x < width; ++x)
    src_x[x] = std::min(mask.width() - 1,
                        static_cast<int>(std::floor((x + 0.5) * mask.width() / width)));
  for (int y = 0; y < height; ++y) {
    const int sy = std::min(mask.height() - 1,
                            static_cast<int>(std::floor((y + 0.5) * mask.height() / height)));
    for (int x = 0; x < width; ++x) out(x, y) = mask(src_x[x], sy);
  }
  return out;
}

BinaryImage binarize(const GrayImage& img, int thr) {
  BinaryImage bw(img.width(), img.height());
  auto dst = bw.pixels();
  const auto src = img.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] < thr ? 1 : 0;
  return bw;
}

BinaryImage binarize_mean(const GrayImage& img) {
  const auto src = img.pixels();
  const std::uint64_t total = std::accumulate(src.begin(), src.end(), std::uint64_t{0});
  const double mean = static_cast<double>(total) / static_cast<double>(src.size());
  BinaryImage bw(img.width(), img.height());
  auto dst = bw.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] < mean ? 1 : 0;
  return bw;
}

WindowRect foreground_bounds(const BinaryImage& mask) {
  int x_min = mask.width(), x_max = -1, y_min = mask.height(), y_max = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (x_max < 0) throw Error("mask has no foreground");
  return WindowRect{x_min, y_min, x_max - x_min + 1, y_max - y_min + 1};
}

BinaryImage signature_normalize(const GrayImage& img) {
  const BinaryImage ink = binarize_mean(resize(img, kNormalizedSide, kNormalizedSide));
  const auto px = ink.pixels();
  if (std::find(px.begin(), px.end(), std::uint8_t{1}) == px.end()) throw Error("empty signature");
  return resize_nearest(crop(ink, foreground_bounds(ink)), kNormalizedSide, kNormalizedSide);
}

GrayImage extract_pif(const GrayImage& eye, const IrisParams& params) {
  const PupilLocation p = pupil_locate(eye, params.t_dark);
  const WindowRect r = window_rect(p, params.offset1, params.offset2, eye.width(), eye.height());
  return resize(crop(eye, r), kNormalizedSide, kNormalizedSide);
}

BinaryImage iris_normalize(const GrayImage& eye, const IrisParams& params) {
  return binarize_mean(extract_pif(eye, params));
}

}  // namespace mvqc
