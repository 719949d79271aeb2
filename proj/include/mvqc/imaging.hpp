#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "mvqc/image.hpp"

namespace mvqc {

/// Side of the normalized square image every sample is resized to.
inline constexpr int kNormalizedSide = 512;

using Histogram = std::array<std::size_t, 256>;

Histogram histogram(const GrayImage& img);

/// Most populated intensity in [0, t_dark]; ties go to the darker value.
/// Throws Error("no dark pixels") when that range is empty.
int dark_peak(const Histogram& counts, int t_dark = 128);

/// Foreground where pixel <= ind.
BinaryImage threshold_leq(const GrayImage& img, int ind);

/// 8-connected labeling. Components are numbered 1..num in order of their
/// first pixel in a raster scan.
LabelMap label_components(const BinaryImage& bw);

/// areas[i] is the pixel count of label i+1.
std::vector<std::size_t> component_areas(const LabelMap& lm);

/// Pupil extent. x is the column and y the row.
struct PupilLocation {
  int x_min = 0;
  int x_max = 0;
  int y_min = 0;
  int y_max = 0;
  double radius1 = 0;  // (x_max - x_min) / 2
  double radius2 = 0;  // (y_max - y_min) / 2
  double x_c = 0;
  double y_c = 0;
  double radius = 0;  // max(radius1, radius2)
};

/// Histogram peak below t_dark, threshold, label, and take the bounding box
/// of the largest component (ties: smallest label).
PupilLocation pupil_locate(const GrayImage& img, int t_dark = 128);

struct WindowRect {
  int x = 0;  // left column
  int y = 0;  // top row
  int width = 0;
  int height = 0;

  bool operator==(const WindowRect&) const = default;
};

/// Crop window around the pupil, clamped to the image:
///   x = y_c - radius - offset1,  y = x_c - radius - offset1,
///   width = height = 2 * radius + offset2.
/// The x origin comes from y_c and vice versa; this is the convention the
/// method was published with and is kept as-is. Real values are rounded to
/// the nearest pixel before clamping.
WindowRect window_rect(const PupilLocation& p, int offset1, int offset2, int image_width,
                       int image_height);

GrayImage crop(const GrayImage& img, const WindowRect& r);
BinaryImage crop(const BinaryImage& img, const WindowRect& r);

/// Bilinear resampling with pixel-center alignment; identity when the size
/// is unchanged.
GrayImage resize(const GrayImage& img, int width, int height);

/// Nearest-neighbor resampling for masks.
BinaryImage resize_nearest(const BinaryImage& mask, int width, int height);

/// Foreground = pixel < thr.
BinaryImage binarize(const GrayImage& img, int thr);
/// Foreground = pixel < mean intensity.
BinaryImage binarize_mean(const GrayImage& img);

/// Tight bounding box of the foreground; throws when the mask is empty.
WindowRect foreground_bounds(const BinaryImage& mask);

/// gray -> 512x512 bilinear -> binarize(mean) -> crop to the ink bounding
/// box -> 512x512 nearest. Throws Error("empty signature") on blank input.
BinaryImage signature_normalize(const GrayImage& img);

struct IrisParams {
  int t_dark = 128;
  int offset1 = 20;
  int offset2 = 40;
};

/// Pupil iris frame: locate pupil, crop the window, resize to 512x512.
GrayImage extract_pif(const GrayImage& eye, const IrisParams& params);

/// extract_pif followed by binarize(mean).
BinaryImage iris_normalize(const GrayImage& eye, const IrisParams& params);

}  // namespace mvqc
