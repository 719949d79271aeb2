#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvqc/classify.hpp"
#include "mvqc/image.hpp"
#include "mvqc/imaging.hpp"
#include "mvqc/moments.hpp"
#include "mvqc/quadtree.hpp"

namespace mvqc {

enum class Modality { Iris, Signature };

std::string_view to_string(Modality modality);
Modality parse_modality(std::string_view text);

/// Raw moments of every quadtree tile, in tile-number order.
std::vector<RawMoments> tile_moments(const BinaryImage& img, int d1,
                                     TileOrder order = TileOrder::ZOrder);

/// One moment value per quadtree tile.
struct FeatureVector {
  int d1 = 0;
  MomentKind kind = MomentKind::C;
  std::vector<double> values;  // values[i] belongs to tile i + 1

  std::size_t size() const noexcept { return values.size(); }
};

FeatureVector per_tile_features(const BinaryImage& img, int d1, MomentKind kind,
                                TileOrder order = TileOrder::ZOrder);
FeatureVector features_from_moments(std::span<const RawMoments> tiles, int d1, MomentKind kind);

/// Population variance (divide by P) of each tile across the samples.
std::vector<double> component_variances(std::span<const FeatureVector> samples);

/// Minimum-variance tile selection. Starting from all tiles, keep only the
/// tiles whose variance is strictly below the mean variance of the current
/// list, until at most b remain. If the last cut went below b, top up with
/// the smallest-variance tiles it dropped. Ties go to the smaller index.
/// Returns exactly b sorted 1-based tile indices.
std::vector<int> select_mvqc(std::span<const double> variances, int b);

/// Σ fv[i] over the 1-based indices.
double moment_summation(const FeatureVector& fv, std::span<const int> indices);

struct TemplateParams {
  int d1 = 128;
  int b = 4;
  MomentKind kind = MomentKind::C;
  TileOrder order = TileOrder::ZOrder;
  ReferenceOptions reference;
};

/// Enrollment record for one subject.
struct MvqcTemplate {
  std::string subject;
  Modality modality = Modality::Signature;
  IrisParams iris;  // preprocessing used for iris samples
  MomentKind kind = MomentKind::C;
  TileOrder order = TileOrder::ZOrder;
  int d1 = 128;
  int b = 4;
  std::vector<int> indices;
  GenuineReference reference;  // H and everything derived from it

  const std::vector<double>& sums() const noexcept { return reference.sums; }
};

/// Selects the MVQC tiles over P >= 2 training features and records the
/// training moment summations.
MvqcTemplate build_template(std::string subject, std::span<const FeatureVector> training,
                            const TemplateParams& params);

/// Same, starting from normalized 512x512 masks.
MvqcTemplate build_template(std::string subject, std::span<const BinaryImage> samples,
                            const TemplateParams& params);

/// Moment summation of a sample over the template's tiles.
double template_score_input(const MvqcTemplate& tmpl, const BinaryImage& normalized);

/// Runs the modality's preprocessing on a raw gray image.
BinaryImage normalize_sample(const GrayImage& img, Modality modality, const IrisParams& iris);

// Text record, one key=value per line under a versioned header. Doubles
// use shortest round-trip formatting, so write/read is bit-exact.
std::string serialize_template(const MvqcTemplate& tmpl);
MvqcTemplate parse_template(std::string_view text);
void write_template(const std::filesystem::path& path, const MvqcTemplate& tmpl);
MvqcTemplate read_template(const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

}  // namespace mvqc
