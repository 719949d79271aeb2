#include "mvqc/mvqc.hpp"

#include <algorithm>
#include <numeric>

namespace mvqc {

std::string_view to_string(Modality modality) {
  return modality == Modality::Iris ? "iris" : "signature";
}

Modality parse_modality(std::string_view text) {
  if (text == "iris") return Modality::Iris;
  if (text == "signature") return Modality::Signature;
  throw Error("unknown modality '" + std::string(text) + "' (expected iris or signature)");
}

std::vector<RawMoments> tile_moments(const BinaryImage& img, int d1, TileOrder order) {
  if (img.width() != img.height())
    throw Error("tiling needs a square image, got " + std::to_string(img.width()) + "x" +
                std::to_string(img.height()));
  const int count = tile_count(img.width(), d1);
  std::vector<RawMoments> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) {
    const TilePosition pos = index_to_position(i, img.width(), d1, order);
    out.push_back(raw_moments(img, pos.row, pos.col, d1));
  }
  return out;
}

FeatureVector features_from_moments(std::span<const RawMoments> tiles, int d1, MomentKind kind) {
  FeatureVector fv{d1, kind, {}};
  fv.values.reserve(tiles.size());
  for (const auto& t : tiles) fv.values.push_back(moment_value(t, kind));
  return fv;
}

FeatureVector per_tile_features(const BinaryImage& img, int d1, MomentKind kind, TileOrder order) {
  return features_from_moments(tile_moments(img, d1, order), d1, kind);
}

std::vector<double> component_variances(std::span<const FeatureVector> samples) {
  if (samples.size() < 2) throw Error("variance needs at least two training samples");
  const auto& first = samples.front();
  for (const auto& s : samples)
    if (s.d1 != first.d1 || s.kind != first.kind || s.size() != first.size())
      throw Error("training feature vectors disagree on d1, moment kind or length");

  const double p = static_cast<double>(samples.size());
  std::vector<double> variances(first.size(), 0.0);
  for (std::size_t i = 0; i < first.size(); ++i) {
    double mean = 0.0;
    for (const auto& s : samples) mean += s.values[i];
    mean /= p;
    double ss = 0.0;
    for (const auto& s : samples) {
      const double d = s.values[i] - mean;
      ss += d * d;
    }
    variances[i] = ss / p;
  }
  return variances;
}

std::vector<int> select_mvqc(std::span<const double> variances, int b) {
  const int count = static_cast<int>(variances.size());
  if (b < 1 || b > count)
    throw Error("b=" + std::to_string(b) + " outside 1.." + std::to_string(count));

  // Indices here are 0-based; sorted by (variance, index).
  const auto by_variance = [&](int a, int c) {
    return variances[a] < variances[c] || (variances[a] == variances[c] && a < c);
  };
  std::vector<int> list(static_cast<std::size_t>(count));
  std::iota(list.begin(), list.end(), 0);

  while (static_cast<int>(list.size()) > b) {
    double avg = 0.0;
    for (int i : list) avg += variances[i];
    avg /= static_cast<double>(list.size());

    std::vector<int> kept, dropped;
    for (int i : list) (variances[i] < avg ? kept : dropped).push_back(i);

    if (kept.size() == list.size()) {
      // No progress possible: keep the b smallest.
      std::sort(list.begin(), list.end(), by_variance);
      list.resize(static_cast<std::size_t>(b));
      break;
    }
    if (static_cast<int>(kept.size()) < b) {
      std::sort(dropped.begin(), dropped.end(), by_variance);
      dropped.resize(static_cast<std::size_t>(b) - kept.size());
      kept.insert(kept.end(), dropped.begin(), dropped.end());
    }
    list = std::move(kept);
  }

  std::sort(list.begin(), list.end());
  for (int& i : list) ++i;
  return list;
}

double moment_summation(const FeatureVector& fv, std::span<const int> indices) {
  double sum = 0.0;
  for (int i : indices) {
    if (i < 1 || static_cast<std::size_t>(i) > fv.size())
      throw Error("tile index " + std::to_string(i) + " outside 1.." + std::to_string(fv.size()));
    sum += fv.values[static_cast<std::size_t>(i - 1)];
  }
  return sum;
}

MvqcTemplate build_template(std::string subject, std::span<const FeatureVector> training,
                            const TemplateParams& params) {
  if (training.size() < 2) throw Error("a template needs at least two genuine training samples");
  for (const auto& fv : training)
    if (fv.d1 != params.d1 || fv.kind != params.kind)
      throw Error("training features do not match the template parameters");

  MvqcTemplate t;
  t.subject = std::move(subject);
  t.kind = params.kind;
  t.order = params.order;
  t.d1 = params.d1;
  t.b = params.b;
  t.indices = select_mvqc(component_variances(training), params.b);
  std::vector<double> h;
  h.reserve(training.size());
  for (const auto& fv : training) h.push_back(moment_summation(fv, t.indices));
  t.reference = make_reference(h, params.reference);
  return t;
}

MvqcTemplate build_template(std::string subject, std::span<const BinaryImage> samples,
                            const TemplateParams& params) {
  std::vector<FeatureVector> features;
  features.reserve(samples.size());
  for (const auto& s : samples)
    features.push_back(per_tile_features(s, params.d1, params.kind, params.order));
  return build_template(std::move(subject), std::span<const FeatureVector>(features), params);
}

double template_score_input(const MvqcTemplate& tmpl, const BinaryImage& normalized) {
  return moment_summation(per_tile_features(normalized, tmpl.d1, tmpl.kind, tmpl.order), tmpl.indices);
}

BinaryImage normalize_sample(const GrayImage& img, Modality modality, const IrisParams& iris) {
  return modality == Modality::Iris ? iris_normalize(img, iris) : signature_normalize(img);
}

}  // namespace mvqc
