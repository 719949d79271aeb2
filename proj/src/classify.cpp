#include "mvqc/classify.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mvqc/error.hpp"

namespace mvqc {
namespace {

double distance_between(double a, double b) { return std::abs(a - b); }

// Any point between the two middle values minimizes the L1 cost of an
// even-sized cluster. A centroid already in that interval stays put, so an
// unchanged cluster never shifts its centroid (and its cost) by rounding.
double median_of(std::vector<double> v, double current) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  const double lo = v[n / 2 - 1], hi = v[n / 2];
  if (lo <= current && current <= hi) return current;
  return 0.5 * (lo + hi);
}

int nearest(std::span<const double> centroids, double x) {
  int best = 0;
  double best_d = distance_between(x, centroids[0]);
  for (std::size_t i = 1; i < centroids.size(); ++i) {
    const double d = distance_between(x, centroids[i]);
    if (d < best_d) {
      best = static_cast<int>(i);
      best_d = d;
    }
  }
  return best;
}

std::vector<double> with_point(std::span<const double> h, double x) {
  std::vector<double> points(h.begin(), h.end());
  points.push_back(x);
  return points;
}

void memberships(std::span<const double> points, std::span<const double> centroids, double m,
                 PartitionMatrix& u) {
  const double exponent = 2.0 / (m - 1.0);
  const int c = static_cast<int>(centroids.size());
  std::vector<double> d(static_cast<std::size_t>(c));
  for (int j = 0; j < static_cast<int>(points.size()); ++j) {
    int coincident = -1;
    for (int i = 0; i < c; ++i) {
      d[i] = distance_between(points[j], centroids[i]);
      if (d[i] == 0.0 && coincident < 0) coincident = i;
    }
    if (coincident >= 0) {
      for (int i = 0; i < c; ++i) u(i, j) = i == coincident ? 1.0 : 0.0;
      continue;
    }
    for (int i = 0; i < c; ++i) {
      double denom = 0.0;
      for (int l = 0; l < c; ++l) denom += std::pow(d[i] / d[l], exponent);
      u(i, j) = 1.0 / denom;
    }
  }
}

}  // namespace

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::KMeansEuclid: return "kmeans-euclidean";
    case ClassifierKind::KMeansCity: return "kmeans-cityblock";
    case ClassifierKind::FuzzyKMeans: return "fuzzy-kmeans";
    case ClassifierKind::Knn: return "knn";
    case ClassifierKind::FuzzyKnn: return "fuzzy-knn";
    case ClassifierKind::Avg: return "avg";
    case ClassifierKind::AvgMax: return "avgmax";
  }
  return "?";
}

ClassifierKind parse_classifier(std::string_view text) {
  for (auto kind : kAllClassifiers)
    if (to_string(kind) == text) return kind;
  throw Error("unknown classifier '" + std::string(text) +
              "' (expected kmeans-euclidean, kmeans-cityblock, fuzzy-kmeans, knn, fuzzy-knn, avg, avgmax)");
}

std::vector<ClassifierKind> parse_classifier_list(std::string_view text) {
  if (text == "all") return {kAllClassifiers.begin(), kAllClassifiers.end()};
  std::vector<ClassifierKind> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (!item.empty()) {
      const auto kind = parse_classifier(item);
      if (std::find(out.begin(), out.end(), kind) == out.end()) out.push_back(kind);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw Error("empty classifier list");
  return out;
}

KMeansResult kmeans(std::span<const double> points, std::span<const double> init, Distance distance,
                    int max_iter) {
  const std::size_t k = init.size();
  if (k < 1) throw Error("k-means needs at least one centroid");
  if (points.size() < k)
    throw Error("k-means: k=" + std::to_string(k) + " exceeds n=" + std::to_string(points.size()));

  KMeansResult r;
  r.centroids.assign(init.begin(), init.end());
  r.assignment.assign(points.size(), 0);
  for (int iter = 0; iter < max_iter; ++iter) {
    double objective = 0.0;
    for (std::size_t j = 0; j < points.size(); ++j) {
      r.assignment[j] = nearest(r.centroids, points[j]);
      const double d = distance_between(points[j], r.centroids[r.assignment[j]]);
      objective += distance == Distance::Euclidean ? d * d : d;
    }
    r.objective_history.push_back(objective);
    ++r.iterations;

    std::vector<double> next = r.centroids;
    for (std::size_t c = 0; c < k; ++c) {
      std::vector<double> members;
      for (std::size_t j = 0; j < points.size(); ++j)
        if (r.assignment[j] == static_cast<int>(c)) members.push_back(points[j]);
      if (members.empty()) continue;
      next[c] = distance == Distance::Euclidean
                    ? std::accumulate(members.begin(), members.end(), 0.0) / static_cast<double>(members.size())
                    : median_of(std::move(members), r.centroids[c]);
    }
    if (next == r.centroids) break;
    r.centroids = std::move(next);
  }
  return r;
}

CentroidSeeds initial_centroids(std::span<const double> h) {
  if (h.empty()) throw Error("initial centroids need at least one training value");
  const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
  CentroidSeeds s;
  s.c1 = *lo;
  const double m2 = *hi;
  if (*lo == *hi) {
    const double eps = 16.0 * DBL_EPSILON * (m2 != 0.0 ? std::abs(m2) : 1.0);
    s.threshold = m2 + 2.0 * eps;
    s.c2 = m2 + eps;
    return s;
  }
  s.threshold = 2.0 * m2 - s.c1;
  if (!(s.threshold > m2)) s.threshold = std::nextafter(m2, std::numeric_limits<double>::infinity());
  s.c2 = (s.c1 + s.threshold) / 2.0;
  return s;
}

PartitionMatrix::PartitionMatrix(int clusters, int samples)
    : clusters_(clusters), samples_(samples),
      u_(static_cast<std::size_t>(clusters) * static_cast<std::size_t>(samples), 0.0) {
  if (clusters < 1 || samples < 0) throw Error("invalid partition matrix shape");
}

double fuzzy_objective(std::span<const double> points, const PartitionMatrix& u,
                       std::span<const double> centroids, double m) {
  double j_m = 0.0;
  for (int i = 0; i < u.clusters(); ++i)
    for (int j = 0; j < u.samples(); ++j) {
      const double d = points[j] - centroids[i];
      j_m += std::pow(u(i, j), m) * d * d;
    }
  return j_m;
}

FuzzyResult fuzzy_kmeans(std::span<const double> points, std::span<const double> init,
                         const FuzzyOptions& options) {
  const int c = static_cast<int>(init.size());
  const int n = static_cast<int>(points.size());
  if (c < 1) throw Error("fuzzy k-means needs at least one centroid");
  if (n < c) throw Error("fuzzy k-means: c=" + std::to_string(c) + " exceeds n=" + std::to_string(n));
  if (!(options.m > 1.0)) throw Error("fuzzifier m must exceed 1");
  if (!(options.eps > 0.0)) throw Error("termination epsilon must be positive");

  FuzzyResult r{PartitionMatrix(c, n), std::vector<double>(init.begin(), init.end()), 0, {}};
  PartitionMatrix previous(c, n);
  for (int iter = 0; iter < options.max_iter; ++iter) {
    memberships(points, r.centroids, options.m, r.u);
    r.objective_history.push_back(fuzzy_objective(points, r.u, r.centroids, options.m));
    ++r.iterations;
    if (iter > 0) {
      double change = 0.0;
      for (int i = 0; i < c; ++i)
        for (int j = 0; j < n; ++j) change = std::max(change, std::abs(r.u(i, j) - previous(i, j)));
      if (change < options.eps) break;
    }
    previous = r.u;
    for (int i = 0; i < c; ++i) {
      double num = 0.0, den = 0.0;
      for (int j = 0; j < n; ++j) {
        const double w = std::pow(r.u(i, j), options.m);
        num += w * points[j];
        den += w;
      }
      if (den > 0.0) r.centroids[i] = num / den;
    }
  }
  return r;
}

std::vector<int> fuzzy_assign(const PartitionMatrix& u) {
  std::vector<int> out(static_cast<std::size_t>(u.samples()), 0);
  for (int j = 0; j < u.samples(); ++j) {
    int best = 0;
    for (int i = 1; i < u.clusters(); ++i)
      if (u(i, j) > u(best, j)) best = i;
    out[j] = best;
  }
  return out;
}

// One correction pass over the naive mean; a constant sequence then yields its
// value exactly, which the avg rule relies on.
double sample_mean(std::span<const double> h) {
  const double n = static_cast<double>(h.size());
  const double rough = std::accumulate(h.begin(), h.end(), 0.0) / n;
  double residual = 0.0;
  for (double v : h) residual += v - rough;
  return rough + residual / n;
}

double avgmax_factor(std::span<const double> h) {
  if (h.empty()) throw Error("avgmax factor needs at least one training value");
  const double mean = sample_mean(h);
  double factor = -std::numeric_limits<double>::infinity();
  for (double v : h) factor = std::max(factor, v - mean);
  return factor;
}

int knn_k_for(int p) {
  if (p < 2) throw Error("k-nn needs at least two training values");
  const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(p))));
  return std::clamp(k, 1, p - 1);
}

double knn_score(std::span<const double> values, double x, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > values.size()) throw Error("k-nn: invalid k");
  std::vector<double> d;
  d.reserve(values.size());
  for (double v : values) d.push_back(distance_between(x, v));
  std::partial_sort(d.begin(), d.begin() + k, d.end());
  return std::accumulate(d.begin(), d.begin() + k, 0.0) / k;
}

double knn_threshold(std::span<const double> h, int k) {
  double tau = 0.0;
  std::vector<double> rest;
  for (std::size_t j = 0; j < h.size(); ++j) {
    rest.clear();
    for (std::size_t i = 0; i < h.size(); ++i)
      if (i != j) rest.push_back(h[i]);
    tau = std::max(tau, knn_score(rest, h[j], k));
  }
  return tau;
}

GenuineReference make_reference(std::span<const double> h, const ReferenceOptions& options) {
  if (h.empty()) throw Error("reference needs at least one training value");
  GenuineReference ref;
  ref.sums.assign(h.begin(), h.end());
  const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
  ref.m1 = *lo;
  ref.m2 = *hi;
  ref.mean = sample_mean(h);
  ref.factor = avgmax_factor(h);
  ref.seeds = initial_centroids(h);
  ref.options = options;
  if (h.size() >= 2) {
    ref.knn_k = knn_k_for(static_cast<int>(h.size()));
    ref.knn_tau = knn_threshold(h, ref.knn_k);
  }
  return ref;
}

Decision kmeans_verify(const GenuineReference& ref, double x, Distance distance) {
  const auto points = with_point(ref.sums, x);
  const double init[2] = {ref.seeds.c1, ref.seeds.c2};
  const KMeansResult r = kmeans(points, init, distance);
  const int cluster = r.assignment.back();
  return Decision{cluster == 0, distance_between(x, r.centroids[0]), cluster};
}

Decision fuzzy_kmeans_verify(const GenuineReference& ref, double x) {
  const auto points = with_point(ref.sums, x);
  const double init[2] = {ref.seeds.c1, ref.seeds.c2};
  FuzzyOptions opts;
  opts.m = ref.options.fuzzifier;
  const FuzzyResult r = fuzzy_kmeans(points, init, opts);
  const int cluster = fuzzy_assign(r.u).back();
  return Decision{cluster == 0, r.u(0, r.u.samples() - 1), cluster};
}

Decision knn_verify(const GenuineReference& ref, double x) {
  if (ref.knn_k < 1) throw Error("k-nn needs at least two training values");
  const double score = knn_score(ref.sums, x, ref.knn_k);
  return Decision{score <= ref.knn_tau * (1.0 + ref.options.knn_slack), score, std::nullopt};
}

Decision fuzzy_knn_verify(const GenuineReference& ref, double x) {
  if (ref.knn_k < 1) throw Error("fuzzy k-nn needs at least two training values");
  std::vector<double> d;
  for (double v : ref.sums) d.push_back(distance_between(x, v));
  std::partial_sort(d.begin(), d.begin() + ref.knn_k, d.end());
  if (d.front() == 0.0) return Decision{true, 1.0, std::nullopt};

  const double tau = ref.knn_tau * (1.0 + ref.options.knn_slack);
  if (tau == 0.0) return Decision{false, 0.0, std::nullopt};
  const double exponent = 2.0 / (ref.options.fuzzifier - 1.0);
  double sum_w = 0.0;
  for (int i = 0; i < ref.knn_k; ++i) sum_w += std::pow(d[i], -exponent);
  const double w0 = std::pow(tau, -exponent);
  const double mu = sum_w / (sum_w + w0);
  return Decision{mu >= 0.5, mu, std::nullopt};
}

Decision avg_verify(const GenuineReference& ref, double x) {
  return Decision{x <= ref.mean, x - ref.mean, std::nullopt};
}

Decision avgmax_verify(const GenuineReference& ref, double x) {
  const double deviation = x - ref.mean;
  return Decision{deviation <= ref.factor, deviation, std::nullopt};
}

Decision verify(const GenuineReference& ref, ClassifierKind kind, double x) {
  switch (kind) {
    case ClassifierKind::KMeansEuclid: return kmeans_verify(ref, x, Distance::Euclidean);
    case ClassifierKind::KMeansCity: return kmeans_verify(ref, x, Distance::Cityblock);
    case ClassifierKind::FuzzyKMeans: return fuzzy_kmeans_verify(ref, x);
    case ClassifierKind::Knn: return knn_verify(ref, x);
    case ClassifierKind::FuzzyKnn: return fuzzy_knn_verify(ref, x);
    case ClassifierKind::Avg: return avg_verify(ref, x);
    case ClassifierKind::AvgMax: return avgmax_verify(ref, x);
  }
  throw Error("unhandled classifier kind");
}

}  // namespace mvqc
