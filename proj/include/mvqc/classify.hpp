#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mvqc {

enum class ClassifierKind { KMeansEuclid, KMeansCity, FuzzyKMeans, Knn, FuzzyKnn, Avg, AvgMax };

inline constexpr std::array<ClassifierKind, 7> kAllClassifiers = {
    ClassifierKind::KMeansEuclid, ClassifierKind::KMeansCity, ClassifierKind::FuzzyKMeans,
    ClassifierKind::Knn,          ClassifierKind::FuzzyKnn,   ClassifierKind::Avg,
    ClassifierKind::AvgMax};

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier(std::string_view text);
/// Comma-separated names, or "all".
std::vector<ClassifierKind> parse_classifier_list(std::string_view text);

enum class Distance { Euclidean, Cityblock };

// ---------------------------------------------------------------------------
// Crisp k-means

struct KMeansResult {
  std::vector<int> assignment;  // 0-based cluster per point
  std::vector<double> centroids;
  int iterations = 0;
  /// Objective after every assignment step: sum of squared distances for
  /// Euclidean, sum of absolute distances for Cityblock.
  std::vector<double> objective_history;
};

/// Lloyd iteration on scalars. Points go to the nearest centroid (ties to
/// the lower index); centroids become the cluster mean (Euclidean) or
/// median (Cityblock); an empty cluster keeps its centroid. Stops once no
/// centroid moves, or after max_iter rounds.
KMeansResult kmeans(std::span<const double> points, std::span<const double> init,
                    Distance distance = Distance::Euclidean, int max_iter = 1000);

struct CentroidSeeds {
  double c1 = 0;
  double c2 = 0;
  double threshold = 0;
};

/// c1 = min(H); threshold = 2 max(H) - min(H), which exceeds max(H) whenever
/// H is not constant; c2 = (c1 + threshold) / 2. For constant H the threshold
/// is nudged a few ulps above max(H) so the two seeds differ.
CentroidSeeds initial_centroids(std::span<const double> h);

// ---------------------------------------------------------------------------
// Fuzzy k-means

/// Membership degrees, clusters x samples; every column sums to 1.
class PartitionMatrix {
 public:
  PartitionMatrix(int clusters, int samples);

  int clusters() const noexcept { return clusters_; }
  int samples() const noexcept { return samples_; }
  double operator()(int cluster, int sample) const noexcept { return u_[index(cluster, sample)]; }
  double& operator()(int cluster, int sample) noexcept { return u_[index(cluster, sample)]; }

 private:
  std::size_t index(int c, int s) const noexcept {
    return static_cast<std::size_t>(c) * static_cast<std::size_t>(samples_) + static_cast<std::size_t>(s);
  }

  int clusters_;
  int samples_;
  std::vector<double> u_;
};

struct FuzzyOptions {
  double m = 2.0;  // fuzzifier, > 1
  double eps = 1e-5;
  int max_iter = 1000;
};

struct FuzzyResult {
  PartitionMatrix u;
  std::vector<double> centroids;
  int iterations = 0;
  /// J_m = Σ u^m d^2 after every membership update.
  std::vector<double> objective_history;
};

FuzzyResult fuzzy_kmeans(std::span<const double> points, std::span<const double> init,
                         const FuzzyOptions& options = {});

/// J_m for a given partition and set of centers.
double fuzzy_objective(std::span<const double> points, const PartitionMatrix& u,
                       std::span<const double> centroids, double m);

/// Hard cluster per column: argmax membership, ties to the lower index.
std::vector<int> fuzzy_assign(const PartitionMatrix& u);

// ---------------------------------------------------------------------------
// Verification against the genuine moment-summation values H

struct Decision {
  bool accept = false;
  double score = 0;            // distance or membership, per back-end
  std::optional<int> cluster;  // 0 = genuine cluster, for the clustering back-ends
};

/// Arithmetic mean with one residual correction (exact for constant input).
double sample_mean(std::span<const double> h);

/// max_i (H_i - mean(H)).
double avgmax_factor(std::span<const double> h);

struct ReferenceOptions {
  double knn_slack = 0.0;
  double fuzzifier = 2.0;
};

/// Everything the back-ends need, derived once from the training sums.
struct GenuineReference {
  std::vector<double> sums;  // H
  double m1 = 0;             // min(H)
  double m2 = 0;             // max(H)
  double mean = 0;
  double factor = 0;         // avgmax factor
  CentroidSeeds seeds;
  int knn_k = 0;             // 0 when |H| < 2
  double knn_tau = 0;
  ReferenceOptions options;
};

GenuineReference make_reference(std::span<const double> h, const ReferenceOptions& options = {});

/// k = round(sqrt(P)) clamped to [1, P-1].
int knn_k_for(int p);

/// Mean distance from x to its k nearest values in `values`.
double knn_score(std::span<const double> values, double x, int k);

/// Largest leave-one-out kNN score over H.
double knn_threshold(std::span<const double> h, int k);

Decision kmeans_verify(const GenuineReference& ref, double x, Distance distance);
Decision fuzzy_kmeans_verify(const GenuineReference& ref, double x);
/// Accept iff knn_score(H, x) <= tau * (1 + slack).
Decision knn_verify(const GenuineReference& ref, double x);
/// Genuine membership mu = Σw / (Σw + w0) with w = d^(-2/(m-1)) over the k
/// nearest references and w0 = tau^(-2/(m-1)); accept iff mu >= 0.5.
Decision fuzzy_knn_verify(const GenuineReference& ref, double x);
/// Accept iff x <= mean(H).
Decision avg_verify(const GenuineReference& ref, double x);
/// Accept iff x - mean(H) <= factor.
Decision avgmax_verify(const GenuineReference& ref, double x);

Decision verify(const GenuineReference& ref, ClassifierKind kind, double x);

}  // namespace mvqc
