#include <doctest.h>

#include <cfloat>
#include <cmath>
#include <random>

#include "mvqc/classify.hpp"
#include "mvqc/error.hpp"
#include "oracles.hpp"

using namespace mvqc;

TEST_CASE("kmeans basics") {
  const std::vector<double> pts = {1, 1, 1, 10, 10};
  const KMeansResult r = kmeans(pts, std::vector<double>{1, 10});
  CHECK(r.assignment == std::vector<int>{0, 0, 0, 1, 1});
  CHECK(r.centroids == std::vector<double>{1, 10});

  const KMeansResult one = kmeans(std::vector<double>{1, 2, 6}, std::vector<double>{0});
  CHECK(one.centroids[0] == 3);

  CHECK_THROWS_AS(kmeans(std::vector<double>{1}, std::vector<double>{0, 1}), Error);

  // Cityblock moves centroids to the median.
  const KMeansResult city =
      kmeans(std::vector<double>{0, 1, 2, 30, 40, 100}, std::vector<double>{0, 100}, Distance::Cityblock);
  CHECK(city.centroids[0] == 2);
  CHECK(city.centroids[1] == 100);
}

TEST_CASE("kmeans objective never increases") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> pts(5 + trial % 20);
    for (auto& p : pts) p = u(rng);
    for (Distance d : {Distance::Euclidean, Distance::Cityblock}) {
      const KMeansResult r = kmeans(pts, std::vector<double>{pts[0], pts[1]}, d);
      for (std::size_t i = 1; i < r.objective_history.size(); ++i)
        CHECK(r.objective_history[i] <= r.objective_history[i - 1]);
    }
  }
}

TEST_CASE("kmeans on well separated data finds the best split") {
  std::mt19937_64 rng(67);
  std::normal_distribution<double> noise(0, 0.1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> pts;
    for (int i = 0; i < 7; ++i) pts.push_back(1 + noise(rng));
    for (int i = 0; i < 3; ++i) pts.push_back(10 + noise(rng));
    const KMeansResult r = kmeans(pts, std::vector<double>{pts[0], pts[9]});
    CHECK(r.objective_history.back() == doctest::Approx(oracle::best_threshold_sse(pts)));
    for (int i = 0; i < 10; ++i) CHECK(r.assignment[static_cast<std::size_t>(i)] == (i < 7 ? 0 : 1));
  }
}

TEST_CASE("initial_centroids") {
  const CentroidSeeds s = initial_centroids(std::vector<double>{2, 5, 8});
  CHECK(s.c1 == 2);
  CHECK(s.threshold == 14);
  CHECK(s.c2 == 8);

  const CentroidSeeds flat = initial_centroids(std::vector<double>{4, 4, 4});
  CHECK(flat.c1 == 4);
  CHECK(flat.c2 > 4);
  CHECK(flat.c2 - 4 <= 64 * DBL_EPSILON * 4);
  CHECK(flat.threshold > flat.c2);

  const CentroidSeeds single = initial_centroids(std::vector<double>{0});
  CHECK(single.c1 == 0);
  CHECK(single.c2 > 0);

  CHECK_THROWS_AS(initial_centroids(std::vector<double>{}), Error);
}

TEST_CASE("fuzzy k-means") {
  const FuzzyResult sym = fuzzy_kmeans(std::vector<double>{0, 5, 10}, std::vector<double>{0, 10});
  CHECK(sym.u(0, 1) == doctest::Approx(0.5));
  CHECK(sym.u(1, 1) == doctest::Approx(0.5));

  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(0, 20);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> pts(8);
    for (auto& p : pts) p = u(rng);
    const FuzzyResult r = fuzzy_kmeans(pts, std::vector<double>{pts[0], pts[1] + 1});
    for (int j = 0; j < r.u.samples(); ++j) CHECK(r.u(0, j) + r.u(1, j) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 1; i < r.objective_history.size(); ++i)
      CHECK(r.objective_history[i] <= r.objective_history[i - 1] * (1 + 1e-12));
  }

  std::normal_distribution<double> noise(0, 0.05);
  std::vector<double> pts;
  for (int i = 0; i < 7; ++i) pts.push_back(1 + noise(rng));
  for (int i = 0; i < 3; ++i) pts.push_back(10 + noise(rng));
  const FuzzyResult f = fuzzy_kmeans(pts, std::vector<double>{1, 10});
  CHECK(fuzzy_assign(f.u) == kmeans(pts, std::vector<double>{1, 10}).assignment);

  CHECK_THROWS_AS(fuzzy_kmeans(std::vector<double>{1}, std::vector<double>{0, 1}), Error);
  FuzzyOptions bad;
  bad.m = 1.0;
  CHECK_THROWS_AS(fuzzy_kmeans(pts, std::vector<double>{1, 10}, bad), Error);
}

TEST_CASE("fuzzy_assign reproduces the published partition inference") {
  const double table[10][2] = {{0.037851, 0.962149}, {3.61e-05, 0.999964}, {0.027781, 0.972219},
                               {0.00341, 0.99659},   {0.01285, 0.98715},   {0.012207, 0.987793},
                               {0.001298, 0.998702}, {0.999855, 0.000145}, {1, 1.11e-07},
                               {0.999903, 9.72e-05}};
  PartitionMatrix u(2, 10);
  for (int j = 0; j < 10; ++j) {
    u(0, j) = table[j][0];
    u(1, j) = table[j][1];
  }
  // Clusters are 0-based here; the published inference column reads 2,...,2,1,1,1.
  CHECK(fuzzy_assign(u) == std::vector<int>{1, 1, 1, 1, 1, 1, 1, 0, 0, 0});

  PartitionMatrix tie(2, 1);
  tie(0, 0) = tie(1, 0) = 0.5;
  CHECK(fuzzy_assign(tie) == std::vector<int>{0});
}

TEST_CASE("knn") {
  CHECK(knn_k_for(2) == 1);
  CHECK(knn_k_for(3) == 2);
  CHECK(knn_k_for(10) == 3);
  CHECK(knn_k_for(30) == 5);

  const std::vector<double> h = {1, 1.1, 0.9, 1.05, 0.95};
  const GenuineReference ref = make_reference(h);
  for (double x : h) CHECK(knn_verify(ref, x).accept);
  CHECK_FALSE(knn_verify(ref, 100).accept);

  CHECK(knn_score(std::vector<double>{0, 1, 5}, 2, 2) == 1.5);
  CHECK_THROWS_AS(knn_verify(make_reference(std::vector<double>{1}), 1), Error);
}

TEST_CASE("fuzzy knn") {
  const std::vector<double> h = {1, 2, 4, 7};
  const GenuineReference ref = make_reference(h);
  for (double x : h) {
    const Decision d = fuzzy_knn_verify(ref, x);
    CHECK(d.accept);
    CHECK(d.score == 1.0);
  }
  const Decision far = fuzzy_knn_verify(ref, 7 + 100 * ref.knn_tau);
  CHECK_FALSE(far.accept);
  CHECK(far.score < 0.05);

  // With k = 1 a distance of exactly tau sits on the 0.5 boundary.
  const GenuineReference two = make_reference(std::vector<double>{0, 2});
  REQUIRE(two.knn_k == 1);
  const Decision edge = fuzzy_knn_verify(two, 2 + two.knn_tau);
  CHECK(edge.score == doctest::Approx(0.5));
  CHECK(edge.accept);
}

TEST_CASE("avg and avgmax") {
  CHECK(avgmax_factor(std::vector<double>{1, 2, 3}) == 1);
  CHECK(avgmax_factor(std::vector<double>{5, 5}) == 0);

  const std::vector<double> h = {1, 2, 3, 10};
  const GenuineReference ref = make_reference(h);
  CHECK(avg_verify(ref, ref.mean).accept);
  CHECK_FALSE(avg_verify(ref, 10).accept);
  CHECK(avgmax_verify(ref, 10).accept);
  CHECK_FALSE(avgmax_verify(ref, 10 + 10 + 1).accept);
  for (double x : h) CHECK(avgmax_verify(ref, x).accept);
}

TEST_CASE("clustering verification") {
  const std::vector<double> h = {2, 5, 8};
  const GenuineReference ref = make_reference(h);
  for (ClassifierKind k : {ClassifierKind::KMeansEuclid, ClassifierKind::KMeansCity, ClassifierKind::FuzzyKMeans}) {
    CHECK(verify(ref, k, ref.m1).accept);
    CHECK_FALSE(verify(ref, k, 1000).accept);
  }
}

TEST_CASE("separable subject: every classifier agrees") {
  const std::vector<double> h = {1.0, 1.0, 1.0, 1.0};
  const GenuineReference ref = make_reference(h);
  for (ClassifierKind k : kAllClassifiers) {
    CHECK(verify(ref, k, 1.0).accept);
    CHECK_FALSE(verify(ref, k, 16.0).accept);
  }
}

TEST_CASE("classifier names") {
  for (ClassifierKind k : kAllClassifiers) CHECK(parse_classifier(to_string(k)) == k);
  CHECK(parse_classifier_list("all").size() == 7);
  CHECK(parse_classifier_list("knn,avg") == std::vector<ClassifierKind>{ClassifierKind::Knn, ClassifierKind::Avg});
  CHECK_THROWS_AS(parse_classifier("svm"), Error);
}
