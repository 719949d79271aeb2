#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "mvqc/error.hpp"
#include "mvqc/eval.hpp"
#include "mvqc/pnm.hpp"
#include "mvqc/synthetic.hpp"

using namespace mvqc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mvqc_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void touch(const fs::path& p) { std::ofstream(p) << "P2 1 1 255 0\n"; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

GrayImage eye(std::mt19937_64& rng, int subject) {
  std::uniform_int_distribution<int> tex(90, 200);
  GrayImage img(160, 160, 220);
  std::mt19937_64 iris_rng(static_cast<std::uint64_t>(subject) * 977 + 5);
  std::uniform_int_distribution<int> iris_tex(60, 230);
  const int cx = 80 + static_cast<int>(rng() % 5) - 2, cy = 78 + static_cast<int>(rng() % 5) - 2;
  for (int y = 0; y < 160; ++y)
    for (int x = 0; x < 160; ++x) {
      const int d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
      const int iris = iris_tex(iris_rng);
      if (d2 <= 15 * 15) img(x, y) = 8;
      else if (d2 <= 45 * 45) img(x, y) = static_cast<std::uint8_t>((iris + tex(rng)) / 2);
    }
  return img;
}

}  // namespace

TEST_CASE("manifest parsing and validation") {
  const fs::path dir = scratch("manifest");
  for (const char* f : {"a1.pgm", "a2.pgm", "a3.pgm", "a4.pgm", "x.pgm"}) touch(dir / f);
  const std::string text =
      "# demo\nparam modality iris\nparam offset1 6\nparam offset2 12\n"
      "subject a\ngenuine a1.pgm\ngenuine a2.pgm\ngenuine a3.pgm\ngenuine a4.pgm\nimposter x.pgm\n";
  {
    std::ofstream(dir / "m.txt") << text;
  }
  const DatasetManifest m = load_manifest(dir / "m.txt", 4);
  CHECK(m.modality == Modality::Iris);
  CHECK(m.iris.offset1 == 6);
  CHECK(m.iris.offset2 == 12);
  REQUIRE(m.subjects.size() == 1);
  CHECK(m.subjects[0].genuine[2] == dir / "a3.pgm");
  CHECK(m.subjects[0].imposters.size() == 1);

  CHECK_THROWS_AS(load_manifest(dir / "m.txt", 5), Error);

  const DatasetManifest dup = parse_manifest(
      "subject a\ngenuine a1.pgm\ngenuine a1.pgm\ngenuine a2.pgm\ngenuine a3.pgm\n", dir);
  CHECK_THROWS_AS(validate_manifest(dup, 3), Error);

  const DatasetManifest missing =
      parse_manifest("subject a\ngenuine a1.pgm\ngenuine a2.pgm\ngenuine nope.pgm\n", dir);
  CHECK_THROWS_AS(validate_manifest(missing, 3), Error);
  CHECK_NOTHROW(validate_manifest(missing, 3, false));

  CHECK_THROWS_AS(parse_manifest("genuine a1.pgm\n", dir), ParseError);
  CHECK_THROWS_AS(parse_manifest("subject a\nfrobnicate 3\n", dir), ParseError);
  CHECK_THROWS_AS(load_manifest(dir / "absent.txt"), Error);

  const DatasetManifest again = parse_manifest(format_manifest(m, dir), dir);
  CHECK(again.subjects[0].genuine == m.subjects[0].genuine);
  CHECK(again.iris.offset2 == 12);
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  CHECK_NOTHROW(validate_config(c));
  c.b = 17;
  CHECK_THROWS_AS(validate_config(c), Error);
  c.b = 4;
  c.train_count = 1;
  CHECK_THROWS_AS(validate_config(c), Error);
  c.train_count = 3;
  c.d1 = 100;
  CHECK_THROWS_AS(validate_config(c), Error);
  CHECK(parse_imposter_pool("other-subjects") == ImposterPool::OtherSubjects);
}

TEST_CASE("percent formatting and zero counts") {
  CHECK(format_percent(0.0813) == "8.13");
  CHECK(format_percent(0.08130) == "8.13");
  CHECK(format_percent(0) == "0.00");
  CHECK(format_percent(1) == "100.00");
  CHECK(format_percent(1.0 / 3) == "33.33");

  EvalReport empty;
  empty.classifiers = {ClassifierKind::Knn};
  const auto z = zero_counts(empty);
  REQUIRE(z.size() == 1);
  CHECK(z[0].n_zero_frr == 0);
  CHECK(z[0].n_zero_far == 0);

  EvalReport mixed;
  mixed.classifiers = {ClassifierKind::Knn, ClassifierKind::Avg};
  const double rates[][2] = {{0, 0}, {0.2, 0}, {0, 0.1}};
  for (int s = 0; s < 3; ++s)
    for (ClassifierKind k : mixed.classifiers) {
      SubjectOutcome o;
      o.subject = "s" + std::to_string(s);
      o.classifier = k;
      o.frr = k == ClassifierKind::Knn ? rates[s][0] : 0;
      o.far = k == ClassifierKind::Knn ? rates[s][1] : 0.5;
      mixed.rows.push_back(o);
    }
  const auto mz = zero_counts(mixed);
  CHECK(mz[0].n_zero_frr == 2);
  CHECK(mz[0].n_zero_far == 2);
  CHECK(mz[1].n_zero_frr == 3);
  CHECK(mz[1].n_zero_far == 0);
}

TEST_CASE("synthetic experiment and CSV round-trip") {
  const fs::path dir = scratch("synthetic");
  SyntheticOptions opts;
  opts.subjects = 4;
  opts.genuine = 8;
  opts.imposters = 5;
  opts.seed = 3;
  const SyntheticDataset ds = gen_synthetic(dir, opts);
  CHECK(ds.manifest.subjects.size() == 4);
  const std::string first_bytes = slurp(dir / "s001" / "g00.pgm");

  const SyntheticDataset again = gen_synthetic(scratch("synthetic2"), opts);
  CHECK(slurp(again.manifest_path.parent_path() / "s001" / "g00.pgm") == first_bytes);
  CHECK(again.planted == ds.planted);

  ExperimentConfig c;
  c.train_count = 5;
  const DatasetManifest m = load_manifest(ds.manifest_path);
  const EvalReport r = run_experiment(m, c);
  CHECK(r.rows.size() == 4 * 7);
  for (const auto& s : r.summary) {
    CHECK(s.avg_frr == 0);
    CHECK(s.avg_far == 0);
    CHECK(s.n_zero_frr == 4);
    CHECK(s.n_zero_far == 4);
  }
  for (const auto& row : r.rows) {
    CHECK(row.genuine_tests == 3);
    CHECK(row.imposter_tests == 5);
  }

  const std::vector<EvalReport> reports = {r};
  const fs::path csv = dir / "out" / "report.csv";
  fs::create_directories(csv.parent_path());
  write_report_csv(reports, csv);
  const std::string text = slurp(csv);
  CHECK(text.rfind(std::string(kSummaryHeader) + "\n", 0) == 0);
  const auto parsed = parse_summary_csv(text);
  REQUIRE(parsed.size() == 7);
  CHECK(parsed[0].classifier == "kmeans-euclidean");
  CHECK(parsed[0].moment == "Moment_C");
  CHECK(parsed[0].n_zero_far == 4);
  CHECK(slurp(subject_csv_path(csv)).rfind(std::string(kSubjectHeader), 0) == 0);
  CHECK(subject_csv(reports) == slurp(subject_csv_path(csv)));

  // Other-subject imposters: one attempt from each of the other 3 subjects.
  c.imposter_pool = ImposterPool::OtherSubjects;
  for (const auto& row : run_experiment(m, c).rows) CHECK(row.imposter_tests == 3);
}

TEST_CASE("identical imposters are always accepted") {
  const fs::path dir = scratch("identical");
  SyntheticOptions opts;
  opts.subjects = 1;
  opts.genuine = 4;
  const SyntheticSubject s = synthesize_subject(0, opts);
  std::string manifest = "subject s\n";
  for (int k = 0; k < 4; ++k) {
    write_pgm(dir / ("g" + std::to_string(k) + ".pgm"), s.genuine[0]);
    manifest += "genuine g" + std::to_string(k) + ".pgm\n";
  }
  for (int k = 0; k < 2; ++k) {
    write_pgm(dir / ("f" + std::to_string(k) + ".pgm"), s.genuine[0]);
    manifest += "imposter f" + std::to_string(k) + ".pgm\n";
  }
  std::ofstream(dir / "m.txt") << manifest;
  const EvalReport r = run_experiment(load_manifest(dir / "m.txt"), ExperimentConfig{});
  for (const auto& row : r.rows) {
    CHECK(row.frr == 0);
    CHECK(row.far == 1);
  }
}

TEST_CASE("failing subjects are skipped with a warning") {
  const fs::path dir = scratch("skip");
  SyntheticOptions opts;
  opts.subjects = 2;
  opts.genuine = 4;
  opts.imposters = 1;
  const SyntheticDataset ds = gen_synthetic(dir, opts);
  write_pgm(dir / "s002" / "g01.pgm", GrayImage(64, 64, 255));  // blank page
  const EvalReport r = run_experiment(load_manifest(ds.manifest_path), ExperimentConfig{});
  CHECK(r.skipped_subjects == 1);
  CHECK_FALSE(r.warnings.empty());
  CHECK(r.rows.size() == 7);
  CHECK(r.summary[0].subjects == 1);
}

TEST_CASE("iris run shaped like a 45-subject, 5-sample database") {
  const fs::path dir = scratch("iris45");
  std::mt19937_64 rng(99);
  DatasetManifest m;
  m.modality = Modality::Iris;
  for (int s = 0; s < 45; ++s) {
    SubjectEntry e;
    e.id = "u" + std::to_string(s);
    for (int k = 0; k < 5; ++k) {
      const fs::path p = dir / (e.id + "_" + std::to_string(k) + ".pgm");
      write_pgm(p, eye(rng, s));
      e.genuine.push_back(p);
    }
    m.subjects.push_back(e);
  }
  ExperimentConfig c;
  c.b = 8;
  c.jobs = 2;
  const EvalReport r = run_experiment(m, c);
  CHECK(r.skipped_subjects == 0);
  CHECK(r.rows.size() == 45 * 7);
  for (const auto& row : r.rows) {
    CHECK(row.genuine_tests == 2);
    CHECK(row.imposter_tests == 44);
    CHECK(row.frr >= 0);
    CHECK(row.far <= 1);
  }

  c.jobs = 1;
  const EvalReport serial = run_experiment(m, c);
  const std::vector<EvalReport> a = {r}, b = {serial};
  CHECK(subject_csv(a) == subject_csv(b));
}
