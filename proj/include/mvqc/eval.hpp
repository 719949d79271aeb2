#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvqc/classify.hpp"
#include "mvqc/mvqc.hpp"

namespace mvqc {

// ---------------------------------------------------------------------------
// Dataset manifest
//
//   # comment
//   param modality signature
//   param t_dark 128
//   subject s01
//   genuine s01/g00.pgm
//   imposter s01/f00.pgm
//
// Relative paths resolve against the manifest's directory.

struct SubjectEntry {
  std::string id;
  std::vector<std::filesystem::path> genuine;
  std::vector<std::filesystem::path> imposters;
};

struct DatasetManifest {
  Modality modality = Modality::Signature;
  IrisParams iris;
  std::vector<SubjectEntry> subjects;
};

DatasetManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir);

/// Checks unique subject ids and paths, at least `min_genuine` genuine
/// samples per subject and, if requested, that every file exists.
void validate_manifest(const DatasetManifest& manifest, int min_genuine, bool check_files = true);

/// Parses and validates (files must exist, >= min_genuine genuine samples).
DatasetManifest load_manifest(const std::filesystem::path& path, int min_genuine = 3);

/// Paths are written relative to base_dir when they live under it.
std::string format_manifest(const DatasetManifest& manifest, const std::filesystem::path& base_dir,
                            std::span<const std::string> comments = {});

// ---------------------------------------------------------------------------
// Experiments

/// Where a subject's imposter attempts come from. OtherSubjects takes the
/// first genuine sample of every other subject.
enum class ImposterPool { Manifest, OtherSubjects };

std::string_view to_string(ImposterPool pool);
ImposterPool parse_imposter_pool(std::string_view text);

struct ExperimentConfig {
  int train_count = 3;  // P
  int b = 4;
  int d1 = 128;
  MomentKind kind = MomentKind::C;
  std::vector<ClassifierKind> classifiers{kAllClassifiers.begin(), kAllClassifiers.end()};
  std::uint64_t seed = 0;  // recorded only; the pipeline draws no random numbers
  /// Defaults to OtherSubjects for iris and Manifest for signatures.
  std::optional<ImposterPool> imposter_pool;
  TileOrder order = TileOrder::ZOrder;
  ReferenceOptions reference;
  int jobs = 1;
};

/// Throws on P < 2 or b outside 1..L.
void validate_config(const ExperimentConfig& config);

struct PreparedSample {
  std::filesystem::path path;
  std::vector<int> d1s;                        // parallel to `tiles`
  std::vector<std::vector<RawMoments>> tiles;  // per-tile raw moments for each d1

  const std::vector<RawMoments>& at(int d1) const;
};

struct PreparedSubject {
  std::string id;
  bool ok = true;
  std::string error;
  std::vector<PreparedSample> genuine;
  std::vector<PreparedSample> imposters;
};

/// Preprocessed, tiled dataset; reusable across (b, moment, classifier) grids.
struct PreparedDataset {
  Modality modality = Modality::Signature;
  TileOrder order = TileOrder::ZOrder;
  std::vector<int> d1s;
  std::vector<PreparedSubject> subjects;
};

/// Loads and normalizes every sample. A subject whose samples fail to load
/// or normalize is marked !ok and later skipped. `jobs` bounds parallelism.
PreparedDataset prepare_dataset(const DatasetManifest& manifest, std::span<const int> d1s,
                                TileOrder order = TileOrder::ZOrder, int jobs = 1);

struct SubjectOutcome {
  std::string subject;
  ClassifierKind classifier = ClassifierKind::Knn;
  int genuine_tests = 0;
  int genuine_rejected = 0;
  int imposter_tests = 0;
  int imposter_accepted = 0;
  double frr = 0;
  double far = 0;
};

struct ClassifierSummary {
  ClassifierKind classifier = ClassifierKind::Knn;
  int subjects = 0;
  double avg_frr = 0;
  double avg_far = 0;
  int n_zero_frr = 0;
  int n_zero_far = 0;
};

struct EvalReport {
  MomentKind kind = MomentKind::C;
  int d1 = 128;
  int b = 4;
  int train_count = 3;
  std::vector<ClassifierKind> classifiers;
  std::vector<SubjectOutcome> rows;  // subject-major, manifest order
  std::vector<ClassifierSummary> summary;
  int skipped_subjects = 0;
  std::vector<std::string> warnings;
};

/// Trains on the first P genuine samples of each subject, tests the
/// remaining genuine samples (FRR) and the imposter pool (FAR).
EvalReport evaluate(const PreparedDataset& data, const ExperimentConfig& config);

EvalReport run_experiment(const DatasetManifest& manifest, const ExperimentConfig& config);

struct ZeroCount {
  ClassifierKind classifier = ClassifierKind::Knn;
  int n_zero_frr = 0;
  int n_zero_far = 0;
};

/// Subjects with FRR (FAR) exactly zero, per classifier of the report.
std::vector<ZeroCount> zero_counts(const EvalReport& report);

// ---------------------------------------------------------------------------
// CSV reports

inline constexpr std::string_view kSummaryHeader =
    "classifier,moment,d1,b,avg_frr_pct,avg_far_pct,n_zero_frr,n_zero_far";
inline constexpr std::string_view kSubjectHeader =
    "classifier,moment,d1,b,subject,frr_pct,far_pct,genuine_tests,imposter_tests";

/// Rate in [0,1] as a percentage with two decimals, e.g. 0.0813 -> "8.13".
std::string format_percent(double rate);

std::string summary_csv(std::span<const EvalReport> reports);
std::string subject_csv(std::span<const EvalReport> reports);

/// Writes the summary to `path` and per-subject rows to <stem>_subjects.csv
/// next to it.
void write_report_csv(std::span<const EvalReport> reports, const std::filesystem::path& path);

std::filesystem::path subject_csv_path(const std::filesystem::path& summary_path);

struct SummaryRow {
  std::string classifier;
  std::string moment;
  int d1 = 0;
  int b = 0;
  double avg_frr_pct = 0;
  double avg_far_pct = 0;
  int n_zero_frr = 0;
  int n_zero_far = 0;
};

std::vector<SummaryRow> parse_summary_csv(std::string_view text);

/// Fixed-width table for terminals.
std::string format_summary_table(std::span<const EvalReport> reports);

}  // namespace mvqc
