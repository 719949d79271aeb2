#include "mvqc/eval.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "mvqc/pnm.hpp"

namespace mvqc {
namespace fs = std::filesystem;
namespace {

PreparedSample prepare_sample(const fs::path& path, const DatasetManifest& manifest,
                              std::span<const int> d1s, TileOrder order) {
  const BinaryImage mask = normalize_sample(read_image(path), manifest.modality, manifest.iris);
  PreparedSample s;
  s.path = path;
  for (int d1 : d1s) {
    s.d1s.push_back(d1);
    s.tiles.push_back(tile_moments(mask, d1, order));
  }
  return s;
}

PreparedSubject prepare_subject(const SubjectEntry& entry, const DatasetManifest& manifest,
                                std::span<const int> d1s, TileOrder order) {
  PreparedSubject out;
  out.id = entry.id;
  try {
    for (const auto& p : entry.genuine) out.genuine.push_back(prepare_sample(p, manifest, d1s, order));
    for (const auto& p : entry.imposters) out.imposters.push_back(prepare_sample(p, manifest, d1s, order));
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
    out.genuine.clear();
    out.imposters.clear();
  }
  return out;
}

double sample_sum(const PreparedSample& s, const MvqcTemplate& t) {
  const auto fv = features_from_moments(s.at(t.d1), t.d1, t.kind);
  return moment_summation(fv, t.indices);
}

}  // namespace

const std::vector<RawMoments>& PreparedSample::at(int d1) const {
  for (std::size_t i = 0; i < d1s.size(); ++i)
    if (d1s[i] == d1) return tiles[i];
  throw Error("sample " + path.string() + " was not tiled at d1=" + std::to_string(d1));
}

void validate_config(const ExperimentConfig& config) {
  if (config.train_count < 2) throw Error("P must be at least 2");
  const int count = tile_count(kNormalizedSide, config.d1);
  if (config.b < 1 || config.b > count)
    throw Error("b=" + std::to_string(config.b) + " outside 1.." + std::to_string(count) +
                " for d1=" + std::to_string(config.d1));
  if (config.classifiers.empty()) throw Error("no classifiers selected");
  if (config.jobs < 1) throw Error("jobs must be at least 1");
}

PreparedDataset prepare_dataset(const DatasetManifest& manifest, std::span<const int> d1s,
                                TileOrder order, int jobs) {
  PreparedDataset data;
  data.modality = manifest.modality;
  data.order = order;
  data.d1s.assign(d1s.begin(), d1s.end());
  for (int d1 : d1s) tile_count(kNormalizedSide, d1);

  const std::size_t n = manifest.subjects.size();
  data.subjects.resize(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++)
      data.subjects[i] = prepare_subject(manifest.subjects[i], manifest, d1s, order);
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(n, 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return data;
}

EvalReport evaluate(const PreparedDataset& data, const ExperimentConfig& config) {
  validate_config(config);
  EvalReport report;
  report.kind = config.kind;
  report.d1 = config.d1;
  report.b = config.b;
  report.train_count = config.train_count;
  report.classifiers = config.classifiers;

  const ImposterPool pool = config.imposter_pool.value_or(
      data.modality == Modality::Iris ? ImposterPool::OtherSubjects : ImposterPool::Manifest);
  TemplateParams params;
  params.d1 = config.d1;
  params.b = config.b;
  params.kind = config.kind;
  params.order = data.order;
  params.reference = config.reference;

  const auto P = static_cast<std::size_t>(config.train_count);
  for (std::size_t si = 0; si < data.subjects.size(); ++si) {
    const PreparedSubject& subject = data.subjects[si];
    if (!subject.ok) {
      ++report.skipped_subjects;
      report.warnings.push_back("subject " + subject.id + " skipped: " + subject.error);
      continue;
    }
    if (subject.genuine.size() < P + 1) {
      ++report.skipped_subjects;
      report.warnings.push_back("subject " + subject.id + " skipped: fewer than P+1 genuine samples");
      continue;
    }

    std::vector<FeatureVector> training;
    for (std::size_t k = 0; k < P; ++k)
      training.push_back(features_from_moments(subject.genuine[k].at(config.d1), config.d1, config.kind));
    const MvqcTemplate tmpl = build_template(subject.id, std::span<const FeatureVector>(training), params);

    std::vector<double> genuine_x, imposter_x;
    for (std::size_t k = P; k < subject.genuine.size(); ++k) genuine_x.push_back(sample_sum(subject.genuine[k], tmpl));
    if (pool == ImposterPool::Manifest) {
      for (const auto& s : subject.imposters) imposter_x.push_back(sample_sum(s, tmpl));
    } else {
      for (std::size_t oi = 0; oi < data.subjects.size(); ++oi) {
        const auto& other = data.subjects[oi];
        if (oi == si || !other.ok || other.genuine.empty()) continue;
        imposter_x.push_back(sample_sum(other.genuine.front(), tmpl));
      }
    }
    if (imposter_x.empty()) report.warnings.push_back("subject " + subject.id + " has no imposter attempts");

    for (ClassifierKind kind : config.classifiers) {
      SubjectOutcome o;
      o.subject = subject.id;
      o.classifier = kind;
      o.genuine_tests = static_cast<int>(genuine_x.size());
      o.imposter_tests = static_cast<int>(imposter_x.size());
      for (double x : genuine_x)
        if (!verify(tmpl.reference, kind, x).accept) ++o.genuine_rejected;
      for (double x : imposter_x)
        if (verify(tmpl.reference, kind, x).accept) ++o.imposter_accepted;
      o.frr = o.genuine_tests ? static_cast<double>(o.genuine_rejected) / o.genuine_tests : 0.0;
      o.far = o.imposter_tests ? static_cast<double>(o.imposter_accepted) / o.imposter_tests : 0.0;
      report.rows.push_back(std::move(o));
    }
  }

  const auto zeros = zero_counts(report);
  for (std::size_t c = 0; c < config.classifiers.size(); ++c) {
    ClassifierSummary s;
    s.classifier = config.classifiers[c];
    for (const auto& row : report.rows) {
      if (row.classifier != s.classifier) continue;
      ++s.subjects;
      s.avg_frr += row.frr;
      s.avg_far += row.far;
    }
    if (s.subjects > 0) {
      s.avg_frr /= s.subjects;
      s.avg_far /= s.subjects;
    }
    s.n_zero_frr = zeros[c].n_zero_frr;
    s.n_zero_far = zeros[c].n_zero_far;
    report.summary.push_back(s);
  }
  return report;
}

EvalReport run_experiment(const DatasetManifest& manifest, const ExperimentConfig& config) {
  validate_config(config);
  const int d1s[] = {config.d1};
  return evaluate(prepare_dataset(manifest, d1s, config.order, config.jobs), config);
}

std::vector<ZeroCount> zero_counts(const EvalReport& report) {
  std::vector<ZeroCount> out;
  for (ClassifierKind kind : report.classifiers) {
    ZeroCount z{kind, 0, 0};
    for (const auto& row : report.rows) {
      if (row.classifier != kind) continue;
      if (row.frr == 0.0) ++z.n_zero_frr;
      if (row.far == 0.0) ++z.n_zero_far;
    }
    out.push_back(z);
  }
  return out;
}

}  // namespace mvqc
