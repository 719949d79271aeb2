// mvqc: command-line front end for preprocessing, enrollment, verification,
// batch evaluation and synthetic data generation.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cli_config.hpp"
#include "mvqc/eval.hpp"
#include "mvqc/imaging.hpp"
#include "mvqc/mvqc.hpp"
#include "mvqc/pnm.hpp"
#include "mvqc/quadtree.hpp"
#include "mvqc/synthetic.hpp"

namespace fs = std::filesystem;
using namespace mvqc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitReject = 2;

struct Preset {
  const char* name;
  int offset1;
  int offset2;
  int b;
};

// Window offsets and b per iris database, d1 = 128, P = 3.
constexpr Preset kPresets[] = {{"casia", 20, 40, 10}, {"ice", 6, 12, 6}, {"mmu", 20, 40, 8}};

const Preset& find_preset(const std::string& name) {
  for (const auto& p : kPresets)
    if (name == p.name) return p;
  throw Error("unknown preset '" + name + "' (expected casia, ice or mmu)");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error(std::string("bad ") + what + " value '" + item + "'");
    }
  }
  if (out.empty()) throw Error(std::string("empty ") + what + " list");
  return out;
}

bool given(const CLI::App* cmd, const char* name) { return cmd->get_option(name)->count() > 0; }

CLI::Option* scalar(CLI::Option* opt) { return opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast); }

// Shared iris preprocessing flags; presets fill what the user left unset.
struct IrisFlags {
  int t_dark = 128;
  int offset1 = 20;
  int offset2 = 40;
  std::string preset;

  void add(CLI::App* cmd) {
    scalar(cmd->add_option("--t-dark", t_dark, "Upper intensity bound for the pupil histogram peak")
               ->capture_default_str()
               ->check(CLI::Range(0, 255)));
    scalar(cmd->add_option("--offset1", offset1, "Window origin offset (pixels)")->capture_default_str());
    scalar(cmd->add_option("--offset2", offset2, "Window size offset (pixels)")->capture_default_str());
    scalar(cmd->add_option("--preset", preset, "Database defaults: casia, ice or mmu"));
  }

  void apply_preset(const CLI::App* cmd) {
    if (preset.empty()) return;
    const Preset& p = find_preset(preset);
    if (!given(cmd, "--offset1")) offset1 = p.offset1;
    if (!given(cmd, "--offset2")) offset2 = p.offset2;
  }

  // Flags given explicitly win over the manifest's values.
  IrisParams merge(const CLI::App* cmd, IrisParams base) const {
    if (given(cmd, "--t-dark")) base.t_dark = t_dark;
    if (given(cmd, "--offset1") || !preset.empty()) base.offset1 = offset1;
    if (given(cmd, "--offset2") || !preset.empty()) base.offset2 = offset2;
    return base;
  }

  IrisParams params() const { return IrisParams{t_dark, offset1, offset2}; }
};

// ---------------------------------------------------------------------------

struct PreprocessArgs {
  std::string modality = "signature";
  std::string out;
  bool dump_tiles = false;
  int d1 = 128;
  std::string tile_order = "zorder";
  IrisFlags iris;
  std::vector<std::string> inputs;
};

int run_preprocess(const CLI::App* cmd, PreprocessArgs& a) {
  a.iris.apply_preset(cmd);
  const Modality modality = parse_modality(a.modality);
  const TileOrder order = parse_tile_order(a.tile_order);
  if (a.dump_tiles) tile_count(kNormalizedSide, a.d1);
  fs::create_directories(a.out);
  int failures = 0;
  for (const auto& input : a.inputs) {
    try {
      const GrayImage img = read_image(input);
      const std::string stem = fs::path(input).stem().string();
      BinaryImage mask(1, 1);
      if (modality == Modality::Iris) {
        const GrayImage pif = extract_pif(img, a.iris.params());
        write_pgm(fs::path(a.out) / (stem + ".pgm"), pif);
        mask = binarize_mean(pif);
      } else {
        mask = signature_normalize(img);
        write_pgm(fs::path(a.out) / (stem + ".pgm"), mask_to_gray(mask));
      }
      if (a.dump_tiles) {
        const TileGrid grid = decompose(mask, a.d1, order);
        char suffix[32];
        for (int i = 1; i <= grid.count(); ++i) {
          std::snprintf(suffix, sizeof suffix, "_t%02d.pgm", i);
          write_pgm(fs::path(a.out) / (stem + suffix), mask_to_gray(grid.tile(i)));
        }
      }
      std::cout << input << " -> " << (fs::path(a.out) / (stem + ".pgm")).string() << '\n';
    } catch (const std::exception& e) {
      std::cerr << "error: " << input << ": " << e.what() << '\n';
      ++failures;
    }
  }
  return failures ? kExitError : kExitOk;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string manifest;
  std::string out;
  int train_count = 3;
  int b = 4;
  int d1 = 128;
  std::string moment = "C";
  std::string tile_order = "zorder";
  double knn_slack = 0.0;
  IrisFlags iris;
};

int run_train(const CLI::App* cmd, TrainArgs& a) {
  if (!a.iris.preset.empty()) {
    const Preset& p = find_preset(a.iris.preset);
    if (!given(cmd, "--components")) a.b = p.b;
    if (!given(cmd, "--train-count")) a.train_count = 3;
  }
  a.iris.apply_preset(cmd);

  ExperimentConfig cfg;
  cfg.train_count = a.train_count;
  cfg.b = a.b;
  cfg.d1 = a.d1;
  validate_config(cfg);

  DatasetManifest manifest = load_manifest(a.manifest, a.train_count);
  manifest.iris = a.iris.merge(cmd, manifest.iris);
  TemplateParams params;
  params.d1 = a.d1;
  params.b = a.b;
  params.kind = parse_moment_kind(a.moment);
  params.order = parse_tile_order(a.tile_order);
  params.reference.knn_slack = a.knn_slack;

  fs::create_directories(a.out);
  int failures = 0;
  for (const auto& subject : manifest.subjects) {
    try {
      std::vector<BinaryImage> samples;
      for (int k = 0; k < a.train_count; ++k)
        samples.push_back(normalize_sample(read_image(subject.genuine[static_cast<std::size_t>(k)]),
                                           manifest.modality, manifest.iris));
      MvqcTemplate t = build_template(subject.id, std::span<const BinaryImage>(samples), params);
      t.modality = manifest.modality;
      t.iris = manifest.iris;
      const fs::path path = fs::path(a.out) / (subject.id + ".tmpl");
      write_template(path, t);
      std::cout << subject.id << " -> " << path.string() << '\n';
    } catch (const std::exception& e) {
      std::cerr << "error: subject " << subject.id << ": " << e.what() << '\n';
      ++failures;
    }
  }
  return failures ? kExitError : kExitOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string tmpl;
  std::string classifier = "knn";
  std::vector<std::string> inputs;
};

int run_verify(VerifyArgs& a) {
  const ClassifierKind kind = parse_classifier(a.classifier);
  const MvqcTemplate t = read_template(a.tmpl);
  bool all_accepted = true;
  for (const auto& input : a.inputs) {
    const BinaryImage mask = normalize_sample(read_image(input), t.modality, t.iris);
    const double x = template_score_input(t, mask);
    const Decision d = verify(t.reference, kind, x);
    all_accepted = all_accepted && d.accept;
    std::cout << (d.accept ? "accept" : "reject") << " score=" << format_double(d.score)
              << " classifier=" << to_string(kind);
    if (a.inputs.size() > 1) std::cout << " input=" << input;
    std::cout << '\n';
  }
  return all_accepted ? kExitOk : kExitReject;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string manifest;
  std::string out;
  int train_count = 3;
  std::string b = "4";
  std::string d1 = "128";
  std::string moment = "C";
  std::string classifiers = "all";
  std::string tile_order = "zorder";
  std::string imposter_pool;
  double knn_slack = 0.0;
  std::uint64_t seed = 0;
  int jobs = 1;
  IrisFlags iris;
};

int run_evaluate(const CLI::App* cmd, EvaluateArgs& a) {
  if (!a.iris.preset.empty()) {
    const Preset& p = find_preset(a.iris.preset);
    if (!given(cmd, "--components")) a.b = std::to_string(p.b);
    if (!given(cmd, "--train-count")) a.train_count = 3;
    if (!given(cmd, "--d1")) a.d1 = "128";
  }
  a.iris.apply_preset(cmd);

  const auto bs = parse_int_list(a.b, "b");
  const auto d1s = parse_int_list(a.d1, "d1");
  std::vector<MomentKind> kinds;
  for (const auto& m : split_list(a.moment)) kinds.push_back(parse_moment_kind(m));
  if (kinds.empty()) throw Error("empty moment list");

  ExperimentConfig base;
  base.train_count = a.train_count;
  base.classifiers = parse_classifier_list(a.classifiers);
  base.seed = a.seed;
  base.order = parse_tile_order(a.tile_order);
  base.reference.knn_slack = a.knn_slack;
  base.jobs = a.jobs;
  if (!a.imposter_pool.empty()) base.imposter_pool = parse_imposter_pool(a.imposter_pool);

  std::vector<ExperimentConfig> grid;
  for (MomentKind kind : kinds)
    for (int d1 : d1s)
      for (int b : bs) {
        ExperimentConfig c = base;
        c.kind = kind;
        c.d1 = d1;
        c.b = b;
        validate_config(c);
        grid.push_back(c);
      }

  DatasetManifest manifest = load_manifest(a.manifest, a.train_count + 1);
  manifest.iris = a.iris.merge(cmd, manifest.iris);
  const PreparedDataset data = prepare_dataset(manifest, d1s, base.order, a.jobs);

  std::vector<EvalReport> reports;
  for (const auto& c : grid) reports.push_back(evaluate(data, c));
  for (const auto& w : reports.front().warnings) std::cerr << "warning: " << w << '\n';

  fs::create_directories(a.out);
  const fs::path csv = fs::path(a.out) / "report.csv";
  write_report_csv(reports, csv);
  std::cout << format_summary_table(reports);
  std::cout << "wrote " << csv.string() << " and " << subject_csv_path(csv).string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string out;
  SyntheticOptions options;
};

int run_gen(GenArgs& a) {
  const SyntheticDataset ds = gen_synthetic(a.out, a.options);
  std::cout << "wrote " << ds.manifest.subjects.size() << " subjects to " << ds.manifest_path.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

// Config entries become "--key=value" arguments placed before the user's own
// arguments, so anything on the command line takes precedence.
std::vector<std::string> inject_config(const CLI::App& app, const std::vector<std::string>& args) {
  std::optional<std::string> config_path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (!config_path) {
    if (const char* env = std::getenv("MVQC_CONFIG"); env && *env) config_path = env;
  }
  if (!config_path || args.size() < 2) return args;

  const CLI::App* sub = nullptr;
  for (const auto* s : app.get_subcommands({}))
    if (s->get_name() == args[1]) sub = s;
  if (!sub) return args;

  std::vector<std::string> out = {args[0], args[1]};
  for (const auto& [key, value] : cli::load_config_file(*config_path)) {
    if (key == "config") continue;
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt || opt->get_positional()) continue;
    out.push_back("--" + key + "=" + value);
  }
  out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-variance quadtree component biometric verification"};
  app.require_subcommand(1);

  std::string config_file;
  const auto add_config = [&](CLI::App* cmd) {
    scalar(cmd->add_option("--config", config_file,
                           "Optional key = value defaults file (default: $MVQC_CONFIG); flags override it"));
  };

  PreprocessArgs pre;
  auto* pre_cmd = app.add_subcommand("preprocess", "Write PIF images or normalized signature masks as PGM");
  scalar(pre_cmd->add_option("--modality", pre.modality, "iris or signature")->capture_default_str());
  scalar(pre_cmd->add_option("--out", pre.out, "Output directory")->required());
  pre_cmd->add_flag("--dump-tiles", pre.dump_tiles, "Also write every quadtree tile");
  scalar(pre_cmd->add_option("--d1", pre.d1, "Tile size for --dump-tiles")->capture_default_str());
  scalar(pre_cmd->add_option("--tile-order", pre.tile_order, "zorder or rowmajor")->capture_default_str());
  pre.iris.add(pre_cmd);
  add_config(pre_cmd);
  pre_cmd->add_option("inputs", pre.inputs, "Input PGM/PPM images")->required();

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "Build one template per manifest subject");
  scalar(tr_cmd->add_option("--manifest", tr.manifest, "Dataset manifest")->required());
  scalar(tr_cmd->add_option("--out", tr.out, "Template output directory")->required());
  scalar(tr_cmd->add_option("-P,--train-count", tr.train_count, "Genuine training samples per subject")
             ->capture_default_str());
  scalar(tr_cmd->add_option("-b,--components", tr.b, "Number of MVQC tiles")->capture_default_str());
  scalar(tr_cmd->add_option("--d1", tr.d1, "Tile size: 64, 128 or 256")->capture_default_str());
  scalar(tr_cmd->add_option("--moment", tr.moment, "A, B or C")->capture_default_str());
  scalar(tr_cmd->add_option("--tile-order", tr.tile_order, "zorder or rowmajor")->capture_default_str());
  scalar(tr_cmd->add_option("--knn-slack", tr.knn_slack, "Relative slack on the k-nn threshold")
             ->capture_default_str());
  tr.iris.add(tr_cmd);
  add_config(tr_cmd);

  VerifyArgs ve;
  auto* ve_cmd = app.add_subcommand(
      "verify", "Verify samples against a template (exit 0 accept, 2 reject, 1 error)");
  scalar(ve_cmd->add_option("--template", ve.tmpl, "Template file")->required());
  scalar(ve_cmd->add_option("--classifier", ve.classifier,
                            "kmeans-euclidean, kmeans-cityblock, fuzzy-kmeans, knn, fuzzy-knn, avg, avgmax")
             ->capture_default_str());
  add_config(ve_cmd);
  ve_cmd->add_option("inputs", ve.inputs, "Sample images")->required();

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Run FRR/FAR experiments over a manifest");
  scalar(ev_cmd->add_option("--manifest", ev.manifest, "Dataset manifest")->required());
  scalar(ev_cmd->add_option("--out", ev.out, "Report directory")->required());
  scalar(ev_cmd->add_option("-P,--train-count", ev.train_count, "Genuine training samples per subject")
             ->capture_default_str());
  scalar(ev_cmd->add_option("-b,--components", ev.b, "Comma-separated b values")->capture_default_str());
  scalar(ev_cmd->add_option("--d1", ev.d1, "Comma-separated tile sizes")->capture_default_str());
  scalar(ev_cmd->add_option("--moment", ev.moment, "Comma-separated moment kinds (A,B,C)")->capture_default_str());
  scalar(ev_cmd->add_option("--classifiers", ev.classifiers, "Comma-separated classifier names or 'all'")
             ->capture_default_str());
  scalar(ev_cmd->add_option("--tile-order", ev.tile_order, "zorder or rowmajor")->capture_default_str());
  scalar(ev_cmd->add_option("--imposter-pool", ev.imposter_pool,
                            "manifest or other-subjects (default: by modality)"));
  scalar(ev_cmd->add_option("--knn-slack", ev.knn_slack, "Relative slack on the k-nn threshold")
             ->capture_default_str());
  scalar(ev_cmd->add_option("--seed", ev.seed, "Recorded for reproducibility")->capture_default_str());
  scalar(ev_cmd->add_option("--jobs", ev.jobs, "Parallel subjects during preprocessing")
             ->capture_default_str()
             ->check(CLI::PositiveNumber));
  ev.iris.add(ev_cmd);
  add_config(ev_cmd);

  GenArgs ge;
  auto* ge_cmd = app.add_subcommand("gen-synthetic", "Write a seeded synthetic signature dataset");
  scalar(ge_cmd->add_option("--out", ge.out, "Output directory")->required());
  scalar(ge_cmd->add_option("--subjects", ge.options.subjects, "Number of subjects")->capture_default_str());
  scalar(ge_cmd->add_option("--genuine", ge.options.genuine, "Genuine samples per subject")->capture_default_str());
  scalar(ge_cmd->add_option("--imposters", ge.options.imposters, "Forgeries per subject")->capture_default_str());
  scalar(ge_cmd->add_option("--seed", ge.options.seed, "Generator seed")->capture_default_str());
  scalar(ge_cmd->add_option("--margin", ge.options.margin, "Genuine/forgery separation (> 0)")
             ->capture_default_str());
  scalar(ge_cmd->add_option("--stable-tiles", ge.options.stable_tiles, "Planted stable tiles per subject")
             ->capture_default_str());
  add_config(ge_cmd);

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = inject_config(app, args);
    std::vector<const char*> cargs;
    for (const auto& s : args) cargs.push_back(s.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }

  try {
    if (pre_cmd->parsed()) return run_preprocess(pre_cmd, pre);
    if (tr_cmd->parsed()) return run_train(tr_cmd, tr);
    if (ve_cmd->parsed()) return run_verify(ve);
    if (ev_cmd->parsed()) return run_evaluate(ev_cmd, ev);
    if (ge_cmd->parsed()) return run_gen(ge);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
