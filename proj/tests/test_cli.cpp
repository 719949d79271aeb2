#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "mvqc/eval.hpp"
#include "mvqc/pnm.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" MVQC_CLI_PATH "\" " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.out += buf;
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mvqc_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

// One small synthetic dataset shared by the tests below.
const fs::path& dataset() {
  static const fs::path dir = [] {
    const fs::path d = scratch("data");
    const Run r = run("gen-synthetic --out " + q(d) + " --subjects 3 --genuine 6 --imposters 4 --seed 5");
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("help lists every flag") {
  const Run top = run("--help");
  CHECK(top.code == 0);
  for (const char* cmd : {"preprocess", "train", "verify", "evaluate", "gen-synthetic"})
    CHECK(top.out.find(cmd) != std::string::npos);
  const Run ev = run("evaluate --help");
  for (const char* flag : {"--manifest", "--out", "--train-count", "--components", "--d1", "--moment",
                           "--classifiers", "--t-dark", "--offset1", "--offset2", "--seed", "--jobs",
                           "--preset", "--imposter-pool", "--knn-slack", "--config"})
    CHECK_MESSAGE(ev.out.find(flag) != std::string::npos, flag);
  const Run gen = run("gen-synthetic --help");
  CHECK(gen.out.find("--margin") != std::string::npos);
  CHECK(run("preprocess --help").out.find("--dump-tiles") != std::string::npos);
}

TEST_CASE("unknown flags and commands are errors") {
  CHECK(run("evaluate --manifest x --out y --frobnicate 3").code == 1);
  CHECK(run("teleport").code == 1);
  CHECK(run("").code == 1);
}

TEST_CASE("train, verify and exit codes") {
  const fs::path data = dataset();
  const fs::path out = scratch("train");
  const std::string manifest = q(data / "manifest.txt");
  REQUIRE(run("train --manifest " + manifest + " --out " + q(out) + " -P 3 -b 4").code == 0);
  const std::string bytes = slurp(out / "s001.tmpl");
  CHECK(bytes.find("H=") != std::string::npos);
  // The template stores P = 3 training sums.
  const auto h = bytes.substr(bytes.find("H=") + 2, bytes.find('\n', bytes.find("H=")) - bytes.find("H=") - 2);
  CHECK(std::count(h.begin(), h.end(), ',') == 2);

  REQUIRE(run("train --manifest " + manifest + " --out " + q(out) + " -P 3 -b 4").code == 0);
  CHECK(slurp(out / "s001.tmpl") == bytes);

  const std::string tmpl = q(out / "s001.tmpl");
  const Run ok = run("verify --template " + tmpl + " --classifier knn " + q(data / "s001" / "g00.pgm"));
  CHECK(ok.code == 0);
  CHECK(ok.out.rfind("accept score=", 0) == 0);
  CHECK(ok.out.find("classifier=knn") != std::string::npos);

  const Run bad = run("verify --template " + tmpl + " --classifier knn " + q(data / "s001" / "f00.pgm"));
  CHECK(bad.code == 2);
  CHECK(bad.out.rfind("reject score=", 0) == 0);

  CHECK(run("verify --template " + tmpl + " --classifier svm " + q(data / "s001" / "g00.pgm")).code == 1);
  CHECK(run("verify --template " + tmpl + " " + q(data / "nope.pgm")).code == 1);
  CHECK(run("train --manifest " + manifest + " --out " + q(out) + " -b 17").code == 1);
}

TEST_CASE("preprocess") {
  const fs::path data = dataset();
  const fs::path out = scratch("pre");
  CHECK(run("preprocess --out " + q(out) + " --dump-tiles --d1 256 " + q(data / "s002" / "g01.pgm")).code == 0);
  const mvqc::GrayImage norm = mvqc::read_image(out / "g01.pgm");
  CHECK(norm.width() == 512);
  CHECK(fs::exists(out / "g01_t04.pgm"));
  CHECK(mvqc::read_image(out / "g01_t04.pgm").width() == 256);
  CHECK(run("preprocess --out " + q(out) + " " + q(data / "missing.pgm")).code != 0);

  // Iris: dark pupil on a mid-gray eye.
  mvqc::GrayImage eye(200, 200, 150);
  for (int y = 0; y < 200; ++y)
    for (int x = 0; x < 200; ++x)
      if ((x - 90) * (x - 90) + (y - 110) * (y - 110) <= 400) eye(x, y) = 10;
  mvqc::write_pgm(out / "eye.pgm", eye);
  CHECK(run("preprocess --modality iris --preset casia --out " + q(out / "pif") + " " + q(out / "eye.pgm")).code ==
        0);
  const mvqc::GrayImage pif = mvqc::read_image(out / "pif" / "eye.pgm");
  CHECK(pif.width() == 512);
  CHECK(pif.height() == 512);
}

TEST_CASE("evaluate grid, presets and config precedence") {
  const fs::path data = dataset();
  const std::string manifest = q(data / "manifest.txt");
  const fs::path out = scratch("eval");
  const Run r = run("evaluate --manifest " + manifest + " --out " + q(out) + " -P 3 -b 4,6,8 --d1 128 --moment C");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("avgmax") != std::string::npos);
  const auto rows = mvqc::parse_summary_csv(slurp(out / "report.csv"));
  CHECK(rows.size() == 21);

  CHECK(run("evaluate --manifest " + q(data / "absent.txt") + " --out " + q(out)).code == 1);

  const fs::path preset = scratch("preset");
  REQUIRE(run("evaluate --manifest " + manifest + " --out " + q(preset) + " --preset mmu --classifiers knn").code == 0);
  const auto mmu = mvqc::parse_summary_csv(slurp(preset / "report.csv"));
  REQUIRE(mmu.size() == 1);
  CHECK(mmu[0].b == 8);

  // Config supplies b = 6; an explicit flag wins over it.
  const fs::path cfg = preset / "run.conf";
  std::ofstream(cfg) << "# defaults\ncomponents = 6\nclassifiers = avg ; trailing comment\n";
  REQUIRE(run("evaluate --config " + q(cfg) + " --manifest " + manifest + " --out " + q(preset)).code == 0);
  auto from_cfg = mvqc::parse_summary_csv(slurp(preset / "report.csv"));
  REQUIRE(from_cfg.size() == 1);
  CHECK(from_cfg[0].b == 6);
  CHECK(from_cfg[0].classifier == "avg");

  REQUIRE(run("evaluate --manifest " + manifest + " --out " + q(preset) + " -b 4", "MVQC_CONFIG=" + q(cfg)).code ==
          0);
  from_cfg = mvqc::parse_summary_csv(slurp(preset / "report.csv"));
  REQUIRE(from_cfg.size() == 1);
  CHECK(from_cfg[0].b == 4);

  std::ofstream(cfg) << "components 6\n";
  CHECK(run("evaluate --config " + q(cfg) + " --manifest " + manifest + " --out " + q(preset)).code == 1);
}
