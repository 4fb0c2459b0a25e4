#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "rdecusum/manifest.hpp"

namespace fs = std::filesystem;
using rdecusum::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rdecusum_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  static std::string sample() { return std::string(RDECUSUM_DATA_DIR) + "/allegheny_sample.csv"; }

  std::vector<std::string> detect_args(const std::string& kind, const std::string& out) const {
    std::vector<std::string> a{"detect", "--input", sample(), "--index-col", "day", "--value-col",
                               "cases", "--f", "pois:1", "--gbar", "pois:2", "--threshold", "6.9",
                               "--kind", kind, "--noise", "1", "--seed", "7", "--out", out};
    if (kind == "rde") a.insert(a.end(), {"--mu", "0.3", "--h", "10"});
    return a;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, DetectAlarmsAndWritesTrajectoryWithManifest) {
  const auto r = cli(detect_args("rde", path("t.csv")));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("detection_index="), std::string::npos);
  EXPECT_EQ(r.out.find("detection_index=none"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("t.csv")));
  EXPECT_TRUE(fs::exists(path("t.csv.manifest.json")));
  std::ifstream in(path("t.csv"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "index,sampled,statistic,alarmed");
}

TEST_F(Cli, DetectExitsTwoWithoutAlarm) {
  const auto input = write("flat.csv", "index,value\n1,0\n2,1\n3,0\n4,1\n");
  const auto r = cli({"detect", "--input", input, "--f", "pois:1", "--gbar", "pois:2", "--threshold",
                      "50", "--kind", "robust-cusum", "--out", path("t.csv")});
  EXPECT_EQ(r.code, 2) << r.err;
  EXPECT_NE(r.out.find("detection_index=none"), std::string::npos);
}

TEST_F(Cli, ZeroThresholdAlarmsAtFirstNonnegativeLlr) {
  const auto input = write("s.csv", "index,value\n10,0\n11,0\n12,3\n13,0\n");
  // LLR of Pois(2) vs Pois(1) is x ln 2 - 1: negative at 0, positive at 3.
  const auto r = cli({"detect", "--input", input, "--f", "pois:1", "--gbar", "pois:2", "--threshold",
                      "0", "--kind", "rde", "--mu", "5", "--h", "10", "--out", path("t.csv")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("detection_index=11"), std::string::npos) << r.out;
}

TEST_F(Cli, RobustCusumWarnsAboutIgnoredFlags) {
  auto args = detect_args("robust-cusum", path("t.csv"));
  args.insert(args.end(), {"--mu", "0.3", "--h", "10"});
  const auto r = cli(args);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"detect"}).code, 1);
  EXPECT_EQ(cli({"frobnicate"}).code, 1);
  auto args = detect_args("rde", path("t.csv"));
  args[8] = "gamma:1";
  EXPECT_EQ(cli(args).code, 1);
  args = detect_args("robust-cusum", path("t.csv"));
  args.insert(args.end(), {"--threshold", "x"});
  EXPECT_EQ(cli(args).code, 1);
  EXPECT_EQ(cli({"detect", "--input", write("bad.csv", "index,value\n1,a\n"), "--f", "pois:1", "--gbar",
                 "pois:2", "--threshold", "1", "--kind", "robust-cusum", "--out", path("t.csv")})
                .code,
            1);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST_F(Cli, VerifyAcceptsDetectOutputAndRejectsTampering) {
  ASSERT_EQ(cli(detect_args("rde", path("t.csv"))).code, 0);
  EXPECT_EQ(cli({"verify", "--trajectory", path("t.csv"), "--manifest", path("t.csv.manifest.json")}).code, 0);
  EXPECT_EQ(cli({"verify", "--trajectory", path("t.csv"), "--kind", "rde", "--threshold", "6.9", "--mu",
                 "0.3", "--h", "10"})
                .code,
            0);
  const auto r = cli({"verify", "--trajectory", path("t.csv"), "--kind", "rde", "--threshold", "6.9",
                      "--mu", "0.05", "--h", "10"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("row "), std::string::npos);
}

TEST_F(Cli, ReplayReproducesDetectAndDesign) {
  ASSERT_EQ(cli(detect_args("fractional", path("t.csv"))).code, 0);
  auto r = cli({"replay", "--manifest", path("t.csv.manifest.json"), "--out-dir", path("replay")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("identical"), std::string::npos);

  ASSERT_EQ(cli({"design", "--alpha", "0.01", "--beta", "0.5", "--f", "norm:0", "--gbar", "norm:0.5",
                 "--h", "10", "--mode", "montecarlo", "--trials", "10000", "--seed", "3", "--out",
                 path("d.csv")})
                .code,
            0);
  r = cli({"replay", "--manifest", path("d.csv.manifest.json"), "--out-dir", path("replay2")});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(Cli, ReplayDetectsChangedOutputs) {
  ASSERT_EQ(cli(detect_args("rde", path("t.csv"))).code, 0);
  auto m = rdecusum::read_manifest(path("t.csv.manifest.json"));
  m.outputs[0].digest = "0000000000000000";
  rdecusum::write_manifest(path("t.csv.manifest.json"), m);
  EXPECT_EQ(cli({"replay", "--manifest", path("t.csv.manifest.json"), "--out-dir", path("r")}).code, 4);
  m.arguments[0].second = "tampered";
  rdecusum::write_manifest(path("t.csv.manifest.json"), m);
  EXPECT_EQ(cli({"replay", "--manifest", path("t.csv.manifest.json"), "--out-dir", path("r")}).code, 1);
}

TEST_F(Cli, DesignPrintsThresholdAndMu) {
  auto r = cli({"design", "--alpha", "0.001", "--beta", "0.5", "--f", "norm:0", "--gbar", "norm:0.5"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("0.001,0.5,0,asymptotic,6.9077552789821368,0.125,"), std::string::npos) << r.out;
  r = cli({"design", "--alpha", "1", "--beta", "0.5", "--f", "norm:0", "--gbar", "norm:0.5"});
  EXPECT_EQ(r.code, 1);
  r = cli({"design", "--alpha", "0.01", "--beta", "0.5", "--f", "norm:0", "--gbar", "norm:0.5", "--mode",
           "montecarlo"});
  EXPECT_EQ(r.code, 1);  // needs --h
}

TEST_F(Cli, EvaluateWritesTableAndReplays) {
  const auto cfg = write("plan.yaml", R"(
model: {f: norm:0, family: norm-mean-at-least:0.5, true_g: norm:1}
detectors:
  - {kind: robust-cusum}
  - {kind: rde, beta: 0.5, h: 10}
operating_point: {threshold: 2.5}
trials: 200
pdc: {trials: 120, horizon: 2000, renewal_cycles: 2000}
)");
  auto r = cli({"evaluate", "--config", cfg, "--out", path("oc.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("oc.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 3);
  r = cli({"replay", "--manifest", path("oc.csv.manifest.json"), "--out-dir", path("replay")});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(Cli, SchemaViolationsReportKeyPaths) {
  const auto cfg = write("plan.yaml", R"(
model: {f: norm:0, family: norm-mean-at-least:0.5, true_g: norm:1}
detectors: []
grid: {thresholds: [1]}
)");
  const auto r = cli({"sweep", "--config", cfg, "--out", path("oc.csv")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("detectors"), std::string::npos);
}
