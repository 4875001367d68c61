#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"
#include "structrtl/util/io.h"

namespace structrtl {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int status = -1;
  std::string output;  // stdout and stderr interleaved
};

RunResult RunCli(const std::string& args) {
  RunResult r;
  const std::string cmd = std::string("\"") + STRUCTRTL_CLI_PATH + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("structrtl_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::string kFixtures = STRUCTRTL_FIXTURE_DIR;

TEST(CliTest, HelpExitsZero) {
  const RunResult r = RunCli("--help");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.output.find("gen-synth"), std::string::npos);
}

TEST(CliTest, UnknownSubcommandSuggests) {
  const RunResult r = RunCli("--seed 3 trian --corpus x");
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("did you mean 'train'"), std::string::npos) << r.output;
}

TEST(CliTest, MissingRequiredOptionIsUsageError) {
  EXPECT_EQ(RunCli("eval --corpus " + kFixtures + "/golden/manifest.csv").status, 2);
}

TEST(CliTest, ParseErrorHasLocation) {
  const fs::path dir = Scratch("parse");
  const fs::path bad = dir / "bad.v";
  WriteFile(bad.string(), "module m(input a, output y);\n  assign y = a +;\nendmodule\n");
  const RunResult r = RunCli("parse " + bad.string());
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.output.find(bad.string() + ":2:"), std::string::npos) << r.output;
}

TEST(CliTest, ParseWritesCdfgAndSnapshot) {
  const fs::path out = Scratch("cdfg") / "counter.json";
  const RunResult r = RunCli("parse " + kFixtures + "/designs/counter.v --emit cdfg --out " + out.string());
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_TRUE(nlohmann::json::parse(ReadFile(out.string())).contains("nodes"));
  EXPECT_TRUE(fs::exists(out.string() + ".config.json"));
}

// The checkpoint is a small student (H 32, 3 GIN, 2 Transformer layers)
// trained for 20 epochs at batch 4 with seed 3 on the golden manifest; the
// expected files are the eval output it produced.
TEST(CliTest, GoldenEval) {
  const fs::path out = Scratch("golden");
  const std::string golden = kFixtures + "/golden";
  const RunResult r = RunCli("--log-level warn eval --ckpt " + golden + "/student_area.ckpt --corpus " + golden +
                          "/manifest.csv --split all --out " + out.string());
  ASSERT_EQ(r.status, 0) << r.output;
  const auto got = nlohmann::json::parse(ReadFile((out / "metrics.json").string()));
  const auto want = nlohmann::json::parse(ReadFile(golden + "/expected_metrics.json"));
  EXPECT_EQ(got["n_samples"], want["n_samples"]);
  for (const char* key : {"mae", "mape", "r2", "rrse"}) {
    EXPECT_NEAR(got[key].get<double>(), want[key].get<double>(), 1e-9) << key;
  }
  std::istringstream got_rows(ReadFile((out / "predictions.csv").string()));
  std::istringstream want_rows(ReadFile(golden + "/expected_predictions.csv"));
  std::string g, w;
  int rows = 0;
  while (std::getline(want_rows, w)) {
    ASSERT_TRUE(std::getline(got_rows, g)) << "missing row " << rows;
    if (rows++ == 0) {
      EXPECT_EQ(g, w);
      continue;
    }
    const size_t gc = g.rfind(','), wc = w.rfind(',');
    EXPECT_EQ(g.substr(0, gc), w.substr(0, wc));
    EXPECT_NEAR(std::stod(g.substr(gc + 1)), std::stod(w.substr(wc + 1)), 1e-9) << w;
  }
  EXPECT_EQ(rows, 9);
  const auto snapshot = nlohmann::json::parse(ReadFile((out / "config.json").string()));
  EXPECT_TRUE(snapshot.contains("run"));
  EXPECT_TRUE(snapshot.contains("encoder"));
}

TEST(CliTest, TeacherTaskMismatchIsUsageError) {
  const fs::path dir = Scratch("mismatch");
  const std::string manifest = kFixtures + "/golden/manifest.csv";
  const std::string teach = (dir / "teacher").string();
  ASSERT_EQ(RunCli("--desk-scale --log-level warn --config " + (dir / "c.json").string() + " train-teacher --corpus " +
                manifest + " --task area --out " + teach)
                .status,
            2)
      << "config file must exist";
  WriteFile((dir / "c.json").string(), R"({"teacher": {"training": {"epochs": 1}}})");
  ASSERT_EQ(RunCli("--desk-scale --log-level warn --config " + (dir / "c.json").string() + " train-teacher --corpus " +
                manifest + " --task area --out " + teach)
                .status,
            0);
  const RunResult r = RunCli("--desk-scale --log-level warn distill --corpus " + manifest +
                          " --task delay --teacher " + teach + "/teacher.ckpt --out " + (dir / "kd").string());
  EXPECT_EQ(r.status, 2) << r.output;
  EXPECT_FALSE(fs::exists(dir / "kd" / "student.ckpt"));
}

}  // namespace
}  // namespace structrtl
