// Runs the command-line tool as a subprocess.

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace rotvo {
namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result Cli(const std::string& args) {
  const std::string cmd = std::string(ROTVO_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir();
    const Result r = Cli("synth drive-loop " + dir_->File("data") +
                         " --frames 40 --noise-deg 0.1 --seed 1");
    ASSERT_EQ(r.code, 0) << r.out;
  }
  static void TearDownTestSuite() { delete dir_; }

  static testing::TempDir* dir_;
};

testing::TempDir* CliTest::dir_ = nullptr;

TEST_F(CliTest, RunWritesOutputs) {
  const std::string out = dir_->File("run");
  const Result r = Cli("run " + dir_->File("data") + " --out " + out);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("40 frames"), std::string::npos) << r.out;
  EXPECT_TRUE(std::filesystem::exists(out + "/trajectory.txt"));
  const std::string manifest = testing::ReadText(out + "/manifest.txt");
  EXPECT_NE(manifest.find("command = run\n"), std::string::npos);
  EXPECT_NE(manifest.find("output.trajectory = trajectory.txt\n"),
            std::string::npos);
}

TEST_F(CliTest, FlagsOverrideConfigFile) {
  const std::string cfg = dir_->File("cfg.txt");
  testing::WriteText(cfg, "f_window = 2\nseed = 9\n");
  const std::string out = dir_->File("over");
  const Result r = Cli("run " + dir_->File("data") + " --config " + cfg +
                       " --seed 4 --no-loops --out " + out);
  ASSERT_EQ(r.code, 0) << r.out;
  const std::string m = testing::ReadText(out + "/manifest.txt");
  EXPECT_NE(m.find("f_window = 2\n"), std::string::npos);
  EXPECT_NE(m.find("seed = 4\n"), std::string::npos);
  EXPECT_NE(m.find("loops = false\n"), std::string::npos);
}

TEST_F(CliTest, ManifestReplayReproducesTrajectory) {
  const std::string a = dir_->File("a"), b = dir_->File("b");
  ASSERT_EQ(Cli("run " + dir_->File("data") + " --seed 3 --f-window 3 --out " +
                a).code,
            0);
  ASSERT_EQ(Cli("run " + dir_->File("data") + " --config " + a +
                "/manifest.txt --out " + b).code,
            0);
  EXPECT_EQ(testing::ReadText(a + "/trajectory.txt"),
            testing::ReadText(b + "/trajectory.txt"));
  EXPECT_EQ(testing::ReadText(a + "/manifest.txt"),
            testing::ReadText(b + "/manifest.txt"));
}

TEST_F(CliTest, EvalPrintsMetricRows) {
  const std::string out = dir_->File("ev");
  ASSERT_EQ(Cli("run " + dir_->File("data") + " --out " + out).code, 0);
  const Result r = Cli("eval " + out + "/trajectory.txt " +
                       dir_->File("data/truth.txt"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("metric,value_deg\n"), std::string::npos);
  EXPECT_NE(r.out.find("rpe1,"), std::string::npos);
  EXPECT_NE(r.out.find("rpen,"), std::string::npos);
  const Result c = Cli("eval " + out + "/trajectory.txt " +
                       dir_->File("data/truth.txt") + " --delta 2>/dev/null");
  EXPECT_EQ(c.out.rfind("delta,rmse_deg\n1,", 0), 0u) << c.out;
}

TEST_F(CliTest, AblateComparesModes) {
  const std::string out = dir_->File("ab");
  const Result r = Cli("ablate " + dir_->File("data") + " --out " + out);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("metric,incremental_deg,chaining_deg\n"),
            std::string::npos);
  const std::string timing =
      testing::ReadText(out + "/timing_comparison.csv");
  EXPECT_EQ(timing.rfind("frame_id,incremental_total_us,", 0), 0u);
}

TEST_F(CliTest, InputErrorsExitWithTwo) {
  const std::string bad = dir_->File("bad");
  std::filesystem::create_directories(bad);
  testing::WriteText(bad + "/matches.txt", "BPAIR 0 1\n0 0 1 0 0\n");
  const Result r = Cli("run " + bad);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("matches.txt:2"), std::string::npos) << r.out;
  EXPECT_EQ(Cli("run " + dir_->File("data") + " --mode sideways").code, 2);
  EXPECT_EQ(Cli("frobnicate").code, 2);
  EXPECT_EQ(Cli("").code, 2);
}

TEST_F(CliTest, Version) {
  const Result r = Cli("--version");
  EXPECT_EQ(r.code, 0);
  EXPECT_FALSE(r.out.empty());
}

}  // namespace
}  // namespace rotvo
