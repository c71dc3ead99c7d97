// Copyright 2026 The blockadapt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BLOCKADAPT_CLI_PATH) + " " + args +
                          " >/dev/null 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class CliE2E : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / "ba-cli-e2e";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::ofstream cfg(dir_ / "toy.cfg");
    cfg << "dataset = toy\ndesign = adam\npartition = chunk\nblock_size = 3\n"
           "alpha = 0.05\nbatch_size = 10\nsteps = 20\nseed = 3\ndiag_every = 5\n";
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

TEST_F(CliE2E, NoArgumentsIsUsageError) { EXPECT_EQ(run_cli(""), 1); }

TEST_F(CliE2E, MissingConfigIsUsageError) {
  EXPECT_EQ(run_cli("run --config " + (dir_ / "nope.cfg").string()), 1);
}

TEST_F(CliE2E, BadConfigIsUsageError) {
  std::ofstream bad(dir_ / "bad.cfg");
  bad << "alpha = fast\nsteps = 1\n";
  bad.close();
  EXPECT_EQ(run_cli("run --config " + (dir_ / "bad.cfg").string()), 1);
}

TEST_F(CliE2E, MissingDataIsDataError) {
  std::ofstream cfg(dir_ / "mnist.cfg");
  cfg << "dataset = mnist\nmnist_images = /nonexistent/i\nmnist_labels = /nonexistent/l\n"
         "alpha = 0.01\nsteps = 1\n";
  cfg.close();
  EXPECT_EQ(run_cli("run --config " + (dir_ / "mnist.cfg").string()), 2);
}

TEST_F(CliE2E, RunWritesDeterministicOutputs) {
  const std::string cfg = (dir_ / "toy.cfg").string();
  ASSERT_EQ(run_cli("run --config " + cfg + " --out " + (dir_ / "o1").string()), 0);
  ASSERT_EQ(run_cli("run --config " + cfg + " --out " + (dir_ / "o2").string()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "o1" / "trace.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "o1" / "summary.json"));
  EXPECT_EQ(slurp(dir_ / "o1" / "trace.csv"), slurp(dir_ / "o2" / "trace.csv"));
  EXPECT_EQ(slurp(dir_ / "o1" / "summary.json"), slurp(dir_ / "o2" / "summary.json"));
}

TEST_F(CliE2E, SeedOverrideChangesTrace) {
  const std::string cfg = (dir_ / "toy.cfg").string();
  ASSERT_EQ(run_cli("run --config " + cfg + " --out " + (dir_ / "s1").string()), 0);
  ASSERT_EQ(
      run_cli("run --config " + cfg + " --seed 77 --out " + (dir_ / "s2").string()), 0);
  EXPECT_NE(slurp(dir_ / "s1" / "trace.csv"), slurp(dir_ / "s2" / "trace.csv"));
}

TEST_F(CliE2E, CompareWritesJoinedTrace) {
  std::ofstream diag_cfg(dir_ / "diag.cfg");
  diag_cfg << "dataset = toy\ndesign = adam\npartition = diag\nalpha = 0.05\n"
              "batch_size = 10\nsteps = 20\nseed = 3\ndiag_every = 5\n";
  diag_cfg.close();
  ASSERT_EQ(run_cli("compare --config-a " + (dir_ / "toy.cfg").string() +
                    " --config-b " + (dir_ / "diag.cfg").string() + " --out " +
                    (dir_ / "cmp").string()),
            0);
  EXPECT_TRUE(fs::exists(dir_ / "cmp" / "compare.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "cmp" / "summary.json"));
  const std::string joined = slurp(dir_ / "cmp" / "compare.csv");
  EXPECT_NE(joined.find("term_b_a,term_b_b"), std::string::npos);
  EXPECT_NE(joined.find("param_maxdiff"), std::string::npos);
}

TEST_F(CliE2E, GradcheckPasses) {
  EXPECT_EQ(run_cli("gradcheck --widths 2,2,2,1 --head sigmoid_bce --seed 3"), 0);
}

TEST_F(CliE2E, ThreadOverrideKeepsResults) {
  const std::string cfg = (dir_ / "toy.cfg").string();
  ASSERT_EQ(run_cli("run --config " + cfg + " --out " + (dir_ / "t1").string()), 0);
  ASSERT_EQ(run_cli("run --config " + cfg + " --threads 4 --out " +
                    (dir_ / "t4").string()),
            0);
  EXPECT_EQ(slurp(dir_ / "t1" / "trace.csv"), slurp(dir_ / "t4" / "trace.csv"));
}

TEST_F(CliE2E, SelftestSingleCriterion) {
  EXPECT_EQ(run_cli("selftest --only A7 --out " + (dir_ / "st").string()), 0);
  EXPECT_EQ(run_cli("selftest --only A0"), 1);
}

}  // namespace
