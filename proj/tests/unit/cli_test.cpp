/*
 Copyright 2026 The salad Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

constexpr const char* kTinyConfig = R"([env]
id = pendulum
frame_width = 8
frame_height = 8

[data]
n_safe = 20
n_unsafe = 20
n_total = 60

[model]
encoder_hidden = 16
dynamics_hidden = 16
barrier_hidden = 8
policy_hidden = 8

[train]
warm_start_epochs = 2
max_iterations = 1
batch_size = 16
steps_per_iteration = 1
lmi_steps = 1
lmi_repair_limit = 5
rollouts = 2
horizon = 5
seed = 3

[certify]
grid_per_axis = 20
verify_rollouts = 3
verify_horizon = 5
lipschitz_pairs = 100
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("salad_cli_" + std::string(::testing::UnitTest::GetInstance()
                                           ->current_test_info()
                                           ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + SALAD_CLI + " " + args + " >" +
                            (dir_ / "stdout.txt").string() + " 2>" +
                            (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string stderr_text() const { return slurp(dir_ / "stderr.txt"); }

  fs::path write_config(const std::string& extra = "") {
    const fs::path p = dir_ / "run.cfg";
    std::ofstream(p) << kTinyConfig << extra;
    return p;
  }

  // Trains the tiny configuration once into dir_/train.
  fs::path trained() {
    const fs::path out = dir_ / "train";
    fs::create_directories(out);
    const int code = run("train --quiet --config " + write_config().string() +
                         " --out " + out.string());
    EXPECT_TRUE(code == 1 || code == 3) << code << stderr_text();
    return out / "checkpoint.sldc";
  }

  fs::path dir_;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("verify"), 2);
  EXPECT_EQ(run("train --config"), 2);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(CliTest, InvalidWeightIsConfigError) {
  const fs::path cfg = write_config("\n[loss]\nxi1 = -1\n");
  EXPECT_EQ(run("train --quiet --config " + cfg.string() + " --out " + dir_.string()), 2);
  EXPECT_NE(stderr_text().find("loss.xi1"), std::string::npos);
}

TEST_F(CliTest, MissingFilesAreUsageErrors) {
  EXPECT_EQ(run("train --config " + (dir_ / "absent.cfg").string()), 2);
  EXPECT_EQ(run("verify --checkpoint " + (dir_ / "absent.sldc").string()), 2);
  const fs::path junk = dir_ / "junk.sldc";
  std::ofstream(junk) << "not a checkpoint";
  EXPECT_EQ(run("rollout --checkpoint " + junk.string()), 2);
}

TEST_F(CliTest, ShortTrainingFailsButLeavesArtifacts) {
  const fs::path ckpt = trained();
  ASSERT_TRUE(fs::exists(ckpt));
  const fs::path out = ckpt.parent_path();
  EXPECT_EQ(line_count(out / "train_log.csv"), 2u);
  EXPECT_EQ(line_count(out / "warmstart.csv"), 3u);
  EXPECT_TRUE(fs::exists(out / "report.txt"));
  EXPECT_TRUE(fs::exists(out / "slacks.csv"));
  EXPECT_NE(slurp(out / "report.txt").find("certified = false"), std::string::npos);

  // Resuming continues the iteration count.
  EXPECT_NE(run("train --quiet --checkpoint " + ckpt.string() + " --out " + out.string()), 0);
  EXPECT_EQ(line_count(out / "train_log.csv"), 2u);
}

TEST_F(CliTest, VerifyUncertifiedCheckpointFails) {
  const fs::path ckpt = trained();
  const fs::path out = dir_ / "verify";
  fs::create_directories(out);
  EXPECT_EQ(run("verify --quiet --checkpoint " + ckpt.string() + " --n 2 --horizon 3 --out " +
                out.string()),
            1);
  EXPECT_NE(slurp(out / "report.txt").find("rollouts = 2"), std::string::npos);
  EXPECT_EQ(run("verify --checkpoint " + ckpt.string() + " --dataset " +
                (dir_ / "none.txt").string()),
            2);
}

TEST_F(CliTest, ZeroHorizonRolloutSucceeds) {
  const fs::path ckpt = trained();
  const fs::path out = dir_ / "roll";
  fs::create_directories(out);
  EXPECT_EQ(run("rollout --quiet --checkpoint " + ckpt.string() +
                " --n 4 --horizon 0 --out " + out.string()),
            0);
  EXPECT_EQ(line_count(out / "rollouts.csv"), 1u + 4u);
  const std::string csv = slurp(out / "rollouts.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "trajectory,t,theta,theta_dot,action,barrier,label");
  EXPECT_NE(slurp(out / "rollout_summary.txt").find("unsafe_entries = 0"), std::string::npos);
  EXPECT_EQ(run("rollout --checkpoint " + ckpt.string() + " --start nowhere"), 2);
}

TEST_F(CliTest, ExportIsDeterministicAndSized) {
  const fs::path ckpt = trained();
  const fs::path a = dir_ / "a";
  const fs::path b = dir_ / "b";
  fs::create_directories(a);
  fs::create_directories(b);
  ASSERT_EQ(run("export --quiet --checkpoint " + ckpt.string() + " --grid 7 --out " +
                a.string()),
            0);
  // The output directory may also come from the environment.
  ASSERT_EQ(run("export --quiet --checkpoint " + ckpt.string() + " --grid 7",
                "SALAD_OUT_DIR=" + b.string()),
            0);
  EXPECT_EQ(line_count(a / "barrier_grid.csv"), 1u + 49u);
  EXPECT_EQ(slurp(a / "barrier_grid.csv"), slurp(b / "barrier_grid.csv"));
  EXPECT_EQ(slurp(a / "latents.csv"), slurp(b / "latents.csv"));
  EXPECT_EQ(slurp(a / "dataset.txt"), slurp(b / "dataset.txt"));
  EXPECT_EQ(run("export --checkpoint " + ckpt.string() + " --grid 0"), 2);
}

TEST_F(CliTest, SeedOverrideChangesTheRun) {
  const fs::path cfg = write_config();
  const fs::path a = dir_ / "a";
  const fs::path b = dir_ / "b";
  fs::create_directories(a);
  fs::create_directories(b);
  run("train --quiet --config " + cfg.string() + " --out " + a.string());
  run("train --quiet --config " + cfg.string() + " --seed 4 --out " + b.string());
  EXPECT_NE(slurp(a / "train_log.csv"), slurp(b / "train_log.csv"));
}

}  // namespace
