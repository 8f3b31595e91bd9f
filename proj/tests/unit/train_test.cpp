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

#include <cmath>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "salad/certify/bounds.hpp"
#include "salad/certify/verify.hpp"
#include "salad/errors.hpp"
#include "salad/losses/lmi.hpp"
#include "salad/nets/checkpoint.hpp"
#include "salad/train/adam.hpp"
#include "salad/train/config.hpp"
#include "salad/train/trainer.hpp"
#include "tiny_model.hpp"

namespace salad::train {
namespace {

// ---------------------------------------------------------------------------
// Adam.

TEST(AdamTest, FirstStepMovesByLearningRateAgainstGradientSign) {
  Tensor w = Tensor::matrix(1, 4, {1.0, -2.0, 0.5, 3.0});
  const Tensor g = Tensor::matrix(1, 4, {0.3, -7.0, 1e-3, 0.0});
  Adam opt(AdamConfig{0.01, 0.9, 0.999, 1e-8});
  opt.step({&w}, {&g});
  // m_hat = g, v_hat = g^2: the update is lr * g / (|g| + eps).
  const double expected[] = {1.0 - 0.01 * 0.3 / (0.3 + 1e-8),
                             -2.0 + 0.01 * 7.0 / (7.0 + 1e-8),
                             0.5 - 0.01 * 1e-3 / (1e-3 + 1e-8), 3.0};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(w[i], expected[i], 1e-15);
  EXPECT_EQ(opt.steps(), 1u);
}

TEST(AdamTest, MatchesHandRolledRecurrence) {
  Rng rng(2);
  Tensor w = testing::random_matrix(2, 3, rng, -1.0, 1.0);
  std::vector<double> x(w.data().begin(), w.data().end());
  std::vector<double> m(6, 0.0), v(6, 0.0);
  Adam opt(AdamConfig{0.05, 0.8, 0.99, 1e-6});
  for (int t = 1; t <= 25; ++t) {
    const Tensor g = testing::random_matrix(2, 3, rng, -1.0, 1.0);
    opt.step({&w}, {&g});
    for (std::size_t i = 0; i < 6; ++i) {
      m[i] = 0.8 * m[i] + 0.2 * g[i];
      v[i] = 0.99 * v[i] + 0.01 * g[i] * g[i];
      const double mh = m[i] / (1.0 - std::pow(0.8, t));
      const double vh = v[i] / (1.0 - std::pow(0.99, t));
      x[i] -= 0.05 * mh / (std::sqrt(vh) + 1e-6);
    }
  }
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(w[i], x[i], 1e-12);
}

TEST(AdamTest, MinimizesQuadraticBowl) {
  Tensor w = Tensor::matrix(1, 3, {1.0, -0.5, 2.0});
  Adam opt(AdamConfig{0.05});
  for (int step = 0; step < 500; ++step) {
    Tensor g = w;
    for (double& v : g.data()) v *= 2.0;
    opt.step({&w}, {&g});
  }
  for (double v : w.data()) EXPECT_LT(std::abs(v), 1e-3);
}

TEST(AdamTest, SerializeRoundTripContinuesIdentically) {
  Rng rng(3);
  Tensor a = testing::random_matrix(3, 3, rng, -1, 1);
  Adam opt(AdamConfig{0.01});
  for (int i = 0; i < 5; ++i) {
    const Tensor g = testing::random_matrix(3, 3, rng, -1, 1);
    opt.step({&a}, {&g});
  }
  Tensor b = a;
  Adam copy = Adam::deserialize(opt.serialize());
  EXPECT_EQ(copy.steps(), 5u);
  const Tensor g = testing::random_matrix(3, 3, rng, -1, 1);
  opt.step({&a}, {&g});
  copy.step({&b}, {&g});
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(a[i], b[i]);
}

// ---------------------------------------------------------------------------
// Configuration.

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

TEST(ConfigTest, ErrorsNameTheField) {
  EXPECT_EQ(field_of("[loss]\nxi1 = -1\n"), "loss.xi1");
  EXPECT_EQ(field_of("[train]\nlr = 0\n"), "train.lr");
  EXPECT_EQ(field_of("[train]\nlr = fast\n"), "train.lr");
  EXPECT_EQ(field_of("[train]\npolyak_rho = 1\n"), "train.polyak_rho");
  EXPECT_EQ(field_of("[model]\nencoder_output = relu\n"), "model.encoder_output");
  EXPECT_EQ(field_of("[model]\nencoder_bound = 0\n"), "model.encoder_bound");
  EXPECT_EQ(field_of("[model]\nbarrier_hidden = 8,0\n"), "model.barrier_hidden");
  EXPECT_EQ(field_of("[data]\nn_safe = 10\nn_unsafe = 10\nn_total = 5\n"), "data.n_total");
  EXPECT_EQ(field_of("[certify]\ndelta_action_grid = 1\n"), "certify.delta_action_grid");
  EXPECT_THROW(parse_config("[train]\nno_such_key = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[nowhere]\nlr = 1\n"), ConfigError);
  EXPECT_EQ(field_of("[train]\nlr = 0.01\n"), "");
}

TEST(ConfigTest, IniRoundTrip) {
  for (envs::EnvId id : {envs::EnvId::kPendulum, envs::EnvId::kVehicle}) {
    TrainConfig c = default_config(id);
    c.seed = 77;
    c.lr = 3.25e-4;
    c.encoder_hidden = {17, 5};
    c.encoder_output = nets::OutputActivation::kLinear;
    c.weights.xi3 = 0.125;
    c.env.frame_width = 12;
    EXPECT_EQ(parse_config(to_ini(c)), c);
  }
}

TEST(ConfigTest, NetworkSpecsFollowConfig) {
  TrainConfig c = default_config(envs::EnvId::kVehicle);
  c.latent_dim = 4;
  c.encoder_bound = 2.5;
  const nets::NetworkSpecs s = c.network_specs();
  EXPECT_EQ(s.encoder.widths.front(), c.env.observation_size());
  EXPECT_EQ(s.encoder.widths.back(), 4u);
  EXPECT_EQ(s.encoder.out_high, 2.5);
  EXPECT_EQ(s.encoder.out_low, -2.5);
  EXPECT_EQ(s.dynamics.widths.front(), 5u);
  EXPECT_EQ(s.barrier.widths.back(), 1u);
  EXPECT_EQ(s.policy.out_low, c.env.action_low);
  EXPECT_EQ(s.policy.out_high, c.env.action_high);
}

// ---------------------------------------------------------------------------
// Certificate projection.

TEST(ProjectionTest, RestoresFeasibilityFromLargeWeights) {
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    nets::NetworkSpecs specs = testing::tiny_specs();
    nets::ParamStore p(specs, 0.9, trial);
    for (nets::Layer& layer : p.online.barrier.layers()) {
      for (double& w : layer.weight.data()) w = uniform(rng, -3.0, 3.0);
    }
    ASSERT_FALSE(losses::lmi_status(
                     losses::build_lmi(p.online.barrier, p.lambda(), 2.0))
                     .feasible);
    const Tensor before = p.online.barrier.layers()[0].weight;
    project_certificate(p, 2.0);
    EXPECT_TRUE(
        losses::lmi_status(losses::build_lmi(p.online.barrier, p.lambda(), 2.0)).satisfied);
    EXPECT_LE(certify::lipschitz_upper_bound(p.online.barrier), 2.0);
    // Rescaling keeps directions.
    const Tensor& after = p.online.barrier.layers()[0].weight;
    const double ratio = after[0] / before[0];
    for (std::size_t i = 0; i < after.size(); ++i) {
      EXPECT_NEAR(after[i], ratio * before[i], 1e-12 * std::abs(before[i]) + 1e-15);
    }
  }
}

TEST(ProjectionTest, InitializeSynchronizesTarget) {
  nets::ParamStore p(testing::tiny_specs(), 0.9, 1);
  initialize_certificate(p, 1.5);
  EXPECT_TRUE(losses::lmi_status(losses::build_lmi(p.online.barrier, p.lambda(), 1.5)).satisfied);
  const auto a = p.online.parameters();
  const auto b = p.target.parameters();
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(std::equal(a[i]->data().begin(), a[i]->data().end(), b[i]->data().begin()));
  }
}

// ---------------------------------------------------------------------------
// Trainer on a tiny pendulum problem.

TrainConfig tiny_config() {
  TrainConfig c = default_config(envs::EnvId::kPendulum);
  c.env.frame_width = 8;
  c.env.frame_height = 8;
  c.n_safe = 20;
  c.n_unsafe = 20;
  c.n_total = 60;
  c.encoder_hidden = {16};
  c.dynamics_hidden = {16};
  c.barrier_hidden = {8};
  c.policy_hidden = {8};
  c.warm_start_epochs = 3;
  c.max_iterations = 3;
  c.batch_size = 16;
  c.steps_per_iteration = 2;
  c.lmi_steps = 2;
  c.lmi_repair_limit = 20;
  c.rollouts = 2;
  c.horizon = 5;
  c.grid_per_axis = 20;
  c.verify_rollouts = 2;
  c.verify_horizon = 5;
  c.lipschitz_pairs = 100;
  c.seed = 9;
  return c;
}

TEST(TrainerTest, ConstructionGivesFeasibleCertificateAndSeededData) {
  const Trainer t(tiny_config());
  EXPECT_EQ(t.buffer().size(), 60u);
  EXPECT_EQ(t.buffer().safe_indices().size() >= 20, true);
  EXPECT_TRUE(losses::lmi_status(losses::build_lmi(t.params().online.barrier,
                                                   t.params().lambda(), 2.0))
                  .satisfied);
  const envs::DataBuffer expected = envs::sample_datasets(t.config().env, 20, 20, 60, 9);
  EXPECT_EQ(envs::serialize_buffer(t.buffer()), envs::serialize_buffer(expected));
}

TEST(TrainerTest, IterateBeforeWarmStartThrows) {
  Trainer t(tiny_config());
  EXPECT_THROW(t.iterate(), Error);
}

TEST(TrainerTest, WarmStartReducesConsistencyError) {
  TrainConfig c = tiny_config();
  c.warm_start_epochs = 30;
  Trainer t(c);
  auto error = [&t]() {
    const nets::Networks& n = t.params().online;
    return certify::consistency_error(
        t.buffer(), n, certify::encode_observations(t.buffer(), n.encoder));
  };
  const double before = error();
  t.warm_start();
  EXPECT_LT(error(), before);
  ASSERT_EQ(t.log().warm.size(), 30u);
  for (const WarmRow& row : t.log().warm) EXPECT_DOUBLE_EQ(row.psi, 2.0 * row.eps_bar);
  EXPECT_TRUE(losses::lmi_status(losses::build_lmi(t.params().online.barrier,
                                                   t.params().lambda(), 2.0))
                  .satisfied);
}

TEST(TrainerTest, LogMarginsAreLipschitzTimesRadii) {
  Trainer t(tiny_config());
  t.run();
  ASSERT_FALSE(t.log().rows.empty());
  for (const LogRow& row : t.log().rows) {
    EXPECT_DOUBLE_EQ(row.margins.psi, 2.0 * row.margins.eps_bar);
    EXPECT_DOUBLE_EQ(row.margins.eta, 2.0 * row.margins.delta);
    EXPECT_EQ(row.converged, row.q1_violations + row.q2_violations + row.q3_violations == 0 &&
                                 row.lmi_satisfied);
  }
  // Rollouts grow the buffer while unconverged.
  if (!t.log().rows.front().converged) EXPECT_GT(t.buffer().size(), 60u);
}

TEST(TrainerTest, RunIsReproducible) {
  Trainer a(tiny_config());
  Trainer b(tiny_config());
  a.run();
  b.run();
  EXPECT_EQ(a.log().csv(), b.log().csv());
  EXPECT_EQ(nets::serialize_checkpoint(a.checkpoint()),
            nets::serialize_checkpoint(b.checkpoint()));
}

TEST(TrainerTest, ResumeMatchesUninterruptedRun) {
  TrainConfig c = tiny_config();
  c.max_iterations = 4;
  Trainer full(c);
  full.run();

  Trainer first(c);
  first.warm_start();
  first.iterate();
  first.iterate();
  const std::string bytes = nets::serialize_checkpoint(first.checkpoint());
  Trainer second = Trainer::resume(nets::deserialize_checkpoint(bytes));
  EXPECT_EQ(second.iteration(), 2u);
  second.run();
  EXPECT_EQ(full.log().csv(), second.log().csv());
  EXPECT_EQ(nets::serialize_checkpoint(full.checkpoint()),
            nets::serialize_checkpoint(second.checkpoint()));
}

TEST(TrainerTest, ResumeRejectsCheckpointWithoutState) {
  Trainer t(tiny_config());
  nets::Checkpoint c = t.checkpoint();
  c.sections.clear();
  EXPECT_THROW(Trainer::resume(c), CheckpointError);
}

TEST(TrainLogTest, SerializeRoundTrip) {
  TrainLog log;
  LogRow row;
  row.iteration = 3;
  row.margins.psi = 0.1;
  row.lmi_logdet = -2.5;
  row.converged = true;
  log.rows.push_back(row);
  log.warm.push_back(WarmRow{0, 0.2, 0.4, 1.5});
  const TrainLog back = TrainLog::deserialize(log.serialize());
  EXPECT_EQ(back.csv(), log.csv());
  EXPECT_EQ(back.warm_csv(), log.warm_csv());
  EXPECT_EQ(std::string(TrainLog::warm_header()), "epoch,eps_bar,psi,loss_salad");
  EXPECT_THROW(TrainLog::deserialize(log.serialize() + "x"), CheckpointError);
}

}  // namespace
}  // namespace salad::train
