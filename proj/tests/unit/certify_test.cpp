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

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "gradcheck.hpp"
#include "salad/certify/bounds.hpp"
#include "salad/certify/cover.hpp"
#include "salad/certify/verify.hpp"
#include "salad/envs/buffer.hpp"
#include "salad/errors.hpp"
#include "salad/losses/lmi.hpp"

namespace salad::certify {
namespace {

using testing::random_matrix;

double brute_nearest2(const Tensor& data, const double* q) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < data.cols(); ++k) {
      s += (data.at(i, k) - q[k]) * (data.at(i, k) - q[k]);
    }
    best = std::min(best, s);
  }
  return best;
}

double brute_nearest(const Tensor& data, const double* q) {
  return std::sqrt(brute_nearest2(data, q));
}

double brute_covering_radius(const Tensor& data, const Tensor& probes) {
  double r = 0.0;
  for (std::size_t j = 0; j < probes.rows(); ++j) {
    r = std::max(r, brute_nearest(data, &probes.data()[j * probes.cols()]));
  }
  return r;
}

TEST(CoverTest, WorkedExamples) {
  // Two endpoints of [0, 1]: the midpoint is farthest.
  const Tensor ends = Tensor::matrix(2, 1, {0.0, 1.0});
  EXPECT_DOUBLE_EQ(covering_radius(ends, grid_points(bounding_box(ends), 101)), 0.5);
  // Unit-square corners with the center as probe.
  const Tensor corners = Tensor::matrix(4, 2, {0, 0, 0, 1, 1, 0, 1, 1});
  EXPECT_DOUBLE_EQ(covering_radius(corners, Tensor::matrix(1, 2, {0.5, 0.5})),
                   std::sqrt(0.5));
  // Probes that coincide with data.
  EXPECT_EQ(covering_radius(corners, corners), 0.0);
}

TEST(CoverTest, KdTreeMatchesBruteForce) {
  Rng rng(5);
  for (std::size_t d = 1; d <= 4; ++d) {
    const Tensor data = random_matrix(300, d, rng, -1.0, 1.0);
    const Tensor probes = random_matrix(400, d, rng, -1.5, 1.5);
    EXPECT_EQ(covering_radius(data, probes), brute_covering_radius(data, probes));
    const KdTree tree(data);
    for (std::size_t j = 0; j < probes.rows(); ++j) {
      const double* q = &probes.data()[j * d];
      EXPECT_EQ(tree.nearest_distance(q), brute_nearest(data, q));
    }
  }
}

TEST(CoverTest, AnyWithinMatchesBruteForce) {
  Rng rng(6);
  for (std::size_t d = 1; d <= 4; ++d) {
    const Tensor data = random_matrix(200, d, rng, -1.0, 1.0);
    const Tensor probes = random_matrix(300, d, rng, -1.5, 1.5);
    const KdTree tree(data);
    for (std::size_t j = 0; j < probes.rows(); ++j) {
      const double* q = &probes.data()[j * d];
      const double r2 = brute_nearest2(data, q);
      EXPECT_EQ(tree.nearest_distance2(q), r2);
      EXPECT_TRUE(tree.any_within(q, r2));
      EXPECT_FALSE(tree.any_within(q, std::nextafter(r2, 0.0)));
      EXPECT_TRUE(tree.any_within(q, 4.0 * r2 + 1.0));
    }
  }
}

TEST(CoverTest, DuplicatePointsAndTies) {
  const Tensor data = Tensor::matrix(4, 1, {1.0, 1.0, 3.0, 3.0});
  const KdTree tree(data);
  const double q = 2.0;
  EXPECT_EQ(tree.nearest(&q), 0u);
  EXPECT_EQ(tree.nearest_distance(&q), 1.0);
}

TEST(CoverTest, ErrorsOnEmptyOrMismatched) {
  EXPECT_THROW(covering_radius(Tensor({0, 2}), Tensor({1, 2})), DimensionError);
  EXPECT_THROW(covering_radius(Tensor({2, 2}), Tensor({1, 3})), DimensionError);
  EXPECT_THROW(bounding_box(Tensor({0, 2})), DimensionError);
  EXPECT_THROW(grid_points(Box{{0.0}, {1.0}}, 0), DimensionError);
}

TEST(CoverTest, GridLayout) {
  const Tensor g = grid_points(Box{{0.0, -1.0}, {1.0, 1.0}}, 3);
  ASSERT_EQ(g.rows(), 9u);
  // Last axis varies fastest.
  EXPECT_EQ(g.at(0, 0), 0.0);
  EXPECT_EQ(g.at(0, 1), -1.0);
  EXPECT_EQ(g.at(1, 1), 0.0);
  EXPECT_EQ(g.at(2, 1), 1.0);
  EXPECT_EQ(g.at(3, 0), 0.5);
  EXPECT_EQ(g.at(8, 0), 1.0);
  EXPECT_EQ(g.at(8, 1), 1.0);
  const Tensor single = grid_points(Box{{2.0}, {4.0}}, 1);
  EXPECT_EQ(single.at(0, 0), 3.0);
}

TEST(CoverTest, SobolFillsBoxDeterministically) {
  const Box box{{-1.0, 0.0, 2.0}, {1.0, 0.5, 3.0}};
  const Tensor a = sobol_points(box, 4096);
  EXPECT_EQ(a.data().size(), sobol_points(box, 4096).data().size());
  EXPECT_TRUE(std::equal(a.data().begin(), a.data().end(),
                         sobol_points(box, 4096).data().begin()));
  for (std::size_t k = 0; k < 3; ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      EXPECT_GE(a.at(i, k), box.low[k]);
      EXPECT_LT(a.at(i, k), box.high[k]);
      mean += a.at(i, k);
    }
    mean /= static_cast<double>(a.rows());
    EXPECT_NEAR(mean, 0.5 * (box.low[k] + box.high[k]),
                1e-2 * (box.high[k] - box.low[k]));
  }
}

TEST(CoverTest, ProbeSetSwitchesOnDimension) {
  Rng rng(6);
  ProbeConfig c;
  c.grid_per_axis = 7;
  c.sobol_points = 333;
  EXPECT_EQ(probe_set(random_matrix(10, 2, rng, 0, 1), c).rows(), 49u);
  EXPECT_EQ(probe_set(random_matrix(10, 1, rng, 0, 1), c).rows(), 7u);
  EXPECT_EQ(probe_set(random_matrix(10, 3, rng, 0, 1), c).rows(), 333u);
}

TEST(BoundsTest, MarginsAndConsistency) {
  EXPECT_EQ(psi_margin(2.0, 0.25), 0.5);
  EXPECT_EQ(eta_margin(3.0, 0.1), 3.0 * 0.1);
  const Tensor pred = Tensor::matrix(2, 2, {3.0, 4.0, 0.0, 1.0});
  EXPECT_DOUBLE_EQ(consistency_error(pred, Tensor({2, 2})), 5.0);
  EXPECT_EQ(consistency_error(pred, pred), 0.0);
  EXPECT_THROW(consistency_error(pred, Tensor({2, 3})), DimensionError);
}

TEST(BoundsTest, SpectralNormMatchesSvd) {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t r = 1 + uniform_index(rng, 12);
    const std::size_t c = 1 + uniform_index(rng, 12);
    const Tensor w = random_matrix(r, c, rng, -2.0, 2.0);
    Eigen::MatrixXd m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) m(i, j) = w.at(i, j);
    }
    const double sigma = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
    EXPECT_NEAR(spectral_norm(w, 2000, 1e-14), sigma, 1e-6 * std::max(1.0, sigma));
  }
  EXPECT_EQ(spectral_norm(Tensor({3, 3})), 0.0);
  EXPECT_NEAR(spectral_norm(Tensor::matrix(2, 2, {3, 0, 0, -5})), 5.0, 1e-8);
}

TEST(BoundsTest, EmpiricalNeverExceedsSpectralBound) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    nets::MlpSpec spec;
    spec.widths = {3, 10, 6, 1};
    spec.hidden = trial % 2 == 0 ? nets::Activation::kRelu : nets::Activation::kTanh;
    const nets::Mlp net = nets::Mlp::initialized(spec, rng);
    const PointPairs pairs = random_pairs({-2, -2, -2}, {2, 2, 2}, 4000, trial);
    const double emp = empirical_lipschitz(
        [&](const Tensor& z) { return nets::barrier(net, z); }, pairs.a, pairs.b);
    EXPECT_GT(emp, 0.0);
    EXPECT_LE(emp, lipschitz_upper_bound(net) * (1.0 + 1e-9));
  }
}

TEST(BoundsTest, EmpiricalOfLinearMapIsItsNorm) {
  const ScalarField f = [](const Tensor& z) {
    Tensor out({z.rows(), 1});
    for (std::size_t i = 0; i < z.rows(); ++i) out[i] = 3.0 * z.at(i, 0) + 4.0 * z.at(i, 1);
    return out;
  };
  const PointPairs pairs = random_pairs({-1, -1}, {1, 1}, 20000, 3);
  const double emp = empirical_lipschitz(f, pairs.a, pairs.b);
  EXPECT_LE(emp, 5.0 + 1e-12);
  EXPECT_GT(emp, 4.99);
  EXPECT_NEAR(lipschitz_upper_bound({Tensor::matrix(2, 1, {3.0, 4.0})}), 5.0, 1e-9);
}

TEST(BoundsTest, RandomPairsStayInBox) {
  const PointPairs p = random_pairs({0.0, -3.0}, {1.0, -2.0}, 1000, 9);
  for (std::size_t i = 0; i < 1000; i += 2) {
    EXPECT_GE(p.a.at(i, 0), 0.0);
    EXPECT_LE(p.a.at(i, 0), 1.0);
    EXPECT_GE(p.b.at(i, 1), -3.0);
    EXPECT_LE(p.b.at(i, 1), -2.0);
  }
  const PointPairs q = random_pairs({0.0, -3.0}, {1.0, -2.0}, 1000, 9);
  EXPECT_TRUE(std::equal(p.a.data().begin(), p.a.data().end(), q.a.data().begin()));
}

// Margined sign conditions at the data, an L-Lipschitz barrier and the
// covering radius together fix the sign of every covered probe.
TEST(BoundsTest, MarginedConditionsExtendToCoveredProbes) {
  Rng rng(10);
  std::size_t checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor data = random_matrix(200, 2, rng, -1.0, 1.0);
    nets::MlpSpec spec;
    spec.widths = {2, 6, 1};
    spec.hidden = nets::Activation::kTanh;
    const nets::Mlp net = nets::Mlp::initialized(spec, rng);
    const double L = lipschitz_upper_bound(net);
    const Tensor probes = grid_points(bounding_box(data), 60);
    const double eps = covering_radius(data, probes);
    const double psi = psi_margin(L, eps);
    const Tensor b = nets::barrier(net, data);
    const Tensor bp = nets::barrier(net, probes);
    const KdTree tree(data);
    for (std::size_t j = 0; j < probes.rows(); ++j) {
      const std::size_t i = tree.nearest(&probes.data()[2 * j]);
      if (b[i] + psi <= 0.0) {
        EXPECT_LE(bp[j], 0.0);
        ++checked;
      }
      if (-b[i] + psi <= 0.0) {
        EXPECT_GE(bp[j], 0.0);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 1000u);
}

// ---------------------------------------------------------------------------
// Verification on a small pendulum buffer.

envs::EnvSpec small_pendulum() {
  envs::EnvSpec s = envs::EnvSpec::pendulum();
  s.frame_width = 8;
  s.frame_height = 8;
  return s;
}

nets::NetworkSpecs small_specs(const envs::EnvSpec& env) {
  nets::NetworkSpecs s;
  s.encoder.widths = {env.observation_size(), 16, 2};
  s.encoder.hidden = nets::Activation::kRelu;
  s.encoder.output = nets::OutputActivation::kTanhScaled;
  s.encoder.out_low = -1.0;
  s.encoder.out_high = 1.0;
  s.dynamics.widths = {3, 16, 2};
  s.barrier.widths = {2, 16, 1};
  s.policy.widths = {2, 8, 1};
  s.policy.output = nets::OutputActivation::kTanhScaled;
  s.policy.out_low = env.action_low;
  s.policy.out_high = env.action_high;
  return s;
}

struct VerifyFixture {
  envs::EnvSpec env = small_pendulum();
  envs::DataBuffer buffer = envs::sample_datasets(env, 40, 40, 120, 11);
  nets::ParamStore params{small_specs(env), 0.99, 12};
};

TEST(VerifyTest, MarginsMatchIndependentComputation) {
  VerifyFixture f;
  const nets::Networks& n = f.params.online;
  std::vector<std::size_t> all(f.buffer.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const Tensor z = nets::encode(n.encoder, f.buffer.observation_batch(all));
  const Tensor z_next = nets::encode(n.encoder, f.buffer.next_observation_batch(all));
  Tensor a({all.size(), 1});
  for (std::size_t i = 0; i < all.size(); ++i) a[i] = f.buffer[i].action;
  const Tensor pred = nets::latent_step(n.dynamics, z, a);
  double delta = 0.0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const double dx = pred.at(i, 0) - z_next.at(i, 0);
    const double dy = pred.at(i, 1) - z_next.at(i, 1);
    delta = std::max(delta, std::hypot(dx, dy));
  }
  MarginConfig c;
  c.lipschitz = 1.5;
  c.probes.grid_per_axis = 40;
  const Margins m = compute_margins(f.buffer, n, encode_observations(f.buffer, n.encoder), c);
  const double eps = brute_covering_radius(z, grid_points(bounding_box(z), 40));
  EXPECT_NEAR(m.eps_bar, eps, 1e-12);
  EXPECT_NEAR(m.delta, delta, 1e-12);
  EXPECT_EQ(m.psi, 1.5 * m.eps_bar);
  EXPECT_EQ(m.eta, 1.5 * m.delta);
  EXPECT_EQ(m.lipschitz, 1.5);
}

TEST(VerifyTest, SlacksFollowDefinitions) {
  VerifyFixture f;
  const nets::Networks& n = f.params.online;
  const Tensor latents = encode_observations(f.buffer, n.encoder);
  const Slacks s = condition_slacks(f.buffer, n, latents, 0.3, 0.1);
  ASSERT_EQ(s.q1.size(), f.buffer.safe_indices().size());
  ASSERT_EQ(s.q2.size(), f.buffer.unsafe_indices().size());
  ASSERT_EQ(s.q3.size(), f.buffer.size());
  for (std::size_t k = 0; k < s.q1.size(); ++k) {
    const std::size_t r = s.q1_records[k];
    const std::vector<std::size_t> one = {r};
    const Tensor z = nets::encode(n.encoder, f.buffer.observation_batch(one));
    EXPECT_NEAR(s.q1[k], nets::barrier(n.barrier, z)[0] + 0.3, 1e-12);
    EXPECT_EQ(f.buffer[r].label, envs::Label::kSafe);
  }
  for (std::size_t r = 0; r < f.buffer.size(); r += 7) {
    const std::vector<std::size_t> one = {r};
    const Tensor z = nets::encode(n.encoder, f.buffer.observation_batch(one));
    const Tensor zn = nets::latent_step(n.dynamics, z, nets::policy(n.policy, z));
    EXPECT_NEAR(s.q3[r],
                nets::barrier(n.barrier, zn)[0] + 0.1 - nets::barrier(n.barrier, z)[0] + 0.3,
                1e-12);
  }
}

TEST(VerifyTest, SummarizeCountsPositiveAndNan) {
  const ConditionStats s = summarize({-1.0, 0.0, 0.5, std::nan(""), 2.0});
  EXPECT_EQ(s.samples, 5u);
  EXPECT_EQ(s.violations, 3u);
  EXPECT_EQ(s.worst, 2.0);
  EXPECT_EQ(summarize({}).worst, -std::numeric_limits<double>::infinity());
}

TEST(VerifyTest, UntrainedModelIsNotCertified) {
  VerifyFixture f;
  VerifyConfig c;
  c.margins.lipschitz = 2.0;
  c.margins.probes.grid_per_axis = 30;
  c.lipschitz_pairs = 500;
  c.rollouts = 5;
  c.horizon = 20;
  c.seed = 4;
  const CertificateReport r = verify(f.params, f.env, f.buffer, c);
  EXPECT_FALSE(r.certified);
  EXPECT_EQ(r.records, f.buffer.size());
  EXPECT_EQ(r.safe_starts, 5u);
  EXPECT_EQ(r.q1.samples + r.q2.samples, f.buffer.safe_indices().size() +
                                             f.buffer.unsafe_indices().size());
  EXPECT_LE(r.empirical_lipschitz, r.lipschitz_upper_bound * (1.0 + 1e-9));
  const CertificateReport again = verify(f.params, f.env, f.buffer, c);
  EXPECT_EQ(report_text(r), report_text(again));
  EXPECT_NE(report_text(r).find("certified = false"), std::string::npos);
}

TEST(VerifyTest, EnvironmentMismatchThrows) {
  VerifyFixture f;
  envs::EnvSpec other = f.env;
  other.frame_width = 16;
  EXPECT_THROW(verify(f.params, other, f.buffer, VerifyConfig{}), EnvironmentMismatch);
  EXPECT_THROW(verify(f.params, f.env, envs::DataBuffer(f.env), VerifyConfig{}),
               DatasetError);
}

TEST(VerifyTest, ExtensionCheckCoversDataPoints) {
  VerifyFixture f;
  const nets::Networks& n = f.params.online;
  const Tensor latents = encode_observations(f.buffer, n.encoder);
  const ExtensionReport big = extension_check(f.buffer, n, latents, 10.0, 20);
  EXPECT_EQ(big.grid_points, 400u);
  EXPECT_EQ(big.covered, 400u);
  const ExtensionReport none = extension_check(f.buffer, n, latents, -1.0, 20);
  EXPECT_EQ(none.covered, 0u);
}

}  // namespace
}  // namespace salad::certify
