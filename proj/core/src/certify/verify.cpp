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

#include "salad/certify/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "salad/certify/bounds.hpp"
#include "salad/envs/dynamics.hpp"
#include "salad/envs/render.hpp"
#include "salad/errors.hpp"
#include "salad/losses/lmi.hpp"
#include "salad/random.hpp"

namespace salad::certify {
namespace {

Tensor gather_rows(const Tensor& source, const std::vector<std::size_t>& rows) {
  const std::size_t d = source.cols();
  Tensor out({rows.size(), d});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(&source.data()[rows[i] * d], d, &out.data()[i * d]);
  }
  return out;
}

}  // namespace

Tensor encode_observations(const envs::DataBuffer& buffer,
                           const nets::Mlp& encoder, std::size_t chunk) {
  const std::size_t n = buffer.observation_count();
  const std::size_t d = encoder.spec().output_dim();
  Tensor out({n, d});
  std::vector<std::size_t> ids;
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    const std::size_t end = std::min(n, begin + chunk);
    ids.resize(end - begin);
    for (std::size_t i = begin; i < end; ++i) ids[i - begin] = i;
    const Tensor z = nets::encode(encoder, buffer.render_observations(ids));
    std::copy(z.data().begin(), z.data().end(), &out.data()[begin * d]);
  }
  return out;
}

Tensor record_latents(const envs::DataBuffer& buffer, const Tensor& obs_latents) {
  std::vector<std::size_t> rows(buffer.size());
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = buffer.observation_index(r);
  return gather_rows(obs_latents, rows);
}

Tensor next_record_latents(const envs::DataBuffer& buffer,
                           const Tensor& obs_latents) {
  std::vector<std::size_t> rows(buffer.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    rows[r] = buffer.next_observation_index(r);
  }
  return gather_rows(obs_latents, rows);
}

Tensor record_actions(const envs::DataBuffer& buffer) {
  Tensor a({buffer.size(), 1});
  for (std::size_t r = 0; r < buffer.size(); ++r) a[r] = buffer[r].action;
  return a;
}

double consistency_error(const envs::DataBuffer& buffer, const nets::Networks& nets,
                         const Tensor& obs_latents) {
  if (buffer.empty()) throw DatasetError("consistency error of an empty buffer");
  const Tensor predicted = nets::latent_step(
      nets.dynamics, record_latents(buffer, obs_latents), record_actions(buffer));
  return consistency_error(predicted, next_record_latents(buffer, obs_latents));
}

double consistency_error_action_grid(const envs::DataBuffer& buffer,
                                     const nets::Networks& nets,
                                     const Tensor& obs_latents,
                                     std::size_t actions) {
  if (buffer.empty()) throw DatasetError("consistency error of an empty buffer");
  if (actions < 2) throw ConfigError("certify.delta_action_grid", "must be >= 2");
  const envs::EnvSpec& spec = buffer.spec();
  const Tensor z = record_latents(buffer, obs_latents);
  const std::size_t n = buffer.size();
  double worst = 0.0;
  Tensor obs({n, spec.observation_size()});
  Tensor a({n, 1});
  for (std::size_t j = 0; j < actions; ++j) {
    const double u = spec.action_low + (spec.action_high - spec.action_low) *
                                           static_cast<double>(j) /
                                           static_cast<double>(actions - 1);
    for (std::size_t r = 0; r < n; ++r) {
      const envs::State& now = buffer[r].state_now;
      envs::render_into(spec, now, envs::step(spec, now, u),
                        obs.data().subspan(r * spec.observation_size(),
                                           spec.observation_size()));
      a[r] = u;
    }
    worst = std::max(worst, consistency_error(nets::latent_step(nets.dynamics, z, a),
                                              nets::encode(nets.encoder, obs)));
  }
  return worst;
}

Margins compute_margins(const envs::DataBuffer& buffer, const nets::Networks& nets,
                        const Tensor& obs_latents, const MarginConfig& config) {
  if (buffer.empty()) throw DatasetError("margins of an empty buffer");
  const Tensor z = record_latents(buffer, obs_latents);
  Margins m;
  m.lipschitz = config.lipschitz;
  m.eps_bar = covering_radius(z, probe_set(z, config.probes));
  m.delta = config.delta_action_grid == 0
                ? consistency_error(buffer, nets, obs_latents)
                : consistency_error_action_grid(buffer, nets, obs_latents,
                                                config.delta_action_grid);
  m.psi = psi_margin(m.lipschitz, m.eps_bar);
  m.eta = eta_margin(m.lipschitz, m.delta);
  return m;
}

Slacks condition_slacks(const envs::DataBuffer& buffer, const nets::Networks& nets,
                        const Tensor& obs_latents, double psi, double eta) {
  const Tensor z = record_latents(buffer, obs_latents);
  const Tensor b = nets::barrier(nets.barrier, z);
  const Tensor z_next =
      nets::latent_step(nets.dynamics, z, nets::policy(nets.policy, z));
  const Tensor b_next = nets::barrier(nets.barrier, z_next);
  Slacks s;
  s.q1_records = buffer.safe_indices();
  s.q2_records = buffer.unsafe_indices();
  for (std::size_t r : s.q1_records) s.q1.push_back(b[r] + psi);
  for (std::size_t r : s.q2_records) s.q2.push_back(-b[r] + psi);
  s.q3.resize(buffer.size());
  for (std::size_t r = 0; r < buffer.size(); ++r) {
    s.q3[r] = b_next[r] + eta - b[r] + psi;
  }
  return s;
}

std::vector<double> target_decrease_slacks(const envs::DataBuffer& buffer,
                                           const nets::ParamStore& params,
                                           const Tensor& obs_latents,
                                           double psi, double eta) {
  const Tensor z = record_latents(buffer, obs_latents);
  const Tensor z_target = record_latents(
      buffer, encode_observations(buffer, params.target.encoder));
  const Tensor action = nets::policy(params.online.policy, z);
  const Tensor b_next = nets::barrier(
      params.target.barrier,
      nets::latent_step(params.online.dynamics, z_target, action));
  const Tensor b = nets::barrier(params.online.barrier, z);
  std::vector<double> out(buffer.size());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = b_next[r] + eta - b[r] + psi;
  return out;
}

ConditionStats summarize(const std::vector<double>& slacks) {
  ConditionStats s;
  s.samples = slacks.size();
  s.worst = -std::numeric_limits<double>::infinity();
  for (double v : slacks) {
    if (v > 0.0 || std::isnan(v)) ++s.violations;
    s.worst = std::max(s.worst, v);
  }
  return s;
}

envs::Controller policy_controller(const nets::Networks& nets) {
  return [&nets](const Tensor& frames) {
    const Tensor a = nets::policy(nets.policy, nets::encode(nets.encoder, frames));
    const nets::MlpSpec& spec = nets.policy.spec();
    std::vector<double> out(a.rows());
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = std::clamp(a[i * a.cols()], spec.out_low, spec.out_high);
    }
    return out;
  };
}

CertificateReport verify(const nets::ParamStore& params, const envs::EnvSpec& env,
                         const envs::DataBuffer& buffer,
                         const VerifyConfig& config) {
  if (!(buffer.spec() == env)) {
    throw EnvironmentMismatch("dataset environment '" + buffer.spec().serialize() +
                              "' does not match checkpoint environment '" +
                              env.serialize() + "'");
  }
  if (buffer.empty()) throw DatasetError("cannot verify against an empty buffer");
  const nets::Networks& nets = params.online;
  CertificateReport report;
  report.env = envs::to_string(env.id);
  report.records = buffer.size();
  report.safe_records = buffer.safe_indices().size();
  report.unsafe_records = buffer.unsafe_indices().size();

  const Tensor latents = encode_observations(buffer, nets.encoder);
  report.margins = compute_margins(buffer, nets, latents, config.margins);
  const Margins& m = report.margins;
  report.slacks = condition_slacks(buffer, nets, latents, m.psi, m.eta);
  report.q1 = summarize(report.slacks.q1);
  report.q2 = summarize(report.slacks.q2);
  report.q3 = summarize(report.slacks.q3);
  report.q3_target =
      summarize(target_decrease_slacks(buffer, params, latents, m.psi, m.eta));

  const losses::LmiStatus lmi = losses::lmi_status(
      losses::build_lmi(nets.barrier, params.lambda(), m.lipschitz));
  report.lmi_feasible = lmi.feasible;
  report.lmi_satisfied = lmi.satisfied;
  report.lmi_logdet = lmi.logdet;

  report.lipschitz_upper_bound = lipschitz_upper_bound(nets.barrier);
  if (config.lipschitz_pairs > 0) {
    Box box = bounding_box(record_latents(buffer, latents));
    for (std::size_t k = 0; k < box.low.size(); ++k) {
      const double pad = 0.1 * (box.high[k] - box.low[k]) + 1e-6;
      box.low[k] -= pad;
      box.high[k] += pad;
    }
    const PointPairs pairs =
        random_pairs(box.low, box.high, config.lipschitz_pairs, config.seed + 1);
    report.empirical_lipschitz = empirical_lipschitz(
        [&nets](const Tensor& z) { return nets::barrier(nets.barrier, z); },
        pairs.a, pairs.b);
    report.empirical_ratio =
        m.lipschitz > 0.0 ? report.empirical_lipschitz / m.lipschitz : 0.0;
  }

  report.rollouts = config.rollouts;
  report.horizon = config.horizon;
  if (config.rollouts > 0) {
    Rng rng(config.seed);
    std::vector<envs::State> starts;
    for (std::size_t i = 0; i < config.rollouts; ++i) {
      starts.push_back(envs::sample_state(env, envs::Region::kSafe, rng));
    }
    report.safe_starts = starts.size();
    const auto trajectories =
        envs::rollout(env, policy_controller(nets), starts, config.horizon);
    for (const auto& t : trajectories) {
      report.rollout_violations += t.unsafe_entries;
      if (!t.safe) ++report.unsafe_trajectories;
    }
  }

  report.certified = report.q1.violations == 0 && report.q2.violations == 0 &&
                     report.q3.violations == 0 && report.lmi_satisfied &&
                     report.rollout_violations == 0;
  return report;
}

std::string report_text(const CertificateReport& r) {
  std::ostringstream out;
  out.precision(17);
  auto stats = [&out](const char* name, const ConditionStats& s) {
    out << name << "_samples = " << s.samples << '\n'
        << name << "_violations = " << s.violations << '\n'
        << name << "_worst_slack = " << s.worst << '\n';
  };
  out << "env = " << r.env << '\n'
      << "records = " << r.records << '\n'
      << "safe_records = " << r.safe_records << '\n'
      << "unsafe_records = " << r.unsafe_records << '\n'
      << "lipschitz = " << r.margins.lipschitz << '\n'
      << "eps_bar = " << r.margins.eps_bar << '\n'
      << "delta = " << r.margins.delta << '\n'
      << "psi = " << r.margins.psi << '\n'
      << "eta = " << r.margins.eta << '\n';
  stats("q1", r.q1);
  stats("q2", r.q2);
  stats("q3", r.q3);
  stats("q3_target", r.q3_target);
  out << "lmi_feasible = " << (r.lmi_feasible ? "true" : "false") << '\n'
      << "lmi_satisfied = " << (r.lmi_satisfied ? "true" : "false") << '\n'
      << "lmi_logdet = " << r.lmi_logdet << '\n'
      << "lipschitz_upper_bound = " << r.lipschitz_upper_bound << '\n'
      << "empirical_lipschitz = " << r.empirical_lipschitz << '\n'
      << "empirical_ratio = " << r.empirical_ratio << '\n'
      << "rollouts = " << r.rollouts << '\n'
      << "horizon = " << r.horizon << '\n'
      << "safe_starts = " << r.safe_starts << '\n'
      << "rollout_violations = " << r.rollout_violations << '\n'
      << "unsafe_trajectories = " << r.unsafe_trajectories << '\n'
      << "certified = " << (r.certified ? "true" : "false") << '\n';
  return out.str();
}

void write_report(const CertificateReport& report,
                  const std::filesystem::path& path) {
  std::ofstream out(path);
  out << report_text(report);
  if (!out) throw Error("cannot write report " + path.string());
}

void write_slacks_csv(const CertificateReport& report,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  out.precision(17);
  out << "condition,record,slack\n";
  const Slacks& s = report.slacks;
  for (std::size_t i = 0; i < s.q1.size(); ++i) {
    out << "q1," << s.q1_records[i] << ',' << s.q1[i] << '\n';
  }
  for (std::size_t i = 0; i < s.q2.size(); ++i) {
    out << "q2," << s.q2_records[i] << ',' << s.q2[i] << '\n';
  }
  for (std::size_t i = 0; i < s.q3.size(); ++i) {
    out << "q3," << i << ',' << s.q3[i] << '\n';
  }
  if (!out) throw Error("cannot write slacks " + path.string());
}

ExtensionReport extension_check(const envs::DataBuffer& buffer,
                                const nets::Networks& nets,
                                const Tensor& obs_latents, double eps_bar,
                                std::size_t per_axis) {
  const Tensor z = record_latents(buffer, obs_latents);
  const Tensor grid = grid_points(bounding_box(z), per_axis);
  const std::size_t d = z.cols();
  const KdTree all(z);
  const auto subset = [&](const std::vector<std::size_t>& rows) {
    return rows.empty() ? nullptr : std::make_unique<KdTree>(gather_rows(z, rows));
  };
  const auto safe = subset(buffer.safe_indices());
  const auto unsafe = subset(buffer.unsafe_indices());

  ExtensionReport report;
  report.grid_points = grid.rows();
  std::vector<std::size_t> covered;
  for (std::size_t i = 0; i < grid.rows(); ++i) {
    if (all.nearest_distance(&grid.data()[i * d]) <= eps_bar) covered.push_back(i);
  }
  report.covered = covered.size();
  const Tensor g = gather_rows(grid, covered);
  if (covered.empty()) return report;
  const Tensor b = nets::barrier(nets.barrier, g);
  const Tensor b_next = nets::barrier(
      nets.barrier,
      nets::latent_step(nets.dynamics, g, nets::policy(nets.policy, g)));
  std::vector<double> q1, q2, q3;
  for (std::size_t i = 0; i < covered.size(); ++i) {
    const double* p = &g.data()[i * d];
    if (safe && safe->nearest_distance(p) <= eps_bar) q1.push_back(b[i]);
    if (unsafe && unsafe->nearest_distance(p) <= eps_bar) q2.push_back(-b[i]);
    q3.push_back(b_next[i] - b[i]);
  }
  report.q1 = summarize(q1);
  report.q2 = summarize(q2);
  report.q3 = summarize(q3);
  return report;
}

}  // namespace salad::certify
