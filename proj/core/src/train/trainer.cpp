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

#include "salad/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "salad/binary_io.hpp"
#include "salad/certify/bounds.hpp"
#include "salad/certify/cover.hpp"
#include "salad/certify/verify.hpp"
#include "salad/envs/dynamics.hpp"
#include "salad/envs/rollout.hpp"
#include "salad/errors.hpp"
#include "salad/losses/lmi.hpp"
#include "salad/losses/losses.hpp"

namespace salad::train {
namespace {

using tensor::Tape;
using tensor::Var;

std::vector<Var> interleave(const nets::MlpVars& v, std::vector<Var> out = {}) {
  for (std::size_t i = 0; i < v.weights.size(); ++i) {
    out.push_back(v.weights[i]);
    out.push_back(v.biases[i]);
  }
  return out;
}

std::vector<const Tensor*> grads_of(const std::vector<Var>& vars) {
  std::vector<const Tensor*> out;
  out.reserve(vars.size());
  for (const Var& v : vars) out.push_back(&v.grad());
  return out;
}

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw DivergenceError(std::string("non-finite ") + what + " loss");
  }
}

double hinge(double x) { return x > 0.0 ? x : 0.0; }

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

// log det M when M is positive definite; otherwise a large negative offset
// plus the smallest eigenvalue, so infeasible points still rank.
double certificate_score(const Tensor& m) {
  const losses::LmiStatus s = losses::lmi_status(m);
  if (s.feasible) return s.logdet;
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>
      view(m.data().data(), static_cast<Eigen::Index>(m.rows()),
           static_cast<Eigen::Index>(m.cols()));
  const Eigen::MatrixXd sym = 0.5 * (view + view.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  return -1e12 + eig.eigenvalues()(0);
}

// Appends latents for observations [from, observation_count()).
Tensor extend_latents(const envs::DataBuffer& buffer, const nets::Mlp& encoder,
                      const Tensor& latents, std::size_t from) {
  const std::size_t n = buffer.observation_count();
  const std::size_t d = encoder.spec().output_dim();
  Tensor out({n, d});
  std::copy(latents.data().begin(), latents.data().begin() + from * d,
            out.data().begin());
  std::vector<std::size_t> ids;
  constexpr std::size_t kChunk = 256;
  for (std::size_t begin = from; begin < n; begin += kChunk) {
    const std::size_t end = std::min(n, begin + kChunk);
    ids.resize(end - begin);
    std::iota(ids.begin(), ids.end(), begin);
    const Tensor z = nets::encode(encoder, buffer.render_observations(ids));
    std::copy(z.data().begin(), z.data().end(), out.data().begin() + begin * d);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// TrainLog

const char* TrainLog::header() {
  return "iteration,records,safe,unsafe,lipschitz,eps_bar,delta,psi,eta,"
         "loss_total,loss_salad,loss_syn,loss_perf,q1_violations,"
         "q2_violations,q3_violations,lmi_feasible,lmi_satisfied,lmi_logdet,"
         "main_lr,rollout_unsafe,lmi_steps,converged";
}

const char* TrainLog::warm_header() { return "epoch,eps_bar,psi,loss_salad"; }

std::string TrainLog::csv() const {
  std::ostringstream out;
  out << header() << '\n';
  for (const LogRow& r : rows) {
    out << r.iteration << ',' << r.records << ',' << r.safe << ',' << r.unsafe
        << ',' << fmt(r.margins.lipschitz) << ',' << fmt(r.margins.eps_bar)
        << ',' << fmt(r.margins.delta) << ',' << fmt(r.margins.psi) << ','
        << fmt(r.margins.eta) << ',' << fmt(r.loss_total) << ','
        << fmt(r.loss_salad) << ',' << fmt(r.loss_syn) << ','
        << fmt(r.loss_perf) << ',' << r.q1_violations << ','
        << r.q2_violations << ',' << r.q3_violations << ','
        << (r.lmi_feasible ? 1 : 0) << ',' << (r.lmi_satisfied ? 1 : 0) << ','
        << fmt(r.lmi_logdet) << ',' << fmt(r.main_lr) << ','
        << r.rollout_unsafe << ',' << r.lmi_steps << ','
        << (r.converged ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string TrainLog::warm_csv() const {
  std::ostringstream out;
  out << warm_header() << '\n';
  for (const WarmRow& r : warm) {
    out << r.epoch << ',' << fmt(r.eps_bar) << ',' << fmt(r.psi) << ','
        << fmt(r.loss_salad) << '\n';
  }
  return out.str();
}

void TrainLog::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  out << csv();
  if (!out) throw Error("cannot write " + path.string());
}

void TrainLog::write_warm_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  out << warm_csv();
  if (!out) throw Error("cannot write " + path.string());
}

std::string TrainLog::serialize() const {
  ByteWriter w;
  w.u64(rows.size());
  for (const LogRow& r : rows) {
    w.u64(r.iteration);
    w.u64(r.records);
    w.u64(r.safe);
    w.u64(r.unsafe);
    w.f64(r.margins.lipschitz);
    w.f64(r.margins.eps_bar);
    w.f64(r.margins.delta);
    w.f64(r.margins.psi);
    w.f64(r.margins.eta);
    w.f64(r.loss_total);
    w.f64(r.loss_salad);
    w.f64(r.loss_syn);
    w.f64(r.loss_perf);
    w.u64(r.q1_violations);
    w.u64(r.q2_violations);
    w.u64(r.q3_violations);
    w.u8(r.lmi_feasible);
    w.u8(r.lmi_satisfied);
    w.f64(r.lmi_logdet);
    w.f64(r.main_lr);
    w.u64(r.rollout_unsafe);
    w.u64(r.lmi_steps);
    w.u8(r.converged);
  }
  w.u64(warm.size());
  for (const WarmRow& r : warm) {
    w.u64(r.epoch);
    w.f64(r.eps_bar);
    w.f64(r.psi);
    w.f64(r.loss_salad);
  }
  return w.take();
}

TrainLog TrainLog::deserialize(const std::string& bytes) {
  ByteReader<CheckpointError> rd(bytes);
  TrainLog log;
  log.rows.resize(rd.u64());
  for (LogRow& r : log.rows) {
    r.iteration = rd.u64();
    r.records = rd.u64();
    r.safe = rd.u64();
    r.unsafe = rd.u64();
    r.margins.lipschitz = rd.f64();
    r.margins.eps_bar = rd.f64();
    r.margins.delta = rd.f64();
    r.margins.psi = rd.f64();
    r.margins.eta = rd.f64();
    r.loss_total = rd.f64();
    r.loss_salad = rd.f64();
    r.loss_syn = rd.f64();
    r.loss_perf = rd.f64();
    r.q1_violations = rd.u64();
    r.q2_violations = rd.u64();
    r.q3_violations = rd.u64();
    r.lmi_feasible = rd.u8() != 0;
    r.lmi_satisfied = rd.u8() != 0;
    r.lmi_logdet = rd.f64();
    r.main_lr = rd.f64();
    r.rollout_unsafe = rd.u64();
    r.lmi_steps = rd.u64();
    r.converged = rd.u8() != 0;
  }
  log.warm.resize(rd.u64());
  for (WarmRow& r : log.warm) {
    r.epoch = rd.u64();
    r.eps_bar = rd.f64();
    r.psi = rd.f64();
    r.loss_salad = rd.f64();
  }
  if (!rd.done()) throw CheckpointError("trailing bytes in log section");
  return log;
}

// ---------------------------------------------------------------------------
// Initialization

void project_certificate(nets::ParamStore& params, double lipschitz) {
  std::vector<nets::Layer>& layers = params.online.barrier.layers();
  const double bound = certify::lipschitz_upper_bound(params.online.barrier);
  const double goal = 0.9 * lipschitz;
  if (bound > goal) {
    const double factor =
        std::pow(goal / bound, 1.0 / static_cast<double>(layers.size()));
    for (nets::Layer& layer : layers) {
      for (double& w : layer.weight.data()) w *= factor;
    }
  }
  // One multiplier per hidden layer, coordinate search on a log grid.
  const std::size_t hidden_layers = layers.size() - 1;
  std::vector<double> level(hidden_layers, 0.0);
  auto assign = [&](const std::vector<double>& lv) {
    std::size_t k = 0;
    for (std::size_t layer = 0; layer < hidden_layers; ++layer) {
      for (std::size_t j = 0; j < layers[layer].weight.cols(); ++j) {
        params.log_lambda[k++] = lv[layer];
      }
    }
  };
  auto score = [&](const std::vector<double>& lv) {
    assign(lv);
    return certificate_score(
        losses::build_lmi(params.online.barrier, params.lambda(), lipschitz));
  };
  double best = score(level);
  for (int sweep = 0; sweep < 3; ++sweep) {
    for (std::size_t layer = 0; layer < hidden_layers; ++layer) {
      std::vector<double> trial = level;
      for (double c = -8.0; c <= 8.0; c += 0.25) {
        trial[layer] = c;
        const double s = score(trial);
        if (s > best) {
          best = s;
          level = trial;
        }
      }
    }
  }
  assign(level);
}

void initialize_certificate(nets::ParamStore& params, double lipschitz) {
  project_certificate(params, lipschitz);
  params.sync_target();
}

// ---------------------------------------------------------------------------
// Trainer

Trainer::Trainer(TrainConfig config) : config_(std::move(config)) {
  config_.validate();
  buffer_ = envs::sample_datasets(config_.env, config_.n_safe, config_.n_unsafe,
                                  config_.n_total, config_.seed);
  params_ = nets::ParamStore(config_.network_specs(), config_.polyak_rho,
                             config_.seed + 1);
  initialize_certificate(params_, config_.lipschitz);
  main_opt_ = Adam(config_.main_optimizer());
  lmi_opt_ = Adam(config_.lmi_optimizer());
  rng_ = Rng(config_.seed + 2);
  user_ = config_.make_user_policy();
  margins_.lipschitz = config_.lipschitz;
}

std::vector<Tensor*> Trainer::main_parameters() {
  return params_.online.parameters();
}

std::vector<Tensor*> Trainer::lmi_parameters() {
  std::vector<Tensor*> out = params_.online.barrier.parameters();
  out.push_back(&params_.log_lambda);
  return out;
}

losses::Batch Trainer::sample_batch() {
  const std::size_t n = config_.batch_size;
  auto pick = [&](const std::vector<std::size_t>& pool) {
    std::vector<std::size_t> out;
    if (pool.empty()) return out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(pool[uniform_index(rng_, pool.size())]);
    return out;
  };
  std::vector<std::size_t> records(n);
  for (std::size_t& r : records) r = uniform_index(rng_, buffer_.size());
  losses::Batch batch;
  batch.obs_safe = buffer_.observation_batch(pick(buffer_.safe_indices()));
  batch.obs_unsafe = buffer_.observation_batch(pick(buffer_.unsafe_indices()));
  batch.obs = buffer_.observation_batch(records);
  batch.next_obs = buffer_.next_observation_batch(records);
  batch.actions = Tensor({n, 1});
  for (std::size_t i = 0; i < n; ++i) batch.actions[i] = buffer_[records[i]].action;
  return batch;
}

double Trainer::salad_step(const std::vector<std::size_t>& records, double psi) {
  const std::size_t n = config_.batch_size;
  auto pick = [&](const std::vector<std::size_t>& pool) {
    std::vector<std::size_t> out;
    if (pool.empty()) return out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(pool[uniform_index(rng_, pool.size())]);
    return out;
  };
  losses::Batch batch;
  batch.obs_safe = buffer_.observation_batch(pick(buffer_.safe_indices()));
  batch.obs_unsafe = buffer_.observation_batch(pick(buffer_.unsafe_indices()));
  batch.obs = buffer_.observation_batch(records);
  batch.next_obs = buffer_.next_observation_batch(records);
  batch.actions = Tensor({records.size(), 1});
  for (std::size_t i = 0; i < records.size(); ++i) {
    batch.actions[i] = buffer_[records[i]].action;
  }
  Tape tape;
  const losses::BoundNetworks bound = losses::bind(tape, params_.online, true);
  Var loss = losses::salad_loss(tape, params_, bound, batch, psi, config_.weights);
  const double value = loss.value().item();
  require_finite(value, "latent");
  tape.backward(loss);
  std::vector<Var> vars = interleave(bound.encoder);
  vars = interleave(bound.dynamics, std::move(vars));
  vars = interleave(bound.barrier, std::move(vars));
  vars = interleave(bound.policy, std::move(vars));
  main_opt_.step(main_parameters(), grads_of(vars));
  params_.polyak_update();
  return value;
}

double Trainer::loss_step(double lr) {
  const losses::Batch batch = sample_batch();
  Tape tape;
  const losses::BoundNetworks bound = losses::bind(tape, params_.online, true);
  const losses::TotalLoss loss =
      losses::total_loss(tape, params_, bound, batch, margins_.psi, margins_.eta,
                         config_.weights, user_);
  const double value = loss.total.value().item();
  require_finite(value, "total");
  tape.backward(loss.total);
  std::vector<Var> vars = interleave(bound.encoder);
  vars = interleave(bound.dynamics, std::move(vars));
  vars = interleave(bound.barrier, std::move(vars));
  vars = interleave(bound.policy, std::move(vars));
  main_opt_.step(main_parameters(), grads_of(vars), lr);
  return value;
}

bool Trainer::lmi_step() {
  Tape tape;
  const nets::MlpVars barrier = params_.online.barrier.bind(tape, true);
  Var log_lambda = tape.leaf(params_.log_lambda);
  const losses::LmiLoss loss = losses::lmi_loss(losses::build_lmi(
      params_.specs().barrier, barrier, log_lambda, config_.lipschitz));
  require_finite(loss.loss.value().item(), "LMI");
  tape.backward(loss.loss);
  std::vector<Var> vars = interleave(barrier);
  vars.push_back(log_lambda);
  lmi_opt_.step(lmi_parameters(), grads_of(vars));
  return loss.feasible;
}

void Trainer::warm_start() {
  const certify::MarginConfig mc = config_.margin_config();
  const std::size_t n = buffer_.size();
  for (std::size_t epoch = 0; epoch < config_.warm_start_epochs; ++epoch) {
    const Tensor latents =
        certify::encode_observations(buffer_, params_.online.encoder);
    const Tensor z = certify::record_latents(buffer_, latents);
    const double eps = certify::covering_radius(z, certify::probe_set(z, mc.probes));
    const double psi = certify::psi_margin(config_.lipschitz, eps);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[uniform_index(rng_, i)]);
    }
    double total = 0.0;
    std::size_t steps = 0;
    for (std::size_t begin = 0; begin < n; begin += config_.batch_size) {
      const std::size_t end = std::min(n, begin + config_.batch_size);
      const std::vector<std::size_t> chunk(order.begin() + begin, order.begin() + end);
      total += salad_step(chunk, psi);
      ++steps;
    }
    log_.warm.push_back(WarmRow{epoch, eps, psi, total / static_cast<double>(steps)});
    margins_.eps_bar = eps;
    margins_.psi = psi;
  }
  // The warm start leaves the barrier unconstrained.
  project_certificate(params_, config_.lipschitz);
  params_.target.barrier = params_.online.barrier;
  warm_done_ = true;
}

BufferLosses Trainer::buffer_losses(const Tensor& online_latents,
                                    const Tensor& target_latents) const {
  const losses::LossWeights& w = config_.weights;
  const double psi = margins_.psi;
  const double eta = margins_.eta;
  const Tensor z = certify::record_latents(buffer_, online_latents);
  const Tensor z_target = certify::record_latents(buffer_, target_latents);
  const Tensor z_next_target = certify::next_record_latents(buffer_, target_latents);
  const Tensor b = nets::barrier(params_.online.barrier, z);
  const Tensor predicted = nets::latent_step(params_.online.dynamics, z,
                                             certify::record_actions(buffer_));
  const Tensor action = nets::policy(params_.online.policy, z);
  const Tensor b_next = nets::barrier(
      params_.target.barrier,
      nets::latent_step(params_.online.dynamics, z_target, action));

  BufferLosses out;
  double safe = 0.0, unsafe = 0.0, consistency = 0.0;
  for (std::size_t r : buffer_.safe_indices()) safe += hinge(b[r] + psi);
  for (std::size_t r : buffer_.unsafe_indices()) unsafe += hinge(-b[r] + psi);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = z_next_target[i] - predicted[i];
    consistency += d * d;
  }
  out.salad = w.xi1 * safe + w.xi2 * unsafe + w.xi3 * consistency;
  for (std::size_t r = 0; r < buffer_.size(); ++r) {
    out.syn += hinge(b_next[r] + eta - b[r] + psi);
  }
  out.total = w.lambda1 * out.syn + w.lambda2 * out.salad;
  if (user_) {
    const Tensor reference = user_(z);
    double norms = 0.0;
    for (std::size_t r = 0; r < action.rows(); ++r) {
      double s = 0.0;
      for (std::size_t k = 0; k < action.cols(); ++k) {
        const double d = action.at(r, k) - reference.at(r, k);
        s += d * d;
      }
      norms += std::sqrt(s);
    }
    out.perf = norms / static_cast<double>(action.rows());
    out.total += w.lambda3 * out.perf;
  }
  return out;
}

void Trainer::collect_rollouts(LogRow& row) {
  std::vector<envs::State> starts;
  for (std::size_t i = 0; i < config_.rollouts; ++i) {
    starts.push_back(envs::sample_state(config_.env, envs::Region::kAll, rng_));
  }
  const auto trajectories = envs::rollout(
      config_.env, certify::policy_controller(params_.online), starts,
      config_.horizon);
  for (const envs::Trajectory& t : trajectories) {
    row.rollout_unsafe += t.unsafe_entries;
    for (const envs::Transition& tr : t.transitions) buffer_.append(tr);
  }
}

bool Trainer::iterate() {
  if (!warm_done_) throw Error("iterate() before warm_start()");
  if (converged_) return true;
  const auto start = std::chrono::steady_clock::now();
  const certify::MarginConfig mc = config_.margin_config();

  Tensor latents = certify::encode_observations(buffer_, params_.online.encoder);
  margins_ = certify::compute_margins(buffer_, params_.online, latents, mc);
  const certify::Slacks slacks = certify::condition_slacks(
      buffer_, params_.online, latents, margins_.psi, margins_.eta);
  const losses::LmiStatus lmi = losses::lmi_status(losses::build_lmi(
      params_.online.barrier, params_.lambda(), config_.lipschitz));
  const Tensor target_latents =
      certify::encode_observations(buffer_, params_.target.encoder);
  const BufferLosses bl = buffer_losses(latents, target_latents);
  require_finite(bl.total, "total");

  LogRow row;
  row.iteration = iteration_ + 1;
  row.records = buffer_.size();
  row.safe = buffer_.safe_indices().size();
  row.unsafe = buffer_.unsafe_indices().size();
  row.margins = margins_;
  row.loss_total = bl.total;
  row.loss_salad = bl.salad;
  row.loss_syn = bl.syn;
  row.loss_perf = bl.perf;
  row.q1_violations = certify::summarize(slacks.q1).violations;
  row.q2_violations = certify::summarize(slacks.q2).violations;
  row.q3_violations = certify::summarize(slacks.q3).violations;
  row.lmi_feasible = lmi.feasible;
  row.lmi_satisfied = lmi.satisfied;
  row.lmi_logdet = lmi.logdet;
  row.converged = row.q1_violations == 0 && row.q2_violations == 0 &&
                  row.q3_violations == 0 && lmi.satisfied;

  if (!row.converged) {
    const std::size_t seen = buffer_.observation_count();
    collect_rollouts(row);
    latents = extend_latents(buffer_, params_.online.encoder, latents, seen);
    margins_ = certify::compute_margins(buffer_, params_.online, latents, mc);

    row.main_lr = lmi.feasible ? config_.lr : 0.5 * config_.lr;
    for (std::size_t s = 0; s < config_.steps_per_iteration; ++s) {
      loss_step(row.main_lr);
    }
    bool feasible = false;
    for (std::size_t s = 0; s < config_.lmi_steps; ++s) {
      feasible = lmi_step();
      ++row.lmi_steps;
    }
    // Penalty steps until M is positive definite again.
    for (std::size_t s = 0; s < config_.lmi_repair_limit && !feasible; ++s) {
      feasible = lmi_step();
      ++row.lmi_steps;
    }
    if (!feasible && !losses::lmi_status(losses::build_lmi(
                                              params_.online.barrier, params_.lambda(),
                                              config_.lipschitz))
                           .feasible) {
      project_certificate(params_, config_.lipschitz);
    }
    params_.polyak_update();
  }

  log_.rows.push_back(row);
  ++iteration_;
  converged_ = row.converged;
  seconds_.push_back(std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count());
  return converged_;
}

TrainResult Trainer::run(const std::function<void(const Trainer&)>& after_iteration) {
  if (!warm_done_) warm_start();
  while (!converged_ && iteration_ < config_.max_iterations) {
    iterate();
    if (after_iteration) after_iteration(*this);
  }
  return TrainResult{converged_, iteration_, margins_};
}

nets::Checkpoint Trainer::checkpoint() const {
  nets::Checkpoint c;
  c.env_id = envs::to_string(config_.env.id);
  c.latent_dim = static_cast<std::uint32_t>(config_.latent_dim);
  c.margins = margins_;
  c.seed = config_.seed;
  c.certified = false;
  c.params = params_;
  c.set_section("env", config_.env.serialize());
  c.set_section("config", to_ini(config_));
  c.set_section("buffer", envs::serialize_buffer(buffer_));
  ByteWriter opt;
  opt.str(main_opt_.serialize());
  opt.str(lmi_opt_.serialize());
  c.set_section("optimizer", opt.take());
  ByteWriter state;
  state.u64(iteration_);
  state.u8(warm_done_);
  state.u8(converged_);
  std::ostringstream rng;
  rng << rng_;
  state.str(rng.str());
  c.set_section("trainer", state.take());
  c.set_section("log", log_.serialize());
  return c;
}

Trainer Trainer::resume(const nets::Checkpoint& checkpoint) {
  auto section = [&](const char* name) -> const std::string& {
    const std::string* s = checkpoint.find_section(name);
    if (s == nullptr) {
      throw CheckpointError(std::string("checkpoint lacks the '") + name +
                            "' section needed to resume");
    }
    return *s;
  };
  Trainer t;
  try {
    t.config_ = parse_config(section("config"));
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("stored configuration invalid: ") + e.what());
  }
  t.buffer_ = envs::deserialize_buffer(section("buffer"));
  if (!(t.buffer_.spec() == t.config_.env)) {
    throw CheckpointError("stored buffer and configuration disagree on the environment");
  }
  t.params_ = checkpoint.params;
  if (!(t.params_.specs() == t.config_.network_specs())) {
    throw CheckpointError("stored networks do not match the stored configuration");
  }
  ByteReader<CheckpointError> opt(section("optimizer"));
  t.main_opt_ = Adam::deserialize(opt.str());
  t.lmi_opt_ = Adam::deserialize(opt.str());
  ByteReader<CheckpointError> state(section("trainer"));
  t.iteration_ = state.u64();
  t.warm_done_ = state.u8() != 0;
  t.converged_ = state.u8() != 0;
  std::istringstream rng(state.str());
  rng >> t.rng_;
  if (!rng) throw CheckpointError("corrupt random state");
  t.log_ = TrainLog::deserialize(section("log"));
  t.user_ = t.config_.make_user_policy();
  t.margins_ = checkpoint.margins;
  return t;
}

}  // namespace salad::train
