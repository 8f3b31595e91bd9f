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

// salad: train, verify, roll out and export neural barrier certificates.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "salad/certify/verify.hpp"
#include "salad/envs/buffer.hpp"
#include "salad/envs/dynamics.hpp"
#include "salad/envs/render.hpp"
#include "salad/envs/rollout.hpp"
#include "salad/errors.hpp"
#include "salad/nets/checkpoint.hpp"
#include "salad/random.hpp"
#include "salad/train/config.hpp"
#include "salad/train/trainer.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kVerificationFailed = 1;
constexpr int kUsage = 2;
constexpr int kDiverged = 3;

constexpr const char* kOutEnv = "SALAD_OUT_DIR";

struct Options {
  std::string config;
  std::string checkpoint;
  std::string dataset;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<std::size_t> horizon;
  std::size_t grid = 50;
  std::string start = "safe";
  bool quiet = false;
};

fs::path output_dir(const Options& opt) {
  fs::path dir = ".";
  if (!opt.out.empty()) {
    dir = opt.out;
  } else if (const char* env = std::getenv(kOutEnv); env != nullptr && *env) {
    dir = env;
  }
  fs::create_directories(dir);
  return dir;
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw salad::ConfigError(what, "is required");
  if (!fs::is_regular_file(path)) {
    throw salad::ConfigError(what, "no such file '" + path + "'");
  }
}

// Everything needed to evaluate a saved certificate.
struct Loaded {
  salad::nets::Checkpoint checkpoint;
  salad::envs::EnvSpec env;
  salad::train::TrainConfig config;
};

Loaded load(const Options& opt) {
  require_file(opt.checkpoint, "--checkpoint");
  Loaded l;
  l.checkpoint = salad::nets::load_checkpoint(opt.checkpoint);
  const salad::envs::EnvId id = salad::envs::parse_env_id(l.checkpoint.env_id);
  l.config = salad::train::default_config(id);
  if (const std::string* cfg = l.checkpoint.find_section("config")) {
    l.config = salad::train::parse_config(*cfg);
  }
  l.env = l.config.env;
  if (const std::string* env = l.checkpoint.find_section("env")) {
    l.env = salad::envs::EnvSpec::deserialize(*env);
  }
  if (opt.seed) l.config.seed = *opt.seed;
  return l;
}

salad::envs::DataBuffer load_buffer(const Options& opt, const Loaded& l) {
  if (!opt.dataset.empty()) {
    require_file(opt.dataset, "--dataset");
    return salad::envs::import_dataset(opt.dataset);
  }
  if (const std::string* bytes = l.checkpoint.find_section("buffer")) {
    return salad::envs::deserialize_buffer(*bytes);
  }
  throw salad::ConfigError("--dataset",
                           "checkpoint carries no buffer; pass a dataset");
}

int run_verify_and_report(const salad::nets::ParamStore& params,
                          const salad::envs::EnvSpec& env,
                          const salad::envs::DataBuffer& buffer,
                          const salad::certify::VerifyConfig& vc,
                          const fs::path& dir, bool quiet,
                          salad::certify::CertificateReport* out = nullptr) {
  const salad::certify::CertificateReport report =
      salad::certify::verify(params, env, buffer, vc);
  salad::certify::write_report(report, dir / "report.txt");
  salad::certify::write_slacks_csv(report, dir / "slacks.csv");
  if (!quiet) std::cout << salad::certify::report_text(report);
  if (out != nullptr) *out = report;
  return report.certified ? kOk : kVerificationFailed;
}

int cmd_train(const Options& opt) {
  salad::train::TrainConfig config;
  std::optional<salad::train::Trainer> trainer;
  if (!opt.checkpoint.empty()) {
    require_file(opt.checkpoint, "--checkpoint");
    trainer.emplace(salad::train::Trainer::resume(
        salad::nets::load_checkpoint(opt.checkpoint)));
    config = trainer->config();
  } else {
    require_file(opt.config, "--config");
    config = salad::train::load_config(opt.config);
    if (opt.seed) config.seed = *opt.seed;
    trainer.emplace(config);
  }
  const fs::path dir = output_dir(opt);
  const fs::path ckpt_path = dir / "checkpoint.sldc";

  auto save = [&](const salad::train::Trainer& t, bool certified) {
    salad::nets::Checkpoint c = t.checkpoint();
    c.certified = certified;
    salad::nets::save_checkpoint(c, ckpt_path);
    t.log().write_csv(dir / "train_log.csv");
    t.log().write_warm_csv(dir / "warmstart.csv");
    std::ofstream timing(dir / "timing.csv");
    timing << "iteration,seconds\n";
    const auto& s = t.iteration_seconds();
    for (std::size_t i = 0; i < s.size(); ++i) {
      timing << (t.iteration() - s.size() + i + 1) << ',' << s[i] << '\n';
    }
  };

  salad::train::TrainResult result;
  try {
    result = trainer->run([&](const salad::train::Trainer& t) {
      if (!opt.quiet) {
        const salad::train::LogRow& r = t.log().rows.back();
        std::cerr << "iter " << r.iteration << " records " << r.records
                  << " psi " << r.margins.psi << " eta " << r.margins.eta
                  << " viol " << r.q1_violations << '/' << r.q2_violations
                  << '/' << r.q3_violations << " lmi "
                  << (r.lmi_satisfied ? "ok" : "no") << " L " << r.loss_total
                  << '\n';
      }
      if (config.checkpoint_every > 0 && t.iteration() % config.checkpoint_every == 0) {
        save(t, false);
      }
    });
  } catch (const salad::DivergenceError& e) {
    save(*trainer, false);
    std::cerr << "salad: training diverged: " << e.what() << '\n';
    return kDiverged;
  }

  salad::certify::VerifyConfig vc = config.verify_config();
  if (opt.n) vc.rollouts = *opt.n;
  if (opt.horizon) vc.horizon = *opt.horizon;
  salad::certify::CertificateReport report;
  const int verdict = run_verify_and_report(trainer->params(), config.env,
                                            trainer->buffer(), vc, dir,
                                            opt.quiet, &report);
  save(*trainer, result.converged && report.certified);
  if (!result.converged) {
    std::cerr << "salad: not converged after " << result.iterations
              << " iterations\n";
    return kVerificationFailed;
  }
  return verdict;
}

int cmd_verify(const Options& opt) {
  const Loaded l = load(opt);
  const salad::envs::DataBuffer buffer = load_buffer(opt, l);
  salad::certify::VerifyConfig vc = l.config.verify_config();
  if (opt.n) vc.rollouts = *opt.n;
  if (opt.horizon) vc.horizon = *opt.horizon;
  return run_verify_and_report(l.checkpoint.params, l.env, buffer, vc,
                               output_dir(opt), opt.quiet);
}

void write_state(std::ostream& out, const salad::envs::State& s) {
  for (std::size_t i = 0; i < s.dim; ++i) out << s[i] << ',';
}

std::string state_header(const salad::envs::EnvSpec& env) {
  return env.id == salad::envs::EnvId::kPendulum ? "theta,theta_dot,"
                                                 : "x,y,theta,";
}

int cmd_rollout(const Options& opt) {
  using namespace salad;
  const Loaded l = load(opt);
  const envs::Region region = opt.start == "safe"     ? envs::Region::kSafe
                              : opt.start == "unsafe" ? envs::Region::kUnsafe
                              : opt.start == "all"
                                  ? envs::Region::kAll
                                  : throw ConfigError("--start",
                                                      "expected safe, unsafe or all");
  const std::size_t n = opt.n.value_or(100);
  const std::size_t horizon = opt.horizon.value_or(200);
  Rng rng(l.config.seed + 4);
  std::vector<envs::State> starts;
  for (std::size_t i = 0; i < n; ++i) starts.push_back(envs::sample_state(l.env, region, rng));
  const nets::Networks& nets = l.checkpoint.params.online;
  const auto trajectories =
      envs::rollout(l.env, certify::policy_controller(nets), starts, horizon);

  const fs::path dir = output_dir(opt);
  std::ofstream csv(dir / "rollouts.csv");
  csv.precision(17);
  csv << "trajectory,t," << state_header(l.env) << "action,barrier,label\n";
  std::size_t unsafe_entries = 0, unsafe_trajectories = 0;
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    const envs::Trajectory& t = trajectories[k];
    unsafe_entries += t.unsafe_entries;
    if (!t.safe) ++unsafe_trajectories;
    tensor::Tensor obs({t.states.size(), l.env.observation_size()});
    envs::State prev = envs::predecessor(l.env, t.states.front(), 0.0);
    for (std::size_t i = 0; i < t.states.size(); ++i) {
      envs::render_into(l.env, prev, t.states[i],
                        obs.data().subspan(i * l.env.observation_size(),
                                           l.env.observation_size()));
      prev = t.states[i];
    }
    const tensor::Tensor b =
        nets::barrier(nets.barrier, nets::encode(nets.encoder, obs));
    for (std::size_t i = 0; i < t.states.size(); ++i) {
      csv << k << ',' << i << ',';
      write_state(csv, t.states[i]);
      if (i < t.actions.size()) csv << t.actions[i];
      csv << ',' << b[i] << ',' << envs::to_string(envs::label(l.env, t.states[i]))
          << '\n';
    }
  }
  std::ostringstream summary;
  summary << "trajectories = " << n << '\n'
          << "horizon = " << horizon << '\n'
          << "start_region = " << opt.start << '\n'
          << "unsafe_entries = " << unsafe_entries << '\n'
          << "unsafe_trajectories = " << unsafe_trajectories << '\n';
  std::ofstream(dir / "rollout_summary.txt") << summary.str();
  if (!opt.quiet) std::cout << summary.str();
  return region == envs::Region::kSafe && unsafe_entries > 0 ? kVerificationFailed
                                                             : kOk;
}

int cmd_export(const Options& opt) {
  using namespace salad;
  const Loaded l = load(opt);
  if (opt.grid == 0) throw ConfigError("--grid", "must be > 0");
  const nets::Networks& nets = l.checkpoint.params.online;
  const fs::path dir = output_dir(opt);
  const std::size_t g = opt.grid;
  const envs::EnvSpec& env = l.env;

  // B over a grid of the first two state coordinates (heading 0 for the
  // vehicle); the previous frame comes from the zero-action predecessor.
  std::vector<envs::State> states;
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      const double u = g == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(g - 1);
      const double v = g == 1 ? 0.5 : static_cast<double>(j) / static_cast<double>(g - 1);
      const double a = env.state_low[0] + u * (env.state_high[0] - env.state_low[0]);
      const double b = env.state_low[1] + v * (env.state_high[1] - env.state_low[1]);
      states.push_back(env.id == envs::EnvId::kPendulum ? envs::State::pendulum(a, b)
                                                        : envs::State::vehicle(a, b, 0.0));
    }
  }
  std::ofstream grid(dir / "barrier_grid.csv");
  grid.precision(17);
  grid << state_header(env);
  for (std::size_t k = 0; k < l.config.latent_dim; ++k) grid << 'z' << k << ',';
  grid << "barrier,label\n";
  constexpr std::size_t kChunk = 256;
  for (std::size_t begin = 0; begin < states.size(); begin += kChunk) {
    const std::size_t end = std::min(states.size(), begin + kChunk);
    tensor::Tensor obs({end - begin, env.observation_size()});
    for (std::size_t i = begin; i < end; ++i) {
      envs::render_into(env, envs::predecessor(env, states[i], 0.0), states[i],
                        obs.data().subspan((i - begin) * env.observation_size(),
                                           env.observation_size()));
    }
    const tensor::Tensor z = nets::encode(nets.encoder, obs);
    const tensor::Tensor b = nets::barrier(nets.barrier, z);
    for (std::size_t i = begin; i < end; ++i) {
      write_state(grid, states[i]);
      for (std::size_t k = 0; k < z.cols(); ++k) grid << z.at(i - begin, k) << ',';
      grid << b[i - begin] << ',' << envs::to_string(envs::label(env, states[i])) << '\n';
    }
  }

  // Buffer latents (scatter of the learned latent space).
  const envs::DataBuffer buffer = load_buffer(opt, l);
  const tensor::Tensor latents = certify::encode_observations(buffer, nets.encoder);
  const tensor::Tensor z = certify::record_latents(buffer, latents);
  const tensor::Tensor b = nets::barrier(nets.barrier, z);
  std::ofstream scatter(dir / "latents.csv");
  scatter.precision(17);
  scatter << "record,";
  for (std::size_t k = 0; k < z.cols(); ++k) scatter << 'z' << k << ',';
  scatter << "barrier,label\n";
  for (std::size_t r = 0; r < buffer.size(); ++r) {
    scatter << r << ',';
    for (std::size_t k = 0; k < z.cols(); ++k) scatter << z.at(r, k) << ',';
    scatter << b[r] << ',' << envs::to_string(buffer[r].label) << '\n';
  }
  envs::export_dataset(buffer, dir / "dataset.txt");
  if (!opt.quiet) {
    std::cout << "wrote " << (dir / "barrier_grid.csv").string() << ", "
              << (dir / "latents.csv").string() << ", "
              << (dir / "dataset.txt").string() << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Train and verify neural control barrier certificates from pixels"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--out", opt.out, "Output directory (default $SALAD_OUT_DIR or .)");
    cmd->add_option("--seed", opt.seed, "Override the run seed");
    cmd->add_flag("--quiet", opt.quiet, "Suppress progress output");
  };

  CLI::App* train = app.add_subcommand("train", "Warm start and train a certificate");
  train->add_option("--config", opt.config, "Training configuration (INI)");
  train->add_option("--checkpoint", opt.checkpoint, "Resume from this checkpoint");
  train->add_option("--n", opt.n, "Rollouts for the final verification");
  train->add_option("--horizon", opt.horizon, "Horizon for the final verification");
  common(train);

  CLI::App* verify = app.add_subcommand("verify", "Check a saved certificate");
  verify->add_option("--checkpoint", opt.checkpoint, "Checkpoint file")->required();
  verify->add_option("--dataset", opt.dataset, "Dataset index (default: checkpoint buffer)");
  verify->add_option("--n", opt.n, "Number of rollouts");
  verify->add_option("--horizon", opt.horizon, "Rollout horizon");
  common(verify);

  CLI::App* rollout = app.add_subcommand("rollout", "Roll out the learned policy");
  rollout->add_option("--checkpoint", opt.checkpoint, "Checkpoint file")->required();
  rollout->add_option("--n", opt.n, "Number of trajectories (default 100)");
  rollout->add_option("--horizon", opt.horizon, "Steps per trajectory (default 200)");
  rollout->add_option("--start", opt.start, "Start region: safe, unsafe or all");
  common(rollout);

  CLI::App* exp = app.add_subcommand("export", "Export barrier grids and latents as CSV");
  exp->add_option("--checkpoint", opt.checkpoint, "Checkpoint file")->required();
  exp->add_option("--grid", opt.grid, "Grid points per state axis (default 50)");
  exp->add_option("--dataset", opt.dataset, "Dataset index (default: checkpoint buffer)");
  common(exp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train) return cmd_train(opt);
    if (*verify) return cmd_verify(opt);
    if (*rollout) return cmd_rollout(opt);
    return cmd_export(opt);
  } catch (const salad::ConfigError& e) {
    std::cerr << "salad: configuration error: " << e.what() << '\n';
    return kUsage;
  } catch (const salad::CheckpointError& e) {
    std::cerr << "salad: checkpoint error: " << e.what() << '\n';
    return kUsage;
  } catch (const salad::DatasetError& e) {
    std::cerr << "salad: dataset error: " << e.what() << '\n';
    return kUsage;
  } catch (const salad::EnvironmentMismatch& e) {
    std::cerr << "salad: environment mismatch: " << e.what() << '\n';
    return kUsage;
  } catch (const salad::DivergenceError& e) {
    std::cerr << "salad: diverged: " << e.what() << '\n';
    return kDiverged;
  } catch (const std::exception& e) {
    std::cerr << "salad: " << e.what() << '\n';
    return kUsage;
  }
}
