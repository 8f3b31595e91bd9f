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

#include "salad/train/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "salad/errors.hpp"

namespace salad::train {
namespace {

using nets::Activation;

struct Field {
  const char* section;
  const char* key;
  std::function<void(TrainConfig&, const std::string&)> set;
  std::function<std::string(const TrainConfig&)> get;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <typename T>
T parse_number(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  T value{};
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty()) {
    throw ConfigError(field, "cannot parse '" + text + "' as a number");
  }
  return value;
}

std::string format(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

std::vector<std::size_t> parse_widths(const std::string& field,
                                      const std::string& text) {
  std::vector<std::size_t> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    out.push_back(parse_number<std::size_t>(field, item));
  }
  if (out.empty()) throw ConfigError(field, "expected a comma-separated list");
  return out;
}

std::string format_widths(const std::vector<std::size_t>& widths) {
  std::string out;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(widths[i]);
  }
  return out;
}

Activation parse_act(const std::string& field, const std::string& text) {
  try {
    return nets::parse_activation(trim(text));
  } catch (const ConfigError&) {
    throw ConfigError(field, "expected relu or tanh, got '" + text + "'");
  }
}

#define SALAD_SIZE(sec, member)                                              \
  Field {                                                                    \
    sec, #member,                                                            \
        [](TrainConfig& c, const std::string& v) {                           \
          c.member = parse_number<std::size_t>(sec "." #member, v);          \
        },                                                                   \
        [](const TrainConfig& c) { return std::to_string(c.member); }        \
  }
#define SALAD_REAL(sec, member)                                              \
  Field {                                                                    \
    sec, #member,                                                            \
        [](TrainConfig& c, const std::string& v) {                           \
          c.member = parse_number<double>(sec "." #member, v);               \
        },                                                                   \
        [](const TrainConfig& c) { return format(c.member); }                \
  }
#define SALAD_WEIGHT(member)                                                 \
  Field {                                                                    \
    "loss", #member,                                                         \
        [](TrainConfig& c, const std::string& v) {                           \
          c.weights.member = parse_number<double>("loss." #member, v);       \
        },                                                                   \
        [](const TrainConfig& c) { return format(c.weights.member); }        \
  }
#define SALAD_WIDTHS(member)                                                 \
  Field {                                                                    \
    "model", #member,                                                        \
        [](TrainConfig& c, const std::string& v) {                           \
          c.member = parse_widths("model." #member, v);                      \
        },                                                                   \
        [](const TrainConfig& c) { return format_widths(c.member); }         \
  }
#define SALAD_ACT(member)                                                    \
  Field {                                                                    \
    "model", #member,                                                        \
        [](TrainConfig& c, const std::string& v) {                           \
          c.member = parse_act("model." #member, v);                         \
        },                                                                   \
        [](const TrainConfig& c) { return nets::to_string(c.member); }       \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"env", "id", [](TrainConfig&, const std::string&) {},
            [](const TrainConfig& c) { return envs::to_string(c.env.id); }},
      Field{"env", "frame_width",
            [](TrainConfig& c, const std::string& v) {
              c.env.frame_width = parse_number<std::size_t>("env.frame_width", v);
            },
            [](const TrainConfig& c) { return std::to_string(c.env.frame_width); }},
      Field{"env", "frame_height",
            [](TrainConfig& c, const std::string& v) {
              c.env.frame_height =
                  parse_number<std::size_t>("env.frame_height", v);
            },
            [](const TrainConfig& c) { return std::to_string(c.env.frame_height); }},
      Field{"env", "channels",
            [](TrainConfig& c, const std::string& v) {
              c.env.channels = envs::parse_channel_mode(trim(v));
            },
            [](const TrainConfig& c) { return envs::to_string(c.env.channels); }},
      SALAD_SIZE("data", n_safe),
      SALAD_SIZE("data", n_unsafe),
      SALAD_SIZE("data", n_total),
      SALAD_SIZE("model", latent_dim),
      SALAD_WIDTHS(encoder_hidden),
      SALAD_WIDTHS(dynamics_hidden),
      SALAD_WIDTHS(barrier_hidden),
      SALAD_WIDTHS(policy_hidden),
      SALAD_ACT(encoder_activation),
      SALAD_ACT(dynamics_activation),
      SALAD_ACT(barrier_activation),
      SALAD_ACT(policy_activation),
      Field{"model", "encoder_output",
            [](TrainConfig& c, const std::string& v) {
              const std::string t = trim(v);
              if (t == "linear") {
                c.encoder_output = nets::OutputActivation::kLinear;
              } else if (t == "tanh-scaled") {
                c.encoder_output = nets::OutputActivation::kTanhScaled;
              } else {
                throw ConfigError("model.encoder_output",
                                  "expected linear or tanh-scaled, got '" + t + "'");
              }
            },
            [](const TrainConfig& c) { return nets::to_string(c.encoder_output); }},
      SALAD_REAL("model", encoder_bound),
      SALAD_SIZE("train", warm_start_epochs),
      SALAD_SIZE("train", max_iterations),
      SALAD_SIZE("train", batch_size),
      SALAD_SIZE("train", steps_per_iteration),
      SALAD_SIZE("train", lmi_steps),
      SALAD_SIZE("train", lmi_repair_limit),
      SALAD_REAL("train", lr),
      SALAD_REAL("train", lmi_lr),
      SALAD_REAL("train", beta1),
      SALAD_REAL("train", beta2),
      SALAD_REAL("train", epsilon),
      SALAD_REAL("train", polyak_rho),
      SALAD_SIZE("train", rollouts),
      SALAD_SIZE("train", horizon),
      SALAD_REAL("train", tolerance),
      Field{"train", "seed",
            [](TrainConfig& c, const std::string& v) {
              c.seed = parse_number<std::uint64_t>("train.seed", v);
            },
            [](const TrainConfig& c) { return std::to_string(c.seed); }},
      Field{"train", "user_policy",
            [](TrainConfig& c, const std::string& v) { c.user_policy = trim(v); },
            [](const TrainConfig& c) { return c.user_policy; }},
      SALAD_SIZE("train", checkpoint_every),
      SALAD_WEIGHT(xi1),
      SALAD_WEIGHT(xi2),
      SALAD_WEIGHT(xi3),
      SALAD_WEIGHT(lambda1),
      SALAD_WEIGHT(lambda2),
      SALAD_WEIGHT(lambda3),
      SALAD_REAL("certify", lipschitz),
      SALAD_SIZE("certify", grid_per_axis),
      SALAD_SIZE("certify", sobol_points),
      SALAD_SIZE("certify", delta_action_grid),
      SALAD_SIZE("certify", verify_rollouts),
      SALAD_SIZE("certify", verify_horizon),
      SALAD_SIZE("certify", lipschitz_pairs),
  };
  return table;
}

#undef SALAD_SIZE
#undef SALAD_REAL
#undef SALAD_WEIGHT
#undef SALAD_WIDTHS
#undef SALAD_ACT

void require_positive(const char* field, std::size_t v) {
  if (v == 0) throw ConfigError(field, "must be > 0");
}

void require_positive(const char* field, double v) {
  if (!(v > 0.0)) throw ConfigError(field, "must be > 0, got " + format(v));
}

void require_widths(const char* field, const std::vector<std::size_t>& widths) {
  if (widths.empty()) throw ConfigError(field, "needs at least one hidden layer");
  for (std::size_t w : widths) {
    if (w == 0) throw ConfigError(field, "widths must be > 0");
  }
}

nets::MlpSpec mlp(std::size_t in, const std::vector<std::size_t>& hidden,
                  std::size_t out, Activation act) {
  nets::MlpSpec spec;
  spec.widths.push_back(in);
  spec.widths.insert(spec.widths.end(), hidden.begin(), hidden.end());
  spec.widths.push_back(out);
  spec.hidden = act;
  return spec;
}

}  // namespace

void TrainConfig::validate() const {
  env.validate();
  require_positive("data.n_safe", n_safe);
  require_positive("data.n_unsafe", n_unsafe);
  require_positive("data.n_total", n_total);
  if (n_total < n_safe + n_unsafe) {
    throw ConfigError("data.n_total", "must be at least n_safe + n_unsafe");
  }
  require_positive("model.latent_dim", latent_dim);
  require_widths("model.encoder_hidden", encoder_hidden);
  require_positive("model.encoder_bound", encoder_bound);
  require_widths("model.dynamics_hidden", dynamics_hidden);
  require_widths("model.barrier_hidden", barrier_hidden);
  require_widths("model.policy_hidden", policy_hidden);
  require_positive("train.warm_start_epochs", warm_start_epochs);
  require_positive("train.max_iterations", max_iterations);
  require_positive("train.batch_size", batch_size);
  require_positive("train.steps_per_iteration", steps_per_iteration);
  require_positive("train.lmi_steps", lmi_steps);
  require_positive("train.lr", lr);
  require_positive("train.lmi_lr", lmi_lr);
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("train.beta1", "must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("train.beta2", "must lie in [0, 1)");
  require_positive("train.epsilon", epsilon);
  if (!(polyak_rho >= 0.0 && polyak_rho < 1.0)) {
    throw ConfigError("train.polyak_rho", "must lie in [0, 1)");
  }
  require_positive("train.rollouts", rollouts);
  require_positive("train.horizon", horizon);
  if (!(tolerance >= 0.0)) throw ConfigError("train.tolerance", "must be >= 0");
  if (user_policy != "zero" && user_policy != "none") {
    throw ConfigError("train.user_policy", "expected zero or none");
  }
  weights.validate();
  require_positive("certify.lipschitz", lipschitz);
  require_positive("certify.grid_per_axis", grid_per_axis);
  require_positive("certify.sobol_points", sobol_points);
  if (delta_action_grid == 1) {
    throw ConfigError("certify.delta_action_grid", "must be 0 or >= 2");
  }
}

nets::NetworkSpecs TrainConfig::network_specs() const {
  nets::NetworkSpecs specs;
  specs.encoder = mlp(env.observation_size(), encoder_hidden, latent_dim,
                      encoder_activation);
  specs.encoder.output = encoder_output;
  specs.encoder.out_low = -encoder_bound;
  specs.encoder.out_high = encoder_bound;
  specs.dynamics = mlp(latent_dim + 1, dynamics_hidden, latent_dim,
                       dynamics_activation);
  specs.barrier = mlp(latent_dim, barrier_hidden, 1, barrier_activation);
  specs.policy = mlp(latent_dim, policy_hidden, 1, policy_activation);
  specs.policy.output = nets::OutputActivation::kTanhScaled;
  specs.policy.out_low = env.action_low;
  specs.policy.out_high = env.action_high;
  return specs;
}

AdamConfig TrainConfig::main_optimizer() const {
  return AdamConfig{lr, beta1, beta2, epsilon};
}

AdamConfig TrainConfig::lmi_optimizer() const {
  return AdamConfig{lmi_lr, beta1, beta2, epsilon};
}

certify::MarginConfig TrainConfig::margin_config() const {
  certify::MarginConfig m;
  m.lipschitz = lipschitz;
  m.probes.grid_per_axis = grid_per_axis;
  m.probes.sobol_points = sobol_points;
  m.delta_action_grid = delta_action_grid;
  return m;
}

certify::VerifyConfig TrainConfig::verify_config() const {
  certify::VerifyConfig v;
  v.margins = margin_config();
  v.lipschitz_pairs = lipschitz_pairs;
  v.rollouts = verify_rollouts;
  v.horizon = verify_horizon;
  v.seed = seed + 3;
  return v;
}

losses::UserPolicy TrainConfig::make_user_policy() const {
  if (user_policy == "none") return {};
  return losses::zero_policy(1);
}

TrainConfig default_config(envs::EnvId id) {
  TrainConfig c;
  c.env = envs::EnvSpec::defaults(id);
  if (id == envs::EnvId::kVehicle) {
    c.latent_dim = 4;
    c.lipschitz = 1.5;
    c.user_policy = "none";
  }
  return c;
}

TrainConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", "line " + std::to_string(e.line()) + ": " + e.message());
  }
  envs::EnvId id = envs::EnvId::kPendulum;
  if (auto env = tree.get_child_optional("env")) {
    if (auto v = env->get_optional<std::string>("id")) id = envs::parse_env_id(trim(*v));
  }
  TrainConfig config = default_config(id);
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(section, "key outside of a section");
    }
    for (const auto& [key, value] : body) {
      const Field* match = nullptr;
      for (const Field& f : fields()) {
        if (section == f.section && key == f.key) match = &f;
      }
      if (match == nullptr) throw ConfigError(section + "." + key, "unknown key");
      match->set(config, value.data());
    }
  }
  config.validate();
  return config;
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string to_ini(const TrainConfig& config) {
  std::string out;
  std::string section;
  for (const Field& f : fields()) {
    if (section != f.section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += std::string(f.key) + " = " + f.get(config) + "\n";
  }
  return out;
}

}  // namespace salad::train
