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

#include "salad/nets/checkpoint.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include "salad/binary_io.hpp"
#include "salad/errors.hpp"

namespace salad::nets {
namespace {

constexpr char kMagic[] = "SLDC";
constexpr char kTrailer[] = "END!";

void write_mlp(ByteWriter& out, const std::string& name, const Mlp& net) {
  const MlpSpec& spec = net.spec();
  out.str(name);
  out.u32(static_cast<std::uint32_t>(spec.hidden));
  out.u32(static_cast<std::uint32_t>(spec.output));
  out.f64(spec.out_low);
  out.f64(spec.out_high);
  out.u32(static_cast<std::uint32_t>(net.layers().size()));
  for (const Layer& layer : net.layers()) {
    out.u32(static_cast<std::uint32_t>(layer.weight.rows()));
    out.u32(static_cast<std::uint32_t>(layer.weight.cols()));
    out.f64s(layer.weight.storage());
    out.f64s(layer.bias.storage());
  }
}

Mlp read_mlp(ByteReader<>& in, const std::string& expected_name) {
  const std::string name = in.str();
  if (name != expected_name) {
    throw CheckpointError("expected network '" + expected_name + "', found '" +
                          name + "'");
  }
  MlpSpec spec;
  const std::uint32_t hidden = in.u32();
  const std::uint32_t output = in.u32();
  if (hidden > 1 || output > 1) {
    throw CheckpointError("unknown activation tag in network '" + name + "'");
  }
  spec.hidden = static_cast<Activation>(hidden);
  spec.output = static_cast<OutputActivation>(output);
  spec.out_low = in.f64();
  spec.out_high = in.f64();
  const std::uint32_t n_layers = in.u32();
  if (n_layers < 2 || n_layers > 64) {
    throw CheckpointError("implausible layer count in network '" + name + "'");
  }
  std::vector<std::pair<std::vector<double>, std::vector<double>>> params;
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    const std::uint32_t rows = in.u32();
    const std::uint32_t cols = in.u32();
    if (i == 0) spec.widths.push_back(rows);
    if (rows != spec.widths.back()) {
      throw CheckpointError("inconsistent layer shapes in network '" + name + "'");
    }
    spec.widths.push_back(cols);
    if (static_cast<std::uint64_t>(rows) * cols * 8 > in.remaining()) {
      throw CheckpointError("truncated weights in network '" + name + "'");
    }
    std::vector<double> w = in.f64s(static_cast<std::size_t>(rows) * cols);
    std::vector<double> b = in.f64s(cols);
    params.emplace_back(std::move(w), std::move(b));
  }
  Mlp net;
  try {
    net = Mlp(spec);
  } catch (const DimensionError& e) {
    throw CheckpointError("invalid network '" + name + "': " + e.what());
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    net.layers()[i].weight.storage() = std::move(params[i].first);
    net.layers()[i].bias.storage() = std::move(params[i].second);
  }
  return net;
}

constexpr const char* kNetNames[] = {"encoder", "dynamics", "barrier", "policy"};

}  // namespace

const std::string* Checkpoint::find_section(const std::string& name) const {
  for (const auto& [key, value] : sections) {
    if (key == name) return &value;
  }
  return nullptr;
}

void Checkpoint::set_section(const std::string& name, std::string bytes) {
  for (auto& [key, value] : sections) {
    if (key == name) {
      value = std::move(bytes);
      return;
    }
  }
  sections.emplace_back(name, std::move(bytes));
}

std::string serialize_checkpoint(const Checkpoint& ck) {
  ByteWriter out;
  out.raw(std::string_view(kMagic, 4));
  out.u32(ck.version);
  out.str(ck.env_id);
  out.u32(ck.latent_dim);
  out.f64(ck.margins.lipschitz);
  out.f64(ck.margins.psi);
  out.f64(ck.margins.eta);
  out.f64(ck.margins.eps_bar);
  out.f64(ck.margins.delta);
  out.u64(ck.seed);
  out.f64(ck.params.rho());
  out.u8(ck.certified ? 1 : 0);

  const Mlp* online[] = {&ck.params.online.encoder, &ck.params.online.dynamics,
                         &ck.params.online.barrier, &ck.params.online.policy};
  const Mlp* target[] = {&ck.params.target.encoder, &ck.params.target.dynamics,
                         &ck.params.target.barrier, &ck.params.target.policy};
  out.u32(8);
  for (int i = 0; i < 4; ++i) write_mlp(out, kNetNames[i], *online[i]);
  for (int i = 0; i < 4; ++i) {
    write_mlp(out, std::string("target/") + kNetNames[i], *target[i]);
  }
  out.u32(static_cast<std::uint32_t>(ck.params.log_lambda.size()));
  out.f64s(ck.params.log_lambda.storage());
  out.u32(static_cast<std::uint32_t>(ck.sections.size()));
  for (const auto& [name, bytes] : ck.sections) {
    out.str(name);
    out.u64(bytes.size());
    out.raw(bytes);
  }
  out.raw(std::string_view(kTrailer, 4));
  return out.take();
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  ByteReader<> in(bytes);
  if (in.raw(4) != std::string_view(kMagic, 4)) {
    throw CheckpointError("not a checkpoint (bad magic bytes)");
  }
  Checkpoint ck;
  ck.version = in.u32();
  if (ck.version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " +
                          std::to_string(ck.version));
  }
  ck.env_id = in.str();
  ck.latent_dim = in.u32();
  ck.margins.lipschitz = in.f64();
  ck.margins.psi = in.f64();
  ck.margins.eta = in.f64();
  ck.margins.eps_bar = in.f64();
  ck.margins.delta = in.f64();
  ck.seed = in.u64();
  const double rho = in.f64();
  ck.certified = in.u8() != 0;

  if (in.u32() != 8) throw CheckpointError("expected 8 networks");
  Networks online;
  Networks target;
  Mlp* on[] = {&online.encoder, &online.dynamics, &online.barrier, &online.policy};
  Mlp* tg[] = {&target.encoder, &target.dynamics, &target.barrier, &target.policy};
  for (int i = 0; i < 4; ++i) *on[i] = read_mlp(in, kNetNames[i]);
  for (int i = 0; i < 4; ++i) {
    *tg[i] = read_mlp(in, std::string("target/") + kNetNames[i]);
    if (tg[i]->spec() != on[i]->spec()) {
      throw CheckpointError(std::string("target network shape differs for ") +
                            kNetNames[i]);
    }
  }
  NetworkSpecs specs{online.encoder.spec(), online.dynamics.spec(),
                     online.barrier.spec(), online.policy.spec()};
  try {
    ck.params = ParamStore(specs, rho, 0);
  } catch (const Error& e) {
    throw CheckpointError(std::string("invalid network layout: ") + e.what());
  }
  ck.params.online = std::move(online);
  ck.params.target = std::move(target);
  const std::uint32_t n_lambda = in.u32();
  if (n_lambda != specs.barrier.hidden_neurons()) {
    throw CheckpointError("multiplier count does not match barrier network");
  }
  ck.params.log_lambda = Tensor({1, n_lambda}, in.f64s(n_lambda));
  if (ck.latent_dim != specs.latent_dim()) {
    throw CheckpointError("latent dimension does not match encoder output");
  }

  const std::uint32_t n_sections = in.u32();
  for (std::uint32_t i = 0; i < n_sections; ++i) {
    std::string name = in.str();
    const std::uint64_t size = in.u64();
    if (size > in.remaining()) {
      throw CheckpointError("truncated section '" + name + "'");
    }
    ck.sections.emplace_back(std::move(name), in.raw(size));
  }
  if (in.raw(4) != std::string_view(kTrailer, 4) || !in.done()) {
    throw CheckpointError("missing checkpoint trailer");
  }
  return ck;
}

void save_checkpoint(const Checkpoint& checkpoint,
                     const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("failed writing '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<std::string>& expected_env) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  Checkpoint ck = deserialize_checkpoint(bytes);
  if (expected_env && ck.env_id != *expected_env) {
    throw CheckpointError("checkpoint was trained on '" + ck.env_id +
                          "', expected '" + *expected_env + "'");
  }
  return ck;
}

}  // namespace salad::nets
