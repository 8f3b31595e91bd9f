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

#include "salad/envs/buffer.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "salad/binary_io.hpp"
#include "salad/envs/dynamics.hpp"
#include "salad/envs/render.hpp"
#include "salad/errors.hpp"
#include "salad/random.hpp"

namespace salad::envs {
namespace {

constexpr const char* kDatasetMagic = "salad-dataset";
constexpr int kDatasetVersion = 1;

std::string state_key(const State& prev, const State& now) {
  std::string key(6 * sizeof(double), '\0');
  std::memcpy(key.data(), prev.v.data(), 3 * sizeof(double));
  std::memcpy(key.data() + 3 * sizeof(double), now.v.data(), 3 * sizeof(double));
  return key;
}

State make_state(const EnvSpec& spec, const double* v) {
  return spec.id == EnvId::kPendulum ? State::pendulum(v[0], v[1])
                                     : State::vehicle(v[0], v[1], v[2]);
}

void check_state(const EnvSpec& spec, const State& s) {
  if (s.dim != spec.state_dim()) {
    throw DimensionError("state of dimension " + std::to_string(s.dim) +
                         " for environment " + to_string(spec.id));
  }
  for (std::size_t i = 0; i < s.dim; ++i) {
    if (!std::isfinite(s[i])) throw DatasetError("non-finite state component");
  }
}

void write_state(std::ostream& out, const State& s) {
  for (std::size_t i = 0; i < s.dim; ++i) out << ' ' << s[i];
}

}  // namespace

bool operator==(const Transition& a, const Transition& b) {
  return a.state_prev == b.state_prev && a.state_now == b.state_now &&
         a.action == b.action && a.state_next == b.state_next &&
         a.label == b.label;
}

DataBuffer::DataBuffer(EnvSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
}

std::size_t DataBuffer::intern(const State& prev, const State& now) {
  auto [it, inserted] =
      obs_lookup_.try_emplace(state_key(prev, now), observations_.size());
  if (inserted) observations_.emplace_back(prev, now);
  return it->second;
}

std::size_t DataBuffer::append(Transition t) {
  check_state(spec_, t.state_prev);
  check_state(spec_, t.state_now);
  check_state(spec_, t.state_next);
  if (!std::isfinite(t.action)) throw DatasetError("non-finite action");
  t.label = label(spec_, t.state_now);
  const std::size_t index = records_.size();
  if (t.label == Label::kSafe) safe_.push_back(index);
  if (t.label == Label::kUnsafe) unsafe_.push_back(index);
  obs_.push_back(intern(t.state_prev, t.state_now));
  next_obs_.push_back(intern(t.state_now, t.state_next));
  records_.push_back(t);
  return index;
}

tensor::Tensor DataBuffer::render_observations(
    std::span<const std::size_t> obs) const {
  const std::size_t n = spec_.observation_size();
  tensor::Tensor out({obs.size(), n});
  for (std::size_t r = 0; r < obs.size(); ++r) {
    const auto& [prev, now] = observations_.at(obs[r]);
    render_into(spec_, prev, now, out.data().subspan(r * n, n));
  }
  return out;
}

tensor::Tensor DataBuffer::observation_batch(
    std::span<const std::size_t> records) const {
  std::vector<std::size_t> ids;
  ids.reserve(records.size());
  for (std::size_t r : records) ids.push_back(obs_.at(r));
  return render_observations(ids);
}

tensor::Tensor DataBuffer::next_observation_batch(
    std::span<const std::size_t> records) const {
  std::vector<std::size_t> ids;
  ids.reserve(records.size());
  for (std::size_t r : records) ids.push_back(next_obs_.at(r));
  return render_observations(ids);
}

DataBuffer sample_datasets(const EnvSpec& spec, std::size_t n_safe,
                           std::size_t n_unsafe, std::size_t n_total,
                           std::uint64_t seed) {
  if (n_safe + n_unsafe > n_total) {
    throw ConfigError("data.n_total", "must be at least n_safe + n_unsafe");
  }
  Rng rng(seed);
  DataBuffer buffer(spec);
  auto add = [&](Region region) {
    const State now = sample_state(spec, region, rng);
    const double a_prev = sample_action(spec, rng);
    const double a = sample_action(spec, rng);
    buffer.append(Transition{predecessor(spec, now, a_prev), now, a,
                             step(spec, now, a), Label::kUnlabeled});
  };
  for (std::size_t i = 0; i < n_safe; ++i) add(Region::kSafe);
  for (std::size_t i = 0; i < n_unsafe; ++i) add(Region::kUnsafe);
  for (std::size_t i = n_safe + n_unsafe; i < n_total; ++i) add(Region::kAll);
  return buffer;
}

std::filesystem::path frames_path(const std::filesystem::path& index_path) {
  std::filesystem::path p = index_path;
  p += ".frames";
  return p;
}

void export_dataset(const DataBuffer& buffer,
                    const std::filesystem::path& index_path) {
  const EnvSpec& spec = buffer.spec();
  std::ofstream index(index_path);
  std::ofstream frames(frames_path(index_path), std::ios::binary);
  if (!index || !frames) {
    throw DatasetError("cannot write dataset at " + index_path.string());
  }
  index.precision(17);
  index << "# " << kDatasetMagic << ' ' << kDatasetVersion << '\n';
  index << "# " << spec.serialize() << '\n';
  const std::size_t count = 2 * spec.observation_size();
  std::vector<double> obs(spec.observation_size());
  ByteWriter blob;
  std::uint64_t offset = 0;
  for (const Transition& t : buffer.records()) {
    index << to_string(spec.id);
    write_state(index, t.state_prev);
    write_state(index, t.state_now);
    index << ' ' << t.action << ' ' << to_string(t.label) << ' ' << offset
          << ' ' << count;
    write_state(index, t.state_next);
    index << '\n';
    render_into(spec, t.state_prev, t.state_now, obs);
    for (double v : obs) blob.f32(static_cast<float>(v));
    render_into(spec, t.state_now, t.state_next, obs);
    for (double v : obs) blob.f32(static_cast<float>(v));
    offset += count;
  }
  const std::string& bytes = blob.bytes();
  frames.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!index || !frames) {
    throw DatasetError("failed writing dataset at " + index_path.string());
  }
}

DataBuffer import_dataset(const std::filesystem::path& index_path) {
  std::ifstream index(index_path);
  if (!index) throw DatasetError("cannot open dataset " + index_path.string());
  std::string line;
  if (!std::getline(index, line) ||
      line != "# " + std::string(kDatasetMagic) + ' ' +
                  std::to_string(kDatasetVersion)) {
    throw DatasetError("missing or unsupported dataset header");
  }
  if (!std::getline(index, line) || line.rfind("# ", 0) != 0) {
    throw DatasetError("missing environment line");
  }
  DataBuffer buffer(EnvSpec::deserialize(line.substr(2)));
  const EnvSpec& spec = buffer.spec();
  const std::size_t dim = spec.state_dim();
  const std::uint64_t count = 2 * spec.observation_size();
  const auto blob = frames_path(index_path);
  std::error_code ec;
  const std::uintmax_t blob_size = std::filesystem::file_size(blob, ec);
  if (ec) throw DatasetError("missing frame sidecar " + blob.string());

  std::size_t line_no = 2;
  while (std::getline(index, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = index_path.string() + ":" + std::to_string(line_no);
    std::istringstream in(line);
    std::string env;
    double prev[3]{}, now[3]{}, next[3]{};
    double action = 0.0;
    std::string label_name;
    std::uint64_t offset = 0, n = 0;
    in >> env;
    for (std::size_t i = 0; i < dim; ++i) in >> prev[i];
    for (std::size_t i = 0; i < dim; ++i) in >> now[i];
    in >> action >> label_name >> offset >> n;
    for (std::size_t i = 0; i < dim; ++i) in >> next[i];
    std::string extra;
    if (!in || (in >> extra)) throw DatasetError(where + ": malformed record");
    if (env != to_string(spec.id)) {
      throw DatasetError(where + ": record for environment '" + env + "'");
    }
    if (n != count || offset != count * buffer.size() ||
        (offset + n) * sizeof(float) > blob_size) {
      throw DatasetError(where + ": frame offset/count do not match sidecar");
    }
    Transition t{make_state(spec, prev), make_state(spec, now), action,
                 make_state(spec, next), parse_label(label_name)};
    const Label stored = t.label;
    buffer.append(t);
    if (buffer.records().back().label != stored) {
      throw DatasetError(where + ": stored label disagrees with state");
    }
  }
  if (count * buffer.size() * sizeof(float) != blob_size) {
    throw DatasetError("frame sidecar size does not match record count");
  }
  return buffer;
}

std::vector<float> read_record_frames(const std::filesystem::path& index_path,
                                      std::size_t record) {
  std::ifstream index(index_path);
  std::string line;
  std::getline(index, line);
  if (!std::getline(index, line) || line.rfind("# ", 0) != 0) {
    throw DatasetError("missing environment line");
  }
  const EnvSpec spec = EnvSpec::deserialize(line.substr(2));
  const std::size_t count = 2 * spec.observation_size();
  std::ifstream frames(frames_path(index_path), std::ios::binary);
  frames.seekg(static_cast<std::streamoff>(record * count * sizeof(float)));
  std::string bytes(count * sizeof(float), '\0');
  frames.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!frames) throw DatasetError("record " + std::to_string(record) + " out of range");
  ByteReader<DatasetError> reader(bytes);
  std::vector<float> out(count);
  for (float& v : out) v = reader.f32();
  return out;
}

std::string serialize_buffer(const DataBuffer& buffer) {
  ByteWriter w;
  w.str(buffer.spec().serialize());
  w.u64(buffer.size());
  const std::size_t dim = buffer.spec().state_dim();
  for (const Transition& t : buffer.records()) {
    for (std::size_t i = 0; i < dim; ++i) w.f64(t.state_prev[i]);
    for (std::size_t i = 0; i < dim; ++i) w.f64(t.state_now[i]);
    w.f64(t.action);
    for (std::size_t i = 0; i < dim; ++i) w.f64(t.state_next[i]);
  }
  return w.take();
}

DataBuffer deserialize_buffer(const std::string& bytes) {
  ByteReader<CheckpointError> r(bytes);
  EnvSpec spec;
  try {
    spec = EnvSpec::deserialize(r.str());
  } catch (const DatasetError& e) {
    throw CheckpointError(std::string("buffer section: ") + e.what());
  }
  DataBuffer buffer(spec);
  const std::uint64_t n = r.u64();
  const std::size_t dim = spec.state_dim();
  for (std::uint64_t k = 0; k < n; ++k) {
    double prev[3]{}, now[3]{}, next[3]{};
    for (std::size_t i = 0; i < dim; ++i) prev[i] = r.f64();
    for (std::size_t i = 0; i < dim; ++i) now[i] = r.f64();
    const double action = r.f64();
    for (std::size_t i = 0; i < dim; ++i) next[i] = r.f64();
    buffer.append(Transition{make_state(spec, prev), make_state(spec, now),
                             action, make_state(spec, next), Label::kUnlabeled});
  }
  if (!r.done()) throw CheckpointError("trailing bytes in buffer section");
  return buffer;
}

}  // namespace salad::envs
