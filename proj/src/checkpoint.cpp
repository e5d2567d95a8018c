/*
 * tagtrack : conditioned implicit neural representations for tagged-MRI motion tracking
 *
 * Copyright 2026 the tagtrack authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <array>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "tagtrack/io/checkpoint.hpp"

namespace tagtrack::io {

namespace {

constexpr const char* kMagic = "TAGTRACK-CHECKPOINT v1";

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string channels_string(const std::vector<int>& ch) {
  std::string out;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ch[i]);
  }
  return out;
}

std::vector<int> parse_channels(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

std::string order_string(const diffnet::ParamLayout& layout) {
  std::string out;
  for (const auto& b : layout.blocks()) {
    if (!out.empty()) out += ',';
    out += b.name + ":" + std::to_string(b.size);
  }
  return out;
}

void put_f32_le(std::vector<unsigned char>& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xff));
}

void put_u64_le(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

float get_f32_le(const unsigned char* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

std::uint64_t get_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

struct ParsedHeader {
  std::map<std::string, std::string> fields;
  std::size_t body_start = 0;
};

ParsedHeader parse_header(const std::filesystem::path& path, std::ifstream& f) {
  ParsedHeader h;
  std::string line;
  if (!std::getline(f, line) || line != kMagic)
    throw DataError("not a tagtrack checkpoint: " + path.string());
  while (std::getline(f, line)) {
    if (line == "END-HEADER") {
      h.body_start = static_cast<std::size_t>(f.tellg());
      return h;
    }
    const auto sp = line.find(' ');
    if (sp == std::string::npos)
      throw DataError("malformed checkpoint header line: '" + line + "'");
    h.fields[line.substr(0, sp)] = line.substr(sp + 1);
  }
  throw DataError("checkpoint header not terminated: " + path.string());
}

const std::string& field(const ParsedHeader& h, const std::string& key) {
  const auto it = h.fields.find(key);
  if (it == h.fields.end()) throw DataError("checkpoint header missing field '" + key + "'");
  return it->second;
}

diffnet::InrConfig config_from_header(const ParsedHeader& h) {
  diffnet::InrConfig cfg;
  cfg.hidden_layers = std::stoi(field(h, "hidden_layers"));
  cfg.hidden_size = std::stoi(field(h, "hidden_size"));
  cfg.latent_size = std::stoi(field(h, "latent_size"));
  cfg.modulation_hidden = std::stoi(field(h, "modulation_hidden"));
  cfg.omega = std::stod(field(h, "omega"));
  cfg.encoder_channels = parse_channels(field(h, "encoder_channels"));
  cfg.image_size = std::stoi(field(h, "image_size"));
  return cfg;
}

}  // namespace

std::uint32_t crc32(const unsigned char* data, std::size_t n) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < n; ++i) crc = table[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
  return crc ^ 0xFFFFFFFFu;
}

CheckpointMeta peek_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open checkpoint: " + path.string());
  const auto h = parse_header(path, f);
  CheckpointMeta meta;
  meta.config = config_from_header(h);
  meta.arithmetic_mode = field(h, "arithmetic_mode");
  meta.has_train_state = field(h, "train_state") == "1";
  return meta;
}

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const diffnet::InrModel<T>& model,
                     const TrainStateBlob* train_state) {
  const auto& cfg = model.config;
  const std::size_t np = model.layout.total();
  if (model.params.size() != np) throw DataError("save_checkpoint: parameter vector size mismatch");

  std::vector<unsigned char> body;
  body.reserve(np * 4);
  for (std::size_t i = 0; i < np; ++i) put_f32_le(body, static_cast<float>(model.params[i]));

  std::vector<unsigned char> state_bytes;
  if (train_state) {
    if (train_state->m.size() != np || train_state->v.size() != np)
      throw DataError("save_checkpoint: optimizer state size mismatch");
    state_bytes.reserve(np * 8 + 16);
    for (const float v : train_state->m) put_f32_le(state_bytes, v);
    for (const float v : train_state->v) put_f32_le(state_bytes, v);
    put_u64_le(state_bytes, static_cast<std::uint64_t>(train_state->step));
    put_u64_le(state_bytes, static_cast<std::uint64_t>(train_state->next_epoch));
  }

  std::ostringstream header;
  header << kMagic << "\n";
  header << "arithmetic_mode " << (sizeof(T) == 4 ? "float32" : "float64") << "\n";
  header << "omega " << format_double(cfg.omega) << "\n";
  header << "hidden_layers " << cfg.hidden_layers << "\n";
  header << "hidden_size " << cfg.hidden_size << "\n";
  header << "latent_size " << cfg.latent_size << "\n";
  header << "modulation_hidden " << cfg.modulation_hidden << "\n";
  header << "encoder_channels " << channels_string(cfg.encoder_channels) << "\n";
  header << "image_size " << cfg.image_size << "\n";
  header << "param_count " << np << "\n";
  header << "param_order " << order_string(model.layout) << "\n";
  header << "body_crc32 " << std::hex << std::setw(8) << std::setfill('0')
         << crc32(body.data(), body.size()) << std::dec << "\n";
  header << "train_state " << (train_state ? 1 : 0) << "\n";
  if (train_state) {
    header << "train_state_step " << train_state->step << "\n";
    header << "train_state_next_epoch " << train_state->next_epoch << "\n";
    header << "train_state_crc32 " << std::hex << std::setw(8) << std::setfill('0')
           << crc32(state_bytes.data(), state_bytes.size()) << std::dec << "\n";
  }
  header << "END-HEADER\n";

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write checkpoint: " + path.string());
  const std::string htext = header.str();
  f.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  f.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (train_state)
    f.write(reinterpret_cast<const char*>(state_bytes.data()),
            static_cast<std::streamsize>(state_bytes.size()));
  if (!f) throw DataError("short write: " + path.string());
}

template <typename T>
diffnet::InrModel<T> load_checkpoint(const std::filesystem::path& path,
                                     TrainStateBlob* train_state_out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open checkpoint: " + path.string());
  const auto h = parse_header(path, f);

  diffnet::InrModel<T> model;
  model.config = config_from_header(h);
  model.layout = diffnet::ParamLayout(model.config);
  const std::size_t np = model.layout.total();
  if (std::stoull(field(h, "param_count")) != np)
    throw DataError("checkpoint param_count does not match architecture");
  if (field(h, "param_order") != order_string(model.layout))
    throw DataError("checkpoint parameter ordering does not match this build");

  std::vector<unsigned char> body(np * 4);
  f.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (!f) throw DataError("checkpoint body truncated: " + path.string());
  {
    std::ostringstream want;
    want << std::hex << std::setw(8) << std::setfill('0') << crc32(body.data(), body.size());
    if (want.str() != field(h, "body_crc32"))
      throw DataError("checkpoint body checksum mismatch: " + path.string());
  }
  model.params.resize(np);
  for (std::size_t i = 0; i < np; ++i)
    model.params[i] = static_cast<T>(get_f32_le(body.data() + i * 4));

  const bool has_state = field(h, "train_state") == "1";
  if (train_state_out) {
    if (!has_state) throw DataError("checkpoint has no training state: " + path.string());
    std::vector<unsigned char> sb(np * 8 + 16);
    f.read(reinterpret_cast<char*>(sb.data()), static_cast<std::streamsize>(sb.size()));
    if (!f) throw DataError("checkpoint training state truncated: " + path.string());
    std::ostringstream want;
    want << std::hex << std::setw(8) << std::setfill('0') << crc32(sb.data(), sb.size());
    if (want.str() != field(h, "train_state_crc32"))
      throw DataError("checkpoint training-state checksum mismatch: " + path.string());
    train_state_out->m.resize(np);
    train_state_out->v.resize(np);
    for (std::size_t i = 0; i < np; ++i) train_state_out->m[i] = get_f32_le(sb.data() + i * 4);
    for (std::size_t i = 0; i < np; ++i)
      train_state_out->v[i] = get_f32_le(sb.data() + (np + i) * 4);
    train_state_out->step = static_cast<std::int64_t>(get_u64_le(sb.data() + np * 8));
    train_state_out->next_epoch = static_cast<int>(get_u64_le(sb.data() + np * 8 + 8));
  }
  return model;
}

template void save_checkpoint<float>(const std::filesystem::path&,
                                     const diffnet::InrModel<float>&, const TrainStateBlob*);
template void save_checkpoint<double>(const std::filesystem::path&,
                                      const diffnet::InrModel<double>&, const TrainStateBlob*);
template diffnet::InrModel<float> load_checkpoint<float>(const std::filesystem::path&,
                                                         TrainStateBlob*);
template diffnet::InrModel<double> load_checkpoint<double>(const std::filesystem::path&,
                                                           TrainStateBlob*);

}  // namespace tagtrack::io
