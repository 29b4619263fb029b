// Copyright 2026 The csskit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "csskit/io/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "json.hpp"

namespace csskit {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'C', 'S', 'S', 'K', 'I', 'T', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

json net_config_to_json(const NetConfig& cfg) {
  return json{{"num_blocks", cfg.num_blocks},
              {"layers_per_block", cfg.layers_per_block},
              {"model_dim", cfg.model_dim},
              {"attention_heads", cfg.attention_heads},
              {"conv_kernel", cfg.conv_kernel},
              {"bins", cfg.bins},
              {"feature_kind", "log1p_mag_unit_phase"}};
}

NetConfig net_config_from_json(const json& j) {
  NetConfig cfg;
  cfg.num_blocks = j.at("num_blocks").get<int>();
  cfg.layers_per_block = j.at("layers_per_block").get<int>();
  cfg.model_dim = j.at("model_dim").get<int>();
  cfg.attention_heads = j.at("attention_heads").get<int>();
  cfg.conv_kernel = j.at("conv_kernel").get<int>();
  cfg.bins = j.at("bins").get<int>();
  cfg.validate();
  return cfg;
}

template <typename T>
void write_raw(std::ostream& out, const T* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(count * sizeof(T)));
}

template <typename T>
void read_raw(std::istream& in, T* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data),
          static_cast<std::streamsize>(count * sizeof(T)));
  require(in.good(), ErrorCode::kFormat, "checkpoint: truncated payload");
}

}  // namespace

void save_checkpoint(const std::string& path, const MaskNet& net,
                     const Adam* optimizer) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::kIo, "cannot open for writing: ", path);

  json header;
  header["net_config"] = net_config_to_json(net.config());
  json tensors = json::array();
  std::uint64_t offset = 0;
  for (const auto& item : net.params().items()) {
    const std::uint64_t bytes = item.tensor.size() * sizeof(float);
    tensors.push_back(json{{"name", item.name},
                           {"shape", item.tensor.shape()},
                           {"dtype", "f32"},
                           {"offset", offset},
                           {"bytes", bytes}});
    offset += bytes;
  }
  header["tensors"] = std::move(tensors);
  if (optimizer != nullptr) {
    json opt;
    opt["step"] = optimizer->step_count();
    opt["beta1"] = optimizer->config().beta1;
    opt["beta2"] = optimizer->config().beta2;
    opt["eps"] = optimizer->config().eps;
    json slots = json::array();
    // Slots are stored in parameter order for a stable layout.
    for (const auto& item : net.params().items()) {
      const auto it = optimizer->slots().find(item.name);
      if (it == optimizer->slots().end()) continue;
      const std::uint64_t bytes = it->second.m.size() * sizeof(double);
      slots.push_back(json{{"name", item.name}, {"offset", offset}, {"bytes", bytes}});
      offset += 2 * bytes;  // m then v
    }
    opt["slots"] = std::move(slots);
    header["optimizer"] = std::move(opt);
  }

  const std::string header_text = header.dump();
  out.write(kMagic, sizeof(kMagic));
  const std::uint32_t version = kVersion;
  write_raw(out, &version, 1);
  const std::uint64_t header_len = header_text.size();
  write_raw(out, &header_len, 1);
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));

  for (const auto& item : net.params().items()) {
    write_raw(out, item.tensor.values().data(), item.tensor.size());
  }
  if (optimizer != nullptr) {
    for (const auto& item : net.params().items()) {
      const auto it = optimizer->slots().find(item.name);
      if (it == optimizer->slots().end()) continue;
      write_raw(out, it->second.m.data(), it->second.m.size());
      write_raw(out, it->second.v.data(), it->second.v.size());
    }
  }
  require(out.good(), ErrorCode::kIo, "write failed: ", path);
}

MaskNet load_checkpoint(const std::string& path, Adam* optimizer) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::kIo, "cannot open checkpoint: ", path);

  char magic[8];
  in.read(magic, 8);
  require(in.good() && std::memcmp(magic, kMagic, 8) == 0, ErrorCode::kFormat, path,
          ": not a model checkpoint (bad magic)");
  std::uint32_t version = 0;
  read_raw(in, &version, 1);
  require(version == kVersion, ErrorCode::kFormat, path,
          ": unsupported checkpoint version ", version);
  std::uint64_t header_len = 0;
  read_raw(in, &header_len, 1);
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  require(in.good(), ErrorCode::kFormat, path, ": truncated header");

  json header;
  try {
    header = json::parse(header_text);
  } catch (const json::exception& e) {
    raise(ErrorCode::kFormat, path, ": bad header json: ", e.what());
  }
  const NetConfig cfg = net_config_from_json(header.at("net_config"));

  const std::streampos payload_begin = in.tellg();
  ParamSet params;
  for (const auto& t : header.at("tensors")) {
    const std::string name = t.at("name").get<std::string>();
    const Shape shape = t.at("shape").get<Shape>();
    require(t.at("dtype").get<std::string>() == "f32", ErrorCode::kFormat, path,
            ": tensor ", name, " has unsupported dtype");
    const auto offset = t.at("offset").get<std::uint64_t>();
    std::vector<float> data(shape_numel(shape));
    in.seekg(payload_begin + static_cast<std::streamoff>(offset));
    read_raw(in, data.data(), data.size());
    params.add(name, Tensor::from_data(shape, std::move(data)));
  }

  if (optimizer != nullptr && header.contains("optimizer")) {
    const auto& opt = header.at("optimizer");
    AdamConfig acfg;
    acfg.beta1 = opt.at("beta1").get<double>();
    acfg.beta2 = opt.at("beta2").get<double>();
    acfg.eps = opt.at("eps").get<double>();
    *optimizer = Adam(acfg);
    optimizer->set_step_count(opt.at("step").get<std::int64_t>());
    for (const auto& s : opt.at("slots")) {
      const std::string name = s.at("name").get<std::string>();
      const auto offset = s.at("offset").get<std::uint64_t>();
      const auto bytes = s.at("bytes").get<std::uint64_t>();
      const std::size_t count = bytes / sizeof(double);
      Adam::Slot slot;
      slot.m.resize(count);
      slot.v.resize(count);
      in.seekg(payload_begin + static_cast<std::streamoff>(offset));
      read_raw(in, slot.m.data(), count);
      read_raw(in, slot.v.data(), count);
      optimizer->slots()[name] = std::move(slot);
    }
  }

  return MaskNet(cfg, std::move(params));
}

void check_net_config(const NetConfig& expected, const NetConfig& actual) {
  if (expected == actual) return;
  std::string diff;
  auto field = [&](const char* name, int e, int a) {
    if (e != a) {
      diff += str_cat("  ", name, ": expected ", e, ", checkpoint has ", a, "\n");
    }
  };
  field("num_blocks", expected.num_blocks, actual.num_blocks);
  field("layers_per_block", expected.layers_per_block, actual.layers_per_block);
  field("model_dim", expected.model_dim, actual.model_dim);
  field("attention_heads", expected.attention_heads, actual.attention_heads);
  field("conv_kernel", expected.conv_kernel, actual.conv_kernel);
  field("bins", expected.bins, actual.bins);

  // Shape-level report for the differing tensors.
  const auto exp_shapes = param_shapes(expected);
  const auto act_shapes = param_shapes(actual);
  std::size_t shown = 0;
  for (const auto& [name, shape] : exp_shapes) {
    for (const auto& [aname, ashape] : act_shapes) {
      if (aname == name && ashape != shape && shown < 5) {
        diff += str_cat("  tensor ", name, ": expected ", shape_str(shape), ", got ",
                        shape_str(ashape), "\n");
        ++shown;
        break;
      }
    }
  }
  raise(ErrorCode::kShapeMismatch, "model architecture mismatch:\n", diff);
}

}  // namespace csskit
