// Copyright 2026 The NOMAD Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nomad/checkpoint.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "json.hpp"
#include "nomad/error.h"

namespace nomad {
namespace {

constexpr char kMagic[] = "NOMAD1\n";
constexpr size_t kMagicSize = sizeof(kMagic) - 1;

nlohmann::json ConfigToJson(const EncoderConfig& config) {
  return {{"bands", config.bands},
          {"channels", config.channels},
          {"kernel", config.kernel},
          {"stride", config.stride},
          {"embed_dim", config.embed_dim},
          {"input_shift", config.input_shift},
          {"input_scale", config.input_scale},
          {"init_seed", config.init_seed}};
}

EncoderConfig ConfigFromJson(const nlohmann::json& j) {
  EncoderConfig config;
  config.bands = j.at("bands").get<int>();
  config.channels = j.at("channels").get<std::vector<int>>();
  config.kernel = j.at("kernel").get<int>();
  config.stride = j.at("stride").get<int>();
  config.embed_dim = j.at("embed_dim").get<int>();
  config.input_shift = j.at("input_shift").get<double>();
  config.input_scale = j.at("input_scale").get<double>();
  config.init_seed = j.at("init_seed").get<uint64_t>();
  return config;
}

}  // namespace

void SaveCheckpoint(const EmbeddingModel& model, const std::filesystem::path& path) {
  const nlohmann::json header = {
      {"format_version", kCheckpointFormatVersion},
      {"parameter_count", model.params().size()},
      {"config", ConfigToJson(model.config())}};
  const std::string text = header.dump();
  std::string out(kMagic, kMagicSize);
  const auto length = static_cast<uint32_t>(text.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((length >> (8 * i)) & 0xff));
  out += text;
  for (double p : model.params()) {
    const uint32_t bits = std::bit_cast<uint32_t>(static_cast<float>(p));
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

EmbeddingModel LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  const std::string name = path.string();
  if (bytes.size() < kMagicSize + 4 ||
      std::memcmp(bytes.data(), kMagic, kMagicSize) != 0) {
    throw Error(ErrorCode::kCorruptCheckpoint, name + ": bad magic");
  }
  uint32_t header_length = 0;
  for (int i = 0; i < 4; ++i) {
    header_length |= static_cast<uint32_t>(bytes[kMagicSize + i]) << (8 * i);
  }
  const size_t header_start = kMagicSize + 4;
  if (header_start + header_length > bytes.size()) {
    throw Error(ErrorCode::kCorruptCheckpoint, name + ": truncated header");
  }
  EncoderConfig config;
  size_t count = 0;
  try {
    const auto header = nlohmann::json::parse(
        bytes.begin() + header_start, bytes.begin() + header_start + header_length);
    if (header.at("format_version").get<int>() != kCheckpointFormatVersion) {
      throw Error(ErrorCode::kCorruptCheckpoint, name + ": unsupported format version");
    }
    count = header.at("parameter_count").get<size_t>();
    config = ConfigFromJson(header.at("config"));
    config.Validate();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptCheckpoint, name + ": malformed header: " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptCheckpoint) throw;
    throw Error(ErrorCode::kCorruptCheckpoint, name + ": " + e.what());
  }
  if (count != config.ParameterCount()) {
    throw Error(ErrorCode::kCorruptCheckpoint,
                name + ": header declares " + std::to_string(count) +
                    " parameters, config needs " +
                    std::to_string(config.ParameterCount()));
  }
  const size_t body = header_start + header_length;
  if (bytes.size() != body + 4 * count) {
    throw Error(ErrorCode::kCorruptCheckpoint,
                name + ": expected " + std::to_string(body + 4 * count) +
                    " bytes, found " + std::to_string(bytes.size()));
  }
  std::vector<double> params(count);
  for (size_t i = 0; i < count; ++i) {
    uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
      bits |= static_cast<uint32_t>(bytes[body + 4 * i + b]) << (8 * b);
    }
    const float value = std::bit_cast<float>(bits);
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::kCorruptCheckpoint,
                  name + ": non-finite weight at " + std::to_string(i));
    }
    params[i] = value;
  }
  return EmbeddingModel(std::move(config), std::move(params));
}

}  // namespace nomad
