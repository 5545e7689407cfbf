//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/training/checkpoint.hpp"

#include <cstdint>
#include <cstring>

#include "molevers/util/io.hpp"

namespace molevers::training {
namespace {
constexpr std::string_view kMagic = "MVCKPT01";
constexpr int kFormatVersion = 1;

void put_u64(std::string &out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

std::uint64_t get_u64(std::string_view in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[i]))
         << (8 * i);
  }
  return v;
}

void put_f32(std::string &out, float f) {
  std::uint32_t bits = 0;
  std::memcpy(&bits, &f, sizeof(bits));
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
}

float get_f32(const char *p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) {
    bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i]))
            << (8 * i);
  }
  float f = 0;
  std::memcpy(&f, &bits, sizeof(f));
  return f;
}

nlohmann::json norm_json(const NormStats &n) {
  return { { "mean", n.mean }, { "std", n.std } };
}

NormStats norm_from(const nlohmann::json &j) {
  NormStats n;
  n.mean = j.at("mean").get<std::vector<double>>();
  n.std = j.at("std").get<std::vector<double>>();
  if (n.mean.size() != n.std.size()) {
    throw CheckpointFormatError("normalization stats have unequal lengths");
  }
  return n;
}
}  // namespace

std::string serialize_checkpoint(const Checkpoint &ckpt) {
  nlohmann::json index = nlohmann::json::array();
  std::string data;
  std::uint64_t offset = 0;
  for (const auto &[name, arr]: ckpt.params) {
    index.push_back(
        { { "name", name }, { "shape", arr.shape }, { "offset", offset } });
    for (float v: arr.data) {
      put_f32(data, v);
    }
    offset += arr.size();
  }
  nlohmann::json manifest {
    { "format_version", kFormatVersion },
    { "encoder", ckpt.encoder },
    { "stage", ckpt.stage },
    { "params", index },
    { "aux_norm", norm_json(ckpt.aux_norm) },
    { "reg_norm", norm_json(ckpt.reg_norm) },
    { "meta", ckpt.meta },
  };
  const std::string text = manifest.dump();
  std::string out(kMagic);
  put_u64(out, text.size());
  out += text;
  out += data;
  return out;
}

Checkpoint parse_checkpoint(std::string_view bytes) {
  if (bytes.size() < 16 || bytes.substr(0, 8) != kMagic) {
    throw CheckpointFormatError("not a checkpoint archive (bad magic)");
  }
  const std::uint64_t len = get_u64(bytes.substr(8, 8));
  if (len > bytes.size() - 16) {
    throw CheckpointFormatError("truncated checkpoint manifest");
  }
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(bytes.substr(16, len));
  } catch (const nlohmann::json::exception &e) {
    throw CheckpointFormatError(std::string("bad checkpoint manifest: ")
                                + e.what());
  }
  const std::string_view data = bytes.substr(16 + len);

  Checkpoint ckpt;
  try {
    if (manifest.at("format_version").get<int>() != kFormatVersion) {
      throw CheckpointFormatError("unsupported checkpoint format version");
    }
    ckpt.encoder = manifest.at("encoder").get<encoder::EncoderConfig>();
    ckpt.stage = manifest.at("stage").get<std::string>();
    ckpt.aux_norm = norm_from(manifest.at("aux_norm"));
    ckpt.reg_norm = norm_from(manifest.at("reg_norm"));
    ckpt.meta = manifest.at("meta");
    for (const auto &entry: manifest.at("params")) {
      const auto shape = entry.at("shape").get<diffcore::Shape>();
      const auto offset = entry.at("offset").get<std::uint64_t>();
      diffcore::Array<float> arr(shape);
      if ((offset + arr.size()) * 4 > data.size()) {
        throw CheckpointFormatError("truncated checkpoint data");
      }
      for (std::size_t i = 0; i < arr.size(); ++i) {
        arr[i] = get_f32(data.data() + 4 * (offset + i));
      }
      ckpt.params.emplace(entry.at("name").get<std::string>(), std::move(arr));
    }
  } catch (const nlohmann::json::exception &e) {
    throw CheckpointFormatError(std::string("bad checkpoint manifest: ")
                                + e.what());
  } catch (const std::invalid_argument &e) {
    throw CheckpointFormatError(std::string("bad checkpoint config: ")
                                + e.what());
  }
  encoder::check_shapes(ckpt.encoder, ckpt.params);
  return ckpt;
}

void write_checkpoint(const std::filesystem::path &path,
                      const Checkpoint &ckpt) {
  write_text_file(path, serialize_checkpoint(ckpt));
}

Checkpoint read_checkpoint(const std::filesystem::path &path) {
  return parse_checkpoint(read_text_file(path));
}

}  // namespace molevers::training
