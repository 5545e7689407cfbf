//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/encoder/params.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>

#include "molevers/diffcore/ops.hpp"
#include "molevers/util/rng.hpp"

namespace molevers::encoder {
namespace {
void add_linear(std::vector<ParamSpec> &specs, const std::string &prefix,
                std::size_t in, std::size_t out, ParamGroup group,
                ParamInit weight_init = ParamInit::kXavier) {
  const ParamInit bias_init = weight_init == ParamInit::kHeadOutput
                                  ? ParamInit::kHeadOutput
                                  : ParamInit::kZero;
  specs.push_back({ prefix + ".w", { in, out }, weight_init, group });
  specs.push_back({ prefix + ".b", { out }, bias_init, group });
}

void add_norm(std::vector<ParamSpec> &specs, const std::string &prefix,
              std::size_t width, ParamGroup group) {
  specs.push_back({ prefix + ".g", { width }, ParamInit::kOne, group });
  specs.push_back({ prefix + ".b", { width }, ParamInit::kZero, group });
}

bool starts_with(const std::string &s, std::string_view prefix) {
  return s.compare(0, prefix.size(), prefix) == 0;
}
}  // namespace

bool is_denoising_branch(ParamGroup group) {
  return group == ParamGroup::kDenoiseEncoder
         || group == ParamGroup::kAggregator
         || group == ParamGroup::kSigmaEmbed
         || group == ParamGroup::kDenoiseHead;
}

std::vector<ParamSpec> param_specs(const EncoderConfig &cfg) {
  validate(cfg);
  const std::size_t c = cfg.embed_dim;
  const std::size_t f = cfg.ffn_dim;
  const std::size_t h = cfg.n_heads;
  const std::size_t k = cfg.n_dist_kernels;

  std::vector<ParamSpec> specs;
  specs.push_back({ "embed.atom", { cfg.vocab_size, c }, ParamInit::kNormal,
                    ParamGroup::kEmbedding });
  specs.push_back(
      { "embed.mol", { 1, c }, ParamInit::kNormal, ParamGroup::kEmbedding });

  for (const std::string branch: { "primary", "denoise" }) {
    const ParamGroup g = branch == "primary" ? ParamGroup::kPrimaryEncoder
                                             : ParamGroup::kDenoiseEncoder;
    specs.push_back(
        { branch + ".pair.means", { k }, ParamInit::kKernelMeans, g });
    specs.push_back({ branch + ".pair.widths", { k }, ParamInit::kOne, g });
    add_linear(specs, branch + ".pair.proj", k, h, g, ParamInit::kPairBias);
    specs.push_back({ branch + ".pair.null", { h }, ParamInit::kZero, g });
    for (std::size_t l = 0; l < cfg.n_layers; ++l) {
      const std::string pre = branch + ".layer" + std::to_string(l);
      add_norm(specs, pre + ".ln1", c, g);
      add_linear(specs, pre + ".attn.qkv", c, 3 * c, g);
      add_linear(specs, pre + ".attn.out", c, c, g);
      add_norm(specs, pre + ".ln2", c, g);
      add_linear(specs, pre + ".ffn.in", c, f, g);
      add_linear(specs, pre + ".ffn.out", f, c, g);
    }
  }

  const ParamGroup agg = ParamGroup::kAggregator;
  specs.push_back({ "agg.query", { 1, c }, ParamInit::kNormal, agg });
  add_norm(specs, "agg.ln", c, agg);
  add_linear(specs, "agg.q", c, c, agg);
  add_linear(specs, "agg.k", c, c, agg);
  add_linear(specs, "agg.v", c, c, agg);
  add_linear(specs, "agg.out", c, c, agg);

  add_linear(specs, "sigma.l1", 1, c, ParamGroup::kSigmaEmbed);
  add_linear(specs, "sigma.l2", c, c, ParamGroup::kSigmaEmbed);

  const ParamInit head_out = ParamInit::kHeadOutput;
  add_norm(specs, "head.map.ln", c, ParamGroup::kMapHead);
  add_linear(specs, "head.map.l1", c, c, ParamGroup::kMapHead);
  add_linear(specs, "head.map.l2", c, kNumAtomClasses, ParamGroup::kMapHead,
             head_out);

  const ParamGroup dh = ParamGroup::kDenoiseHead;
  add_norm(specs, "head.denoise.ln", c, dh);
  add_linear(specs, "head.denoise.eps1", c, c, dh);
  add_linear(specs, "head.denoise.eps2", c, 1, dh, head_out);
  add_linear(specs, "head.denoise.pair_u", c, c, dh);
  add_linear(specs, "head.denoise.pair_r", k, c, dh);
  add_linear(specs, "head.denoise.pair_w", c, 1, dh, head_out);
  add_linear(specs, "head.denoise.pair_d", c, 1, dh, head_out);

  add_norm(specs, "head.aux.ln", c, ParamGroup::kAuxHead);
  add_linear(specs, "head.aux.l1", c, c, ParamGroup::kAuxHead);
  add_linear(specs, "head.aux.l2", c, cfg.aux_targets, ParamGroup::kAuxHead,
             head_out);

  const ParamGroup reg = ParamGroup::kDownstreamHead;
  add_norm(specs, "head.reg.ln", c, reg);
  add_linear(specs, "head.reg.l1", c, c, reg);
  add_linear(specs, "head.reg.out", c, 1, reg, head_out);
  add_linear(specs, "head.reg.rank", c, 1, reg, head_out);
  return specs;
}

ParamGroup group_of(const std::string &name) {
  if (starts_with(name, "embed.")) {
    return ParamGroup::kEmbedding;
  }
  if (starts_with(name, "primary.")) {
    return ParamGroup::kPrimaryEncoder;
  }
  if (starts_with(name, "denoise.")) {
    return ParamGroup::kDenoiseEncoder;
  }
  if (starts_with(name, "agg.")) {
    return ParamGroup::kAggregator;
  }
  if (starts_with(name, "sigma.")) {
    return ParamGroup::kSigmaEmbed;
  }
  if (starts_with(name, "head.map.")) {
    return ParamGroup::kMapHead;
  }
  if (starts_with(name, "head.denoise.")) {
    return ParamGroup::kDenoiseHead;
  }
  if (starts_with(name, "head.aux.")) {
    return ParamGroup::kAuxHead;
  }
  if (starts_with(name, "head.reg.")) {
    return ParamGroup::kDownstreamHead;
  }
  throw std::invalid_argument("unknown parameter '" + name + "'");
}

ParamSet<float> init_params(const EncoderConfig &cfg, std::uint64_t seed,
                            InitOptions options) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ParamSet<float> params;
  for (const ParamSpec &spec: param_specs(cfg)) {
    diffcore::Array<float> arr(spec.shape);
    ParamInit init = spec.init;
    if (init == ParamInit::kHeadOutput) {
      init = options.zero_head_outputs ? ParamInit::kZero : ParamInit::kXavier;
    }
    switch (init) {
    case ParamInit::kNormal:
      for (float &v: arr.data) {
        v = static_cast<float>(normal(rng));
      }
      break;
    case ParamInit::kXavier:
    case ParamInit::kPairBias: {
      const std::size_t fan_in = spec.shape.size() == 2 ? spec.shape[0] : 1;
      const std::size_t fan_out = spec.shape.back();
      const double bound =
          std::sqrt(6.0 / static_cast<double>(fan_in + fan_out))
          * (init == ParamInit::kPairBias ? kPairBiasInitScale : 1.0);
      std::uniform_real_distribution<double> uni(-bound, bound);
      for (float &v: arr.data) {
        v = static_cast<float>(uni(rng));
      }
      break;
    }
    case ParamInit::kZero:
      break;
    case ParamInit::kOne:
      std::fill(arr.data.begin(), arr.data.end(), 1.0F);
      break;
    case ParamInit::kKernelMeans: {
      const std::size_t n = arr.size();
      for (std::size_t i = 0; i < n; ++i) {
        arr[i] = n == 1 ? 0.0F
                        : static_cast<float>(12.0 * static_cast<double>(i)
                                             / static_cast<double>(n - 1));
      }
      break;
    }
    case ParamInit::kHeadOutput:
      break;
    }
    params.emplace(spec.name, std::move(arr));
  }
  return params;
}

std::uint64_t checksum(const ParamSet<float> &params,
                       bool denoising_branch_only) {
  std::uint64_t h = fnv1a("");
  const auto mix = [&h](const void *data, std::size_t len) {
    const auto *bytes = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto &[name, arr]: params) {
    const bool denoise = is_denoising_branch(group_of(name));
    if (denoise != denoising_branch_only) {
      continue;
    }
    mix(name.data(), name.size());
    for (std::size_t d: arr.shape) {
      const std::uint64_t d64 = d;
      mix(&d64, sizeof(d64));
    }
    mix(arr.data.data(), arr.data.size() * sizeof(float));
  }
  return h;
}

void check_shapes(const EncoderConfig &cfg, const ParamSet<float> &params) {
  std::map<std::string, diffcore::Shape> expected;
  for (const auto &spec: param_specs(cfg)) {
    expected.emplace(spec.name, spec.shape);
  }
  for (const auto &[name, arr]: params) {
    auto it = expected.find(name);
    if (it == expected.end()) {
      throw diffcore::ShapeMismatch("unknown parameter '" + name + "'");
    }
    if (it->second != arr.shape) {
      throw diffcore::ShapeMismatch("parameter '" + name + "'", it->second,
                                    arr.shape);
    }
  }
}

}  // namespace molevers::encoder
