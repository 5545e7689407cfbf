//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "molevers/encoder/params.hpp"

namespace molevers::encoder {
namespace {
TEST(EncoderConfigTest, Validate) {
  EncoderConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  cfg.n_heads = 5;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.n_layers = 0;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
}

TEST(EncoderConfigTest, PaperScale) {
  EncoderConfig cfg = EncoderConfig::paper_scale();
  EXPECT_EQ(cfg.n_layers, 15);
  EXPECT_EQ(cfg.embed_dim, 512);
  EXPECT_EQ(cfg.ffn_dim, 2048);
  EXPECT_NO_THROW(validate(cfg));
}

TEST(EncoderConfigTest, JsonRoundTripAndStrictness) {
  EncoderConfig cfg;
  cfg.n_layers = 2;
  nlohmann::json j = cfg;
  EXPECT_EQ(j.get<EncoderConfig>(), cfg);
  j["bogus"] = 1;
  EXPECT_THROW(j.get<EncoderConfig>(), std::invalid_argument);
  EXPECT_THROW((nlohmann::json { { "n_layers", -1 } }.get<EncoderConfig>()),
               std::invalid_argument);
  EXPECT_EQ((nlohmann::json { { "n_heads", 8 } }.get<EncoderConfig>().n_heads),
            8);
}

TEST(Params, ShapesFollowConfig) {
  EncoderConfig cfg;
  ParamSet<float> p = init_params(cfg, 1);
  EXPECT_EQ(p.at("embed.atom").shape, (diffcore::Shape { 10, 64 }));
  EXPECT_EQ(p.at("agg.query").shape, (diffcore::Shape { 1, 64 }));
  EXPECT_EQ(p.at("primary.pair.proj.w").shape, (diffcore::Shape { 16, 4 }));
  EXPECT_EQ(p.at("primary.layer3.ffn.in.w").shape,
            (diffcore::Shape { 64, 256 }));
  EXPECT_EQ(p.at("head.map.l2.w").shape, (diffcore::Shape { 64, 9 }));
  EXPECT_EQ(p.count("primary.layer4.ln1.g"), 0);
  EXPECT_NO_THROW(check_shapes(cfg, p));
}

TEST(Params, KernelMeansAndHeadZeros) {
  ParamSet<float> p = init_params(EncoderConfig {}, 1);
  const auto &means = p.at("denoise.pair.means");
  EXPECT_EQ(means[0], 0.0F);
  EXPECT_EQ(means[15], 12.0F);
  EXPECT_EQ(p.at("primary.pair.widths")[3], 1.0F);
  for (const char *name: { "head.map.l2.w", "head.denoise.eps2.w",
                           "head.denoise.pair_w.w", "head.denoise.pair_d.w",
                           "head.aux.l2.w", "head.reg.out.w",
                           "head.reg.rank.w" }) {
    for (float v: p.at(name).data) {
      ASSERT_EQ(v, 0.0F) << name;
    }
  }
}

TEST(Params, InitRanges) {
  const EncoderConfig cfg;
  const ParamSet<float> p = init_params(cfg, 2);
  const auto max_abs = [&](const std::string &name) {
    float m = 0.0F;
    for (float v: p.at(name).data) {
      m = std::max(m, std::abs(v));
    }
    return static_cast<double>(m);
  };
  // K = 16 kernels, 4 heads
  const double pair_bound = 16.0 * std::sqrt(6.0 / 20.0);
  EXPECT_LE(max_abs("primary.pair.proj.w"), pair_bound);
  EXPECT_GT(max_abs("primary.pair.proj.w"), 0.8 * pair_bound);
  // 64 -> 192
  const double qkv_bound = std::sqrt(6.0 / 256.0);
  EXPECT_LE(max_abs("primary.layer0.attn.qkv.w"), qkv_bound);
  EXPECT_GT(max_abs("primary.layer0.attn.qkv.w"), 0.9 * qkv_bound);
  EXPECT_EQ(max_abs("primary.pair.proj.b"), 0.0);
}

TEST(Params, DeterministicInit) {
  EXPECT_EQ(init_params(EncoderConfig {}, 5), init_params(EncoderConfig {}, 5));
  EXPECT_NE(init_params(EncoderConfig {}, 5), init_params(EncoderConfig {}, 6));
}

TEST(Params, Groups) {
  EXPECT_EQ(group_of("embed.atom"), ParamGroup::kEmbedding);
  EXPECT_EQ(group_of("denoise.layer0.ln1.g"), ParamGroup::kDenoiseEncoder);
  EXPECT_EQ(group_of("agg.query"), ParamGroup::kAggregator);
  EXPECT_EQ(group_of("head.reg.rank.w"), ParamGroup::kDownstreamHead);
  EXPECT_THROW(group_of("mystery"), std::invalid_argument);
  EXPECT_TRUE(is_denoising_branch(ParamGroup::kSigmaEmbed));
  EXPECT_FALSE(is_denoising_branch(ParamGroup::kPrimaryEncoder));
}

TEST(Params, DroppingDenoisingBranch) {
  ParamSet<float> p = init_params(EncoderConfig {}, 1);
  ParamSet<float> kept = without_denoising_branch(p);
  for (const auto &[name, arr]: kept) {
    EXPECT_FALSE(is_denoising_branch(group_of(name))) << name;
  }
  EXPECT_EQ(kept.count("primary.layer0.ln1.g"), 1);
  EXPECT_EQ(kept.count("agg.query"), 0);
  EXPECT_EQ(checksum(kept, false), checksum(p, false));
  EXPECT_NE(checksum(p, true), checksum(kept, true));
}

TEST(Params, CheckShapes) {
  EncoderConfig cfg;
  ParamSet<float> p = init_params(cfg, 1);
  p.at("embed.atom") = diffcore::Array<float>({ 3, 3 });
  EXPECT_THROW(check_shapes(cfg, p), diffcore::ShapeMismatch);
  p = {};
  p.emplace("nope", diffcore::Array<float>({ 1 }));
  EXPECT_THROW(check_shapes(cfg, p), diffcore::ShapeMismatch);
}

}  // namespace
}  // namespace molevers::encoder
