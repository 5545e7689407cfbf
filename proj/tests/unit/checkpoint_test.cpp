//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <filesystem>

#include "molevers/training/checkpoint.hpp"
#include "molevers/training/loops.hpp"

namespace molevers::training {
namespace {

Checkpoint sample() {
  encoder::EncoderConfig cfg;
  cfg.n_layers = 1;
  cfg.embed_dim = 8;
  cfg.ffn_dim = 8;
  cfg.n_heads = 2;
  cfg.n_dist_kernels = 4;
  cfg.aux_targets = 2;
  TrainState st = init_state(cfg, 3, { .zero_head_outputs = false });
  st.aux_norm = { { 1.0, -2.5 }, { 0.5, 3.0 } };
  st.reg_norm = { { 7.25 }, { 0.125 } };
  st.step = 42;
  return to_checkpoint(st, "pretrain2");
}

TEST(Checkpoint, RoundTripIsExact) {
  const Checkpoint c = sample();
  const std::string bytes = serialize_checkpoint(c);
  const Checkpoint back = parse_checkpoint(bytes);
  EXPECT_EQ(back.encoder, c.encoder);
  EXPECT_EQ(back.stage, "pretrain2");
  EXPECT_EQ(back.aux_norm, c.aux_norm);
  EXPECT_EQ(back.reg_norm, c.reg_norm);
  EXPECT_EQ(back.meta.at("step"), 42);
  ASSERT_EQ(back.params.size(), c.params.size());
  for (const auto &[name, arr]: c.params) {
    EXPECT_EQ(back.params.at(name).shape, arr.shape) << name;
    EXPECT_EQ(back.params.at(name).data, arr.data) << name;
  }
  EXPECT_EQ(serialize_checkpoint(back), bytes);
}

TEST(Checkpoint, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "mv_ckpt_test.bin";
  const Checkpoint c = sample();
  write_checkpoint(path, c);
  const Checkpoint back = read_checkpoint(path);
  EXPECT_EQ(encoder::checksum(back.params, false),
            encoder::checksum(c.params, false));
  std::filesystem::remove(path);
}

TEST(Checkpoint, DamagedArchivesAreRejected) {
  const std::string bytes = serialize_checkpoint(sample());
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(parse_checkpoint(bad_magic), CheckpointFormatError);
  EXPECT_THROW(parse_checkpoint(bytes.substr(0, bytes.size() - 4)),
               CheckpointFormatError);
  EXPECT_THROW(parse_checkpoint(bytes.substr(0, 12)), CheckpointFormatError);
  EXPECT_THROW(parse_checkpoint(""), CheckpointFormatError);
}

TEST(Checkpoint, ShapeDisagreementWithConfigIsShapeMismatch) {
  Checkpoint c = sample();
  c.params.at("embed.atom") = diffcore::Array<float>({ 3, 3 });
  EXPECT_THROW(parse_checkpoint(serialize_checkpoint(c)),
               diffcore::ShapeMismatch);
}

TEST(Checkpoint, StateRestoresFromCheckpoint) {
  const Checkpoint c = sample();
  const TrainState st = state_from_checkpoint(c);
  EXPECT_EQ(st.encoder, c.encoder);
  EXPECT_EQ(st.reg_norm, c.reg_norm);
  EXPECT_EQ(st.step, 0U);
  EXPECT_TRUE(st.adam.empty());
}

}  // namespace
}  // namespace molevers::training
