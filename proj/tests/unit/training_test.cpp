//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "molevers/corruption/corruption.hpp"
#include "molevers/training/loops.hpp"
#include "molevers/training/losses.hpp"
#include "support/grad_suite.hpp"
#include "support/molecules.hpp"

namespace molevers::training {
namespace {
namespace d = diffcore;
using encoder::EncoderConfig;
using encoder::ParamSet;

EncoderConfig small_config() {
  EncoderConfig cfg;
  cfg.n_layers = 2;
  cfg.embed_dim = 16;
  cfg.ffn_dim = 32;
  cfg.n_heads = 2;
  cfg.n_dist_kernels = 8;
  cfg.aux_targets = 2;
  return cfg;
}

TrainConfig quick_config() {
  TrainConfig cfg;
  cfg.lr = 1e-3;
  cfg.steps = 4;
  cfg.epochs = 2;
  cfg.batch_size = 4;
  cfg.seed = 11;
  return cfg;
}

bool same_params(const ParamSet<float> &a, const ParamSet<float> &b) {
  if (a.size() != b.size()) {
    return false;
  }
  for (const auto &[name, arr]: a) {
    auto it = b.find(name);
    if (it == b.end() || it->second.shape != arr.shape
        || it->second.data != arr.data) {
      return false;
    }
  }
  return true;
}

TEST(LrSchedule, PolynomialDecay) {
  EXPECT_DOUBLE_EQ(lr_schedule(0, 100, 1e-3, 1.0), 1e-3);
  EXPECT_DOUBLE_EQ(lr_schedule(100, 100, 1e-3, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(lr_schedule(50, 100, 1e-3, 1.0), 5e-4);
  EXPECT_DOUBLE_EQ(lr_schedule(50, 100, 1e-3, 2.0), 2.5e-4);
  EXPECT_DOUBLE_EQ(lr_schedule(150, 100, 1e-3, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(lr_schedule(0, 0, 1e-3, 1.0), 0.0);
}

TEST(Adam, MatchesHandTraceOverThreeSteps) {
  ParamSet<float> params;
  params.emplace("w", d::Array<float>({ 1 }, { 0.5F }));
  AdamState state;
  const double grads[] = { 0.1, -0.2, 0.3 };
  // Bias-corrected Adam with beta1 0.9, beta2 0.999, eps 1e-8, lr 0.01.
  const double expected[] = { 0.4900000009999999, 0.49366103603884887,
                              0.49022862539477424 };
  for (int t = 0; t < 3; ++t) {
    ParamSet<double> g;
    g.emplace("w", d::Array<double>({ 1 }, { grads[t] }));
    Adam {}.step(params, g, 0.01, state);
    EXPECT_NEAR(params.at("w")[0], expected[t], 1e-7) << "step " << t + 1;
  }
  EXPECT_EQ(state.at("w").t, 3U);
  EXPECT_EQ(state.at("w").m.shape, params.at("w").shape);
}

TEST(Adam, LeavesParametersWithoutGradientsAlone) {
  ParamSet<float> params;
  params.emplace("a", d::Array<float>({ 2 }, { 1.0F, 2.0F }));
  params.emplace("b", d::Array<float>({ 1 }, { 3.0F }));
  ParamSet<double> g;
  g.emplace("a", d::Array<double>({ 2 }, { 1.0, -1.0 }));
  AdamState state;
  Adam {}.step(params, g, 0.1, state);
  EXPECT_EQ(params.at("b")[0], 3.0F);
  EXPECT_EQ(state.count("b"), 0U);
  EXPECT_NEAR(params.at("a")[0], 0.9F, 1e-6);
  EXPECT_NEAR(params.at("a")[1], 2.1F, 1e-6);
}

corruption::CorruptedBatch batch_for(const chemio::Molecule &mol,
                                     std::uint64_t seed) {
  return corruption::corrupt(mol, {}, seed, 0, 0);
}

TEST(Stage1, MapLossIsLogVocabularyAtInit) {
  const auto cfg = small_config();
  const auto params = encoder::init_params(cfg, 3);
  for (const auto &mol: testing::random_molecules(10, 5)) {
    d::Tape<float> tape;
    encoder::Binder<float> p(tape, params, cfg);
    auto t = stage1_terms(p, batch_for(mol, 1), {});
    EXPECT_NEAR(t.map.item(), std::log(9.0), 0.1 * std::log(9.0));
  }
}

TEST(Stage1, ZeroSigmaGivesZeroCoordinateLosses) {
  const auto cfg = small_config();
  const auto params = encoder::init_params(cfg, 3);
  for (const auto &mol: testing::random_molecules(5, 6)) {
    auto b = batch_for(mol, 2);
    b.sigma = 0.0;
    std::fill(b.eps1.begin(), b.eps1.end(), 0.0);
    for (auto &v: b.eps2) {
      v = { 0.0, 0.0, 0.0 };
    }
    b.noisy_coords = b.clean_coords;
    b.noisy_dist = b.clean_dist;
    d::Tape<float> tape;
    encoder::Binder<float> p(tape, params, cfg);
    auto t = stage1_terms(p, b, {});
    EXPECT_EQ(t.p.item(), 0.0F);
    EXPECT_EQ(t.d.item(), 0.0F);
    EXPECT_EQ(t.x.item(), 0.0F);
  }
}

TEST(Stage1, TotalIsWeightedSumOfTerms) {
  const auto cfg = small_config();
  const auto params = encoder::init_params(cfg, 4, { .zero_head_outputs = false });
  Stage1Options opt;
  opt.alpha_x = 0.5;
  opt.alpha_p = 2.0;
  opt.alpha_d = 3.0;
  for (bool branching: { true, false }) {
    opt.branching = branching;
    for (const auto &mol: testing::random_molecules(4, 7)) {
      d::Tape<double> tape;
      const auto pd = encoder::cast_params<double>(params);
      encoder::Binder<double> p(tape, pd, cfg);
      auto t = stage1_terms(p, batch_for(mol, 3), opt);
      const double sum = t.map.item() + 0.5 * t.x.item() + 2.0 * t.p.item()
                         + 3.0 * t.d.item();
      EXPECT_NEAR(t.total.item(), sum, 1e-6 * std::max(1.0, std::abs(sum)));
    }
  }
}

TEST(Stage1, SingleAtomMoleculeHasZeroDistanceLoss) {
  const auto cfg = small_config();
  const auto params = encoder::init_params(cfg, 4, { .zero_head_outputs = false });
  chemio::Molecule mol;
  mol.atoms = { chemio::Element::kO };
  mol.coords = chemio::Coords { { 0.0, 0.0, 0.0 } };
  d::Tape<float> tape;
  encoder::Binder<float> p(tape, params, cfg);
  auto t = stage1_terms(p, batch_for(mol, 1), {});
  EXPECT_EQ(t.d.item(), 0.0F);
  EXPECT_EQ(t.masked, 1U);
  EXPECT_TRUE(std::isfinite(t.total.item()));
}

// Gradient of the denoising terms alone with respect to primary-encoder
// parameters.
double denoise_grad_on_primary(const EncoderConfig &cfg,
                               const ParamSet<float> &params,
                               const corruption::CorruptedBatch &b,
                               bool use_aggregator) {
  d::Tape<double> tape;
  const auto pd = encoder::cast_params<double>(params);
  encoder::Binder<double> p(tape, pd, cfg);
  Stage1Options opt;
  opt.use_aggregator = use_aggregator;
  auto t = stage1_terms(p, b, opt);
  tape.backward(t.x + t.p + t.d);
  double total = 0.0;
  for (const auto &[name, g]: p.grads()) {
    if (encoder::group_of(name) == encoder::ParamGroup::kPrimaryEncoder) {
      for (double v: g.data) {
        total += std::abs(v);
      }
    }
  }
  return total;
}

TEST(Stage1, DenoisingGradientReachesPrimaryEncoderThroughAggregator) {
  const auto cfg = small_config();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto params =
        encoder::init_params(cfg, seed, { .zero_head_outputs = false });
    const auto mol = testing::random_molecules(1, 100 + seed)[0];
    const auto b = batch_for(mol, seed);
    EXPECT_GT(denoise_grad_on_primary(cfg, params, b, true), 0.0)
        << "seed " << seed;
    EXPECT_EQ(denoise_grad_on_primary(cfg, params, b, false), 0.0)
        << "seed " << seed;
  }
}

TEST(Stage1, BatchSelection) {
  TrainConfig cfg = quick_config();
  cfg.batch_size = 8;
  EXPECT_EQ(stage1_batch(5, cfg, 0),
            (std::vector<std::size_t> { 0, 1, 2, 3, 4 }));
  cfg.batch_size = 3;
  const auto a = stage1_batch(20, cfg, 7);
  EXPECT_EQ(a, stage1_batch(20, cfg, 7));
  EXPECT_NE(a, stage1_batch(20, cfg, 8));
  EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 3U);
  for (std::size_t i: a) {
    EXPECT_LT(i, 20U);
  }
}

TEST(Stage1, RunsAreBitwiseReproducible) {
  const auto mols = testing::random_molecules(6, 8);
  const TrainConfig cfg = quick_config();
  std::vector<std::vector<double>> traj(2);
  std::vector<TrainState> states;
  for (int r = 0; r < 2; ++r) {
    TrainState st = init_state(small_config(), 9);
    pretrain_stage1(st, mols, cfg, [&](const nlohmann::json &j) {
      traj[r].push_back(j.at("loss").get<double>());
    });
    EXPECT_EQ(st.step, cfg.steps);
    states.push_back(std::move(st));
  }
  EXPECT_EQ(traj[0].size(), cfg.steps);
  EXPECT_EQ(traj[0], traj[1]);
  EXPECT_TRUE(same_params(states[0].params, states[1].params));
  EXPECT_EQ(encoder::checksum(states[0].params, false),
            encoder::checksum(states[1].params, false));
}

TEST(Stage1, TrainingLowersTheLoss) {
  const auto mols = testing::random_molecules(4, 12);
  TrainConfig cfg = quick_config();
  cfg.steps = 40;
  cfg.max_sigma = 1.0;
  cfg.lr = 3e-3;
  TrainState st = init_state(small_config(), 2);
  std::vector<double> losses;
  pretrain_stage1(st, mols, cfg, [&](const nlohmann::json &j) {
    losses.push_back(j.at("l_map").get<double>());
  });
  const double first = (losses[0] + losses[1] + losses[2]) / 3.0;
  const double last = (losses[37] + losses[38] + losses[39]) / 3.0;
  EXPECT_LT(last, first);
}

TEST(Stage1, NonFiniteLossAbortsWithStepAndSigma) {
  const auto mols = testing::random_molecules(3, 13);
  TrainConfig cfg = quick_config();
  TrainState st = init_state(small_config(), 2);
  stage1_step(st, mols, cfg);
  auto &emb = st.params.at("embed.atom");
  std::fill(emb.data.begin(), emb.data.end(), std::nanf(""));
  try {
    stage1_step(st, mols, cfg);
    FAIL() << "expected NonFiniteLoss";
  } catch (const NonFiniteLoss &e) {
    EXPECT_EQ(e.step(), 1U);
    EXPECT_GE(e.sigma(), 0.0);
    EXPECT_LE(e.sigma(), cfg.max_sigma);
    EXPECT_NE(std::string(e.what()).find("step 1"), std::string::npos);
  }
}

TEST(Stage1, RequiresCoordinates) {
  chemio::Molecule mol;
  mol.atoms = { chemio::Element::kC, chemio::Element::kO };
  TrainState st = init_state(small_config(), 2);
  EXPECT_THROW(stage1_step(st, { mol }, quick_config()),
               corruption::MissingCoordinates);
}

TEST(FitNorm, PopulationStatisticsPerColumn) {
  const NormStats n = fit_norm({ 1.0, 10.0, 3.0, 30.0 }, 2);
  EXPECT_DOUBLE_EQ(n.mean[0], 2.0);
  EXPECT_DOUBLE_EQ(n.mean[1], 20.0);
  EXPECT_DOUBLE_EQ(n.std[0], 1.0);
  EXPECT_DOUBLE_EQ(n.std[1], 10.0);
  EXPECT_THROW(fit_norm({ 1.0, 5.0, 1.0, 6.0 }, 2), DegenerateStd);
  EXPECT_THROW(fit_norm({ 1.0, 2.0, 3.0 }, 2), std::invalid_argument);
}

TEST(Stage2, PerfectPredictorHasZeroLoss) {
  const auto cfg = small_config();
  const auto params = encoder::init_params(cfg, 1);
  const auto prepared = prepare(testing::random_molecules(1, 3)[0]);
  d::Tape<float> tape;
  encoder::Binder<float> p(tape, params, cfg);
  const double z[] = { 0.0, 0.0 };
  EXPECT_EQ(aux_loss(p, prepared, std::span<const double>(z, 2)).item(), 0.0F);
}

TEST(Stage2, ConstantTargetColumnIsDegenerate) {
  const auto mols = testing::random_molecules(4, 3);
  TrainState st = init_state(small_config(), 1);
  const std::vector<double> targets = { 1.0, 2.0, 1.0, 3.0, 1.0, 4.0, 1.0, 5.0 };
  EXPECT_THROW(pretrain_stage2(st, mols, targets, quick_config()),
               DegenerateStd);
}

TEST(Stage2, RejectsWrongTargetCount) {
  const auto mols = testing::random_molecules(4, 3);
  TrainState st = init_state(small_config(), 1);
  EXPECT_THROW(pretrain_stage2(st, mols, { 1.0, 2.0, 3.0 }, quick_config()),
               d::ShapeMismatch);
}

std::vector<double> aux_targets(const std::vector<chemio::Molecule> &mols) {
  std::vector<double> t;
  for (const auto &m: mols) {
    const auto c = chemio::element_counts(m);
    t.push_back(testing::synthetic_property(m));
    t.push_back(2.0 * c[chemio::element_id(chemio::Element::kO)]
                - c[chemio::element_id(chemio::Element::kN)]);
  }
  return t;
}

double normalized_aux_mse(const TrainState &st,
                          const std::vector<chemio::Molecule> &mols,
                          const std::vector<double> &targets) {
  const auto pred = predict_aux(st, mols);
  const std::size_t k = st.encoder.aux_targets;
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = (pred[i] - targets[i]) / st.aux_norm.std[i % k];
    total += e * e;
  }
  return total / static_cast<double>(pred.size());
}

TEST(Stage2, FiftyEpochsReduceTrainLossTenfold) {
  const auto mols = testing::random_molecules(64, 21);
  const auto targets = aux_targets(mols);
  TrainState st = init_state(small_config(), 5);
  st.aux_norm = fit_norm(targets, 2);
  const double before = normalized_aux_mse(st, mols, targets);
  EXPECT_NEAR(before, 1.0, 1e-6);  // zero heads predict the mean

  TrainConfig cfg = quick_config();
  cfg.epochs = 50;
  cfg.batch_size = 8;
  cfg.lr = 1e-3;
  const auto per_epoch = pretrain_stage2(st, mols, targets, cfg);
  EXPECT_EQ(per_epoch.size(), 50U);
  const double after = normalized_aux_mse(st, mols, targets);
  EXPECT_LE(after, before / 10.0) << "before " << before << " after " << after;
}

TEST(Stage2, DiscardsTheDenoisingBranchWithoutTouchingIt) {
  const auto mols = testing::random_molecules(8, 22);
  TrainState st = init_state(small_config(), 5);
  pretrain_stage1(st, mols, quick_config());
  const TrainState stage1 = st;
  const auto denoise_sum = encoder::checksum(stage1.params, true);

  pretrain_stage2(st, mols, aux_targets(mols), quick_config());
  EXPECT_EQ(encoder::checksum(stage1.params, true), denoise_sum);
  EXPECT_EQ(encoder::checksum(st.params, true),
            encoder::checksum(ParamSet<float> {}, true));
  EXPECT_NE(encoder::checksum(st.params, false),
            encoder::checksum(encoder::without_denoising_branch(stage1.params),
                              false));
  for (const auto &[name, arr]: st.params) {
    EXPECT_FALSE(encoder::is_denoising_branch(encoder::group_of(name))) << name;
  }
}

TEST(Stage2, LossesNeverProduceDenoisingGradients) {
  const auto cfg = small_config();
  const auto params = encoder::init_params(cfg, 6, { .zero_head_outputs = false });
  const auto mols = testing::random_molecules(2, 23);
  const auto a = prepare(mols[0]);
  const auto b = prepare(mols[1]);
  d::Tape<float> tape;
  encoder::Binder<float> p(tape, params, cfg);
  const double z[] = { 0.5, -0.5 };
  auto loss = aux_loss(p, a, std::span<const double>(z, 2))
              + regression_loss(p, a, 0.3)
              + rank_bce(pair_logit(p, a, b), 1);
  tape.backward(loss);
  for (const auto &[name, g]: p.grads()) {
    EXPECT_FALSE(encoder::is_denoising_branch(encoder::group_of(name))) << name;
  }
}

FinetuneData finetune_data(std::uint64_t seed, std::size_t n = 8) {
  FinetuneData data;
  data.train = testing::random_molecules(n, seed);
  for (const auto &m: data.train) {
    data.values.push_back(testing::synthetic_property(m));
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto &a = data.train[i];
    const auto &b = data.train[i + 1];
    data.pairs.push_back({ a.smiles, b.smiles,
                           data.values[i] > data.values[i + 1] ? 0 : 1 });
  }
  return data;
}

TEST(Finetune, BetaZeroIsPlainRegression) {
  FinetuneData with_pairs = finetune_data(30);
  with_pairs.use_pairs = true;
  FinetuneData plain = with_pairs;
  plain.pairs.clear();
  plain.use_pairs = false;

  TrainConfig cfg = quick_config();
  cfg.beta_rank = 0.0;
  TrainState a = init_state(small_config(), 7);
  TrainState b = a;
  const auto ma = finetune(a, with_pairs, cfg);
  const auto mb = finetune(b, plain, cfg);
  EXPECT_TRUE(same_params(a.params, b.params));
  ASSERT_EQ(ma.size(), mb.size());
  for (std::size_t e = 0; e < ma.size(); ++e) {
    EXPECT_EQ(ma[e].loss, mb[e].loss);
  }
}

TEST(Finetune, ClosedGateIgnoresPairs) {
  FinetuneData gated = finetune_data(31);
  gated.use_pairs = false;
  FinetuneData plain = gated;
  plain.pairs.clear();
  TrainState a = init_state(small_config(), 7);
  TrainState b = a;
  finetune(a, gated, quick_config());
  finetune(b, plain, quick_config());
  EXPECT_TRUE(same_params(a.params, b.params));
}

TEST(Finetune, OpenGateChangesTraining) {
  FinetuneData open = finetune_data(32);
  open.use_pairs = true;
  FinetuneData plain = open;
  plain.pairs.clear();
  TrainState a = init_state(small_config(), 7, { .zero_head_outputs = false });
  TrainState b = a;
  const auto m = finetune(a, open, quick_config());
  finetune(b, plain, quick_config());
  EXPECT_FALSE(same_params(a.params, b.params));
  EXPECT_GT(m.back().rank_loss, 0.0);
}

TEST(Finetune, FlippingLabelsAndSwappingOrderKeepsBce) {
  const auto cfg = small_config();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto params =
        encoder::init_params(cfg, seed, { .zero_head_outputs = false });
    const auto mols = testing::random_molecules(2, 40 + seed);
    const auto a = prepare(mols[0]);
    const auto b = prepare(mols[1]);
    for (int label: { 0, 1 }) {
      d::Tape<double> tape;
      const auto pd = encoder::cast_params<double>(params);
      encoder::Binder<double> p(tape, pd, cfg);
      const double fwd = rank_bce(pair_logit(p, a, b), label).item();
      const double rev = rank_bce(pair_logit(p, b, a), 1 - label).item();
      EXPECT_NEAR(fwd, rev, 1e-12);
    }
  }
}

TEST(Finetune, RankBceMatchesDirectFormula) {
  d::Tape<double> tape;
  for (double l: { -30.0, -2.0, 0.0, 0.7, 25.0 }) {
    for (int y: { 0, 1 }) {
      const double s = 1.0 / (1.0 + std::exp(-l));
      const double direct = -(y * std::log(s) + (1 - y) * std::log(1.0 - s));
      const double got = rank_bce(tape.scalar(l), y).item();
      if (std::isfinite(direct)) {
        EXPECT_NEAR(got, direct, 1e-6 * std::max(1.0, direct));
      }
    }
  }
}

TEST(Finetune, UnresolvablePairSmilesIsReported) {
  FinetuneData data = finetune_data(33);
  data.use_pairs = true;
  data.pairs.push_back({ data.train[0].smiles, "not-a-molecule", 1 });
  TrainState st = init_state(small_config(), 7);
  EXPECT_THROW(finetune(st, data, quick_config()), UnresolvablePairSmiles);
}

TEST(Finetune, PairsMayReferToThePool) {
  FinetuneData data = finetune_data(34);
  data.pair_pool = testing::random_molecules(2, 35);
  data.pairs.push_back({ data.pair_pool[0].smiles, data.pair_pool[1].smiles, 0 });
  data.use_pairs = true;
  TrainState st = init_state(small_config(), 7);
  EXPECT_NO_THROW(finetune(st, data, quick_config()));
}

TEST(Finetune, PredictionsAreInRawUnits) {
  FinetuneData data = finetune_data(36);
  TrainState st = init_state(small_config(), 7);
  st.reg_norm = fit_norm(data.values, 1);
  for (double y: predict(st, data.train)) {
    EXPECT_DOUBLE_EQ(y, st.reg_norm.mean[0]);  // zero heads predict z = 0
  }
  st = init_state(small_config(), 7, { .zero_head_outputs = false });
  st.reg_norm = { { 3.0 }, { 0.5 } };
  const auto pred = predict(st, data.train);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto m = prepare(data.train[i]);
    d::Tape<float> tape;
    encoder::Binder<float> p(tape, st.params, st.encoder, false);
    const double z =
        encoder::downstream_head(p, encoder::encode_primary(p, m.ids, m.dist)).item();
    EXPECT_DOUBLE_EQ(pred[i], 3.0 + 0.5 * z);
  }
}

TEST(Finetune, ReducesRegressionLoss) {
  FinetuneData data = finetune_data(37, 16);
  TrainState st = init_state(small_config(), 8);
  TrainConfig cfg = quick_config();
  cfg.epochs = 30;
  cfg.lr = 2e-3;
  const auto m = finetune(st, data, cfg);
  EXPECT_EQ(m.size(), 30U);
  EXPECT_LT(m.back().reg_loss, 0.5 * m.front().reg_loss);
  EXPECT_EQ(st.step, 30U * 4U);
}

TEST(LossGradients, FullObjectivesMatchFiniteDifferences) {
  const auto cfg = testing::tiny_config();
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto mol = testing::random_molecules(1, 200 + seed, 4, 5)[0];
    const auto other = testing::random_molecules(1, 300 + seed, 4, 5)[0];
    corruption::CorruptionConfig cc;
    cc.max_sigma = 0.5;
    const auto b = corruption::corrupt(mol, cc, seed, 0, 0);
    for (bool branching: { true, false }) {
      Stage1Options opt;
      opt.branching = branching;
      opt.alpha_p = 1.5;
      const double err = testing::gradcheck_params(
          cfg, testing::random_params(cfg, seed),
          [&](encoder::Binder<double> &p) { return stage1_terms(p, b, opt).total; });
      EXPECT_LT(err, 1e-4) << "stage 1, seed " << seed << " branching "
                           << branching;
    }
    const auto pa = prepare(mol);
    const auto pb = prepare(other);
    const double z[] = { 0.4, -1.1 };
    const double err = testing::gradcheck_params(
        cfg, testing::random_params(cfg, seed), [&](encoder::Binder<double> &p) {
          return aux_loss(p, pa, std::span<const double>(z, 2))
                 + regression_loss(p, pa, 0.7)
                 + d::scale(rank_bce(pair_logit(p, pa, pb), 1), 0.5);
        });
    EXPECT_LT(err, 1e-4) << "stage 2 / finetune, seed " << seed;
  }
}

}  // namespace
}  // namespace molevers::training
