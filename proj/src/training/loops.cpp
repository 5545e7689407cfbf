//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/training/loops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>

#include "molevers/corruption/corruption.hpp"
#include "molevers/training/losses.hpp"
#include "molevers/util/parallel.hpp"
#include "molevers/util/rng.hpp"

namespace molevers::training {
namespace d = diffcore;
using encoder::ParamSet;

namespace {
constexpr std::uint64_t kBatchStream = 0x62617463ULL;
constexpr std::uint64_t kStage2Stream = 0x73746732ULL;
constexpr std::uint64_t kRegStream = 0x72656772ULL;
constexpr std::uint64_t kPairStream = 0x70616972ULL;

std::string describe(const std::string &stage, std::size_t step,
                     double sigma) {
  char buf[160];
  if (std::isnan(sigma)) {
    std::snprintf(buf, sizeof(buf), "non-finite loss in %s at step %zu",
                  stage.c_str(), step);
  } else {
    std::snprintf(buf, sizeof(buf),
                  "non-finite loss in %s at step %zu (sigma = %.6g)",
                  stage.c_str(), step, sigma);
  }
  return buf;
}

// Result of one independent forward/backward pass.
struct Work {
  ParamSet<float> grads;
  double loss = 0.0;
};

template <typename Fn>
std::vector<Work> run_parallel(const TrainState &state, std::size_t n,
                               const Fn &fn) {
  std::vector<Work> out(n);
  parallel_for(n, [&](std::size_t i) {
    d::Tape<float> tape;
    encoder::Binder<float> p(tape, state.params, state.encoder);
    Var<float> loss = fn(i, p);
    tape.backward(loss);
    out[i].grads = p.grads();
    out[i].loss = loss.item();
  });
  return out;
}

bool all_finite(const ParamSet<float> &grads) {
  for (const auto &[name, g]: grads) {
    for (float v: g.data) {
      if (!std::isfinite(v)) {
        return false;
      }
    }
  }
  return true;
}

// Adds weight * grads into acc, in the caller's (fixed) order.
void accumulate(ParamSet<double> &acc, const ParamSet<float> &grads,
                double weight) {
  for (const auto &[name, g]: grads) {
    auto it = acc.find(name);
    if (it == acc.end()) {
      it = acc.emplace(name, d::Array<double>(g.shape)).first;
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      it->second[i] += weight * g[i];
    }
  }
}

std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(idx[i - 1], idx[pick(rng)]);
  }
  return idx;
}

void reset_optimizer(TrainState &state) {
  state.params = encoder::without_denoising_branch(state.params);
  state.adam.clear();
  state.step = 0;
}

std::vector<PreparedMolecule> prepare_all(
    const std::vector<chemio::Molecule> &mols) {
  std::vector<PreparedMolecule> out;
  out.reserve(mols.size());
  for (const auto &m: mols) {
    out.push_back(prepare(m));
  }
  return out;
}
}  // namespace

NonFiniteLoss::NonFiniteLoss(std::string stage, std::size_t step,
                             double sigma)
    : std::runtime_error(describe(stage, step, sigma)), step_(step),
      sigma_(sigma) { }

TrainState init_state(const encoder::EncoderConfig &cfg, std::uint64_t seed,
                      encoder::InitOptions options) {
  TrainState s;
  s.encoder = cfg;
  s.params = encoder::init_params(cfg, seed, options);
  return s;
}

TrainState state_from_checkpoint(const Checkpoint &ckpt) {
  TrainState s;
  s.encoder = ckpt.encoder;
  s.params = ckpt.params;
  s.aux_norm = ckpt.aux_norm;
  s.reg_norm = ckpt.reg_norm;
  return s;
}

Checkpoint to_checkpoint(const TrainState &state, std::string stage) {
  Checkpoint c;
  c.encoder = state.encoder;
  c.params = state.params;
  c.aux_norm = state.aux_norm;
  c.reg_norm = state.reg_norm;
  c.stage = std::move(stage);
  c.meta = { { "step", state.step } };
  return c;
}

std::vector<std::size_t> stage1_batch(std::size_t n_molecules,
                                      const TrainConfig &cfg,
                                      std::size_t step) {
  if (cfg.batch_size >= n_molecules) {
    std::vector<std::size_t> all(n_molecules);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  std::vector<std::size_t> idx =
      permutation(n_molecules, derive_seed(cfg.seed, { kBatchStream, step }));
  idx.resize(cfg.batch_size);
  return idx;
}

Stage1Losses stage1_step(TrainState &state,
                         const std::vector<chemio::Molecule> &data,
                         const TrainConfig &cfg) {
  if (data.empty()) {
    throw std::invalid_argument("stage 1 needs at least one molecule");
  }
  const std::size_t step = state.step;
  const std::vector<std::size_t> batch = stage1_batch(data.size(), cfg, step);
  const corruption::CorruptionConfig ccfg { cfg.mask_ratio, cfg.max_sigma,
                                            cfg.dynamic_sigma };
  const Stage1Options opt { cfg.alpha_x, cfg.alpha_p, cfg.alpha_d,
                            cfg.branching, cfg.use_aggregator };

  std::vector<corruption::CorruptedBatch> corrupted(batch.size());
  parallel_for(batch.size(), [&](std::size_t i) {
    corrupted[i] =
        corruption::corrupt(data[batch[i]], ccfg, cfg.seed, step, batch[i]);
  });

  std::vector<Stage1Losses> parts(batch.size());
  std::vector<Work> work =
      run_parallel(state, batch.size(), [&](std::size_t i, auto &p) {
        Stage1Terms<float> t = stage1_terms(p, corrupted[i], opt);
        parts[i] = { t.total.item(), t.map.item(), t.x.item(),
                     t.p.item(),     t.d.item(),
                     static_cast<double>(t.correct)
                         / static_cast<double>(t.masked) };
        return t.total;
      });

  Stage1Losses mean;
  ParamSet<double> grads;
  const double w = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (!std::isfinite(work[i].loss) || !all_finite(work[i].grads)) {
      throw NonFiniteLoss("pretrain1", step, corrupted[i].sigma);
    }
    accumulate(grads, work[i].grads, w);
    mean.total += w * parts[i].total;
    mean.map += w * parts[i].map;
    mean.x += w * parts[i].x;
    mean.p += w * parts[i].p;
    mean.d += w * parts[i].d;
    mean.map_accuracy += w * parts[i].map_accuracy;
  }
  const double lr =
      lr_schedule(step, cfg.steps, cfg.lr, cfg.poly_decay_power);
  Adam {}.step(state.params, grads, lr, state.adam);
  ++state.step;
  return mean;
}

Stage1Losses pretrain_stage1(TrainState &state,
                             const std::vector<chemio::Molecule> &data,
                             const TrainConfig &cfg, const MetricsSink &sink) {
  validate(cfg);
  Stage1Losses last;
  while (state.step < cfg.steps) {
    const std::size_t step = state.step;
    last = stage1_step(state, data, cfg);
    if (sink) {
      sink({ { "stage", "pretrain1" },
             { "step", step },
             { "lr", lr_schedule(step, cfg.steps, cfg.lr, cfg.poly_decay_power) },
             { "loss", last.total },
             { "l_map", last.map },
             { "l_x", last.x },
             { "l_p", last.p },
             { "l_d", last.d },
             { "map_accuracy", last.map_accuracy } });
    }
  }
  return last;
}

NormStats fit_norm(const std::vector<double> &values, std::size_t k) {
  if (k == 0 || values.empty() || values.size() % k != 0) {
    throw std::invalid_argument("target table is empty or ragged");
  }
  const std::size_t rows = values.size() / k;
  NormStats n;
  n.mean.assign(k, 0.0);
  n.std.assign(k, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      n.mean[c] += values[r * k + c];
    }
  }
  for (double &m: n.mean) {
    m /= static_cast<double>(rows);
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      const double dv = values[r * k + c] - n.mean[c];
      n.std[c] += dv * dv;
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    n.std[c] = std::sqrt(n.std[c] / static_cast<double>(rows));
    if (!(n.std[c] >= 1e-12)) {
      throw DegenerateStd("target column " + std::to_string(c)
                          + " has (near) zero standard deviation");
    }
  }
  return n;
}

std::vector<double> pretrain_stage2(TrainState &state,
                                    const std::vector<chemio::Molecule> &mols,
                                    const std::vector<double> &targets,
                                    const TrainConfig &cfg,
                                    const MetricsSink &sink) {
  validate(cfg);
  if (mols.empty()) {
    throw std::invalid_argument("stage 2 needs at least one molecule");
  }
  const std::size_t k = state.encoder.aux_targets;
  if (targets.size() != mols.size() * k) {
    throw d::ShapeMismatch("stage 2: " + std::to_string(targets.size())
                           + " target values for " + std::to_string(mols.size())
                           + " molecules and " + std::to_string(k)
                           + " auxiliary targets");
  }
  reset_optimizer(state);
  state.aux_norm = fit_norm(targets, k);
  std::vector<double> z(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    z[i] = (targets[i] - state.aux_norm.mean[i % k]) / state.aux_norm.std[i % k];
  }
  const std::vector<PreparedMolecule> prepared = prepare_all(mols);

  const std::size_t n = mols.size();
  const std::size_t per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t total = per_epoch * cfg.epochs;
  std::vector<double> epoch_loss;
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    const auto order = permutation(n, derive_seed(cfg.seed, { kStage2Stream, e }));
    double sum = 0.0;
    for (std::size_t s = 0; s < per_epoch; ++s) {
      const std::size_t lo = s * cfg.batch_size;
      const std::size_t hi = std::min(n, lo + cfg.batch_size);
      std::vector<Work> work =
          run_parallel(state, hi - lo, [&](std::size_t i, auto &p) {
            const std::size_t m = order[lo + i];
            return aux_loss(p, prepared[m],
                            std::span<const double>(z.data() + m * k, k));
          });
      ParamSet<double> grads;
      double loss = 0.0;
      const double w = 1.0 / static_cast<double>(hi - lo);
      for (const Work &wk: work) {
        if (!std::isfinite(wk.loss) || !all_finite(wk.grads)) {
          throw NonFiniteLoss("pretrain2", state.step, NAN);
        }
        accumulate(grads, wk.grads, w);
        loss += w * wk.loss;
      }
      Adam {}.step(state.params, grads,
                   lr_schedule(state.step, total, cfg.lr, cfg.poly_decay_power),
                   state.adam);
      ++state.step;
      sum += loss;
    }
    epoch_loss.push_back(sum / static_cast<double>(per_epoch));
    if (sink) {
      sink({ { "stage", "pretrain2" }, { "epoch", e }, { "loss", epoch_loss.back() } });
    }
  }
  return epoch_loss;
}

std::vector<EpochMetrics> finetune(TrainState &state, const FinetuneData &data,
                                   const TrainConfig &cfg,
                                   const MetricsSink &sink) {
  validate(cfg);
  if (data.train.empty() || data.train.size() != data.values.size()) {
    throw std::invalid_argument(
        "finetune needs equally many (>= 1) molecules and values");
  }
  reset_optimizer(state);
  state.reg_norm = fit_norm(data.values, 1);
  const double mu = state.reg_norm.mean[0];
  const double sd = state.reg_norm.std[0];
  const std::vector<PreparedMolecule> train = prepare_all(data.train);

  // Pair molecules resolve by their SMILES string.
  std::unordered_map<std::string, const chemio::Molecule *> lookup;
  for (const auto *pool: { &data.train, &data.pair_pool }) {
    for (const auto &m: *pool) {
      lookup.emplace(m.smiles, &m);
    }
  }
  std::unordered_map<std::string, PreparedMolecule> pair_mols;
  for (const auto &rec: data.pairs) {
    for (const std::string *s: { &rec.smiles1, &rec.smiles2 }) {
      if (pair_mols.count(*s)) {
        continue;
      }
      auto it = lookup.find(*s);
      if (it == lookup.end()) {
        throw UnresolvablePairSmiles("pair SMILES '" + *s
                                     + "' matches no available molecule");
      }
      pair_mols.emplace(*s, prepare(*it->second));
    }
  }
  const bool ranking =
      data.use_pairs && !data.pairs.empty() && cfg.beta_rank > 0.0;

  const std::size_t n = train.size();
  const std::size_t per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t total = per_epoch * cfg.epochs;
  std::vector<EpochMetrics> metrics;
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    const auto order = permutation(n, derive_seed(cfg.seed, { kRegStream, e }));
    std::vector<std::size_t> pair_order;
    if (ranking) {
      pair_order = permutation(data.pairs.size(),
                               derive_seed(cfg.seed, { kPairStream, e }));
    }
    EpochMetrics em;
    em.epoch = e;
    for (std::size_t s = 0; s < per_epoch; ++s) {
      const std::size_t lo = s * cfg.batch_size;
      const std::size_t hi = std::min(n, lo + cfg.batch_size);
      const std::size_t n_reg = hi - lo;
      const std::size_t n_pair =
          ranking ? std::min(cfg.batch_size, data.pairs.size()) : 0;
      std::vector<Work> work =
          run_parallel(state, n_reg + n_pair, [&](std::size_t i, auto &p) {
            if (i < n_reg) {
              const std::size_t m = order[lo + i];
              return regression_loss(p, train[m], (data.values[m] - mu) / sd);
            }
            const auto &rec = data.pairs[pair_order[(s * n_pair + i - n_reg)
                                                    % data.pairs.size()]];
            return rank_bce(pair_logit(p, pair_mols.at(rec.smiles1),
                                       pair_mols.at(rec.smiles2)),
                            rec.label);
          });
      ParamSet<double> grads;
      double reg = 0.0;
      double rank = 0.0;
      for (std::size_t i = 0; i < work.size(); ++i) {
        if (!std::isfinite(work[i].loss) || !all_finite(work[i].grads)) {
          throw NonFiniteLoss("finetune", state.step, NAN);
        }
        if (i < n_reg) {
          const double w = 1.0 / static_cast<double>(n_reg);
          accumulate(grads, work[i].grads, w);
          reg += w * work[i].loss;
        } else {
          const double w = cfg.beta_rank / static_cast<double>(n_pair);
          accumulate(grads, work[i].grads, w);
          rank += work[i].loss / static_cast<double>(n_pair);
        }
      }
      Adam {}.step(state.params, grads,
                   lr_schedule(state.step, total, cfg.lr, cfg.poly_decay_power),
                   state.adam);
      ++state.step;
      em.reg_loss += reg / static_cast<double>(per_epoch);
      em.rank_loss += rank / static_cast<double>(per_epoch);
    }
    em.loss = em.reg_loss + cfg.beta_rank * em.rank_loss;
    metrics.push_back(em);
    if (sink) {
      sink({ { "stage", "finetune" },
             { "epoch", e },
             { "loss", em.loss },
             { "reg_loss", em.reg_loss },
             { "rank_loss", em.rank_loss } });
    }
  }
  return metrics;
}

std::vector<double> predict(const TrainState &state,
                            const std::vector<chemio::Molecule> &mols) {
  const double mu = state.reg_norm.empty() ? 0.0 : state.reg_norm.mean[0];
  const double sd = state.reg_norm.empty() ? 1.0 : state.reg_norm.std[0];
  std::vector<double> out(mols.size());
  parallel_for(mols.size(), [&](std::size_t i) {
    PreparedMolecule m = prepare(mols[i]);
    d::Tape<float> tape;
    encoder::Binder<float> p(tape, state.params, state.encoder, false);
    const double z =
        encoder::downstream_head(p, encoder::encode_primary(p, m.ids, m.dist))
            .item();
    out[i] = z * sd + mu;
  });
  return out;
}

std::vector<double> predict_aux(const TrainState &state,
                                const std::vector<chemio::Molecule> &mols) {
  const std::size_t k = state.encoder.aux_targets;
  std::vector<double> out(mols.size() * k);
  parallel_for(mols.size(), [&](std::size_t i) {
    PreparedMolecule m = prepare(mols[i]);
    d::Tape<float> tape;
    encoder::Binder<float> p(tape, state.params, state.encoder, false);
    auto y = encoder::aux_head(p, encoder::encode_primary(p, m.ids, m.dist))
                 .value();
    for (std::size_t c = 0; c < k; ++c) {
      const double mu = state.aux_norm.empty() ? 0.0 : state.aux_norm.mean[c];
      const double sd = state.aux_norm.empty() ? 1.0 : state.aux_norm.std[c];
      out[i * k + c] = y[c] * sd + mu;
    }
  });
  return out;
}

}  // namespace molevers::training
