//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/training/losses.hpp"

#include <algorithm>
#include <string>

namespace molevers::training {
namespace d = diffcore;
using diffcore::Array;

namespace {
template <typename T>
Var<T> constant_coords(d::Tape<T> &tape, const chemio::Coords &coords) {
  Array<T> a({ coords.size(), 3 });
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      a[3 * i + k] = static_cast<T>(coords[i][k]);
    }
  }
  return tape.constant(std::move(a));
}

template <typename T>
Var<T> map_cross_entropy(Var<T> logits, const corruption::CorruptedBatch &b,
                         std::size_t &correct) {
  const std::size_t classes = logits.dim(1);
  Var<T> rows = d::gather_rows(d::log_softmax(logits),
                               std::span<const std::size_t>(b.mask_idx));
  std::vector<std::uint8_t> drop(rows.numel(), 1);
  auto lv = rows.value();
  for (std::size_t k = 0; k < b.mask_idx.size(); ++k) {
    drop[k * classes + b.clean_atoms[k]] = 0;
    const auto first = lv.begin() + static_cast<long>(k * classes);
    const auto best = static_cast<std::size_t>(
        std::max_element(first, first + static_cast<long>(classes)) - first);
    correct += best == b.clean_atoms[k];
  }
  Var<T> picked = d::masked_fill(rows, std::span<const std::uint8_t>(drop), T(0));
  return d::scale(d::sum_all(picked),
                  T(-1) / static_cast<T>(b.mask_idx.size()));
}
}  // namespace

template <typename T>
Stage1Terms<T> stage1_terms(Binder<T> &p, const corruption::CorruptedBatch &b,
                            const Stage1Options &opt) {
  d::Tape<T> &tape = p.tape();
  const std::size_t n = b.atom_ids.size();
  Stage1Terms<T> out;
  out.masked = b.mask_idx.size();

  Array<T> eps1({ n, 1 });
  for (std::size_t i = 0; i < n; ++i) {
    eps1[i] = static_cast<T>(b.eps1[i]);
  }
  Var<T> eps1_v = tape.constant(eps1);

  Var<T> g;
  Var<T> noisy_atoms;
  if (opt.branching) {
    Var<T> f = encoder::encode_primary(p, b.masked_ids, b.clean_dist);
    out.map = map_cross_entropy(encoder::map_head(p, f), b, out.correct);

    Var<T> agg = opt.use_aggregator
                     ? encoder::aggregate(p, f)
                     : tape.constant(Array<T>({ 1, p.config().embed_dim }));
    agg = agg + encoder::sigma_embed(p, b.sigma);
    noisy_atoms = encoder::atom_embeddings(p, b.atom_ids) + eps1_v;
    g = encoder::encode_denoise(p, noisy_atoms, b.noisy_dist, agg);
  } else {
    noisy_atoms = encoder::atom_embeddings(p, b.masked_ids) + eps1_v;
    Var<T> tokens = d::concat<T>({ p("embed.mol"), noisy_atoms }, 0);
    g = encoder::encoder_stack(p, "primary", tokens,
                               encoder::embed_pairs(p, "primary", b.noisy_dist));
    out.map = map_cross_entropy(encoder::map_head(p, g), b, out.correct);
  }

  encoder::DenoiseOutput<T> dn =
      encoder::denoise_head(p, g, noisy_atoms, b.noisy_coords, b.noisy_dist);
  out.p_hat = dn.p_hat;
  out.x = d::mean_all(d::square(dn.eps_hat - eps1_v));
  out.p = d::mean_all(d::smooth_l1(dn.p_hat - constant_coords(tape, b.clean_coords)));
  if (n > 1) {
    std::vector<std::uint8_t> diag(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      diag[i * n + i] = 1;
    }
    Var<T> err = d::smooth_l1(dn.d_hat - tape.constant(b.clean_dist.template cast<T>()));
    out.d = d::scale(d::sum_all(d::masked_fill(err, std::span<const std::uint8_t>(diag), T(0))),
                     T(1) / static_cast<T>(n * (n - 1)));
  } else {
    out.d = tape.scalar(T(0));
  }
  out.total = out.map + d::scale(out.x, static_cast<T>(opt.alpha_x))
              + d::scale(out.p, static_cast<T>(opt.alpha_p))
              + d::scale(out.d, static_cast<T>(opt.alpha_d));
  return out;
}

PreparedMolecule prepare(const chemio::Molecule &mol) {
  if (!mol.coords) {
    throw corruption::MissingCoordinates("molecule '" + mol.smiles
                                         + "' has no coordinates");
  }
  return { encoder::token_ids(mol), encoder::pair_distance(*mol.coords) };
}

template <typename T>
Var<T> aux_loss(Binder<T> &p, const PreparedMolecule &mol,
                std::span<const double> z_targets) {
  Var<T> y = encoder::aux_head(p, encoder::encode_primary(p, mol.ids, mol.dist));
  if (y.numel() != z_targets.size()) {
    throw d::ShapeMismatch("aux_loss", y.shape(), { z_targets.size() });
  }
  Array<T> z({ z_targets.size() });
  for (std::size_t k = 0; k < z.size(); ++k) {
    z[k] = static_cast<T>(z_targets[k]);
  }
  return d::mean_all(d::square(y - p.tape().constant(std::move(z))));
}

template <typename T>
Var<T> regression_loss(Binder<T> &p, const PreparedMolecule &mol,
                       double z_target) {
  Var<T> y = encoder::downstream_head(p, encoder::encode_primary(p, mol.ids, mol.dist));
  return d::square(d::shift(y, static_cast<T>(-z_target)));
}

template <typename T>
Var<T> pair_logit(Binder<T> &p, const PreparedMolecule &m1,
                  const PreparedMolecule &m2) {
  Var<T> s1 = encoder::rank_score(p, encoder::encode_primary(p, m1.ids, m1.dist));
  Var<T> s2 = encoder::rank_score(p, encoder::encode_primary(p, m2.ids, m2.dist));
  return s2 - s1;
}

template <typename T>
Var<T> rank_bce(Var<T> logit, int label) {
  Var<T> sp = d::softplus(logit);
  return label == 0 ? sp : sp - logit;
}

#define MOLEVERS_INSTANTIATE_LOSSES(T)                                        \
  template Stage1Terms<T> stage1_terms(Binder<T> &,                           \
                                       const corruption::CorruptedBatch &,    \
                                       const Stage1Options &);                \
  template Var<T> aux_loss(Binder<T> &, const PreparedMolecule &,             \
                           std::span<const double>);                          \
  template Var<T> regression_loss(Binder<T> &, const PreparedMolecule &,      \
                                  double);                                    \
  template Var<T> pair_logit(Binder<T> &, const PreparedMolecule &,           \
                             const PreparedMolecule &);                       \
  template Var<T> rank_bce(Var<T>, int);

MOLEVERS_INSTANTIATE_LOSSES(float)
MOLEVERS_INSTANTIATE_LOSSES(double)

#undef MOLEVERS_INSTANTIATE_LOSSES

}  // namespace molevers::training
