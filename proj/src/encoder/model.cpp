//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/encoder/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace molevers::encoder {
namespace d = diffcore;

namespace {
template <typename T>
Var<T> linear(Binder<T> &p, const std::string &prefix, Var<T> x) {
  return d::matmul(x, p(prefix + ".w")) + p(prefix + ".b");
}

template <typename T>
Var<T> norm(Binder<T> &p, const std::string &prefix, Var<T> x) {
  return d::layer_norm(x) * p(prefix + ".g") + p(prefix + ".b");
}

// (L, C) -> (H, L, D)
template <typename T>
Var<T> split_heads(Var<T> x, std::size_t heads) {
  const std::size_t l = x.dim(0);
  const std::size_t c = x.dim(1);
  return d::permute(d::reshape(x, { l, heads, c / heads }), { 1, 0, 2 });
}

// (H, L, D) -> (L, C)
template <typename T>
Var<T> merge_heads(Var<T> x) {
  const std::size_t h = x.dim(0);
  const std::size_t l = x.dim(1);
  const std::size_t dh = x.dim(2);
  return d::reshape(d::permute(x, { 1, 0, 2 }), { l, h * dh });
}

// Scaled dot-product attention of per-head queries (H, Lq, D) against keys
// and values (H, Lk, D), with an optional additive bias (H, Lq, Lk).
template <typename T>
Var<T> attend(Var<T> q, Var<T> k, Var<T> v, const Var<T> *bias) {
  const T inv = T(1) / std::sqrt(static_cast<T>(q.dim(2)));
  Var<T> scores = d::scale(d::matmul(q, d::permute(k, { 0, 2, 1 })), inv);
  if (bias != nullptr) {
    scores = scores + *bias;
  }
  return d::matmul(d::softmax(scores), v);
}

template <typename T>
Var<T> mlp_readout(Binder<T> &p, const std::string &head, Var<T> features,
                   const std::string &out) {
  Var<T> token = d::slice(features, 0, 0, 1);
  Var<T> h = norm(p, head + ".ln", token);
  h = d::gelu(linear(p, head + ".l1", h));
  return d::reshape(linear(p, head + "." + out, h),
                    { p(head + "." + out + ".b").numel() });
}

// Fixed Gaussian basis used by the denoising head, (n*n, k).
template <typename T>
Array<T> fixed_rbf(const Array<double> &dist, std::size_t k) {
  const std::size_t pairs = dist.size();
  Array<T> out({ pairs, k });
  for (std::size_t i = 0; i < pairs; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double mu =
          k == 1 ? 0.0 : 12.0 * static_cast<double>(j) / static_cast<double>(k - 1);
      const double z = dist[i] - mu;
      out[i * k + j] = static_cast<T>(std::exp(-0.5 * z * z));
    }
  }
  return out;
}

void check_coords(const chemio::Coords &coords) {
  for (const auto &v: coords) {
    for (double c: v) {
      if (!std::isfinite(c)) {
        throw NonFiniteCoordinate("coordinates contain a non-finite value");
      }
    }
  }
}
}  // namespace

template <typename T>
Var<T> Binder<T>::operator()(const std::string &name) {
  auto it = bound_.find(name);
  if (it != bound_.end()) {
    return it->second;
  }
  auto pit = params_->find(name);
  if (pit == params_->end()) {
    throw std::out_of_range("missing parameter '" + name + "'");
  }
  Var<T> v = trainable_ ? tape_->variable(pit->second)
                        : tape_->constant(pit->second);
  bound_.emplace(name, v);
  return v;
}

template <typename T>
ParamSet<T> Binder<T>::grads() const {
  ParamSet<T> out;
  for (const auto &[name, v]: bound_) {
    out.emplace(name, tape_->grad(v));
  }
  return out;
}

Array<double> pair_distance(const chemio::Coords &coords) {
  check_coords(coords);
  const std::size_t n = coords.size();
  Array<double> out({ n, n });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = coords[i][0] - coords[j][0];
      const double dy = coords[i][1] - coords[j][1];
      const double dz = coords[i][2] - coords[j][2];
      const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
      out[i * n + j] = r;
      out[j * n + i] = r;
    }
  }
  return out;
}

std::vector<std::size_t> token_ids(const chemio::Molecule &mol,
                                   std::span<const std::size_t> masked) {
  std::vector<std::size_t> ids;
  ids.reserve(mol.atoms.size());
  for (chemio::Element e: mol.atoms) {
    ids.push_back(chemio::element_id(e));
  }
  for (std::size_t i: masked) {
    if (i >= ids.size()) {
      throw std::out_of_range("mask position " + std::to_string(i)
                              + " outside molecule of "
                              + std::to_string(ids.size()) + " atoms");
    }
    ids[i] = kMaskToken;
  }
  return ids;
}

template <typename T>
Var<T> embed_pairs(Binder<T> &p, std::string_view branch,
                   const Array<double> &dist) {
  if (dist.shape.size() != 2 || dist.shape[0] != dist.shape[1]) {
    throw d::ShapeMismatch("embed_pairs: distance matrix must be square, got "
                           + d::shape_string(dist.shape));
  }
  const std::string b(branch);
  const std::size_t n = dist.shape[0];
  const std::size_t heads = p.config().n_heads;
  Tape<T> &tape = p.tape();

  Var<T> dv = tape.constant(Array<T>({ n * n, 1 }, dist.template cast<T>().data));
  Var<T> z = (dv - p(b + ".pair.means")) / p(b + ".pair.widths");
  Var<T> kernels = d::exp(d::scale(d::square(z), T(-0.5)));
  Var<T> pair = linear(p, b + ".pair.proj", kernels);  // (n*n, H)
  pair = d::permute(d::reshape(pair, { n, n, heads }), { 2, 0, 1 });

  Var<T> null = d::reshape(p(b + ".pair.null"), { heads, 1, 1 });
  Var<T> top = d::broadcast_to(null, { heads, 1, n + 1 });
  Var<T> left = d::broadcast_to(null, { heads, n, 1 });
  Var<T> body = d::concat<T>({ left, pair }, 2);
  return d::concat<T>({ top, body }, 1);
}

template <typename T>
Var<T> encoder_stack(Binder<T> &p, std::string_view branch, Var<T> tokens,
                     Var<T> bias) {
  const EncoderConfig &cfg = p.config();
  const std::size_t c = cfg.embed_dim;
  if (tokens.rank() != 2 || tokens.dim(1) != c) {
    throw d::ShapeMismatch("encoder_stack tokens", tokens.shape(),
                           { tokens.rank() ? tokens.dim(0) : 0, c });
  }
  const std::size_t l = tokens.dim(0);
  const d::Shape bias_shape { cfg.n_heads, l, l };
  if (bias.shape() != bias_shape) {
    throw d::ShapeMismatch("encoder_stack bias", bias.shape(), bias_shape);
  }

  Var<T> x = tokens;
  for (std::size_t i = 0; i < cfg.n_layers; ++i) {
    const std::string pre =
        std::string(branch) + ".layer" + std::to_string(i);
    Var<T> h = norm(p, pre + ".ln1", x);
    Var<T> qkv = linear(p, pre + ".attn.qkv", h);
    Var<T> q = split_heads(d::slice(qkv, 1, 0, c), cfg.n_heads);
    Var<T> k = split_heads(d::slice(qkv, 1, c, 2 * c), cfg.n_heads);
    Var<T> v = split_heads(d::slice(qkv, 1, 2 * c, 3 * c), cfg.n_heads);
    Var<T> att = merge_heads(attend(q, k, v, &bias));
    x = x + linear(p, pre + ".attn.out", att);

    h = norm(p, pre + ".ln2", x);
    h = linear(p, pre + ".ffn.out", d::gelu(linear(p, pre + ".ffn.in", h)));
    x = x + h;
  }
  return x;
}

template <typename T>
Var<T> atom_embeddings(Binder<T> &p, std::span<const std::size_t> ids) {
  if (ids.empty()) {
    throw d::ShapeMismatch("atom_embeddings: empty molecule");
  }
  return d::gather_rows(p("embed.atom"), ids);
}

template <typename T>
Var<T> encode_primary(Binder<T> &p, std::span<const std::size_t> ids,
                      const Array<double> &dist) {
  if (ids.size() > p.config().max_atoms) {
    throw d::ShapeMismatch("encode_primary: " + std::to_string(ids.size())
                           + " atoms exceed max_atoms "
                           + std::to_string(p.config().max_atoms));
  }
  if (dist.shape != d::Shape { ids.size(), ids.size() }) {
    throw d::ShapeMismatch("encode_primary distances", dist.shape,
                           { ids.size(), ids.size() });
  }
  Var<T> tokens = d::concat<T>({ p("embed.mol"), atom_embeddings(p, ids) }, 0);
  Var<T> bias = embed_pairs(p, "primary", dist);
  return encoder_stack(p, "primary", tokens, bias);
}

template <typename T>
Var<T> map_head(Binder<T> &p, Var<T> features) {
  Var<T> atoms = d::slice(features, 0, 1, features.dim(0));
  Var<T> h = norm(p, "head.map.ln", atoms);
  h = d::gelu(linear(p, "head.map.l1", h));
  return linear(p, "head.map.l2", h);
}

template <typename T>
Var<T> aggregate(Binder<T> &p, Var<T> features) {
  const std::size_t heads = p.config().n_heads;
  Var<T> query = p("agg.query");
  Var<T> h = norm(p, "agg.ln", features);
  Var<T> q = split_heads(linear(p, "agg.q", query), heads);
  Var<T> k = split_heads(linear(p, "agg.k", h), heads);
  Var<T> v = split_heads(linear(p, "agg.v", h), heads);
  Var<T> pooled = merge_heads(attend<T>(q, k, v, nullptr));
  return query + linear(p, "agg.out", pooled);
}

template <typename T>
Var<T> sigma_embed(Binder<T> &p, double sigma) {
  Var<T> s = p.tape().constant(Array<T>({ 1, 1 }, { static_cast<T>(sigma) }));
  return linear(p, "sigma.l2", d::gelu(linear(p, "sigma.l1", s)));
}

template <typename T>
Var<T> encode_denoise(Binder<T> &p, Var<T> noisy_atoms,
                      const Array<double> &noisy_dist, Var<T> agg_token) {
  const std::size_t n = noisy_atoms.dim(0);
  if (noisy_dist.shape != d::Shape { n, n }) {
    throw d::ShapeMismatch("encode_denoise distances", noisy_dist.shape,
                           { n, n });
  }
  Var<T> tokens = d::concat<T>({ agg_token, noisy_atoms }, 0);
  Var<T> bias = embed_pairs(p, "denoise", noisy_dist);
  return encoder_stack(p, "denoise", tokens, bias);
}

template <typename T>
DenoiseOutput<T> denoise_head(Binder<T> &p, Var<T> g, Var<T> noisy_atoms,
                              const chemio::Coords &noisy_coords,
                              const Array<double> &noisy_dist) {
  const std::size_t n = noisy_coords.size();
  const std::size_t c = p.config().embed_dim;
  if (g.rank() != 2 || g.dim(0) != n + 1) {
    throw d::ShapeMismatch("denoise_head features", g.shape(), { n + 1, c });
  }
  if (noisy_dist.shape != d::Shape { n, n }) {
    throw d::ShapeMismatch("denoise_head distances", noisy_dist.shape,
                           { n, n });
  }
  Tape<T> &tape = p.tape();
  const std::string pre = "head.denoise";

  Var<T> atoms = d::slice(g, 0, 1, n + 1);
  Var<T> h = norm(p, pre + ".ln", atoms);

  // The noise is a per-atom shift shared by all channels, which a LayerNorm
  // would subtract out, so this readout sees the raw residual stream.
  DenoiseOutput<T> out;
  out.eps_hat =
      linear(p, pre + ".eps2", d::gelu(linear(p, pre + ".eps1", atoms)));
  out.x_hat = noisy_atoms - out.eps_hat;

  Var<T> u = linear(p, pre + ".pair_u", h);
  Var<T> uu = d::reshape(u, { n, 1, c }) * d::reshape(u, { 1, n, c });
  Var<T> rbf = tape.constant(fixed_rbf<T>(noisy_dist, p.config().n_dist_kernels));
  Var<T> r = d::reshape(linear(p, pre + ".pair_r", rbf), { n, n, c });
  Var<T> e = d::reshape(d::gelu(uu + r), { n * n, c });

  Var<T> z = d::reshape(linear(p, pre + ".pair_d", e), { n, n });
  std::vector<std::uint8_t> diag(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i * n + i] = 1;
  }
  z = d::masked_fill(z, std::span<const std::uint8_t>(diag), T(0));
  Var<T> dv = tape.constant(noisy_dist.template cast<T>());
  out.d_hat = dv + z;

  Var<T> w = d::reshape(linear(p, pre + ".pair_w", e), { n, n });
  Array<T> pc({ n, 3 });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < 3; ++a) {
      pc[3 * i + a] = static_cast<T>(noisy_coords[i][a]);
    }
  }
  Var<T> pv = tape.constant(std::move(pc));
  Var<T> shift = d::sum(w, 1, true) * pv - d::matmul(w, pv);
  out.p_hat = pv + d::scale(shift, T(1) / static_cast<T>(n));
  return out;
}

template <typename T>
Var<T> aux_head(Binder<T> &p, Var<T> features) {
  return mlp_readout(p, "head.aux", features, "l2");
}

template <typename T>
Var<T> downstream_head(Binder<T> &p, Var<T> features) {
  return d::reshape(mlp_readout(p, "head.reg", features, "out"), {});
}

template <typename T>
Var<T> rank_score(Binder<T> &p, Var<T> features) {
  return d::reshape(mlp_readout(p, "head.reg", features, "rank"), {});
}

#define MOLEVERS_INSTANTIATE_MODEL(T)                                         \
  template class Binder<T>;                                                   \
  template Var<T> embed_pairs(Binder<T> &, std::string_view,                  \
                              const Array<double> &);                         \
  template Var<T> encoder_stack(Binder<T> &, std::string_view, Var<T>,        \
                                Var<T>);                                      \
  template Var<T> atom_embeddings(Binder<T> &, std::span<const std::size_t>); \
  template Var<T> encode_primary(Binder<T> &, std::span<const std::size_t>,   \
                                 const Array<double> &);                      \
  template Var<T> map_head(Binder<T> &, Var<T>);                              \
  template Var<T> aggregate(Binder<T> &, Var<T>);                             \
  template Var<T> sigma_embed(Binder<T> &, double);                           \
  template Var<T> encode_denoise(Binder<T> &, Var<T>, const Array<double> &,  \
                                 Var<T>);                                     \
  template DenoiseOutput<T> denoise_head(Binder<T> &, Var<T>, Var<T>,         \
                                         const chemio::Coords &,              \
                                         const Array<double> &);              \
  template Var<T> aux_head(Binder<T> &, Var<T>);                              \
  template Var<T> downstream_head(Binder<T> &, Var<T>);                       \
  template Var<T> rank_score(Binder<T> &, Var<T>);

MOLEVERS_INSTANTIATE_MODEL(float)
MOLEVERS_INSTANTIATE_MODEL(double)

#undef MOLEVERS_INSTANTIATE_MODEL

}  // namespace molevers::encoder
