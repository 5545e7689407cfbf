//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_ENCODER_MODEL_HPP_
#define MOLEVERS_ENCODER_MODEL_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "molevers/chemio/molecule.hpp"
#include "molevers/diffcore/ops.hpp"
#include "molevers/diffcore/tape.hpp"
#include "molevers/encoder/config.hpp"
#include "molevers/encoder/params.hpp"

namespace molevers::encoder {

using diffcore::Array;
using diffcore::Tape;
using diffcore::Var;

class NonFiniteCoordinate: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Binds named parameters to tape leaves on first use, so a forward pass only
/// creates (and differentiates) what it touches.
template <typename T>
class Binder {
public:
  Binder(Tape<T> &tape, const ParamSet<T> &params, const EncoderConfig &cfg,
         bool trainable = true)
      : tape_(&tape), params_(&params), cfg_(&cfg), trainable_(trainable) { }

  Var<T> operator()(const std::string &name);

  Tape<T> &tape() const { return *tape_; }
  const EncoderConfig &config() const { return *cfg_; }
  const std::map<std::string, Var<T>> &bound() const { return bound_; }

  /// Gradients of every bound parameter after tape().backward().
  ParamSet<T> grads() const;

private:
  Tape<T> *tape_;
  const ParamSet<T> *params_;
  const EncoderConfig *cfg_;
  bool trainable_;
  std::map<std::string, Var<T>> bound_;
};

/// Euclidean distance matrix. D[j][i] is assigned from D[i][j], so the result
/// is exactly symmetric with a zero diagonal.
Array<double> pair_distance(const chemio::Coords &coords);

/// Token ids of a molecule (element ids), optionally with some positions
/// replaced by the mask token.
std::vector<std::size_t> token_ids(const chemio::Molecule &mol,
                                   std::span<const std::size_t> masked = {});

/// Gaussian-kernel expansion of distances projected to per-head additive
/// attention biases, shape (heads, N+1, N+1). Row and column 0 belong to the
/// readout token and carry a learned per-head constant.
template <typename T>
Var<T> embed_pairs(Binder<T> &p, std::string_view branch,
                   const Array<double> &dist);

/// Pre-norm transformer stack with additive pair bias. tokens: (L, C);
/// bias: (heads, L, L).
template <typename T>
Var<T> encoder_stack(Binder<T> &p, std::string_view branch, Var<T> tokens,
                     Var<T> bias);

/// Atom embeddings (N, C) for the given token ids.
template <typename T>
Var<T> atom_embeddings(Binder<T> &p, std::span<const std::size_t> ids);

/// F = primary encoder over [readout token; atom tokens] and distances.
template <typename T>
Var<T> encode_primary(Binder<T> &p, std::span<const std::size_t> ids,
                      const Array<double> &dist);

/// Per-atom logits over the atom classes, (N, kNumAtomClasses).
template <typename T>
Var<T> map_head(Binder<T> &p, Var<T> features);

/// Attention pooling of all N+1 tokens with a learned query, (1, C).
template <typename T>
Var<T> aggregate(Binder<T> &p, Var<T> features);

/// Two-layer MLP from the noise scale to a (1, C) vector.
template <typename T>
Var<T> sigma_embed(Binder<T> &p, double sigma);

/// G = denoising encoder over [agg_token; noisy atom tokens] and noisy
/// distances.
template <typename T>
Var<T> encode_denoise(Binder<T> &p, Var<T> noisy_atoms,
                      const Array<double> &noisy_dist, Var<T> agg_token);

template <typename T>
struct DenoiseOutput {
  Var<T> eps_hat;  // (N, 1)
  Var<T> x_hat;    // (N, C)
  Var<T> p_hat;    // (N, 3)
  Var<T> d_hat;    // (N, N)
};

/// Denoising readouts from G. Coordinates use a weighted sum of difference
/// vectors with invariant weights, so p_hat is exactly rotation- and
/// translation-equivariant.
template <typename T>
DenoiseOutput<T> denoise_head(Binder<T> &p, Var<T> g, Var<T> noisy_atoms,
                              const chemio::Coords &noisy_coords,
                              const Array<double> &noisy_dist);

/// Auxiliary property predictions from the readout token, shape (K).
template <typename T>
Var<T> aux_head(Binder<T> &p, Var<T> features);

/// Downstream regression output (scalar).
template <typename T>
Var<T> downstream_head(Binder<T> &p, Var<T> features);

/// Ranking score sharing the downstream trunk (scalar).
template <typename T>
Var<T> rank_score(Binder<T> &p, Var<T> features);

}  // namespace molevers::encoder

#endif  // MOLEVERS_ENCODER_MODEL_HPP_
