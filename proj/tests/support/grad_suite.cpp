//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "grad_suite.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gradcheck.hpp"

namespace molevers::testing {
namespace d = diffcore;
using encoder::Binder;
using encoder::EncoderConfig;
using encoder::ParamSet;

namespace {
using Rng = std::mt19937_64;

std::size_t pick(Rng &rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

d::Shape random_shape(Rng &rng, std::size_t min_rank = 1,
                      std::size_t max_rank = 3) {
  d::Shape s(pick(rng, min_rank, max_rank));
  for (auto &v: s) {
    v = pick(rng, 1, 4);
  }
  return s;
}

// A shape that broadcasts against `s`: a suffix with some axes set to 1.
d::Shape broadcast_partner(Rng &rng, const d::Shape &s) {
  d::Shape out(s.begin() + static_cast<long>(pick(rng, 0, s.size() - 1)),
               s.end());
  for (auto &v: out) {
    if (pick(rng, 0, 2) == 0) {
      v = 1;
    }
  }
  return out;
}

using Unary = std::function<Var<double>(Var<double>)>;

GradCase unary_case(std::string name, Unary f, double lo = -2.0,
                    double hi = 2.0) {
  return { std::move(name), [f, lo, hi](std::uint64_t seed) {
            Rng rng(seed);
            Array<double> x = random_array(rng, random_shape(rng), lo, hi);
            return gradcheck(
                [&](Tape<double> &t, const std::vector<Var<double>> &v) {
                  return weighted_sum(t, f(v[0]), seed);
                },
                { x });
          } };
}

using Binary = std::function<Var<double>(Var<double>, Var<double>)>;

GradCase binary_case(std::string name, Binary f, double lo_b = -2.0,
                     double hi_b = 2.0) {
  return { std::move(name), [f, lo_b, hi_b](std::uint64_t seed) {
            Rng rng(seed);
            d::Shape sa = random_shape(rng);
            d::Shape sb = broadcast_partner(rng, sa);
            if (pick(rng, 0, 1) == 0) {
              std::swap(sa, sb);
            }
            Array<double> a = random_array(rng, sa);
            Array<double> b = random_array(rng, sb, lo_b, hi_b);
            return gradcheck(
                [&](Tape<double> &t, const std::vector<Var<double>> &v) {
                  return weighted_sum(t, f(v[0], v[1]), seed);
                },
                { a, b });
          } };
}

// Shape-driven single-input case.
GradCase shaped_case(
    std::string name,
    std::function<Var<double>(Var<double>, Rng &)> f,
    std::function<d::Shape(Rng &)> shape, double lo = -2.0, double hi = 2.0) {
  return { std::move(name), [f, shape, lo, hi](std::uint64_t seed) {
            Rng rng(seed);
            Array<double> x = random_array(rng, shape(rng), lo, hi);
            const std::uint64_t op_seed = rng();
            return gradcheck(
                [&](Tape<double> &t, const std::vector<Var<double>> &v) {
                  Rng op_rng(op_seed);
                  return weighted_sum(t, f(v[0], op_rng), seed);
                },
                { x });
          } };
}

chemio::Coords random_coords(Rng &rng, std::size_t n) {
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  chemio::Coords c(n);
  for (auto &p: c) {
    p = { uni(rng), uni(rng), uni(rng) };
  }
  return c;
}

std::vector<std::size_t> random_ids(Rng &rng, std::size_t n,
                                    std::size_t vocab) {
  std::vector<std::size_t> ids(n);
  for (auto &i: ids) {
    i = pick(rng, 0, vocab - 1);
  }
  return ids;
}

// Random molecule-shaped input for the composite checks.
struct Sample {
  std::vector<std::size_t> ids;
  chemio::Coords coords;
  Array<double> dist;
  double sigma;
};

Sample random_sample(Rng &rng, const EncoderConfig &cfg) {
  Sample s;
  const std::size_t n = pick(rng, 2, 5);
  s.ids = random_ids(rng, n, cfg.vocab_size);
  s.coords = random_coords(rng, n);
  s.dist = encoder::pair_distance(s.coords);
  s.sigma = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
  return s;
}

Var<double> weighted(Binder<double> &p, Var<double> x, std::uint64_t seed) {
  return weighted_sum(p.tape(), x, seed);
}

GradCase composite(
    std::string name,
    std::function<Var<double>(Binder<double> &, const Sample &, std::uint64_t)>
        f,
    std::size_t n_layers = 2) {
  return { std::move(name), [f, n_layers](std::uint64_t seed) {
            EncoderConfig cfg = tiny_config();
            cfg.n_layers = n_layers;
            Rng rng(seed);
            Sample s = random_sample(rng, cfg);
            return gradcheck_params(cfg, random_params(cfg, seed),
                                    [&](Binder<double> &p) {
                                      return f(p, s, seed);
                                    });
          } };
}

Var<double> noisy_atoms(Binder<double> &p, const Sample &s) {
  Array<double> eps({ s.ids.size(), 1 });
  for (std::size_t i = 0; i < eps.size(); ++i) {
    eps[i] = 0.3 * static_cast<double>(i) - 0.2;
  }
  return encoder::atom_embeddings(p, s.ids) + p.tape().constant(eps);
}

// Random stand-in for encoder output, (N+1, C).
Var<double> features(Binder<double> &p, const Sample &s, std::uint64_t seed) {
  Rng rng(seed * 31 + 7);
  return p.tape().constant(random_array(
      rng, { s.ids.size() + 1, p.config().embed_dim }, -2.0, 2.0));
}

Var<double> denoise_features(Binder<double> &p, const Sample &s) {
  Var<double> f = encoder::encode_primary(p, s.ids, s.dist);
  Var<double> agg = encoder::aggregate(p, f) + encoder::sigma_embed(p, s.sigma);
  return encoder::encode_denoise(p, noisy_atoms(p, s), s.dist, agg);
}
}  // namespace

EncoderConfig tiny_config() {
  EncoderConfig cfg;
  cfg.n_layers = 2;
  cfg.embed_dim = 8;
  cfg.ffn_dim = 12;
  cfg.n_heads = 2;
  cfg.n_dist_kernels = 4;
  cfg.aux_targets = 2;
  return cfg;
}

ParamSet<double> random_params(const EncoderConfig &cfg, std::uint64_t seed) {
  ParamSet<double> params = encoder::cast_params<double>(
      encoder::init_params(cfg, seed, { .zero_head_outputs = false }));
  Rng rng(seed ^ 0x5eedULL);
  std::normal_distribution<double> noise(0.0, 0.2);
  for (auto &[name, arr]: params) {
    for (double &v: arr.data) {
      v += noise(rng);
    }
  }
  return params;
}

double gradcheck_params(
    const EncoderConfig &cfg, ParamSet<double> params,
    const std::function<Var<double>(Binder<double> &)> &fn, double h) {
  ParamSet<double> analytic;
  {
    Tape<double> tape;
    Binder<double> p(tape, params, cfg);
    Var<double> loss = fn(p);
    tape.backward(loss);
    analytic = p.grads();
  }
  const auto eval = [&]() {
    Tape<double> tape;
    Binder<double> p(tape, params, cfg, false);
    return fn(p).item();
  };

  double err = 0.0;
  double scale = 0.0;
  for (const auto &[name, grad]: analytic) {
    Array<double> &arr = params.at(name);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const double x0 = arr[i];
      arr[i] = x0 + h;
      const double up = eval();
      arr[i] = x0 - h;
      const double down = eval();
      arr[i] = x0;
      const double fd = (up - down) / (2.0 * h);
      err = std::max(err, std::abs(grad[i] - fd));
      scale = std::max(scale, std::abs(fd));
    }
  }
  return err / std::max(scale, 1e-8);
}

std::vector<GradCase> primitive_cases() {
  std::vector<GradCase> cases;
  cases.push_back(binary_case("add", [](auto a, auto b) { return a + b; }));
  cases.push_back(binary_case("sub", [](auto a, auto b) { return a - b; }));
  cases.push_back(binary_case("mul", [](auto a, auto b) { return a * b; }));
  cases.push_back(
      binary_case("div", [](auto a, auto b) { return a / b; }, 0.5, 2.0));
  cases.push_back(
      unary_case("scale", [](auto x) { return d::scale(x, -1.7); }));
  cases.push_back(
      unary_case("shift", [](auto x) { return d::square(d::shift(x, 0.3)); }));
  cases.push_back(unary_case("neg", [](auto x) { return -x; }));
  cases.push_back(unary_case("exp", [](auto x) { return d::exp(x); }));
  cases.push_back(
      unary_case("log", [](auto x) { return d::log(x); }, 0.2, 3.0));
  cases.push_back(
      unary_case("sqrt", [](auto x) { return d::sqrt(x); }, 0.2, 3.0));
  cases.push_back(unary_case("square", [](auto x) { return d::square(x); }));
  cases.push_back(unary_case("sigmoid", [](auto x) { return d::sigmoid(x); }));
  cases.push_back(
      unary_case("softplus", [](auto x) { return d::softplus(x); }, -5, 5));
  cases.push_back(unary_case("gelu", [](auto x) { return d::gelu(x); }, -4, 4));
  cases.push_back(
      unary_case("smooth_l1", [](auto x) { return d::smooth_l1(x); }, -3, 3));

  cases.push_back(shaped_case(
      "sum",
      [](Var<double> x, Rng &rng) {
        return d::sum(x, pick(rng, 0, x.rank() - 1), pick(rng, 0, 1) == 1);
      },
      [](Rng &rng) { return random_shape(rng); }));
  cases.push_back(shaped_case(
      "mean",
      [](Var<double> x, Rng &rng) {
        return d::mean(x, pick(rng, 0, x.rank() - 1), pick(rng, 0, 1) == 1);
      },
      [](Rng &rng) { return random_shape(rng); }));
  cases.push_back(shaped_case(
      "sum_all",
      [](Var<double> x, Rng &) { return d::square(d::sum_all(x)); },
      [](Rng &rng) { return random_shape(rng); }));
  cases.push_back(shaped_case(
      "mean_all",
      [](Var<double> x, Rng &) { return d::square(d::mean_all(x)); },
      [](Rng &rng) { return random_shape(rng); }));
  cases.push_back(shaped_case(
      "reshape",
      [](Var<double> x, Rng &) {
        return d::reshape(x, { x.dim(1), x.dim(0) * x.dim(2) });
      },
      [](Rng &rng) { return random_shape(rng, 3, 3); }));
  cases.push_back(shaped_case(
      "permute",
      [](Var<double> x, Rng &rng) {
        std::vector<std::size_t> axes { 0, 1, 2 };
        std::shuffle(axes.begin(), axes.end(), rng);
        return d::permute(x, axes);
      },
      [](Rng &rng) { return random_shape(rng, 3, 3); }));
  cases.push_back(shaped_case(
      "transpose", [](Var<double> x, Rng &) { return d::transpose(x); },
      [](Rng &rng) { return random_shape(rng, 2, 2); }));
  cases.push_back(shaped_case(
      "broadcast_to",
      [](Var<double> x, Rng &rng) {
        return d::broadcast_to(x, { pick(rng, 1, 3), x.dim(0), 3 });
      },
      [](Rng &rng) { return d::Shape { pick(rng, 1, 4), 1 }; }));
  cases.push_back({ "concat", [](std::uint64_t seed) {
                     Rng rng(seed);
                     d::Shape s = random_shape(rng, 2, 3);
                     const std::size_t axis = pick(rng, 0, s.size() - 1);
                     d::Shape s2 = s;
                     s2[axis] = pick(rng, 1, 3);
                     return gradcheck(
                         [&](Tape<double> &t, const std::vector<Var<double>> &v) {
                           return weighted_sum(t, d::concat<double>(v, axis),
                                               seed);
                         },
                         { random_array(rng, s), random_array(rng, s2) });
                   } });
  cases.push_back(shaped_case(
      "slice",
      [](Var<double> x, Rng &rng) {
        const std::size_t axis = pick(rng, 0, x.rank() - 1);
        const std::size_t b = pick(rng, 0, x.dim(axis) - 1);
        const std::size_t e = pick(rng, b + 1, x.dim(axis));
        return d::slice(x, axis, b, e);
      },
      [](Rng &rng) { return random_shape(rng); }));
  cases.push_back(shaped_case(
      "gather_rows",
      [](Var<double> x, Rng &rng) {
        std::vector<std::size_t> ids(pick(rng, 1, 6));
        for (auto &i: ids) {
          i = pick(rng, 0, x.dim(0) - 1);
        }
        return d::gather_rows(x, ids);
      },
      [](Rng &rng) { return d::Shape { pick(rng, 1, 5), pick(rng, 1, 4) }; }));
  cases.push_back({ "matmul", [](std::uint64_t seed) {
                     Rng rng(seed);
                     const std::size_t m = pick(rng, 1, 4);
                     const std::size_t k = pick(rng, 1, 4);
                     const std::size_t n = pick(rng, 1, 4);
                     return gradcheck(
                         [&](Tape<double> &t, const std::vector<Var<double>> &v) {
                           return weighted_sum(t, d::matmul(v[0], v[1]), seed);
                         },
                         { random_array(rng, { m, k }),
                           random_array(rng, { k, n }) });
                   } });
  cases.push_back({ "matmul_batched", [](std::uint64_t seed) {
                     Rng rng(seed);
                     const std::size_t b = pick(rng, 1, 3);
                     const std::size_t m = pick(rng, 1, 4);
                     const std::size_t k = pick(rng, 1, 4);
                     const std::size_t n = pick(rng, 1, 4);
                     return gradcheck(
                         [&](Tape<double> &t, const std::vector<Var<double>> &v) {
                           return weighted_sum(t, d::matmul(v[0], v[1]), seed);
                         },
                         { random_array(rng, { b, m, k }),
                           random_array(rng, { b, k, n }) });
                   } });
  cases.push_back(unary_case("softmax", [](auto x) { return d::softmax(x); }));
  cases.push_back(
      unary_case("log_softmax", [](auto x) { return d::log_softmax(x); }));
  cases.push_back(shaped_case(
      "layer_norm", [](Var<double> x, Rng &) { return d::layer_norm(x); },
      [](Rng &rng) {
        d::Shape s = random_shape(rng, 1, 3);
        s.back() = pick(rng, 2, 6);
        return s;
      }));
  cases.push_back(shaped_case(
      "masked_fill",
      [](Var<double> x, Rng &rng) {
        std::vector<std::uint8_t> mask(x.numel());
        for (auto &m: mask) {
          m = static_cast<std::uint8_t>(pick(rng, 0, 1));
        }
        return d::square(d::masked_fill(
            x, std::span<const std::uint8_t>(mask), -0.5));
      },
      [](Rng &rng) { return random_shape(rng); }));
  return cases;
}

std::vector<GradCase> composite_cases() {
  std::vector<GradCase> cases;
  cases.push_back(composite("embed_pairs", [](auto &p, const Sample &s, auto seed) {
    return weighted(p, encoder::embed_pairs(p, "primary", s.dist), seed);
  }));
  cases.push_back(
      composite("encode_primary", [](auto &p, const Sample &s, auto seed) {
        return weighted(p, encoder::encode_primary(p, s.ids, s.dist), seed);
      }));
  cases.push_back(composite("map_head_ce", [](auto &p, const Sample &s, auto seed) {
    Var<double> logp = d::log_softmax(encoder::map_head(p, features(p, s, seed)));
    std::vector<std::uint8_t> keep(logp.numel(), 1);
    for (std::size_t i = 0; i < s.ids.size(); ++i) {
      keep[i * encoder::kNumAtomClasses
           + (s.ids[i] % encoder::kNumAtomClasses)] = 0;
    }
    return -d::sum_all(d::masked_fill(logp, keep, 0.0));
  }));
  cases.push_back(composite("aggregate", [](auto &p, const Sample &s, auto seed) {
    return weighted(p, encoder::aggregate(p, features(p, s, seed)), seed);
  }));
  cases.push_back(
      composite("sigma_embed", [](auto &p, const Sample &s, auto seed) {
        return weighted(p, encoder::sigma_embed(p, s.sigma), seed);
      }));
  cases.push_back(
      composite("encode_denoise", [](auto &p, const Sample &s, auto seed) {
        Var<double> agg = d::slice(features(p, s, seed + 3), 0, 0, 1)
                          + encoder::sigma_embed(p, s.sigma);
        return weighted(
            p, encoder::encode_denoise(p, noisy_atoms(p, s), s.dist, agg),
            seed);
      }));
  cases.push_back(
      composite("denoise_head", [](auto &p, const Sample &s, auto seed) {
        auto out = encoder::denoise_head(p, features(p, s, seed),
                                         noisy_atoms(p, s), s.coords, s.dist);
        return weighted(p, out.x_hat, seed) + weighted(p, out.p_hat, seed + 1)
               + weighted(p, out.d_hat, seed + 2);
      }));
  cases.push_back(
      composite("branching_pipeline", [](auto &p, const Sample &s, auto seed) {
        Var<double> g = denoise_features(p, s);
        auto out = encoder::denoise_head(p, g, noisy_atoms(p, s), s.coords,
                                         s.dist);
        return weighted(p, out.p_hat, seed) + weighted(p, out.d_hat, seed + 1);
      },
      1));
  cases.push_back(composite("aux_head", [](auto &p, const Sample &s, auto seed) {
    return weighted(p, encoder::aux_head(p, features(p, s, seed)), seed);
  }));
  cases.push_back(
      composite("downstream_head", [](auto &p, const Sample &s, auto seed) {
        return d::square(encoder::downstream_head(p, features(p, s, seed)));
      }));
  cases.push_back(composite("rank_logit", [](auto &p, const Sample &s, auto seed) {
    Var<double> s1 = encoder::rank_score(p, features(p, s, seed));
    Var<double> s2 = encoder::rank_score(p, features(p, s, seed + 1));
    return d::softplus(s2 - s1);
  }));
  return cases;
}

}  // namespace molevers::testing
