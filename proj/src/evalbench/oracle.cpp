//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/evalbench/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "molevers/diffcore/ops.hpp"
#include "molevers/training/optimizer.hpp"
#include "molevers/util/rng.hpp"

namespace molevers::evalbench {

std::vector<double> bayes_denoiser(std::span<const double> x,
                                   const std::vector<std::vector<double>> &points,
                                   double sigma) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("bayes_denoiser: sigma must be positive");
  }
  if (points.empty()) {
    throw std::invalid_argument("bayes_denoiser: needs at least one point");
  }
  std::vector<double> logw(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != x.size()) {
      throw std::invalid_argument("bayes_denoiser: dimension mismatch");
    }
    double d2 = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      d2 += (x[k] - points[i][k]) * (x[k] - points[i][k]);
    }
    logw[i] = -d2 / (2.0 * sigma * sigma);
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double z = 0.0;
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double w = std::exp(logw[i] - top);
    z += w;
    for (std::size_t k = 0; k < x.size(); ++k) {
      out[k] += w * points[i][k];
    }
  }
  for (double &v: out) {
    v /= z;
  }
  return out;
}

double bayes_denoiser(double x, std::span<const double> points, double sigma) {
  std::vector<std::vector<double>> p;
  p.reserve(points.size());
  for (double v: points) {
    p.push_back({ v });
  }
  const double in[1] = { x };
  return bayes_denoiser(in, p, sigma)[0];
}

ToyDenoiserTrace train_toy_denoiser(const ToyDenoiserConfig &cfg) {
  using diffcore::Array;
  using diffcore::Tape;
  using diffcore::Var;
  if (cfg.points.empty() || cfg.n_probe < 2 || cfg.hidden == 0
      || cfg.batch == 0) {
    throw std::invalid_argument("train_toy_denoiser: bad configuration");
  }
  if (!std::is_sorted(cfg.checkpoints.begin(), cfg.checkpoints.end())) {
    throw std::invalid_argument("train_toy_denoiser: checkpoints must be sorted");
  }
  Rng rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, cfg.points.size() - 1);

  const std::size_t h = cfg.hidden;
  encoder::ParamSet<float> params;
  const auto uniform_init = [&](std::size_t fan_in, std::size_t fan_out) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> uni(-bound, bound);
    Array<float> a({ fan_in, fan_out });
    for (float &v: a.data) {
      v = static_cast<float>(uni(rng));
    }
    return a;
  };
  params["w1"] = uniform_init(1, h);
  params["b1"] = Array<float>({ h });
  params["w2"] = uniform_init(h, 1);
  params["b2"] = Array<float>({ 1 });

  const auto forward = [&](Tape<double> &tape, const encoder::ParamSet<float> &p,
                           const std::vector<double> &xs,
                           std::map<std::string, Var<double>> *vars) {
    std::map<std::string, Var<double>> bound;
    for (const auto &[name, arr]: p) {
      bound[name] = tape.variable(arr.cast<double>());
    }
    Var<double> x = tape.constant(Array<double>({ xs.size(), 1 }, xs));
    Var<double> hid = diffcore::gelu(diffcore::matmul(x, bound["w1"]) + bound["b1"]);
    Var<double> y = diffcore::matmul(hid, bound["w2"]) + bound["b2"];
    if (vars != nullptr) {
      *vars = bound;
    }
    return y;
  };

  std::vector<double> probe(cfg.n_probe);
  std::vector<double> oracle(cfg.n_probe);
  for (std::size_t i = 0; i < cfg.n_probe; ++i) {
    probe[i] = cfg.probe_lo + (cfg.probe_hi - cfg.probe_lo) * static_cast<double>(i)
                                  / static_cast<double>(cfg.n_probe - 1);
    oracle[i] = bayes_denoiser(probe[i], cfg.points, cfg.sigma);
  }
  const auto deviation = [&]() {
    Tape<double> tape;
    Var<double> y = forward(tape, params, probe, nullptr);
    double total = 0.0;
    for (std::size_t i = 0; i < cfg.n_probe; ++i) {
      total += (y.value()[i] - oracle[i]) * (y.value()[i] - oracle[i]);
    }
    return total / static_cast<double>(cfg.n_probe);
  };

  ToyDenoiserTrace trace;
  trace.steps.push_back(0);
  trace.deviation.push_back(deviation());
  training::Adam adam;
  training::AdamState state;
  const std::size_t total = cfg.checkpoints.empty() ? 0 : cfg.checkpoints.back();
  std::size_t next = 0;
  while (next < cfg.checkpoints.size() && cfg.checkpoints[next] == 0) {
    ++next;
  }
  for (std::size_t step = 1; step <= total; ++step) {
    std::vector<double> noisy(cfg.batch);
    std::vector<double> clean(cfg.batch);
    for (std::size_t b = 0; b < cfg.batch; ++b) {
      clean[b] = cfg.points[pick(rng)];
      noisy[b] = clean[b] + cfg.sigma * normal(rng);
    }
    Tape<double> tape;
    std::map<std::string, Var<double>> vars;
    Var<double> y = forward(tape, params, noisy, &vars);
    Var<double> target = tape.constant(Array<double>({ cfg.batch, 1 }, clean));
    Var<double> loss = diffcore::mean_all(diffcore::square(y - target));
    tape.backward(loss);
    encoder::ParamSet<double> grads;
    for (const auto &[name, v]: vars) {
      grads[name] = tape.grad(v);
    }
    adam.step(params, grads, cfg.lr, state);
    while (next < cfg.checkpoints.size() && cfg.checkpoints[next] == step) {
      trace.steps.push_back(step);
      trace.deviation.push_back(deviation());
      ++next;
    }
  }
  return trace;
}

}  // namespace molevers::evalbench
