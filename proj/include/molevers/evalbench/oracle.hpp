//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_EVALBENCH_ORACLE_HPP_
#define MOLEVERS_EVALBENCH_ORACLE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace molevers::evalbench {

/// Posterior mean of the clean point under an isotropic Gaussian mixture
/// centred on `points` with width `sigma`: sum_i w_i m_i with
/// w_i proportional to exp(-|x - m_i|^2 / (2 sigma^2)).
std::vector<double> bayes_denoiser(std::span<const double> x,
                                   const std::vector<std::vector<double>> &points,
                                   double sigma);

double bayes_denoiser(double x, std::span<const double> points, double sigma);

struct ToyDenoiserConfig {
  std::vector<double> points = { -1.0, 1.0 };
  double sigma = 1.0;
  std::size_t hidden = 32;
  std::size_t batch = 128;
  double lr = 1e-2;
  /// Deviation is measured before the first update and after each of these
  /// step counts.
  std::vector<std::size_t> checkpoints = { 25, 100, 400, 1600 };
  /// Probe inputs, evenly spaced over [probe_lo, probe_hi].
  double probe_lo = -2.0;
  double probe_hi = 2.0;
  std::size_t n_probe = 41;
  std::uint64_t seed = 0;
};

struct ToyDenoiserTrace {
  std::vector<std::size_t> steps;
  /// Mean squared deviation from the oracle over the probe grid.
  std::vector<double> deviation;
};

/// Trains a one-hidden-layer network x_noisy -> x_clean with squared error
/// on draws from the 1-D mixture and tracks its distance to the oracle.
ToyDenoiserTrace train_toy_denoiser(const ToyDenoiserConfig &cfg);

}  // namespace molevers::evalbench

#endif  // MOLEVERS_EVALBENCH_ORACLE_HPP_
