//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_EVALBENCH_METRICS_HPP_
#define MOLEVERS_EVALBENCH_METRICS_HPP_

#include <span>
#include <stdexcept>
#include <vector>

namespace molevers::evalbench {

class LengthMismatch: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class ZeroVariance: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class AllTied: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Mean absolute error. Throws LengthMismatch on unequal or empty input and
/// std::invalid_argument on non-finite values.
double mae(std::span<const double> pred, std::span<const double> truth);

/// Coefficient of determination 1 - SS_res / SS_tot. Throws ZeroVariance
/// when the truth is constant.
double r2(std::span<const double> pred, std::span<const double> truth);

/// Kendall tau-b in O(n log n) (Knight's merge-sort count). Throws AllTied
/// when either input has no untied pair.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

/// Box-plot summary. Quartiles use linear interpolation between order
/// statistics; whiskers sit at the most extreme samples within 1.5 IQR of
/// the box.
struct BoxStats {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  double mean = 0.0;

  friend bool operator==(const BoxStats &, const BoxStats &) = default;
};

BoxStats box_stats(std::vector<double> values);

/// Linear-interpolation quantile of sorted data, q in [0, 1].
double quantile_sorted(std::span<const double> sorted, double q);

double median(std::vector<double> values);

}  // namespace molevers::evalbench

#endif  // MOLEVERS_EVALBENCH_METRICS_HPP_
