//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/evalbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

namespace molevers::evalbench {

namespace {
void check_pair(std::span<const double> a, std::span<const double> b,
                const char *what) {
  if (a.size() != b.size() || a.empty()) {
    throw LengthMismatch(std::string(what) + ": lengths " + std::to_string(a.size())
                         + " and " + std::to_string(b.size()));
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      throw std::invalid_argument(std::string(what) + ": non-finite value");
    }
  }
}

// Sum of t(t-1)/2 over runs of equal values in a sorted sequence.
template <typename Get>
std::uint64_t tied_pairs(std::size_t n, Get get) {
  std::uint64_t total = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && get(i) == get(i - 1)) {
      ++run;
    } else {
      total += static_cast<std::uint64_t>(run) * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

// Stable merge sort of `v` by value, returning the number of inversions.
std::uint64_t sort_count_swaps(std::vector<double> &v, std::vector<double> &tmp,
                               std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) {
    return 0;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = sort_count_swaps(v, tmp, lo, mid)
                        + sort_count_swaps(v, tmp, mid, hi);
  std::size_t i = lo;
  std::size_t j = mid;
  std::size_t k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += mid - i;
      tmp[k++] = v[j++];
    } else {
      tmp[k++] = v[i++];
    }
  }
  while (i < mid) {
    tmp[k++] = v[i++];
  }
  while (j < hi) {
    tmp[k++] = v[j++];
  }
  std::copy(tmp.begin() + static_cast<long>(lo), tmp.begin() + static_cast<long>(hi),
            v.begin() + static_cast<long>(lo));
  return swaps;
}
}  // namespace

double mae(std::span<const double> pred, std::span<const double> truth) {
  check_pair(pred, truth, "mae");
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    total += std::abs(pred[i] - truth[i]);
  }
  return total / static_cast<double>(pred.size());
}

double r2(std::span<const double> pred, std::span<const double> truth) {
  check_pair(pred, truth, "r2");
  const double mean = std::accumulate(truth.begin(), truth.end(), 0.0)
                      / static_cast<double>(truth.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  if (ss_tot == 0.0) {
    throw ZeroVariance("r2: truth values have zero variance");
  }
  return 1.0 - ss_res / ss_tot;
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, "kendall_tau_b");
  const std::size_t n = x.size();
  if (n < 2) {
    throw LengthMismatch("kendall_tau_b: needs at least 2 observations");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });
  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t n1 = tied_pairs(n, [&](std::size_t i) { return x[order[i]]; });
  std::uint64_t n3 = 0;
  {
    std::size_t run = 1;
    for (std::size_t i = 1; i <= n; ++i) {
      if (i < n && x[order[i]] == x[order[i - 1]] && y[order[i]] == y[order[i - 1]]) {
        ++run;
      } else {
        n3 += static_cast<std::uint64_t>(run) * (run - 1) / 2;
        run = 1;
      }
    }
  }
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    ys[i] = y[order[i]];
  }
  std::vector<double> tmp(n);
  const std::uint64_t swaps = sort_count_swaps(ys, tmp, 0, n);
  const std::uint64_t n2 = tied_pairs(n, [&](std::size_t i) { return ys[i]; });
  if (n1 == n0 || n2 == n0) {
    throw AllTied("kendall_tau_b: an input has no untied pair");
  }
  // n_c - n_d = n0 - n1 - n2 + n3 - 2 * swaps
  const std::int64_t num = static_cast<std::int64_t>(n0 + n3)
                           - static_cast<std::int64_t>(n1 + n2)
                           - 2 * static_cast<std::int64_t>(swaps);
  return static_cast<double>(num)
         / std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) {
    throw std::invalid_argument("quantile of an empty sample");
  }
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, 0.5);
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("box_stats of an empty sample");
  }
  std::sort(values.begin(), values.end());
  BoxStats b;
  b.median = quantile_sorted(values, 0.5);
  b.q1 = quantile_sorted(values, 0.25);
  b.q3 = quantile_sorted(values, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_lo = *std::find_if(values.begin(), values.end(),
                               [&](double v) { return v >= lo_fence; });
  b.whisker_hi = *std::find_if(values.rbegin(), values.rend(),
                               [&](double v) { return v <= hi_fence; });
  b.mean = std::accumulate(values.begin(), values.end(), 0.0)
           / static_cast<double>(values.size());
  return b;
}

}  // namespace molevers::evalbench
