//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_UTIL_PARALLEL_HPP_
#define MOLEVERS_UTIL_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace molevers {

/// Worker count: MOLEVERS_THREADS if set and positive, otherwise the hardware
/// concurrency (at least 1).
std::size_t worker_count();

/// Runs fn(i) for i in [0, n). Work is split into contiguous chunks; callers
/// that need deterministic results must write into per-index slots and
/// reduce afterwards in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn);

}  // namespace molevers

#endif  // MOLEVERS_UTIL_PARALLEL_HPP_
