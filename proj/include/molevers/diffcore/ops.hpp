//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_DIFFCORE_OPS_HPP_
#define MOLEVERS_DIFFCORE_OPS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "molevers/diffcore/tape.hpp"

// Differentiable primitives. All are instantiated for float and double.
//
// Broadcasting follows the usual trailing-dimension rule: shapes are aligned
// at their last axis, missing leading axes count as 1, and an axis of size 1
// stretches to match the other operand. Anything else is a ShapeMismatch.

namespace molevers::diffcore {

Shape broadcast_shapes(const Shape &a, const Shape &b);

// Elementwise, broadcasting.
template <typename T> Var<T> add(Var<T> a, Var<T> b);
template <typename T> Var<T> sub(Var<T> a, Var<T> b);
template <typename T> Var<T> mul(Var<T> a, Var<T> b);
template <typename T> Var<T> div(Var<T> a, Var<T> b);

template <typename T> Var<T> scale(Var<T> x, T factor);
template <typename T> Var<T> shift(Var<T> x, T offset);
template <typename T> Var<T> neg(Var<T> x);
template <typename T> Var<T> exp(Var<T> x);
template <typename T> Var<T> log(Var<T> x);
template <typename T> Var<T> sqrt(Var<T> x);
template <typename T> Var<T> square(Var<T> x);
template <typename T> Var<T> sigmoid(Var<T> x);
template <typename T> Var<T> softplus(Var<T> x);
/// Exact (erf) GELU.
template <typename T> Var<T> gelu(Var<T> x);
/// Huber with unit threshold: 0.5 x^2 inside [-1, 1], |x| - 0.5 outside.
template <typename T> Var<T> smooth_l1(Var<T> x);

// Reductions.
template <typename T> Var<T> sum(Var<T> x, std::size_t axis,
                                 bool keepdim = false);
template <typename T> Var<T> mean(Var<T> x, std::size_t axis,
                                  bool keepdim = false);
template <typename T> Var<T> sum_all(Var<T> x);
template <typename T> Var<T> mean_all(Var<T> x);

// Shape manipulation.
template <typename T> Var<T> reshape(Var<T> x, Shape shape);
template <typename T> Var<T> permute(Var<T> x, std::vector<std::size_t> axes);
/// Swaps the two axes of a rank-2 array.
template <typename T> Var<T> transpose(Var<T> x);
template <typename T> Var<T> broadcast_to(Var<T> x, Shape shape);
template <typename T> Var<T> concat(const std::vector<Var<T>> &xs,
                                    std::size_t axis);
template <typename T> Var<T> slice(Var<T> x, std::size_t axis,
                                   std::size_t begin, std::size_t end);
/// Rows of `table` (first axis) selected by `ids`; embedding lookup.
template <typename T> Var<T> gather_rows(Var<T> table,
                                         std::span<const std::size_t> ids);

// Linear algebra and normalization.
/// (m,k)x(k,n) or batched (b,m,k)x(b,k,n).
template <typename T> Var<T> matmul(Var<T> a, Var<T> b);
/// Over the last axis.
template <typename T> Var<T> softmax(Var<T> x);
template <typename T> Var<T> log_softmax(Var<T> x);
/// Zero-mean unit-variance over the last axis, no affine part.
template <typename T> Var<T> layer_norm(Var<T> x, T eps = T(1e-5));
/// Positions where mask != 0 are replaced by `value` and receive no gradient.
/// `mask` has one entry per element of x.
template <typename T> Var<T> masked_fill(Var<T> x,
                                         std::span<const std::uint8_t> mask,
                                         T value);

template <typename T> Var<T> operator+(Var<T> a, Var<T> b) { return add(a, b); }
template <typename T> Var<T> operator-(Var<T> a, Var<T> b) { return sub(a, b); }
template <typename T> Var<T> operator*(Var<T> a, Var<T> b) { return mul(a, b); }
template <typename T> Var<T> operator/(Var<T> a, Var<T> b) { return div(a, b); }
template <typename T> Var<T> operator-(Var<T> a) { return neg(a); }

}  // namespace molevers::diffcore

#endif  // MOLEVERS_DIFFCORE_OPS_HPP_
