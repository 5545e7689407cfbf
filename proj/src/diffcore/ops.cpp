//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/diffcore/ops.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>
#include <string>

namespace molevers::diffcore {

std::size_t numel(const Shape &shape) {
  std::size_t n = 1;
  for (std::size_t d: shape) {
    n *= d;
  }
  return n;
}

std::string shape_string(const Shape &shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) {
      s += ", ";
    }
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

ShapeMismatch::ShapeMismatch(std::string_view op, const Shape &a,
                             const Shape &b)
    : std::invalid_argument(std::string(op) + ": incompatible shapes "
                            + shape_string(a) + " and " + shape_string(b)) { }

ShapeMismatch::ShapeMismatch(const std::string &what)
    : std::invalid_argument(what) { }

NonScalarLoss::NonScalarLoss(const Shape &shape)
    : std::invalid_argument("backward needs a single-element loss, got shape "
                            + shape_string(shape)) { }

Shape broadcast_shapes(const Shape &a, const Shape &b) {
  const std::size_t r = std::max(a.size(), b.size());
  Shape out(r);
  for (std::size_t k = 0; k < r; ++k) {
    const std::size_t da = k < r - a.size() ? 1 : a[k - (r - a.size())];
    const std::size_t db = k < r - b.size() ? 1 : b[k - (r - b.size())];
    if (da != db && da != 1 && db != 1) {
      throw ShapeMismatch("broadcast", a, b);
    }
    out[k] = da == 1 ? db : da;
  }
  return out;
}

namespace {

template <typename T>
void check_same_tape(Var<T> a, Var<T> b) {
  if (&a.tape() != &b.tape()) {
    throw std::invalid_argument("operands recorded on different tapes");
  }
}

// Maps output linear indices of a broadcast result to operand indices.
struct OperandIndex {
  enum class Mode { kDirect, kModulo, kMapped };
  Mode mode = Mode::kDirect;
  std::size_t n = 0;
  std::vector<std::uint32_t> map;

  std::size_t operator()(std::size_t i) const {
    switch (mode) {
    case Mode::kDirect:
      return i;
    case Mode::kModulo:
      return i % n;
    case Mode::kMapped:
      return map[i];
    }
    return i;
  }
};

OperandIndex make_index(const Shape &operand, const Shape &out) {
  OperandIndex idx;
  idx.n = numel(operand);
  const std::size_t total = numel(out);
  if (idx.n == total) {
    return idx;
  }

  const std::size_t r = out.size();
  const std::size_t pad = r - operand.size();
  std::vector<std::size_t> padded(r, 1);
  for (std::size_t k = 0; k < operand.size(); ++k) {
    padded[pad + k] = operand[k];
  }

  std::size_t first = 0;
  while (first < r && padded[first] == 1) {
    ++first;
  }
  bool suffix = true;
  for (std::size_t k = first; k < r; ++k) {
    suffix = suffix && padded[k] == out[k];
  }
  if (suffix) {
    idx.mode = OperandIndex::Mode::kModulo;
    return idx;
  }

  idx.mode = OperandIndex::Mode::kMapped;
  std::vector<std::size_t> stride(r, 0);
  std::size_t s = 1;
  for (std::size_t k = r; k-- > 0;) {
    stride[k] = padded[k] == 1 ? 0 : s;
    s *= padded[k];
  }
  idx.map.resize(total);
  std::vector<std::size_t> counter(r, 0);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < total; ++i) {
    idx.map[i] = static_cast<std::uint32_t>(pos);
    for (std::size_t k = r; k-- > 0;) {
      ++counter[k];
      pos += stride[k];
      if (counter[k] < out[k]) {
        break;
      }
      pos -= stride[k] * counter[k];
      counter[k] = 0;
    }
  }
  return idx;
}

struct BroadcastPlan {
  Shape out;
  OperandIndex a;
  OperandIndex b;
};

template <typename T, typename F, typename DA, typename DB>
Var<T> binary(const char *name, Var<T> a, Var<T> b, F f, DA dfa, DB dfb) {
  check_same_tape(a, b);
  Shape out_shape;
  try {
    out_shape = broadcast_shapes(a.shape(), b.shape());
  } catch (const ShapeMismatch &) {
    throw ShapeMismatch(name, a.shape(), b.shape());
  }
  auto plan = std::make_shared<BroadcastPlan>();
  plan->a = make_index(a.shape(), out_shape);
  plan->b = make_index(b.shape(), out_shape);
  plan->out = out_shape;

  const std::size_t total = numel(out_shape);
  const auto &av = a.tape().value(a.id());
  const auto &bv = b.tape().value(b.id());
  std::vector<T> out(total);
  if (plan->a.mode == OperandIndex::Mode::kDirect
      && plan->b.mode == OperandIndex::Mode::kDirect) {
    for (std::size_t i = 0; i < total; ++i) {
      out[i] = f(av[i], bv[i]);
    }
  } else if (plan->a.mode == OperandIndex::Mode::kDirect
             && plan->b.mode == OperandIndex::Mode::kModulo) {
    const std::size_t n = plan->b.n;
    for (std::size_t i = 0; i < total; i += n) {
      for (std::size_t j = 0; j < n; ++j) {
        out[i + j] = f(av[i + j], bv[j]);
      }
    }
  } else {
    for (std::size_t i = 0; i < total; ++i) {
      out[i] = f(av[plan->a(i)], bv[plan->b(i)]);
    }
  }

  const std::uint32_t ia = a.id();
  const std::uint32_t ib = b.id();
  return a.tape().record(
      std::move(out_shape), std::move(out), { a, b },
      [plan, ia, ib, dfa, dfb](Tape<T> &t, std::uint32_t self) {
        const auto &g = t.grad_buffer(self);
        const auto &av = t.value(ia);
        const auto &bv = t.value(ib);
        const std::size_t total = g.size();
        if (t.requires_grad(ia)) {
          auto &ga = t.grad_buffer(ia);
          for (std::size_t i = 0; i < total; ++i) {
            const std::size_t ja = plan->a(i);
            ga[ja] += g[i] * dfa(av[ja], bv[plan->b(i)]);
          }
        }
        if (t.requires_grad(ib)) {
          auto &gb = t.grad_buffer(ib);
          for (std::size_t i = 0; i < total; ++i) {
            const std::size_t jb = plan->b(i);
            gb[jb] += g[i] * dfb(av[plan->a(i)], bv[jb]);
          }
        }
      });
}

// dy/dx expressed through x and the forward output y.
template <typename T, typename F, typename D>
Var<T> unary(Var<T> x, F f, D df) {
  const auto &xv = x.tape().value(x.id());
  std::vector<T> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    out[i] = f(xv[i]);
  }
  const std::uint32_t ix = x.id();
  return x.tape().record(x.shape(), std::move(out), { x },
                         [ix, df](Tape<T> &t, std::uint32_t self) {
                           const auto &g = t.grad_buffer(self);
                           const auto &xv = t.value(ix);
                           const auto &yv = t.value(self);
                           auto &gx = t.grad_buffer(ix);
                           for (std::size_t i = 0; i < g.size(); ++i) {
                             gx[i] += g[i] * df(xv[i], yv[i]);
                           }
                         });
}

// (outer, axis, inner) decomposition of a shape around one axis.
struct AxisSplit {
  std::size_t outer = 1;
  std::size_t n = 1;
  std::size_t inner = 1;
};

AxisSplit split_at(const Shape &shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t k = 0; k < axis; ++k) {
    s.outer *= shape[k];
  }
  s.n = shape[axis];
  for (std::size_t k = axis + 1; k < shape.size(); ++k) {
    s.inner *= shape[k];
  }
  return s;
}

template <typename T>
Var<T> pass_through(Var<T> x, Shape shape, std::vector<T> value,
                    std::shared_ptr<std::vector<std::uint32_t>> map) {
  // out[i] = x[map[i]]; gradient scatters back through the same map.
  const std::uint32_t ix = x.id();
  return x.tape().record(std::move(shape), std::move(value), { x },
                         [ix, map](Tape<T> &t, std::uint32_t self) {
                           const auto &g = t.grad_buffer(self);
                           auto &gx = t.grad_buffer(ix);
                           const auto &m = *map;
                           for (std::size_t i = 0; i < g.size(); ++i) {
                             gx[m[i]] += g[i];
                           }
                         });
}

}  // namespace

template <typename T>
Var<T> add(Var<T> a, Var<T> b) {
  return binary<T>(
      "add", a, b, [](T x, T y) { return x + y; },
      [](T, T) { return T(1); }, [](T, T) { return T(1); });
}

template <typename T>
Var<T> sub(Var<T> a, Var<T> b) {
  return binary<T>(
      "sub", a, b, [](T x, T y) { return x - y; },
      [](T, T) { return T(1); }, [](T, T) { return T(-1); });
}

template <typename T>
Var<T> mul(Var<T> a, Var<T> b) {
  return binary<T>(
      "mul", a, b, [](T x, T y) { return x * y; }, [](T, T y) { return y; },
      [](T x, T) { return x; });
}

template <typename T>
Var<T> div(Var<T> a, Var<T> b) {
  return binary<T>(
      "div", a, b, [](T x, T y) { return x / y; },
      [](T, T y) { return T(1) / y; }, [](T x, T y) { return -x / (y * y); });
}

template <typename T>
Var<T> scale(Var<T> x, T factor) {
  return unary<T>(
      x, [factor](T v) { return v * factor; },
      [factor](T, T) { return factor; });
}

template <typename T>
Var<T> shift(Var<T> x, T offset) {
  return unary<T>(
      x, [offset](T v) { return v + offset; }, [](T, T) { return T(1); });
}

template <typename T>
Var<T> neg(Var<T> x) {
  return scale(x, T(-1));
}

template <typename T>
Var<T> exp(Var<T> x) {
  return unary<T>(
      x, [](T v) { return std::exp(v); }, [](T, T y) { return y; });
}

template <typename T>
Var<T> log(Var<T> x) {
  return unary<T>(
      x, [](T v) { return std::log(v); }, [](T v, T) { return T(1) / v; });
}

template <typename T>
Var<T> sqrt(Var<T> x) {
  return unary<T>(
      x, [](T v) { return std::sqrt(v); },
      [](T, T y) { return T(0.5) / y; });
}

template <typename T>
Var<T> square(Var<T> x) {
  return unary<T>(
      x, [](T v) { return v * v; }, [](T v, T) { return T(2) * v; });
}

template <typename T>
Var<T> sigmoid(Var<T> x) {
  return unary<T>(
      x,
      [](T v) {
        if (v >= T(0)) {
          return T(1) / (T(1) + std::exp(-v));
        }
        const T e = std::exp(v);
        return e / (T(1) + e);
      },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Var<T> softplus(Var<T> x) {
  return unary<T>(
      x,
      [](T v) { return std::max(v, T(0)) + std::log1p(std::exp(-std::abs(v))); },
      [](T v, T) {
        if (v >= T(0)) {
          return T(1) / (T(1) + std::exp(-v));
        }
        const T e = std::exp(v);
        return e / (T(1) + e);
      });
}

template <typename T>
Var<T> gelu(Var<T> x) {
  constexpr T kInvSqrt2 = T(1) / std::numbers::sqrt2_v<T>;
  constexpr T kInvSqrt2Pi = std::numbers::inv_sqrtpi_v<T> * kInvSqrt2;
  return unary<T>(
      x, [](T v) { return T(0.5) * v * (T(1) + std::erf(v * kInvSqrt2)); },
      [](T v, T) {
        return T(0.5) * (T(1) + std::erf(v * kInvSqrt2))
               + v * kInvSqrt2Pi * std::exp(T(-0.5) * v * v);
      });
}

template <typename T>
Var<T> smooth_l1(Var<T> x) {
  return unary<T>(
      x,
      [](T v) {
        const T a = std::abs(v);
        return a < T(1) ? T(0.5) * v * v : a - T(0.5);
      },
      [](T v, T) {
        if (v > T(1)) {
          return T(1);
        }
        if (v < T(-1)) {
          return T(-1);
        }
        return v;
      });
}

template <typename T>
Var<T> sum(Var<T> x, std::size_t axis, bool keepdim) {
  if (axis >= x.rank()) {
    throw ShapeMismatch("sum: axis " + std::to_string(axis)
                        + " out of range for shape "
                        + shape_string(x.shape()));
  }
  const AxisSplit s = split_at(x.shape(), axis);
  const auto &xv = x.tape().value(x.id());
  std::vector<T> out(s.outer * s.inner, T(0));
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t k = 0; k < s.n; ++k) {
      const T *src = &xv[(o * s.n + k) * s.inner];
      T *dst = &out[o * s.inner];
      for (std::size_t i = 0; i < s.inner; ++i) {
        dst[i] += src[i];
      }
    }
  }
  Shape shape = x.shape();
  if (keepdim) {
    shape[axis] = 1;
  } else {
    shape.erase(shape.begin() + static_cast<std::ptrdiff_t>(axis));
  }
  const std::uint32_t ix = x.id();
  return x.tape().record(std::move(shape), std::move(out), { x },
                         [ix, s](Tape<T> &t, std::uint32_t self) {
                           const auto &g = t.grad_buffer(self);
                           auto &gx = t.grad_buffer(ix);
                           for (std::size_t o = 0; o < s.outer; ++o) {
                             for (std::size_t k = 0; k < s.n; ++k) {
                               T *dst = &gx[(o * s.n + k) * s.inner];
                               const T *src = &g[o * s.inner];
                               for (std::size_t i = 0; i < s.inner; ++i) {
                                 dst[i] += src[i];
                               }
                             }
                           }
                         });
}

template <typename T>
Var<T> mean(Var<T> x, std::size_t axis, bool keepdim) {
  if (axis >= x.rank()) {
    throw ShapeMismatch("mean: axis " + std::to_string(axis)
                        + " out of range for shape "
                        + shape_string(x.shape()));
  }
  const T n = static_cast<T>(x.dim(axis));
  return scale(sum(x, axis, keepdim), T(1) / n);
}

template <typename T>
Var<T> sum_all(Var<T> x) {
  const auto &xv = x.tape().value(x.id());
  T acc = T(0);
  for (T v: xv) {
    acc += v;
  }
  const std::uint32_t ix = x.id();
  return x.tape().record({}, std::vector<T>(1, acc), { x },
                         [ix](Tape<T> &t, std::uint32_t self) {
                           const T g = t.grad_buffer(self)[0];
                           for (T &v: t.grad_buffer(ix)) {
                             v += g;
                           }
                         });
}

template <typename T>
Var<T> mean_all(Var<T> x) {
  return scale(sum_all(x), T(1) / static_cast<T>(x.numel()));
}

template <typename T>
Var<T> reshape(Var<T> x, Shape shape) {
  if (numel(shape) != x.numel()) {
    throw ShapeMismatch("reshape", x.shape(), shape);
  }
  const std::uint32_t ix = x.id();
  return x.tape().record(std::move(shape), x.tape().value(x.id()), { x },
                         [ix](Tape<T> &t, std::uint32_t self) {
                           const auto &g = t.grad_buffer(self);
                           auto &gx = t.grad_buffer(ix);
                           for (std::size_t i = 0; i < g.size(); ++i) {
                             gx[i] += g[i];
                           }
                         });
}

template <typename T>
Var<T> permute(Var<T> x, std::vector<std::size_t> axes) {
  const Shape &in = x.shape();
  const std::size_t r = in.size();
  std::vector<bool> seen(r, false);
  if (axes.size() != r) {
    throw ShapeMismatch("permute: " + std::to_string(axes.size())
                        + " axes given for shape " + shape_string(in));
  }
  for (std::size_t a: axes) {
    if (a >= r || seen[a]) {
      throw ShapeMismatch("permute: invalid axis order for shape "
                          + shape_string(in));
    }
    seen[a] = true;
  }

  Shape out(r);
  std::vector<std::size_t> in_stride(r);
  std::size_t s = 1;
  for (std::size_t k = r; k-- > 0;) {
    in_stride[k] = s;
    s *= in[k];
  }
  std::vector<std::size_t> stride(r);
  for (std::size_t k = 0; k < r; ++k) {
    out[k] = in[axes[k]];
    stride[k] = in_stride[axes[k]];
  }

  const std::size_t total = x.numel();
  auto map = std::make_shared<std::vector<std::uint32_t>>(total);
  std::vector<std::size_t> counter(r, 0);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < total; ++i) {
    (*map)[i] = static_cast<std::uint32_t>(pos);
    for (std::size_t k = r; k-- > 0;) {
      ++counter[k];
      pos += stride[k];
      if (counter[k] < out[k]) {
        break;
      }
      pos -= stride[k] * counter[k];
      counter[k] = 0;
    }
  }
  const auto &xv = x.tape().value(x.id());
  std::vector<T> value(total);
  for (std::size_t i = 0; i < total; ++i) {
    value[i] = xv[(*map)[i]];
  }
  return pass_through(x, std::move(out), std::move(value), std::move(map));
}

template <typename T>
Var<T> transpose(Var<T> x) {
  if (x.rank() != 2) {
    throw ShapeMismatch("transpose: expected rank 2, got shape "
                        + shape_string(x.shape()));
  }
  return permute(x, { 1, 0 });
}

template <typename T>
Var<T> broadcast_to(Var<T> x, Shape shape) {
  Shape result;
  try {
    result = broadcast_shapes(x.shape(), shape);
  } catch (const ShapeMismatch &) {
    throw ShapeMismatch("broadcast_to", x.shape(), shape);
  }
  if (result != shape) {
    throw ShapeMismatch("broadcast_to", x.shape(), shape);
  }
  OperandIndex idx = make_index(x.shape(), shape);
  const std::size_t total = numel(shape);
  auto map = std::make_shared<std::vector<std::uint32_t>>(total);
  for (std::size_t i = 0; i < total; ++i) {
    (*map)[i] = static_cast<std::uint32_t>(idx(i));
  }
  const auto &xv = x.tape().value(x.id());
  std::vector<T> value(total);
  for (std::size_t i = 0; i < total; ++i) {
    value[i] = xv[(*map)[i]];
  }
  return pass_through(x, std::move(shape), std::move(value), std::move(map));
}

template <typename T>
Var<T> concat(const std::vector<Var<T>> &xs, std::size_t axis) {
  if (xs.empty()) {
    throw ShapeMismatch("concat: no inputs");
  }
  const Shape &first = xs.front().shape();
  if (axis >= first.size()) {
    throw ShapeMismatch("concat: axis " + std::to_string(axis)
                        + " out of range for shape " + shape_string(first));
  }
  Shape out = first;
  out[axis] = 0;
  for (const auto &x: xs) {
    check_same_tape(xs.front(), x);
    const Shape &s = x.shape();
    bool ok = s.size() == first.size();
    for (std::size_t k = 0; ok && k < s.size(); ++k) {
      ok = k == axis || s[k] == first[k];
    }
    if (!ok) {
      throw ShapeMismatch("concat", first, s);
    }
    out[axis] += s[axis];
  }

  const AxisSplit whole = split_at(out, axis);
  std::vector<T> value(numel(out));
  std::vector<std::size_t> offsets;  // column offset of each input block
  std::size_t offset = 0;
  for (const auto &x: xs) {
    offsets.push_back(offset);
    const AxisSplit s = split_at(x.shape(), axis);
    const auto &xv = x.tape().value(x.id());
    const std::size_t block = s.n * s.inner;
    for (std::size_t o = 0; o < whole.outer; ++o) {
      std::copy_n(&xv[o * block], block,
                  &value[o * whole.n * whole.inner + offset * whole.inner]);
    }
    offset += s.n;
  }

  std::vector<std::uint32_t> ids;
  std::vector<std::size_t> sizes;
  for (const auto &x: xs) {
    ids.push_back(x.id());
    sizes.push_back(x.dim(axis));
  }
  return xs.front().tape().record(
      std::move(out), std::move(value), xs,
      [ids, sizes, offsets, whole](Tape<T> &t, std::uint32_t self) {
        const auto &g = t.grad_buffer(self);
        for (std::size_t j = 0; j < ids.size(); ++j) {
          if (!t.requires_grad(ids[j])) {
            continue;
          }
          auto &gx = t.grad_buffer(ids[j]);
          const std::size_t block = sizes[j] * whole.inner;
          for (std::size_t o = 0; o < whole.outer; ++o) {
            const T *src =
                &g[o * whole.n * whole.inner + offsets[j] * whole.inner];
            T *dst = &gx[o * block];
            for (std::size_t i = 0; i < block; ++i) {
              dst[i] += src[i];
            }
          }
        }
      });
}

template <typename T>
Var<T> slice(Var<T> x, std::size_t axis, std::size_t begin, std::size_t end) {
  if (axis >= x.rank() || begin > end || end > x.dim(axis)) {
    throw ShapeMismatch("slice: range [" + std::to_string(begin) + ", "
                        + std::to_string(end) + ") on axis "
                        + std::to_string(axis) + " invalid for shape "
                        + shape_string(x.shape()));
  }
  const AxisSplit s = split_at(x.shape(), axis);
  Shape out = x.shape();
  out[axis] = end - begin;
  const std::size_t block = (end - begin) * s.inner;
  const auto &xv = x.tape().value(x.id());
  std::vector<T> value(s.outer * block);
  for (std::size_t o = 0; o < s.outer; ++o) {
    std::copy_n(&xv[(o * s.n + begin) * s.inner], block, &value[o * block]);
  }
  const std::uint32_t ix = x.id();
  return x.tape().record(std::move(out), std::move(value), { x },
                         [ix, s, begin, block](Tape<T> &t, std::uint32_t self) {
                           const auto &g = t.grad_buffer(self);
                           auto &gx = t.grad_buffer(ix);
                           for (std::size_t o = 0; o < s.outer; ++o) {
                             T *dst = &gx[(o * s.n + begin) * s.inner];
                             const T *src = &g[o * block];
                             for (std::size_t i = 0; i < block; ++i) {
                               dst[i] += src[i];
                             }
                           }
                         });
}

template <typename T>
Var<T> gather_rows(Var<T> table, std::span<const std::size_t> ids) {
  if (table.rank() < 1) {
    throw ShapeMismatch("gather_rows: table must have rank >= 1");
  }
  const std::size_t rows = table.dim(0);
  const std::size_t width = rows == 0 ? 0 : table.numel() / rows;
  for (std::size_t id: ids) {
    if (id >= rows) {
      throw ShapeMismatch("gather_rows: row " + std::to_string(id)
                          + " out of range for shape "
                          + shape_string(table.shape()));
    }
  }
  Shape out = table.shape();
  out[0] = ids.size();
  const auto &tv = table.tape().value(table.id());
  std::vector<T> value(ids.size() * width);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    std::copy_n(&tv[ids[r] * width], width, &value[r * width]);
  }
  const std::uint32_t it = table.id();
  std::vector<std::size_t> rows_used(ids.begin(), ids.end());
  return table.tape().record(
      std::move(out), std::move(value), { table },
      [it, rows_used, width](Tape<T> &t, std::uint32_t self) {
        const auto &g = t.grad_buffer(self);
        auto &gt = t.grad_buffer(it);
        for (std::size_t r = 0; r < rows_used.size(); ++r) {
          T *dst = &gt[rows_used[r] * width];
          const T *src = &g[r * width];
          for (std::size_t i = 0; i < width; ++i) {
            dst[i] += src[i];
          }
        }
      });
}

template <typename T>
Var<T> matmul(Var<T> a, Var<T> b) {
  check_same_tape(a, b);
  std::size_t batch = 1;
  std::size_t m = 0;
  std::size_t k = 0;
  std::size_t n = 0;
  Shape out;
  if (a.rank() == 2 && b.rank() == 2 && a.dim(1) == b.dim(0)) {
    m = a.dim(0);
    k = a.dim(1);
    n = b.dim(1);
    out = { m, n };
  } else if (a.rank() == 3 && b.rank() == 3 && a.dim(0) == b.dim(0)
             && a.dim(2) == b.dim(1)) {
    batch = a.dim(0);
    m = a.dim(1);
    k = a.dim(2);
    n = b.dim(2);
    out = { batch, m, n };
  } else {
    throw ShapeMismatch("matmul", a.shape(), b.shape());
  }

  const auto &av = a.tape().value(a.id());
  const auto &bv = b.tape().value(b.id());
  std::vector<T> value(batch * m * n, T(0));
  for (std::size_t z = 0; z < batch; ++z) {
    const T *pa = &av[z * m * k];
    const T *pb = &bv[z * k * n];
    T *pc = value.data() + z * m * n;
    for (std::size_t i = 0; i < m; ++i) {
      T *crow = pc + i * n;
      for (std::size_t p = 0; p < k; ++p) {
        const T aip = pa[i * k + p];
        const T *brow = pb + p * n;
        for (std::size_t j = 0; j < n; ++j) {
          crow[j] += aip * brow[j];
        }
      }
    }
  }

  const std::uint32_t ia = a.id();
  const std::uint32_t ib = b.id();
  return a.tape().record(
      std::move(out), std::move(value), { a, b },
      [ia, ib, batch, m, k, n](Tape<T> &t, std::uint32_t self) {
        const auto &g = t.grad_buffer(self);
        const auto &av = t.value(ia);
        const auto &bv = t.value(ib);
        if (t.requires_grad(ia)) {
          auto &ga = t.grad_buffer(ia);
          for (std::size_t z = 0; z < batch; ++z) {
            const T *pg = &g[z * m * n];
            const T *pb = &bv[z * k * n];
            T *pga = &ga[z * m * k];
            for (std::size_t i = 0; i < m; ++i) {
              const T *grow = pg + i * n;
              for (std::size_t p = 0; p < k; ++p) {
                const T *brow = pb + p * n;
                T acc = T(0);
                for (std::size_t j = 0; j < n; ++j) {
                  acc += grow[j] * brow[j];
                }
                pga[i * k + p] += acc;
              }
            }
          }
        }
        if (t.requires_grad(ib)) {
          auto &gb = t.grad_buffer(ib);
          for (std::size_t z = 0; z < batch; ++z) {
            const T *pg = &g[z * m * n];
            const T *pa = &av[z * m * k];
            T *pgb = &gb[z * k * n];
            for (std::size_t i = 0; i < m; ++i) {
              const T *grow = pg + i * n;
              for (std::size_t p = 0; p < k; ++p) {
                const T aip = pa[i * k + p];
                T *dst = pgb + p * n;
                for (std::size_t j = 0; j < n; ++j) {
                  dst[j] += aip * grow[j];
                }
              }
            }
          }
        }
      });
}

template <typename T>
Var<T> softmax(Var<T> x) {
  if (x.rank() < 1) {
    throw ShapeMismatch("softmax: scalar input");
  }
  const std::size_t width = x.shape().back();
  const auto &xv = x.tape().value(x.id());
  std::vector<T> value(xv.size());
  for (std::size_t r = 0; r * width < xv.size(); ++r) {
    const T *src = &xv[r * width];
    T *dst = &value[r * width];
    const T mx = *std::max_element(src, src + width);
    T total = T(0);
    for (std::size_t i = 0; i < width; ++i) {
      dst[i] = std::exp(src[i] - mx);
      total += dst[i];
    }
    for (std::size_t i = 0; i < width; ++i) {
      dst[i] /= total;
    }
  }
  const std::uint32_t ix = x.id();
  return x.tape().record(x.shape(), std::move(value), { x },
                         [ix, width](Tape<T> &t, std::uint32_t self) {
                           const auto &g = t.grad_buffer(self);
                           const auto &y = t.value(self);
                           auto &gx = t.grad_buffer(ix);
                           for (std::size_t r = 0; r * width < y.size(); ++r) {
                             const std::size_t o = r * width;
                             T dot = T(0);
                             for (std::size_t i = 0; i < width; ++i) {
                               dot += g[o + i] * y[o + i];
                             }
                             for (std::size_t i = 0; i < width; ++i) {
                               gx[o + i] += y[o + i] * (g[o + i] - dot);
                             }
                           }
                         });
}

template <typename T>
Var<T> log_softmax(Var<T> x) {
  if (x.rank() < 1) {
    throw ShapeMismatch("log_softmax: scalar input");
  }
  const std::size_t width = x.shape().back();
  const auto &xv = x.tape().value(x.id());
  std::vector<T> value(xv.size());
  for (std::size_t r = 0; r * width < xv.size(); ++r) {
    const T *src = &xv[r * width];
    T *dst = &value[r * width];
    const T mx = *std::max_element(src, src + width);
    T total = T(0);
    for (std::size_t i = 0; i < width; ++i) {
      total += std::exp(src[i] - mx);
    }
    const T lse = mx + std::log(total);
    for (std::size_t i = 0; i < width; ++i) {
      dst[i] = src[i] - lse;
    }
  }
  const std::uint32_t ix = x.id();
  return x.tape().record(x.shape(), std::move(value), { x },
                         [ix, width](Tape<T> &t, std::uint32_t self) {
                           const auto &g = t.grad_buffer(self);
                           const auto &y = t.value(self);
                           auto &gx = t.grad_buffer(ix);
                           for (std::size_t r = 0; r * width < y.size(); ++r) {
                             const std::size_t o = r * width;
                             T total = T(0);
                             for (std::size_t i = 0; i < width; ++i) {
                               total += g[o + i];
                             }
                             for (std::size_t i = 0; i < width; ++i) {
                               gx[o + i] += g[o + i] - std::exp(y[o + i]) * total;
                             }
                           }
                         });
}

template <typename T>
Var<T> layer_norm(Var<T> x, T eps) {
  if (x.rank() < 1) {
    throw ShapeMismatch("layer_norm: scalar input");
  }
  const std::size_t width = x.shape().back();
  const auto &xv = x.tape().value(x.id());
  const std::size_t rows = width == 0 ? 0 : xv.size() / width;
  std::vector<T> value(xv.size());
  auto rstd = std::make_shared<std::vector<T>>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const T *src = &xv[r * width];
    T mu = T(0);
    for (std::size_t i = 0; i < width; ++i) {
      mu += src[i];
    }
    mu /= static_cast<T>(width);
    T var = T(0);
    for (std::size_t i = 0; i < width; ++i) {
      const T d = src[i] - mu;
      var += d * d;
    }
    var /= static_cast<T>(width);
    const T inv = T(1) / std::sqrt(var + eps);
    (*rstd)[r] = inv;
    for (std::size_t i = 0; i < width; ++i) {
      value[r * width + i] = (src[i] - mu) * inv;
    }
  }
  const std::uint32_t ix = x.id();
  return x.tape().record(
      x.shape(), std::move(value), { x },
      [ix, width, rstd](Tape<T> &t, std::uint32_t self) {
        const auto &g = t.grad_buffer(self);
        const auto &y = t.value(self);
        auto &gx = t.grad_buffer(ix);
        const T inv_w = T(1) / static_cast<T>(width);
        for (std::size_t r = 0; r < rstd->size(); ++r) {
          const std::size_t o = r * width;
          T mg = T(0);
          T mgy = T(0);
          for (std::size_t i = 0; i < width; ++i) {
            mg += g[o + i];
            mgy += g[o + i] * y[o + i];
          }
          mg *= inv_w;
          mgy *= inv_w;
          const T s = (*rstd)[r];
          for (std::size_t i = 0; i < width; ++i) {
            gx[o + i] += s * (g[o + i] - mg - y[o + i] * mgy);
          }
        }
      });
}

template <typename T>
Var<T> masked_fill(Var<T> x, std::span<const std::uint8_t> mask, T value) {
  if (mask.size() != x.numel()) {
    throw ShapeMismatch("masked_fill: mask has " + std::to_string(mask.size())
                        + " entries for shape " + shape_string(x.shape()));
  }
  const auto &xv = x.tape().value(x.id());
  std::vector<T> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    out[i] = mask[i] != 0 ? value : xv[i];
  }
  const std::uint32_t ix = x.id();
  std::vector<std::uint8_t> keep(mask.begin(), mask.end());
  return x.tape().record(x.shape(), std::move(out), { x },
                         [ix, keep](Tape<T> &t, std::uint32_t self) {
                           const auto &g = t.grad_buffer(self);
                           auto &gx = t.grad_buffer(ix);
                           for (std::size_t i = 0; i < g.size(); ++i) {
                             if (keep[i] == 0) {
                               gx[i] += g[i];
                             }
                           }
                         });
}

#define MOLEVERS_INSTANTIATE_OPS(T)                                           \
  template Var<T> add(Var<T>, Var<T>);                                        \
  template Var<T> sub(Var<T>, Var<T>);                                        \
  template Var<T> mul(Var<T>, Var<T>);                                        \
  template Var<T> div(Var<T>, Var<T>);                                        \
  template Var<T> scale(Var<T>, T);                                           \
  template Var<T> shift(Var<T>, T);                                           \
  template Var<T> neg(Var<T>);                                                \
  template Var<T> exp(Var<T>);                                                \
  template Var<T> log(Var<T>);                                                \
  template Var<T> sqrt(Var<T>);                                               \
  template Var<T> square(Var<T>);                                             \
  template Var<T> sigmoid(Var<T>);                                            \
  template Var<T> softplus(Var<T>);                                           \
  template Var<T> gelu(Var<T>);                                               \
  template Var<T> smooth_l1(Var<T>);                                          \
  template Var<T> sum(Var<T>, std::size_t, bool);                             \
  template Var<T> mean(Var<T>, std::size_t, bool);                            \
  template Var<T> sum_all(Var<T>);                                            \
  template Var<T> mean_all(Var<T>);                                           \
  template Var<T> reshape(Var<T>, Shape);                                     \
  template Var<T> permute(Var<T>, std::vector<std::size_t>);                  \
  template Var<T> transpose(Var<T>);                                          \
  template Var<T> broadcast_to(Var<T>, Shape);                                \
  template Var<T> concat(const std::vector<Var<T>> &, std::size_t);           \
  template Var<T> slice(Var<T>, std::size_t, std::size_t, std::size_t);       \
  template Var<T> gather_rows(Var<T>, std::span<const std::size_t>);          \
  template Var<T> matmul(Var<T>, Var<T>);                                     \
  template Var<T> softmax(Var<T>);                                            \
  template Var<T> log_softmax(Var<T>);                                        \
  template Var<T> layer_norm(Var<T>, T);                                      \
  template Var<T> masked_fill(Var<T>, std::span<const std::uint8_t>, T);

MOLEVERS_INSTANTIATE_OPS(float)
MOLEVERS_INSTANTIATE_OPS(double)

#undef MOLEVERS_INSTANTIATE_OPS

}  // namespace molevers::diffcore
