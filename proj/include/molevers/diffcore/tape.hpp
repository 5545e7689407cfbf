//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_DIFFCORE_TAPE_HPP_
#define MOLEVERS_DIFFCORE_TAPE_HPP_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace molevers::diffcore {

using Shape = std::vector<std::size_t>;

/// Number of elements; the empty shape is a scalar with one element.
std::size_t numel(const Shape &shape);
std::string shape_string(const Shape &shape);

class ShapeMismatch: public std::invalid_argument {
public:
  ShapeMismatch(std::string_view op, const Shape &a, const Shape &b);
  explicit ShapeMismatch(const std::string &what);
};

class NonScalarLoss: public std::invalid_argument {
public:
  explicit NonScalarLoss(const Shape &shape);
};

/// Dense row-major array. This is the value type that lives outside a tape:
/// parameters, optimizer moments, inputs.
template <typename T>
struct Array {
  Shape shape;
  std::vector<T> data;

  Array() = default;
  explicit Array(Shape s, T fill = T(0))
      : shape(std::move(s)), data(numel(shape), fill) { }
  Array(Shape s, std::vector<T> d): shape(std::move(s)), data(std::move(d)) {
    if (data.size() != numel(shape)) {
      throw ShapeMismatch("Array: data length " + std::to_string(data.size())
                          + " does not match shape " + shape_string(shape));
    }
  }

  std::size_t size() const { return data.size(); }
  T &operator[](std::size_t i) { return data[i]; }
  const T &operator[](std::size_t i) const { return data[i]; }

  template <typename U>
  Array<U> cast() const {
    return Array<U>(shape, std::vector<U>(data.begin(), data.end()));
  }

  friend bool operator==(const Array &, const Array &) = default;
};

template <typename T>
class Tape;

/// Handle to one node of a Tape. Cheap to copy; valid while its tape lives.
template <typename T>
class Var {
public:
  Var() = default;
  Var(Tape<T> *tape, std::uint32_t id): tape_(tape), id_(id) { }

  bool valid() const { return tape_ != nullptr; }
  Tape<T> &tape() const { return *tape_; }
  std::uint32_t id() const { return id_; }

  const Shape &shape() const { return tape_->shape(id_); }
  std::size_t dim(std::size_t axis) const { return shape().at(axis); }
  std::size_t rank() const { return shape().size(); }
  std::size_t numel() const { return tape_->value(id_).size(); }
  std::span<const T> value() const { return tape_->value(id_); }
  Array<T> array() const { return Array<T>(shape(), tape_->value(id_)); }
  T item() const;

private:
  Tape<T> *tape_ = nullptr;
  std::uint32_t id_ = 0;
};

/// Records operations in creation order (which is a topological order) and
/// runs reverse-mode accumulation over them. Confined to a single thread.
template <typename T>
class Tape {
public:
  using BackwardFn = std::function<void(Tape &, std::uint32_t self)>;

  Tape() = default;
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  Var<T> constant(Array<T> value) {
    return push(std::move(value.shape), std::move(value.data), false, {});
  }
  Var<T> variable(Array<T> value) {
    return push(std::move(value.shape), std::move(value.data), true, {});
  }
  Var<T> scalar(T v) { return push({}, std::vector<T>(1, v), false, {}); }

  /// Reverse sweep from a single-element loss. Clears gradients left by a
  /// previous sweep first.
  void backward(Var<T> loss) {
    if (loss.numel() != 1) {
      throw NonScalarLoss(loss.shape());
    }
    for (auto &n: nodes_) {
      n.grad.clear();
    }
    if (!nodes_[loss.id()].requires_grad) {
      return;
    }
    grad_buffer(loss.id())[0] = T(1);
    for (std::size_t i = loss.id() + 1; i-- > 0;) {
      Node &n = nodes_[i];
      if (n.backward && !n.grad.empty()) {
        n.backward(*this, static_cast<std::uint32_t>(i));
      }
    }
  }

  /// Gradient of the last backward sweep; zeros if the node was not reached.
  Array<T> grad(Var<T> v) const {
    const Node &n = nodes_[v.id()];
    if (n.grad.empty()) {
      return Array<T>(n.shape);
    }
    return Array<T>(n.shape, n.grad);
  }

  std::size_t size() const { return nodes_.size(); }

  // -- op authoring -------------------------------------------------------

  /// Appends a node. It requires a gradient iff any parent does; otherwise
  /// the backward closure is dropped.
  Var<T> record(Shape shape, std::vector<T> value,
                std::initializer_list<Var<T>> parents, BackwardFn fn) {
    bool rg = false;
    for (const Var<T> &p: parents) {
      rg = rg || nodes_[p.id()].requires_grad;
    }
    return push(std::move(shape), std::move(value), rg,
                rg ? std::move(fn) : BackwardFn {});
  }

  Var<T> record(Shape shape, std::vector<T> value,
                const std::vector<Var<T>> &parents, BackwardFn fn) {
    bool rg = false;
    for (const Var<T> &p: parents) {
      rg = rg || nodes_[p.id()].requires_grad;
    }
    return push(std::move(shape), std::move(value), rg,
                rg ? std::move(fn) : BackwardFn {});
  }

  bool requires_grad(std::uint32_t id) const {
    return nodes_[id].requires_grad;
  }
  const Shape &shape(std::uint32_t id) const { return nodes_[id].shape; }
  const std::vector<T> &value(std::uint32_t id) const {
    return nodes_[id].value;
  }

  /// Mutable gradient of a node, zero-allocated on first access.
  std::vector<T> &grad_buffer(std::uint32_t id) {
    Node &n = nodes_[id];
    if (n.grad.empty()) {
      n.grad.assign(n.value.size(), T(0));
    }
    return n.grad;
  }

private:
  struct Node {
    Shape shape;
    std::vector<T> value;
    std::vector<T> grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  Var<T> push(Shape shape, std::vector<T> value, bool rg, BackwardFn fn) {
    if (value.size() != numel(shape)) {
      throw ShapeMismatch("tape node: value length "
                          + std::to_string(value.size())
                          + " does not match shape " + shape_string(shape));
    }
    nodes_.push_back(
        Node { std::move(shape), std::move(value), {}, rg, std::move(fn) });
    return Var<T>(this, static_cast<std::uint32_t>(nodes_.size() - 1));
  }

  // deque: references to existing nodes stay valid while new ones are pushed.
  std::deque<Node> nodes_;
};

template <typename T>
T Var<T>::item() const {
  if (numel() != 1) {
    throw NonScalarLoss(shape());
  }
  return value()[0];
}

}  // namespace molevers::diffcore

#endif  // MOLEVERS_DIFFCORE_TAPE_HPP_
