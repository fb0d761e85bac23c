// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "rovf/core/matrix.hpp"
#include "rovf/core/random.hpp"

namespace rovf {

struct Parameter {
  std::string name;
  Matrix value;
};

/// Ordered, named collection of trainable matrices.
class ParameterSet {
 public:
  std::size_t add(std::string name, Matrix init);
  std::size_t size() const noexcept { return params_.size(); }
  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }
  /// Index of `name`; throws std::out_of_range if absent.
  std::size_t index(const std::string& name) const;
  std::size_t scalar_count() const noexcept;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  friend bool operator==(const ParameterSet& a, const ParameterSet& b) {
    return a.params_.size() == b.params_.size() &&
           std::equal(a.params_.begin(), a.params_.end(), b.params_.begin(),
                      [](const Parameter& x, const Parameter& y) {
                        return x.name == y.name && x.value == y.value;
                      });
  }

 private:
  std::vector<Parameter> params_;
};

/// One gradient matrix per parameter of a ParameterSet.
class Gradients {
 public:
  Gradients() = default;
  explicit Gradients(const ParameterSet& set);

  Matrix& operator[](std::size_t i) { return grads_[i]; }
  const Matrix& operator[](std::size_t i) const { return grads_[i]; }
  std::size_t size() const noexcept { return grads_.size(); }

  void zero();
  void add(const Gradients& other, double scale = 1.0);
  void scale(double s);
  double squared_norm() const;

 private:
  std::vector<Matrix> grads_;
};

struct Var {
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t id = kNone;
  bool valid() const noexcept { return id != kNone; }
};

/// Reverse-mode automatic differentiation over dense matrices.
///
/// Each operation appends a node holding its value and, when gradients are
/// being recorded, a closure that propagates the node's gradient to its
/// inputs. A graph built with `record = false` only evaluates; eval-mode
/// inference uses that path so it shares every arithmetic step with training.
class Graph {
 public:
  explicit Graph(bool record = true) : record_(record) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  bool recording() const noexcept { return record_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  Var constant(Matrix value);
  /// Leaf bound to `set[index]`. Gradients accumulate into (*grads)[index]
  /// during backward; a null `grads` freezes the parameter.
  Var parameter(const ParameterSet& set, std::size_t index, Gradients* grads);

  const Matrix& value(Var v) const;

  /// x * w + b with w of shape (in, out) and b of shape (1, out); b may be invalid.
  Var linear(Var x, Var w, Var b);
  Var add(Var a, Var b);
  /// Row-wise layer normalisation with gain/bias rows.
  Var layer_norm(Var x, Var gain, Var bias, double eps = 1e-5);
  /// Exact (erf) GELU.
  Var gelu(Var x);
  /// Inverted dropout; identity when p == 0 or rng is null.
  Var dropout(Var x, double p, Rng* rng);
  /// Multi-head scaled dot-product attention. q: (n, d), k and v: (t, d).
  /// Dropout with probability p is applied to the attention weights.
  Var attention(Var q, Var k, Var v, int heads, double p, Rng* rng);
  /// Mean over rows: (n, d) -> (1, d).
  Var mean_rows(Var x);
  /// max(||a - p|| - ||a - n|| + margin, 0) for row vectors; (1, 1) result.
  Var triplet_loss(Var a, Var p, Var n, double margin);

  /// Back-propagates from the (1, 1) node `root` seeded with `seed`.
  void backward(Var root, double seed = 1.0);

 private:
  struct Node {
    Matrix value;
    const Matrix* ref = nullptr;  // parameter leaves alias the parameter value
    Matrix grad;
    Matrix* sink = nullptr;
    bool needs_grad = false;
    std::vector<Matrix> aux;
    std::function<void(Graph&, std::size_t)> backward;
  };

  const Matrix& val(std::size_t id) const {
    const Node& n = nodes_[id];
    return n.ref ? *n.ref : n.value;
  }
  Matrix& grad(std::size_t id);
  bool needs(Var v) const { return v.valid() && nodes_[v.id].needs_grad; }
  Var push(Matrix value, bool needs_grad);

  bool record_;
  std::vector<Node> nodes_;
  std::unordered_map<const Matrix*, std::size_t> leaf_cache_;
};

}  // namespace rovf
