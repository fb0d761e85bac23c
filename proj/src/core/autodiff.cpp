// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/core/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rovf/core/kernels.hpp"

namespace rovf {

std::size_t ParameterSet::add(std::string name, Matrix init) {
  params_.push_back({std::move(name), std::move(init)});
  return params_.size() - 1;
}

std::size_t ParameterSet::index(const std::string& name) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == name) return i;
  }
  throw std::out_of_range("no parameter named " + name);
}

std::size_t ParameterSet::scalar_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

Gradients::Gradients(const ParameterSet& set) {
  grads_.reserve(set.size());
  for (const auto& p : set) grads_.emplace_back(p.value.rows(), p.value.cols());
}

void Gradients::zero() {
  for (auto& g : grads_) g.fill(0.0);
}

void Gradients::add(const Gradients& other, double scale) {
  if (other.grads_.size() != grads_.size()) throw std::invalid_argument("Gradients::add: size");
  for (std::size_t i = 0; i < grads_.size(); ++i) {
    auto dst = grads_[i].values();
    auto src = other.grads_[i].values();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += scale * src[k];
  }
}

void Gradients::scale(double s) {
  for (auto& g : grads_) {
    for (double& v : g.values()) v *= s;
  }
}

double Gradients::squared_norm() const {
  double s = 0.0;
  for (const auto& g : grads_) {
    for (double v : g.values()) s += v * v;
  }
  return s;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void accumulate(Matrix& dst, const Matrix& src) {
  auto d = dst.values();
  auto s = src.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

}  // namespace

Var Graph::push(Matrix value, bool needs_grad) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = record_ && needs_grad;
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Matrix& Graph::grad(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) {
    const Matrix& v = val(id);
    n.grad = Matrix(v.rows(), v.cols());
  }
  return n.grad;
}

const Matrix& Graph::value(Var v) const {
  require(v.valid() && v.id < nodes_.size(), "Graph::value: invalid variable");
  return val(v.id);
}

Var Graph::constant(Matrix value) { return push(std::move(value), false); }

Var Graph::parameter(const ParameterSet& set, std::size_t index, Gradients* grads) {
  const Matrix* ref = &set[index].value;
  if (auto it = leaf_cache_.find(ref); it != leaf_cache_.end()) return Var{it->second};
  Node n;
  n.ref = ref;
  n.needs_grad = record_ && grads != nullptr;
  n.sink = n.needs_grad ? &(*grads)[index] : nullptr;
  nodes_.push_back(std::move(n));
  leaf_cache_[ref] = nodes_.size() - 1;
  return Var{nodes_.size() - 1};
}

Var Graph::linear(Var x, Var w, Var b) {
  const Matrix& xv = value(x);
  const Matrix& wv = value(w);
  Matrix y;
  kernels::matmul(xv, wv, y);
  if (b.valid()) {
    const Matrix& bv = value(b);
    require(bv.rows() == 1 && bv.cols() == y.cols(), "linear: bias shape " + shape_string(bv));
    for (std::size_t r = 0; r < y.rows(); ++r) {
      auto row = y.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) row[c] += bv(0, c);
    }
  }
  Var out = push(std::move(y), needs(x) || needs(w) || needs(b));
  if (nodes_[out.id].needs_grad) {
    nodes_[out.id].backward = [x, w, b](Graph& g, std::size_t self) {
      const Matrix& dy = g.nodes_[self].grad;
      if (g.needs(x)) {
        Matrix dx;
        kernels::matmul_nt(dy, g.val(w.id), dx);
        accumulate(g.grad(x.id), dx);
      }
      if (g.needs(w)) {
        Matrix dw;
        kernels::matmul_tn(g.val(x.id), dy, dw);
        accumulate(g.grad(w.id), dw);
      }
      if (g.needs(b)) {
        Matrix& db = g.grad(b.id);
        for (std::size_t r = 0; r < dy.rows(); ++r) {
          for (std::size_t c = 0; c < dy.cols(); ++c) db(0, c) += dy(r, c);
        }
      }
    };
  }
  return out;
}

Var Graph::add(Var a, Var b) {
  const Matrix& av = value(a);
  const Matrix& bv = value(b);
  require(av.same_shape(bv), "add: shape mismatch " + shape_string(av) + " vs " + shape_string(bv));
  Matrix y = av;
  accumulate(y, bv);
  Var out = push(std::move(y), needs(a) || needs(b));
  if (nodes_[out.id].needs_grad) {
    nodes_[out.id].backward = [a, b](Graph& g, std::size_t self) {
      const Matrix& dy = g.nodes_[self].grad;
      if (g.needs(a)) accumulate(g.grad(a.id), dy);
      if (g.needs(b)) accumulate(g.grad(b.id), dy);
    };
  }
  return out;
}

Var Graph::layer_norm(Var x, Var gain, Var bias, double eps) {
  const Matrix& xv = value(x);
  const Matrix& gv = value(gain);
  const Matrix& bv = value(bias);
  const std::size_t n = xv.rows(), d = xv.cols();
  require(gv.rows() == 1 && gv.cols() == d && bv.same_shape(gv), "layer_norm: parameter shape");
  Matrix xhat(n, d), inv_std(n, 1), y(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = xv.row(r);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d);
    const double is = 1.0 / std::sqrt(var + eps);
    inv_std(r, 0) = is;
    for (std::size_t c = 0; c < d; ++c) {
      xhat(r, c) = (row[c] - mean) * is;
      y(r, c) = xhat(r, c) * gv(0, c) + bv(0, c);
    }
  }
  Var out = push(std::move(y), needs(x) || needs(gain) || needs(bias));
  if (nodes_[out.id].needs_grad) {
    nodes_[out.id].aux = {std::move(xhat), std::move(inv_std)};
    nodes_[out.id].backward = [x, gain, bias](Graph& g, std::size_t self) {
      const Node& node = g.nodes_[self];
      const Matrix& dy = node.grad;
      const Matrix& xh = node.aux[0];
      const Matrix& is = node.aux[1];
      const Matrix& gv = g.val(gain.id);
      const std::size_t n = dy.rows(), d = dy.cols();
      if (g.needs(gain) || g.needs(bias)) {
        Matrix dg(1, d), db(1, d);
        for (std::size_t r = 0; r < n; ++r) {
          for (std::size_t c = 0; c < d; ++c) {
            dg(0, c) += dy(r, c) * xh(r, c);
            db(0, c) += dy(r, c);
          }
        }
        if (g.needs(gain)) accumulate(g.grad(gain.id), dg);
        if (g.needs(bias)) accumulate(g.grad(bias.id), db);
      }
      if (g.needs(x)) {
        Matrix& dx = g.grad(x.id);
        std::vector<double> dxh(d);
        for (std::size_t r = 0; r < n; ++r) {
          double mean_dxh = 0.0, mean_dxh_xh = 0.0;
          for (std::size_t c = 0; c < d; ++c) {
            dxh[c] = dy(r, c) * gv(0, c);
            mean_dxh += dxh[c];
            mean_dxh_xh += dxh[c] * xh(r, c);
          }
          mean_dxh /= static_cast<double>(d);
          mean_dxh_xh /= static_cast<double>(d);
          for (std::size_t c = 0; c < d; ++c) {
            dx(r, c) += is(r, 0) * (dxh[c] - mean_dxh - xh(r, c) * mean_dxh_xh);
          }
        }
      }
    };
  }
  return out;
}

Var Graph::gelu(Var x) {
  const Matrix& xv = value(x);
  Matrix y(xv.rows(), xv.cols());
  auto xs = xv.values();
  auto ys = y.values();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ys[i] = 0.5 * xs[i] * (1.0 + std::erf(xs[i] * std::numbers::sqrt2 / 2.0));
  }
  Var out = push(std::move(y), needs(x));
  if (nodes_[out.id].needs_grad) {
    nodes_[out.id].backward = [x](Graph& g, std::size_t self) {
      const Matrix& dy = g.nodes_[self].grad;
      auto xs = g.val(x.id).values();
      Matrix& dx = g.grad(x.id);
      auto dys = dy.values();
      auto dxs = dx.values();
      constexpr double kInvSqrt2Pi = 0.3989422804014327;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double cdf = 0.5 * (1.0 + std::erf(xs[i] * std::numbers::sqrt2 / 2.0));
        const double pdf = kInvSqrt2Pi * std::exp(-0.5 * xs[i] * xs[i]);
        dxs[i] += dys[i] * (cdf + xs[i] * pdf);
      }
    };
  }
  return out;
}

namespace {

Matrix dropout_mask(std::size_t rows, std::size_t cols, double p, Rng& rng) {
  Matrix mask(rows, cols);
  std::bernoulli_distribution keep(1.0 - p);
  const double scale = 1.0 / (1.0 - p);
  for (double& m : mask.values()) m = keep(rng) ? scale : 0.0;
  return mask;
}

}  // namespace

Var Graph::dropout(Var x, double p, Rng* rng) {
  if (p <= 0.0 || rng == nullptr) return x;
  require(p < 1.0, "dropout: p must be < 1");
  const Matrix& xv = value(x);
  Matrix mask = dropout_mask(xv.rows(), xv.cols(), p, *rng);
  Matrix y = xv;
  auto ys = y.values();
  auto ms = mask.values();
  for (std::size_t i = 0; i < ys.size(); ++i) ys[i] *= ms[i];
  Var out = push(std::move(y), needs(x));
  if (nodes_[out.id].needs_grad) {
    nodes_[out.id].aux = {std::move(mask)};
    nodes_[out.id].backward = [x](Graph& g, std::size_t self) {
      const Node& node = g.nodes_[self];
      auto dys = node.grad.values();
      auto ms = node.aux[0].values();
      auto dxs = g.grad(x.id).values();
      for (std::size_t i = 0; i < dxs.size(); ++i) dxs[i] += dys[i] * ms[i];
    };
  }
  return out;
}

Var Graph::attention(Var q, Var k, Var v, int heads, double p, Rng* rng) {
  const Matrix& qv = value(q);
  const Matrix& kv = value(k);
  const Matrix& vv = value(v);
  const std::size_t n = qv.rows(), t = kv.rows(), d = qv.cols();
  require(heads >= 1 && d % static_cast<std::size_t>(heads) == 0,
          "attention: width not divisible by heads");
  require(kv.cols() == d && vv.cols() == d && vv.rows() == t, "attention: shape mismatch");
  const std::size_t dh = d / static_cast<std::size_t>(heads);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const bool use_dropout = p > 0.0 && rng != nullptr;

  Matrix y(n, d);
  // aux layout: [probs_0, mask_0, probs_1, mask_1, ...]
  std::vector<Matrix> aux;
  aux.reserve(2 * static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    const std::size_t off = static_cast<std::size_t>(h) * dh;
    Matrix probs(n, t);
    for (std::size_t i = 0; i < n; ++i) {
      double max_s = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < t; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < dh; ++c) s += qv(i, off + c) * kv(j, off + c);
        probs(i, j) = s * scale;
        max_s = std::max(max_s, probs(i, j));
      }
      double z = 0.0;
      for (std::size_t j = 0; j < t; ++j) {
        probs(i, j) = std::exp(probs(i, j) - max_s);
        z += probs(i, j);
      }
      for (std::size_t j = 0; j < t; ++j) probs(i, j) /= z;
    }
    Matrix mask = use_dropout ? dropout_mask(n, t, p, *rng) : Matrix();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < t; ++j) {
        const double a = use_dropout ? probs(i, j) * mask(i, j) : probs(i, j);
        if (a == 0.0) continue;
        for (std::size_t c = 0; c < dh; ++c) y(i, off + c) += a * vv(j, off + c);
      }
    }
    aux.push_back(std::move(probs));
    aux.push_back(std::move(mask));
  }

  Var out = push(std::move(y), needs(q) || needs(k) || needs(v));
  if (nodes_[out.id].needs_grad) {
    nodes_[out.id].aux = std::move(aux);
    nodes_[out.id].backward = [q, k, v, heads, dh, scale](Graph& g, std::size_t self) {
      const Node& node = g.nodes_[self];
      const Matrix& dy = node.grad;
      const Matrix& qv = g.val(q.id);
      const Matrix& kv = g.val(k.id);
      const Matrix& vv = g.val(v.id);
      const std::size_t n = qv.rows(), t = kv.rows();
      const bool nq = g.needs(q), nk = g.needs(k), nv = g.needs(v);
      Matrix* dq = nq ? &g.grad(q.id) : nullptr;
      Matrix* dk = nk ? &g.grad(k.id) : nullptr;
      Matrix* dv = nv ? &g.grad(v.id) : nullptr;
      Matrix dprobs(n, t);
      for (int h = 0; h < heads; ++h) {
        const std::size_t off = static_cast<std::size_t>(h) * dh;
        const Matrix& probs = node.aux[2 * static_cast<std::size_t>(h)];
        const Matrix& mask = node.aux[2 * static_cast<std::size_t>(h) + 1];
        const bool masked = !mask.empty();
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < t; ++j) {
            // d(attn weight) = dy_h(i) . v_h(j)
            double da = 0.0;
            for (std::size_t c = 0; c < dh; ++c) da += dy(i, off + c) * vv(j, off + c);
            const double m = masked ? mask(i, j) : 1.0;
            dprobs(i, j) = da * m;
            if (nv) {
              const double a = probs(i, j) * m;
              if (a != 0.0) {
                for (std::size_t c = 0; c < dh; ++c) (*dv)(j, off + c) += a * dy(i, off + c);
              }
            }
          }
        }
        if (!nq && !nk) continue;
        for (std::size_t i = 0; i < n; ++i) {
          double dot = 0.0;
          for (std::size_t j = 0; j < t; ++j) dot += dprobs(i, j) * probs(i, j);
          for (std::size_t j = 0; j < t; ++j) {
            const double ds = probs(i, j) * (dprobs(i, j) - dot) * scale;
            if (ds == 0.0) continue;
            if (nq) {
              for (std::size_t c = 0; c < dh; ++c) (*dq)(i, off + c) += ds * kv(j, off + c);
            }
            if (nk) {
              for (std::size_t c = 0; c < dh; ++c) (*dk)(j, off + c) += ds * qv(i, off + c);
            }
          }
        }
      }
    };
  }
  return out;
}

Var Graph::mean_rows(Var x) {
  const Matrix& xv = value(x);
  require(xv.rows() >= 1, "mean_rows: empty input");
  Matrix y(1, xv.cols());
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    for (std::size_t c = 0; c < xv.cols(); ++c) y(0, c) += xv(r, c);
  }
  const double inv = 1.0 / static_cast<double>(xv.rows());
  for (double& v : y.values()) v *= inv;
  Var out = push(std::move(y), needs(x));
  if (nodes_[out.id].needs_grad) {
    nodes_[out.id].backward = [x, inv](Graph& g, std::size_t self) {
      const Matrix& dy = g.nodes_[self].grad;
      Matrix& dx = g.grad(x.id);
      for (std::size_t r = 0; r < dx.rows(); ++r) {
        for (std::size_t c = 0; c < dx.cols(); ++c) dx(r, c) += dy(0, c) * inv;
      }
    };
  }
  return out;
}

Var Graph::triplet_loss(Var a, Var p, Var n, double margin) {
  const Matrix& av = value(a);
  const Matrix& pv = value(p);
  const Matrix& nv = value(n);
  require(av.rows() == 1 && av.same_shape(pv) && av.same_shape(nv),
          "triplet_loss: embeddings must be row vectors of equal width");
  const double d_ap = kernels::euclidean(av.row(0), pv.row(0));
  const double d_an = kernels::euclidean(av.row(0), nv.row(0));
  const double loss = std::max(d_ap - d_an + margin, 0.0);
  Var out = push(Matrix(1, 1, loss), needs(a) || needs(p) || needs(n));
  if (nodes_[out.id].needs_grad && loss > 0.0) {
    nodes_[out.id].backward = [a, p, n, d_ap, d_an](Graph& g, std::size_t self) {
      const double up = g.nodes_[self].grad(0, 0);
      const Matrix& av = g.val(a.id);
      const Matrix& pv = g.val(p.id);
      const Matrix& nv = g.val(n.id);
      const std::size_t dim = av.cols();
      // Subgradient 0 for a term whose distance is exactly 0.
      const double sp = d_ap > 0.0 ? up / d_ap : 0.0;
      const double sn = d_an > 0.0 ? up / d_an : 0.0;
      Matrix* da = g.needs(a) ? &g.grad(a.id) : nullptr;
      Matrix* dp = g.needs(p) ? &g.grad(p.id) : nullptr;
      Matrix* dn = g.needs(n) ? &g.grad(n.id) : nullptr;
      for (std::size_t c = 0; c < dim; ++c) {
        const double ap = (av(0, c) - pv(0, c)) * sp;
        const double an = (av(0, c) - nv(0, c)) * sn;
        if (da) (*da)(0, c) += ap - an;
        if (dp) (*dp)(0, c) -= ap;
        if (dn) (*dn)(0, c) += an;
      }
    };
  }
  return out;
}

void Graph::backward(Var root, double seed) {
  require(record_, "backward: graph was built without recording");
  require(root.valid() && root.id < nodes_.size(), "backward: invalid root");
  require(val(root.id).size() == 1, "backward: root must be a scalar");
  if (!nodes_[root.id].needs_grad) return;
  grad(root.id)(0, 0) += seed;
  for (std::size_t i = root.id + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.needs_grad || node.grad.empty()) continue;
    if (node.sink != nullptr) accumulate(*node.sink, node.grad);
    if (node.backward) node.backward(*this, i);
  }
}

}  // namespace rovf
