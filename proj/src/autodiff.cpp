#include "gcformer/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gcformer/convolution.hpp"
#include "gcformer/kernels.hpp"

namespace gcf::ad {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

std::size_t last_dim(const Tensor& t) { return t.shape().back(); }

}  // namespace

const Tensor& Var::value() const { return tape->value(*this); }

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor{}, false, nullptr});
  return {this, nodes_.size() - 1};
}

Var Tape::variable(Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor{}, true, nullptr});
  return {this, nodes_.size() - 1};
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward) {
  bool needs = false;
  for (Var v : inputs) needs = needs || requires_grad(v);
  nodes_.push_back(Node{std::move(value), Tensor{}, needs, needs ? std::move(backward) : nullptr});
  return {this, nodes_.size() - 1};
}

Tensor& Tape::grad(Var v) {
  Node& node = nodes_[v.id];
  if (node.grad.shape() != node.value.shape()) node.grad = Tensor(node.value.shape());
  return node.grad;
}

void Tape::backward(Var root) {
  require(value(root).size() == 1, "backward: root must be a scalar");
  grad(root)[0] = 1.0;
  for (std::size_t i = root.id + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.backward || node.grad.shape() != node.value.shape()) continue;
    node.backward(node.grad, *this);
  }
}

RowStats row_stats(const Tensor& rows, double eps) {
  const std::size_t n = last_dim(rows);
  const std::size_t count = rows.size() / n;
  RowStats stats{std::vector<double>(count), std::vector<double>(count)};
  for (std::size_t r = 0; r < count; ++r) {
    const double* x = rows.data().data() + r * n;
    double mean = 0.0;
    for (std::size_t t = 0; t < n; ++t) mean += x[t];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t t = 0; t < n; ++t) var += (x[t] - mean) * (x[t] - mean);
    var /= static_cast<double>(n);
    stats.mean[r] = mean;
    stats.stdev[r] = std::sqrt(var + eps);
  }
  return stats;
}

Var linear(Var x, Var w, std::optional<Var> b) {
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  require(wv.rank() == 2 && last_dim(xv) == wv.dim(0),
          "linear: input " + shape_string(xv.shape()) + " vs weight " + shape_string(wv.shape()));
  const std::size_t in = wv.dim(0);
  const std::size_t out = wv.dim(1);
  const std::size_t rows = xv.size() / in;
  if (b) require(b->value().size() == out, "linear: bias size mismatch");

  Tensor::Shape shape = xv.shape();
  shape.back() = out;
  Tensor y(shape);
  const double* xp = xv.data().data();
  const double* wp = wv.data().data();
  double* yp = y.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    double* yr = yp + r * out;
    if (b) std::copy_n(b->value().data().data(), out, yr);
    const double* xr = xp + r * in;
    for (std::size_t i = 0; i < in; ++i) {
      const double xi = xr[i];
      if (xi == 0.0) continue;
      const double* wr = wp + i * out;
      for (std::size_t o = 0; o < out; ++o) yr[o] += xi * wr[o];
    }
  }

  Tape& tape = *x.tape;
  if (b) {
    return tape.record(std::move(y), {x, w, *b}, [x, w, bias = *b, in, out, rows](const Tensor& g, Tape& t) {
      const double* gp = g.data().data();
      if (t.requires_grad(x)) {
        double* dx = t.grad(x).data().data();
        const double* wp = t.value(w).data().data();
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t i = 0; i < in; ++i) {
            const double* wr = wp + i * out;
            const double* gr = gp + r * out;
            double acc = 0.0;
            for (std::size_t o = 0; o < out; ++o) acc += gr[o] * wr[o];
            dx[r * in + i] += acc;
          }
        }
      }
      if (t.requires_grad(w)) {
        double* dw = t.grad(w).data().data();
        const double* xp = t.value(x).data().data();
        for (std::size_t r = 0; r < rows; ++r) {
          const double* gr = gp + r * out;
          for (std::size_t i = 0; i < in; ++i) {
            const double xi = xp[r * in + i];
            if (xi == 0.0) continue;
            double* dwr = dw + i * out;
            for (std::size_t o = 0; o < out; ++o) dwr[o] += xi * gr[o];
          }
        }
      }
      if (t.requires_grad(bias)) {
        double* db = t.grad(bias).data().data();
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t o = 0; o < out; ++o) db[o] += gp[r * out + o];
        }
      }
    });
  }
  return linear(x, w, tape.constant(Tensor({out})));
}

Var relu(Var x) {
  Tensor y = x.value();
  for (double& v : y.data()) v = std::max(v, 0.0);
  return x.tape->record(std::move(y), {x}, [x](const Tensor& g, Tape& t) {
    const Tensor& xv = t.value(x);
    Tensor& dx = t.grad(x);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (xv[i] > 0.0) dx[i] += g[i];
    }
  });
}

Var add(Var a, Var b) {
  require(a.shape() == b.shape(), "add: shape mismatch " + shape_string(a.shape()) + " vs " +
                                      shape_string(b.shape()));
  Tensor y = a.value();
  y += b.value();
  return a.tape->record(std::move(y), {a, b}, [a, b](const Tensor& g, Tape& t) {
    if (t.requires_grad(a)) t.grad(a) += g;
    if (t.requires_grad(b)) t.grad(b) += g;
  });
}

Var reshape(Var x, Tensor::Shape shape) {
  Tensor y = x.value().reshaped(std::move(shape));
  return x.tape->record(std::move(y), {x}, [x](const Tensor& g, Tape& t) {
    Tensor& dx = t.grad(x);
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i];
  });
}

Var slice_columns(Var x, std::size_t start, std::size_t len) {
  const Tensor& xv = x.value();
  require(xv.rank() == 2 && start + len <= xv.dim(1), "slice_columns: range out of bounds");
  const std::size_t rows = xv.dim(0);
  const std::size_t n = xv.dim(1);
  Tensor y({rows, len});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < len; ++j) y.at(r, j) = xv.at(r, start + j);
  }
  return x.tape->record(std::move(y), {x}, [x, rows, n, start, len](const Tensor& g, Tape& t) {
    Tensor& dx = t.grad(x);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < len; ++j) dx[r * n + start + j] += g[r * len + j];
    }
  });
}

Var patchify(Var x, std::size_t patch_len, std::size_t stride) {
  const Tensor& xv = x.value();
  require(xv.rank() == 2, "patchify: expects [rows, length]");
  const std::size_t rows = xv.dim(0);
  const std::size_t n = xv.dim(1);
  require(patch_len >= 1 && patch_len <= n && stride >= 1,
          "patchify: patch_len " + std::to_string(patch_len) + " invalid for length " +
              std::to_string(n));
  const std::size_t patches = (n - patch_len) / stride + 1;
  Tensor y({rows, patches, patch_len});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t p = 0; p < patches; ++p) {
      for (std::size_t j = 0; j < patch_len; ++j) y.at(r, p, j) = xv.at(r, p * stride + j);
    }
  }
  return x.tape->record(std::move(y), {x}, [=](const Tensor& g, Tape& t) {
    Tensor& dx = t.grad(x);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t p = 0; p < patches; ++p) {
        for (std::size_t j = 0; j < patch_len; ++j) {
          dx[r * n + p * stride + j] += g[(r * patches + p) * patch_len + j];
        }
      }
    }
  });
}

Var attention(Var q, Var k, Var v) {
  const Tensor& qv = q.value();
  const Tensor& kv = k.value();
  const Tensor& vv = v.value();
  require(qv.rank() == 3 && kv.rank() == 3 && vv.rank() == 3, "attention: expects rank-3 inputs");
  const std::size_t groups = qv.dim(0);
  const std::size_t a = qv.dim(1);
  const std::size_t h = qv.dim(2);
  const std::size_t b = kv.dim(1);
  require(kv.dim(0) == groups && vv.dim(0) == groups && kv.dim(2) == h && vv.dim(1) == b &&
              vv.dim(2) == h,
          "attention: shape mismatch q" + shape_string(qv.shape()) + " k" +
              shape_string(kv.shape()) + " v" + shape_string(vv.shape()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(h));

  auto weights = std::make_shared<Tensor>(Tensor::Shape{groups, a, b});
  Tensor y({groups, a, h});
  std::vector<double> row(b);
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t i = 0; i < a; ++i) {
      double peak = -INFINITY;
      for (std::size_t j = 0; j < b; ++j) {
        double s = 0.0;
        for (std::size_t d = 0; d < h; ++d) s += qv.at(g, i, d) * kv.at(g, j, d);
        row[j] = s * scale;
        peak = std::max(peak, row[j]);
      }
      double total = 0.0;
      for (std::size_t j = 0; j < b; ++j) {
        row[j] = std::exp(row[j] - peak);
        total += row[j];
      }
      for (std::size_t j = 0; j < b; ++j) {
        const double w = row[j] / total;
        weights->at(g, i, j) = w;
        for (std::size_t d = 0; d < h; ++d) y.at(g, i, d) += w * vv.at(g, j, d);
      }
    }
  }

  return q.tape->record(std::move(y), {q, k, v}, [=](const Tensor& grad, Tape& t) {
    const Tensor& qv = t.value(q);
    const Tensor& kv = t.value(k);
    const Tensor& vv = t.value(v);
    const bool need_q = t.requires_grad(q);
    const bool need_k = t.requires_grad(k);
    const bool need_v = t.requires_grad(v);
    Tensor* dq = need_q ? &t.grad(q) : nullptr;
    Tensor* dk = need_k ? &t.grad(k) : nullptr;
    Tensor* dv = need_v ? &t.grad(v) : nullptr;
    std::vector<double> dw(b);
    for (std::size_t g = 0; g < groups; ++g) {
      for (std::size_t i = 0; i < a; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < b; ++j) {
          double s = 0.0;
          for (std::size_t d = 0; d < h; ++d) s += grad.at(g, i, d) * vv.at(g, j, d);
          dw[j] = s;
          dot += s * weights->at(g, i, j);
        }
        for (std::size_t j = 0; j < b; ++j) {
          const double w = weights->at(g, i, j);
          if (dv) {
            for (std::size_t d = 0; d < h; ++d) dv->at(g, j, d) += w * grad.at(g, i, d);
          }
          const double ds = w * (dw[j] - dot) * scale;
          if (ds == 0.0) continue;
          if (dq) {
            for (std::size_t d = 0; d < h; ++d) dq->at(g, i, d) += ds * kv.at(g, j, d);
          }
          if (dk) {
            for (std::size_t d = 0; d < h; ++d) dk->at(g, j, d) += ds * qv.at(g, i, d);
          }
        }
      }
    }
  });
}

Var token_mix(Var w, std::optional<Var> b, Var x) {
  const Tensor& wv = w.value();
  const Tensor& xv = x.value();
  require(wv.rank() == 2 && xv.rank() == 3 && wv.dim(1) == xv.dim(1),
          "token_mix: weight " + shape_string(wv.shape()) + " vs input " + shape_string(xv.shape()));
  const std::size_t groups = xv.dim(0);
  const std::size_t from = xv.dim(1);
  const std::size_t h = xv.dim(2);
  const std::size_t to = wv.dim(0);
  if (b) require(b->value().size() == to, "token_mix: bias size mismatch");
  Tensor y({groups, to, h});
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t o = 0; o < to; ++o) {
      double* yr = &y.at(g, o, 0);
      if (b) std::fill_n(yr, h, b->value()[o]);
      for (std::size_t f = 0; f < from; ++f) {
        const double wf = wv.at(o, f);
        const double* xr = &xv.at(g, f, 0);
        for (std::size_t d = 0; d < h; ++d) yr[d] += wf * xr[d];
      }
    }
  }
  Tape& tape = *x.tape;
  const Var bias = b ? *b : tape.constant(Tensor({to}));
  return tape.record(std::move(y), {w, bias, x}, [=](const Tensor& grad, Tape& t) {
    const Tensor& wv = t.value(w);
    const Tensor& xv = t.value(x);
    Tensor* dw = t.requires_grad(w) ? &t.grad(w) : nullptr;
    Tensor* db = t.requires_grad(bias) ? &t.grad(bias) : nullptr;
    Tensor* dx = t.requires_grad(x) ? &t.grad(x) : nullptr;
    for (std::size_t g = 0; g < groups; ++g) {
      for (std::size_t o = 0; o < to; ++o) {
        const double* gr = &grad.at(g, o, 0);
        if (db) {
          for (std::size_t d = 0; d < h; ++d) (*db)[o] += gr[d];
        }
        for (std::size_t f = 0; f < from; ++f) {
          if (dw) {
            const double* xr = &xv.at(g, f, 0);
            double acc = 0.0;
            for (std::size_t d = 0; d < h; ++d) acc += gr[d] * xr[d];
            dw->at(o, f) += acc;
          }
          if (dx) {
            const double wf = wv.at(o, f);
            double* dxr = &dx->at(g, f, 0);
            for (std::size_t d = 0; d < h; ++d) dxr[d] += wf * gr[d];
          }
        }
      }
    }
  });
}

Var concat_tokens(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require(av.rank() == 3 && bv.rank() == 3 && av.dim(0) == bv.dim(0) && av.dim(2) == bv.dim(2),
          "concat_tokens: shape mismatch");
  const std::size_t groups = av.dim(0);
  const std::size_t ta = av.dim(1);
  const std::size_t tb = bv.dim(1);
  const std::size_t h = av.dim(2);
  Tensor y({groups, ta + tb, h});
  for (std::size_t g = 0; g < groups; ++g) {
    std::copy_n(&av.at(g, 0, 0), ta * h, &y.at(g, 0, 0));
    std::copy_n(&bv.at(g, 0, 0), tb * h, &y.at(g, ta, 0));
  }
  return a.tape->record(std::move(y), {a, b}, [=](const Tensor& grad, Tape& t) {
    for (std::size_t g = 0; g < groups; ++g) {
      if (t.requires_grad(a)) {
        double* da = &t.grad(a).at(g, 0, 0);
        const double* gr = &grad.at(g, 0, 0);
        for (std::size_t i = 0; i < ta * h; ++i) da[i] += gr[i];
      }
      if (t.requires_grad(b)) {
        double* db = &t.grad(b).at(g, 0, 0);
        const double* gr = &grad.at(g, ta, 0);
        for (std::size_t i = 0; i < tb * h; ++i) db[i] += gr[i];
      }
    }
  });
}

Var swap_groups(Var x, std::size_t batch, std::size_t outer) {
  const Tensor& xv = x.value();
  require(xv.rank() == 3 && xv.dim(0) == batch * outer, "swap_groups: leading extent mismatch");
  const std::size_t inner = xv.dim(1);
  const std::size_t h = xv.dim(2);
  Tensor y({batch * inner, outer, h});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t i = 0; i < inner; ++i) {
        std::copy_n(&xv.at(b * outer + o, i, 0), h, &y.at(b * inner + i, o, 0));
      }
    }
  }
  return x.tape->record(std::move(y), {x}, [=](const Tensor& grad, Tape& t) {
    Tensor& dx = t.grad(x);
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t i = 0; i < inner; ++i) {
          double* d = &dx.at(b * outer + o, i, 0);
          const double* gr = &grad.at(b * inner + i, o, 0);
          for (std::size_t k = 0; k < h; ++k) d[k] += gr[k];
        }
      }
    }
  });
}

Var causal_conv(Var u, Var kernel) {
  const Tensor& uv = u.value();
  const Tensor& kv = kernel.value();
  require(uv.rank() == 2 && kv.rank() == 2 && uv.dim(1) == kv.dim(1) && kv.dim(0) >= 1,
          "causal_conv: input " + shape_string(uv.shape()) + " vs kernel " +
              shape_string(kv.shape()));
  const std::size_t rows = uv.dim(0);
  const std::size_t n = uv.dim(1);
  const std::size_t kernels = kv.dim(0);
  auto filters = std::make_shared<std::vector<CausalFilter>>();
  filters->reserve(kernels);
  for (std::size_t c = 0; c < kernels; ++c) filters->emplace_back(kv.data().subspan(c * n, n));
  Tensor y({rows, n});
  for (std::size_t r = 0; r < rows; ++r) {
    const std::vector<double> out = (*filters)[r % kernels].apply(uv.data().subspan(r * n, n));
    std::copy(out.begin(), out.end(), y.data().begin() + static_cast<std::ptrdiff_t>(r * n));
  }
  return u.tape->record(std::move(y), {u, kernel}, [=](const Tensor& grad, Tape& t) {
    for (std::size_t r = 0; r < rows; ++r) {
      const auto g = grad.data().subspan(r * n, n);
      if (t.requires_grad(u)) {
        const std::vector<double> du = (*filters)[r % kernels].apply_adjoint(g);
        double* dst = t.grad(u).data().data() + r * n;
        for (std::size_t i = 0; i < n; ++i) dst[i] += du[i];
      }
      if (t.requires_grad(kernel)) {
        const std::vector<double> dk = CausalFilter(t.value(u).data().subspan(r * n, n)).apply_adjoint(g);
        double* dst = t.grad(kernel).data().data() + (r % kernels) * n;
        for (std::size_t i = 0; i < n; ++i) dst[i] += dk[i];
      }
    }
  });
}

Var msk_kernel(Var sub_kernels, double decay, std::size_t n) {
  Tensor y = kernels::msk_forward(sub_kernels.value(), decay, n);
  return sub_kernels.tape->record(std::move(y), {sub_kernels}, [=](const Tensor& grad, Tape& t) {
    t.grad(sub_kernels) += kernels::msk_adjoint(grad, t.value(sub_kernels).shape(), decay);
  });
}

Var freq_kernel(Var weights, std::size_t n) {
  Tensor y = kernels::freq_forward(weights.value(), n);
  const std::size_t modes = weights.value().dim(1);
  return weights.tape->record(std::move(y), {weights}, [=](const Tensor& grad, Tape& t) {
    t.grad(weights) += kernels::freq_adjoint(grad, modes);
  });
}

Var leg_kernel(Var weights, std::shared_ptr<const legendre::LegBasis> basis) {
  Tensor y = kernels::leg_forward(weights.value(), *basis);
  return weights.tape->record(std::move(y), {weights}, [=](const Tensor& grad, Tape& t) {
    t.grad(weights) += kernels::leg_adjoint(grad, t.value(weights).shape(), *basis);
  });
}

Var revin_normalize(Var x, Var gamma, Var beta, const RowStats& stats) {
  const Tensor& xv = x.value();
  require(xv.rank() == 2 && stats.mean.size() == xv.dim(0), "revin_normalize: stats mismatch");
  const std::size_t rows = xv.dim(0);
  const std::size_t n = xv.dim(1);
  const std::size_t channels = gamma.value().size();
  require(channels >= 1 && beta.value().size() == channels && rows % channels == 0,
          "revin_normalize: affine vectors do not match the channel count");
  Tensor y({rows, n});
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t c = r % channels;
    const double gm = gamma.value()[c];
    const double bt = beta.value()[c];
    for (std::size_t j = 0; j < n; ++j) {
      y.at(r, j) = gm * (xv.at(r, j) - stats.mean[r]) / stats.stdev[r] + bt;
    }
  }
  return x.tape->record(std::move(y), {x, gamma, beta}, [=](const Tensor& grad, Tape& t) {
    const Tensor& xv = t.value(x);
    const Tensor& gv = t.value(gamma);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t c = r % channels;
      for (std::size_t j = 0; j < n; ++j) {
        const double g = grad.at(r, j);
        const double z = (xv.at(r, j) - stats.mean[r]) / stats.stdev[r];
        if (t.requires_grad(gamma)) t.grad(gamma)[c] += g * z;
        if (t.requires_grad(beta)) t.grad(beta)[c] += g;
        if (t.requires_grad(x)) t.grad(x).at(r, j) += g * gv[c] / stats.stdev[r];
      }
    }
  });
}

Var revin_denormalize(Var y, Var gamma, Var beta, const RowStats& stats) {
  const Tensor& yv = y.value();
  require(yv.rank() == 2 && stats.mean.size() == yv.dim(0), "revin_denormalize: stats mismatch");
  const std::size_t rows = yv.dim(0);
  const std::size_t n = yv.dim(1);
  const std::size_t channels = gamma.value().size();
  Tensor out({rows, n});
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t c = r % channels;
    const double gm = gamma.value()[c];
    const double bt = beta.value()[c];
    for (std::size_t j = 0; j < n; ++j) {
      out.at(r, j) = (yv.at(r, j) - bt) / gm * stats.stdev[r] + stats.mean[r];
    }
  }
  return y.tape->record(std::move(out), {y, gamma, beta}, [=](const Tensor& grad, Tape& t) {
    const Tensor& yv = t.value(y);
    const Tensor& gv = t.value(gamma);
    const Tensor& bv = t.value(beta);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t c = r % channels;
      const double s = stats.stdev[r] / gv[c];
      for (std::size_t j = 0; j < n; ++j) {
        const double g = grad.at(r, j);
        if (t.requires_grad(y)) t.grad(y).at(r, j) += g * s;
        if (t.requires_grad(beta)) t.grad(beta)[c] -= g * s;
        if (t.requires_grad(gamma)) {
          t.grad(gamma)[c] -= g * (yv.at(r, j) - bv[c]) * s / gv[c];
        }
      }
    }
  });
}

Var mse_loss(Var pred, const Tensor& target) {
  const Tensor& pv = pred.value();
  require(pv.size() == target.size(), "mse_loss: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) total += (pv[i] - target[i]) * (pv[i] - target[i]);
  const double count = static_cast<double>(pv.size());
  auto tgt = std::make_shared<Tensor>(target);
  return pred.tape->record(Tensor({1}, {total / count}), {pred}, [=](const Tensor& grad, Tape& t) {
    const Tensor& pv = t.value(pred);
    Tensor& dp = t.grad(pred);
    const double s = 2.0 * grad[0] / count;
    for (std::size_t i = 0; i < pv.size(); ++i) dp[i] += s * (pv[i] - (*tgt)[i]);
  });
}

}  // namespace gcf::ad
