#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <vector>

#include "gcformer/legendre.hpp"
#include "gcformer/tensor.hpp"

/// Minimal tape-based reverse-mode differentiation over whole tensors.
/// Every op records its output value and a closure that pushes the output
/// gradient back into its inputs. A tape is single-use and not thread-safe.
namespace gcf::ad {

class Tape;

struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  const Tensor::Shape& shape() const { return value().shape(); }
};

class Tape {
 public:
  using BackwardFn = std::function<void(const Tensor& grad, Tape& tape)>;

  Var constant(Tensor value);
  Var variable(Tensor value);
  Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward);

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }

  /// Gradient accumulator for v, zero-initialized on first access.
  Tensor& grad(Var v);
  bool has_grad(Var v) const { return !nodes_[v.id].grad.empty() || nodes_[v.id].value.empty(); }

  /// Seeds d(root)/d(root) = 1 and runs every recorded closure in reverse.
  void backward(Var root);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    BackwardFn backward;
  };
  std::deque<Node> nodes_;
};

/// Per-row instance statistics captured at normalization time (not differentiated).
struct RowStats {
  std::vector<double> mean;
  std::vector<double> stdev;  // sqrt(var + eps)
};

RowStats row_stats(const Tensor& rows, double eps);

/// x [..., in] * w [in, out] (+ b [out]).
Var linear(Var x, Var w, std::optional<Var> b = std::nullopt);
Var relu(Var x);
Var add(Var a, Var b);
Var reshape(Var x, Tensor::Shape shape);

/// Columns [start, start + len) of a [rows, n] tensor.
Var slice_columns(Var x, std::size_t start, std::size_t len);

/// [rows, L] -> [rows, P, patch_len] with P = (L - patch_len) / stride + 1.
Var patchify(Var x, std::size_t patch_len, std::size_t stride);

/// Softmax(q k^T / sqrt(h)) v for every group: q [G, a, h], k/v [G, b, h].
Var attention(Var q, Var k, Var v);

/// out[g, t, :] = sum_f w[t, f] x[g, f, :] (+ b[t]).
Var token_mix(Var w, std::optional<Var> b, Var x);

/// [G, T1, h] ++ [G, T2, h] along the token axis.
Var concat_tokens(Var a, Var b);

/// [B*X, Y, h] -> [B*Y, X, h], out[b*Y + y, x] = in[b*X + x, y].
Var swap_groups(Var x, std::size_t batch, std::size_t outer);

/// Row r of u [R, n] is causally convolved with row (r % K) of kernel [K, n].
Var causal_conv(Var u, Var kernel);

Var msk_kernel(Var sub_kernels, double decay, std::size_t n);
Var freq_kernel(Var weights, std::size_t n);
Var leg_kernel(Var weights, std::shared_ptr<const legendre::LegBasis> basis);

/// Row r uses channel (r % channels) of gamma/beta:
///   gamma_c (x - mean_r) / stdev_r + beta_c.
Var revin_normalize(Var x, Var gamma, Var beta, const RowStats& stats);
/// (y - beta_c) / gamma_c * stdev_r + mean_r.
Var revin_denormalize(Var y, Var gamma, Var beta, const RowStats& stats);

/// Mean squared error against a constant target, as a [1] tensor.
Var mse_loss(Var pred, const Tensor& target);

}  // namespace gcf::ad
