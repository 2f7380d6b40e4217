#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gcformer/autodiff.hpp"
#include "gcformer/kernels.hpp"
#include "gcformer/revin.hpp"
#include "gcformer/tensor.hpp"

namespace gcf::model {

enum class DecoderMode { attention, concat, series_gl, series_lg };
enum class AttentionAxis { token, channel };
enum class Branches { both, local_only, global_only };

std::string to_string(DecoderMode m);
std::string to_string(AttentionAxis a);
std::string to_string(Branches b);
DecoderMode parse_decoder_mode(const std::string& s);
AttentionAxis parse_attention_axis(const std::string& s);
Branches parse_branches(const std::string& s);

struct ModelConfig {
  std::size_t input_len = 336;  // N, global window
  std::size_t local_len = 96;   // N', tail fed to the local branch
  std::size_t pred_len = 96;    // H
  std::size_t channels = 1;     // C
  kernels::KernelConfig kernel;
  std::size_t patch_len = 16;
  std::size_t patch_stride = 8;
  std::size_t hidden_dim = 16;
  DecoderMode decoder_mode = DecoderMode::attention;
  AttentionAxis attention_axis = AttentionAxis::token;
  bool channel_independent = true;
  Branches branches = Branches::both;
  bool decoder_residual = true;
  std::size_t decoder_depth = 1;
  bool revin = true;
  double revin_eps = 1e-5;

  /// Patch tokens produced from the local window.
  std::size_t patches() const;
  /// Distinct global kernels: one shared kernel under channel independence.
  std::size_t kernel_channels() const;
  /// Every violated constraint, human readable.
  std::vector<std::string> validate() const;
};

struct Parameter {
  std::string name;
  Tensor value;
};

/// The dual-branch forecaster. Parameters are enumerated in a fixed order that
/// depends only on the configuration.
class GCformerModel {
 public:
  GCformerModel(ModelConfig config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }
  const Parameter& parameter(const std::string& name) const;
  Parameter& parameter(const std::string& name);
  bool has_parameter(const std::string& name) const;
  std::size_t parameter_count() const;

  /// Learnable reals per component prefix (revin, global.kernel, global.proj,
  /// local, decoder, head), in enumeration order.
  std::vector<std::pair<std::string, std::size_t>> component_counts() const;

  /// The global kernel parameters as a KernelSpec (copies the weights).
  kernels::KernelSpec kernel_spec() const;

  /// Builds the full differentiable forward pass for a batch x [B, N, C].
  /// `param_vars` receives one tape variable per parameter in enumeration
  /// order. Returns denormalized predictions in row layout [B*C, H] with row
  /// b*C + c.
  ad::Var build_forward(ad::Tape& tape, const Tensor& x, std::vector<ad::Var>& param_vars) const;

  /// x [N, C] -> [H, C] or x [B, N, C] -> [B, H, C].
  Tensor predict(const Tensor& x) const;

 private:
  friend struct GraphBuilder;
  ModelConfig config_;
  std::vector<Parameter> params_;
  std::shared_ptr<const legendre::LegBasis> leg_basis_global_;
  std::shared_ptr<const legendre::LegBasis> leg_basis_local_;
};

/// Global branch on an already-normalized window x [N, C]: causal global
/// kernel per channel followed by the pointwise map to the hidden width.
/// Returns [C, N, h].
Tensor global_branch_forward(const GCformerModel& model, const Tensor& x);

/// Local branch on the normalized tail [N', C]: patching, linear patch
/// embedding and one self-attention layer. Returns [C, P, h].
Tensor local_branch_forward(const GCformerModel& model, const Tensor& x_tail);

/// Softmax(q k^T / sqrt(h)) v for q [a, h], k and v [b, h].
Tensor cross_attention(const Tensor& q, const Tensor& k, const Tensor& v);

/// Fuses branch features into normalized-space predictions [C, H].
/// attention / concat: z_global [C, N, h], z_local [C, P, h].
/// series_gl: z_local is the local branch run on the global output.
/// series_lg: z_global is the global branch run on the unpatched local output.
/// Throws std::invalid_argument when shapes do not fit the decoder mode.
Tensor decode(const GCformerModel& model, const Tensor& z_global, const Tensor& z_local);

/// RevIN -> branches -> decoder -> inverse RevIN. x [N, C] -> [H, C].
Tensor gcformer_forward(const GCformerModel& model, const Tensor& x);

struct Gradients {
  double loss = 0.0;
  std::vector<Tensor> grads;  // aligned with parameters()
};

/// MSE between denormalized predictions for x [B, N, C] and y [B, H, C], with
/// analytic gradients for every parameter. Throws NumericError on a
/// non-finite loss.
Gradients parameter_gradients(const GCformerModel& model, const Tensor& x, const Tensor& y);

/// Loss only, same definition as parameter_gradients.
double batch_loss(const GCformerModel& model, const Tensor& x, const Tensor& y);

/// [B, T, C] <-> [B*C, T] row layout used by the channel-independent path.
Tensor to_rows(const Tensor& batch);
Tensor from_rows(const Tensor& rows, std::size_t batch, std::size_t channels);

}  // namespace gcf::model
