#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gcformer/legendre.hpp"
#include "gcformer/tensor.hpp"

namespace gcf::kernels {

enum class KernelVariant { msk, freq, leg };
enum class KernelInit { random, zero, ones };

std::string to_string(KernelVariant v);
KernelVariant parse_variant(const std::string& name);
std::string to_string(KernelInit v);
KernelInit parse_init(const std::string& name);

/// Multi-scale sub-kernels: scale i is upsampled by 2^i and weighted by decay^i.
/// sub_kernels has shape [channels, num_scales, base_len].
struct MultiScaleKernelParams {
  std::size_t num_scales = 0;
  std::size_t base_len = 0;
  double decay = 0.5;
  Tensor sub_kernels;

  std::size_t channels() const { return sub_kernels.empty() ? 0 : sub_kernels.dim(0); }
  /// l0 * (2^S - 1)
  std::size_t natural_length() const;
};

/// Complex weights on the lowest `modes` frequencies; shape [channels, modes, 2]
/// holding (real, imag).
struct FreqKernelParams {
  std::size_t modes = 0;
  Tensor weights;

  std::size_t channels() const { return weights.empty() ? 0 : weights.dim(0); }
};

using legendre::LegKernelParams;

/// Exactly one parameterization is held at a time.
using KernelSpec = std::variant<MultiScaleKernelParams, FreqKernelParams, LegKernelParams>;

KernelVariant variant_of(const KernelSpec& spec);
std::size_t channels_of(const KernelSpec& spec);

/// Hyperparameters from which a KernelSpec is built.
struct KernelConfig {
  KernelVariant variant = KernelVariant::msk;
  std::size_t msk_base_len = 16;
  std::size_t msk_scales = 0;  // 0: smallest count covering the input length
  double msk_decay = 0.5;
  std::size_t freq_modes = 64;
  std::size_t leg_order = 64;
  std::size_t leg_kernel_len = 16;
  double leg_theta = 0.0;  // 0: the input length
  KernelInit init = KernelInit::random;
  double init_std = 1e-2;
};

/// Smallest S with base_len * (2^S - 1) >= n.
std::size_t msk_scales_for(std::size_t n, std::size_t base_len);

/// Materialized multi-scale kernel per channel, truncated or zero-padded to n.
/// Shape [channels, n].
Tensor materialize_msk(const MultiScaleKernelParams& params, std::size_t n);

/// y = irfft(rfft(u)[:m] * weights, n) with modes >= m zeroed.
std::vector<double> apply_freq_kernel(std::span<const double> u, const FreqKernelParams& params,
                                      std::size_t channel = 0);

/// Time-domain kernel of length n per channel, shape [channels, n]. For freq
/// this is irfft of the zero-padded weights (whose circular convolution equals
/// apply_freq_kernel); for leg it is the single causal kernel equivalent to
/// apply_leg_kernel.
Tensor materialize_kernel(const KernelSpec& spec, std::size_t n);

/// Learnable reals: msk S*l0*d, freq 2m*d, leg m*d_leg*d.
std::size_t param_count(const KernelConfig& config, std::size_t n, std::size_t channels);
std::size_t param_count(const KernelSpec& spec);

/// Validates config against the input length; returns human-readable problems.
std::vector<std::string> validate(const KernelConfig& config, std::size_t n);

/// Builds parameters for `channels` kernels of input length n.
KernelSpec make_kernel(const KernelConfig& config, std::size_t n, std::size_t channels,
                       std::mt19937_64& rng);

/// Raw weight tensor of whichever variant is held.
Tensor& weights_of(KernelSpec& spec);
const Tensor& weights_of(const KernelSpec& spec);

// Linear maps from weights to time-domain kernels and their adjoints, used by
// the differentiable model path. `weights` layouts match the param records.

Tensor msk_forward(const Tensor& sub_kernels, double decay, std::size_t n);
Tensor msk_adjoint(const Tensor& kernel_grad, const Tensor::Shape& weight_shape, double decay);

Tensor freq_forward(const Tensor& weights, std::size_t n);
Tensor freq_adjoint(const Tensor& kernel_grad, std::size_t modes);

Tensor leg_forward(const Tensor& weights, const legendre::LegBasis& basis);
Tensor leg_adjoint(const Tensor& kernel_grad, const Tensor::Shape& weight_shape,
                   const legendre::LegBasis& basis);

}  // namespace gcf::kernels
