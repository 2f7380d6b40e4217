#include "gcformer/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gcformer/fft.hpp"

namespace gcf::kernels {
namespace {

struct Tap {
  std::size_t lo;
  std::size_t hi;
  double frac;
};

// Linear interpolation with half-sample centers, clamped at the ends.
Tap upsample_tap(std::size_t j, std::size_t factor, std::size_t len) {
  double src = (static_cast<double>(j) + 0.5) / static_cast<double>(factor) - 0.5;
  if (src < 0.0) src = 0.0;
  auto lo = static_cast<std::size_t>(std::floor(src));
  if (lo > len - 1) lo = len - 1;
  const std::size_t hi = std::min(lo + 1, len - 1);
  return {lo, hi, src - static_cast<double>(lo)};
}

void check_msk(const Tensor& sub_kernels) {
  if (sub_kernels.rank() != 3 || sub_kernels.dim(1) == 0 || sub_kernels.dim(2) == 0) {
    throw std::invalid_argument("msk kernel needs at least one scale and a positive base length");
  }
}

double leg_theta_for(double theta, std::size_t n) {
  return theta > 0.0 ? theta : static_cast<double>(n);
}

}  // namespace

std::string to_string(KernelVariant v) {
  switch (v) {
    case KernelVariant::msk: return "msk";
    case KernelVariant::freq: return "freq";
    case KernelVariant::leg: return "leg";
  }
  return "?";
}

KernelVariant parse_variant(const std::string& name) {
  if (name == "msk") return KernelVariant::msk;
  if (name == "freq") return KernelVariant::freq;
  if (name == "leg") return KernelVariant::leg;
  throw std::invalid_argument("unknown kernel variant '" + name + "' (expected msk, freq, leg)");
}

std::string to_string(KernelInit v) {
  switch (v) {
    case KernelInit::random: return "random";
    case KernelInit::zero: return "zero";
    case KernelInit::ones: return "ones";
  }
  return "?";
}

KernelInit parse_init(const std::string& name) {
  if (name == "random") return KernelInit::random;
  if (name == "zero") return KernelInit::zero;
  if (name == "ones") return KernelInit::ones;
  throw std::invalid_argument("unknown kernel init '" + name + "' (expected random, zero, ones)");
}

std::size_t MultiScaleKernelParams::natural_length() const {
  return base_len * ((std::size_t{1} << num_scales) - 1);
}

KernelVariant variant_of(const KernelSpec& spec) {
  return static_cast<KernelVariant>(spec.index());
}

std::size_t channels_of(const KernelSpec& spec) {
  return std::visit([](const auto& p) { return p.channels(); }, spec);
}

Tensor& weights_of(KernelSpec& spec) {
  return std::visit(
      [](auto& p) -> Tensor& {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, MultiScaleKernelParams>) {
          return p.sub_kernels;
        } else {
          return p.weights;
        }
      },
      spec);
}

const Tensor& weights_of(const KernelSpec& spec) {
  return weights_of(const_cast<KernelSpec&>(spec));
}

std::size_t msk_scales_for(std::size_t n, std::size_t base_len) {
  if (base_len == 0) throw std::invalid_argument("msk base length must be >= 1");
  std::size_t scales = 1;
  while (base_len * ((std::size_t{1} << scales) - 1) < n) ++scales;
  return scales;
}

Tensor msk_forward(const Tensor& sub_kernels, double decay, std::size_t n) {
  check_msk(sub_kernels);
  const std::size_t channels = sub_kernels.dim(0);
  const std::size_t scales = sub_kernels.dim(1);
  const std::size_t len = sub_kernels.dim(2);
  Tensor out({channels, n});
  for (std::size_t c = 0; c < channels; ++c) {
    std::size_t pos = 0;
    double weight = 1.0;
    for (std::size_t s = 0; s < scales && pos < n; ++s, weight *= decay) {
      const std::size_t factor = std::size_t{1} << s;
      for (std::size_t j = 0; j < len * factor && pos < n; ++j, ++pos) {
        const Tap tap = upsample_tap(j, factor, len);
        out.at(c, pos) = weight * ((1.0 - tap.frac) * sub_kernels.at(c, s, tap.lo) +
                                   tap.frac * sub_kernels.at(c, s, tap.hi));
      }
    }
  }
  return out;
}

Tensor msk_adjoint(const Tensor& kernel_grad, const Tensor::Shape& weight_shape, double decay) {
  Tensor grad(weight_shape);
  const std::size_t n = kernel_grad.dim(1);
  const std::size_t scales = weight_shape[1];
  const std::size_t len = weight_shape[2];
  for (std::size_t c = 0; c < weight_shape[0]; ++c) {
    std::size_t pos = 0;
    double weight = 1.0;
    for (std::size_t s = 0; s < scales && pos < n; ++s, weight *= decay) {
      const std::size_t factor = std::size_t{1} << s;
      for (std::size_t j = 0; j < len * factor && pos < n; ++j, ++pos) {
        const Tap tap = upsample_tap(j, factor, len);
        const double g = weight * kernel_grad.at(c, pos);
        grad.at(c, s, tap.lo) += (1.0 - tap.frac) * g;
        grad.at(c, s, tap.hi) += tap.frac * g;
      }
    }
  }
  return grad;
}

Tensor materialize_msk(const MultiScaleKernelParams& params, std::size_t n) {
  if (params.num_scales == 0 || params.base_len == 0) {
    throw std::invalid_argument("materialize_msk: num_scales and base_len must be >= 1");
  }
  if (params.sub_kernels.rank() != 3 || params.sub_kernels.dim(1) != params.num_scales ||
      params.sub_kernels.dim(2) != params.base_len) {
    throw std::invalid_argument("materialize_msk: sub_kernels shape " +
                                shape_string(params.sub_kernels.shape()) +
                                " does not match scales x base_len");
  }
  return msk_forward(params.sub_kernels, params.decay, n);
}

Tensor freq_forward(const Tensor& weights, std::size_t n) {
  const std::size_t channels = weights.dim(0);
  const std::size_t modes = weights.dim(1);
  if (modes > rfft_modes(n)) {
    throw std::invalid_argument("freq kernel: " + std::to_string(modes) +
                                " modes exceed the " + std::to_string(rfft_modes(n)) +
                                " available for length " + std::to_string(n));
  }
  Tensor out({channels, n});
  Spectrum spec{std::vector<Complex>(rfft_modes(n))};
  for (std::size_t c = 0; c < channels; ++c) {
    std::fill(spec.modes.begin(), spec.modes.end(), Complex{});
    for (std::size_t j = 0; j < modes; ++j) spec[j] = Complex(weights.at(c, j, 0), weights.at(c, j, 1));
    const std::vector<double> kernel = irfft(spec, n);
    std::copy(kernel.begin(), kernel.end(), out.data().begin() + static_cast<std::ptrdiff_t>(c * n));
  }
  return out;
}

Tensor freq_adjoint(const Tensor& kernel_grad, std::size_t modes) {
  const std::size_t channels = kernel_grad.dim(0);
  const std::size_t n = kernel_grad.dim(1);
  Tensor grad({channels, modes, 2});
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t c = 0; c < channels; ++c) {
    const Spectrum g = rfft(kernel_grad.data().subspan(c * n, n));
    for (std::size_t j = 0; j < modes; ++j) {
      const bool self_conjugate = (j == 0) || (n % 2 == 0 && j == n / 2);
      const double weight = (self_conjugate ? 1.0 : 2.0) * inv_n;
      grad.at(c, j, 0) = weight * g[j].real();
      grad.at(c, j, 1) = self_conjugate ? 0.0 : weight * g[j].imag();
    }
  }
  return grad;
}

std::vector<double> apply_freq_kernel(std::span<const double> u, const FreqKernelParams& params,
                                      std::size_t channel) {
  const std::size_t n = u.size();
  if (params.weights.rank() != 3 || params.weights.dim(1) != params.modes ||
      params.weights.dim(2) != 2) {
    throw std::invalid_argument("apply_freq_kernel: weights must be [channels, modes, 2]");
  }
  if (channel >= params.weights.dim(0)) throw std::invalid_argument("apply_freq_kernel: bad channel");
  if (params.modes > rfft_modes(n)) {
    throw std::invalid_argument("apply_freq_kernel: " + std::to_string(params.modes) +
                                " modes exceed the " + std::to_string(rfft_modes(n)) + " available");
  }
  Spectrum spec = rfft(u);
  for (std::size_t j = 0; j < spec.size(); ++j) {
    if (j < params.modes) {
      spec[j] *= Complex(params.weights.at(channel, j, 0), params.weights.at(channel, j, 1));
    } else {
      spec[j] = Complex{};
    }
  }
  return irfft(spec, n);
}

Tensor leg_forward(const Tensor& weights, const legendre::LegBasis& basis) {
  const std::size_t channels = weights.dim(0);
  const std::size_t len = weights.dim(1);
  const std::size_t order = weights.dim(2);
  const std::size_t n = basis.n;
  if (static_cast<std::size_t>(basis.readout.size()) != order) {
    throw std::invalid_argument("leg kernel: weight order does not match the Legendre basis");
  }
  Tensor out({channels, n});
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t j = 0; j < order; ++j) {
      const double r = basis.readout(static_cast<Eigen::Index>(j));
      for (std::size_t i = 0; i < std::min(len, n); ++i) {
        const double w = r * weights.at(c, i, j);
        if (w == 0.0) continue;
        for (std::size_t t = i; t < n; ++t) {
          out.at(c, t) += w * basis.state_kernels(static_cast<Eigen::Index>(t - i), static_cast<Eigen::Index>(j));
        }
      }
    }
  }
  return out;
}

Tensor leg_adjoint(const Tensor& kernel_grad, const Tensor::Shape& weight_shape,
                   const legendre::LegBasis& basis) {
  Tensor grad(weight_shape);
  const std::size_t n = basis.n;
  for (std::size_t c = 0; c < weight_shape[0]; ++c) {
    for (std::size_t j = 0; j < weight_shape[2]; ++j) {
      const double r = basis.readout(static_cast<Eigen::Index>(j));
      for (std::size_t i = 0; i < std::min(weight_shape[1], n); ++i) {
        double acc = 0.0;
        for (std::size_t t = i; t < n; ++t) {
          acc += kernel_grad.at(c, t) * basis.state_kernels(static_cast<Eigen::Index>(t - i), static_cast<Eigen::Index>(j));
        }
        grad.at(c, i, j) = r * acc;
      }
    }
  }
  return grad;
}

Tensor materialize_kernel(const KernelSpec& spec, std::size_t n) {
  if (n == 0) throw std::invalid_argument("materialize_kernel: n must be >= 1");
  switch (variant_of(spec)) {
    case KernelVariant::msk:
      return materialize_msk(std::get<MultiScaleKernelParams>(spec), n);
    case KernelVariant::freq: {
      const auto& p = std::get<FreqKernelParams>(spec);
      return freq_forward(p.weights, n);
    }
    case KernelVariant::leg: {
      const auto& p = std::get<LegKernelParams>(spec);
      return leg_forward(p.weights, legendre::make_leg_basis(p.order, leg_theta_for(p.theta, n), n));
    }
  }
  throw std::logic_error("materialize_kernel: unreachable");
}

std::size_t param_count(const KernelConfig& config, std::size_t n, std::size_t channels) {
  switch (config.variant) {
    case KernelVariant::msk: {
      const std::size_t scales =
          config.msk_scales ? config.msk_scales : msk_scales_for(n, config.msk_base_len);
      return scales * config.msk_base_len * channels;
    }
    case KernelVariant::freq:
      return 2 * config.freq_modes * channels;
    case KernelVariant::leg:
      return config.leg_kernel_len * config.leg_order * channels;
  }
  return 0;
}

std::size_t param_count(const KernelSpec& spec) { return weights_of(spec).size(); }

std::vector<std::string> validate(const KernelConfig& config, std::size_t n) {
  std::vector<std::string> problems;
  switch (config.variant) {
    case KernelVariant::msk:
      if (config.msk_base_len == 0) problems.push_back("kernel.msk_base_len must be >= 1");
      if (!(config.msk_decay > 0.0 && config.msk_decay <= 1.0)) {
        problems.push_back("kernel.msk_decay must lie in (0, 1]");
      }
      if (config.msk_scales > 30) problems.push_back("kernel.msk_scales must be <= 30");
      break;
    case KernelVariant::freq:
      if (config.freq_modes == 0) problems.push_back("kernel.freq_modes must be >= 1");
      if (config.freq_modes > rfft_modes(n)) {
        problems.push_back("kernel.freq_modes (" + std::to_string(config.freq_modes) +
                           ") exceeds floor(n/2)+1 = " + std::to_string(rfft_modes(n)));
      }
      break;
    case KernelVariant::leg:
      if (config.leg_order == 0) problems.push_back("kernel.leg_order must be >= 1");
      if (config.leg_kernel_len == 0) problems.push_back("kernel.leg_kernel_len must be >= 1");
      if (config.leg_kernel_len > std::max<std::size_t>(1, n / 4)) {
        problems.push_back("kernel.leg_kernel_len (" + std::to_string(config.leg_kernel_len) +
                           ") must be <= n/4 = " + std::to_string(n / 4));
      }
      if (config.leg_theta < 0.0 || (config.leg_theta > 0.0 && config.leg_theta < 1.0)) {
        problems.push_back("kernel.leg_theta must be 0 (input length) or >= 1");
      }
      break;
  }
  if (config.init_std < 0.0) problems.push_back("kernel.init_std must be >= 0");
  return problems;
}

KernelSpec make_kernel(const KernelConfig& config, std::size_t n, std::size_t channels,
                       std::mt19937_64& rng) {
  auto problems = validate(config, n);
  if (!problems.empty()) throw std::invalid_argument(problems.front());
  std::normal_distribution<double> normal(0.0, 1.0);
  auto init = [&](Tensor& t) {
    for (double& v : t.data()) {
      switch (config.init) {
        case KernelInit::random: v = config.init_std * normal(rng); break;
        case KernelInit::zero: v = 0.0; break;
        case KernelInit::ones: v = 1.0; break;
      }
    }
  };
  switch (config.variant) {
    case KernelVariant::msk: {
      MultiScaleKernelParams p;
      p.base_len = config.msk_base_len;
      p.num_scales = config.msk_scales ? config.msk_scales : msk_scales_for(n, p.base_len);
      p.decay = config.msk_decay;
      p.sub_kernels = Tensor({channels, p.num_scales, p.base_len});
      init(p.sub_kernels);
      return p;
    }
    case KernelVariant::freq: {
      FreqKernelParams p;
      p.modes = config.freq_modes;
      p.weights = Tensor({channels, p.modes, 2});
      init(p.weights);
      if (config.init == KernelInit::ones) {
        for (std::size_t c = 0; c < channels; ++c) {
          for (std::size_t j = 0; j < p.modes; ++j) p.weights.at(c, j, 1) = 0.0;
        }
      }
      return p;
    }
    case KernelVariant::leg: {
      LegKernelParams p;
      p.order = config.leg_order;
      p.kernel_len = config.leg_kernel_len;
      p.theta = config.leg_theta;
      p.weights = Tensor({channels, p.kernel_len, p.order});
      init(p.weights);
      return p;
    }
  }
  throw std::logic_error("make_kernel: unreachable");
}

}  // namespace gcf::kernels
