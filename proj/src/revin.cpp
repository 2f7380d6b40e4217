#include "gcformer/revin.hpp"

#include <cmath>
#include <stdexcept>

namespace gcf::model {

RevinResult revin_normalize(const Tensor& x, const std::vector<double>& gamma,
                            const std::vector<double>& beta, double eps) {
  if (x.rank() != 2 || x.dim(0) == 0) throw std::invalid_argument("revin_normalize: expects [T, C], T >= 1");
  const std::size_t steps = x.dim(0);
  const std::size_t channels = x.dim(1);
  if (gamma.size() != channels || beta.size() != channels) {
    throw std::invalid_argument("revin_normalize: affine vectors must have one entry per channel");
  }
  if (eps < 0.0) throw std::invalid_argument("revin_normalize: eps must be >= 0");
  RevinResult out{Tensor({steps, channels}),
                  RevinState{std::vector<double>(channels), std::vector<double>(channels), gamma,
                             beta, eps}};
  for (std::size_t c = 0; c < channels; ++c) {
    double mean = 0.0;
    for (std::size_t t = 0; t < steps; ++t) mean += x.at(t, c);
    mean /= static_cast<double>(steps);
    double var = 0.0;
    for (std::size_t t = 0; t < steps; ++t) var += (x.at(t, c) - mean) * (x.at(t, c) - mean);
    var /= static_cast<double>(steps);
    out.state.mean[c] = mean;
    out.state.var[c] = var;
    const double denom = std::sqrt(var + eps);
    for (std::size_t t = 0; t < steps; ++t) {
      // A zero-variance channel with eps = 0 centers to exactly zero.
      const double centered = x.at(t, c) - mean;
      const double z = denom > 0.0 ? centered / denom : 0.0;
      out.normalized.at(t, c) = gamma[c] * z + beta[c];
    }
  }
  return out;
}

Tensor revin_denormalize(const Tensor& y, const RevinState& state) {
  if (y.rank() != 2 || y.dim(1) != state.mean.size()) {
    throw std::invalid_argument("revin_denormalize: channel count does not match the state");
  }
  Tensor out(y.shape());
  for (std::size_t c = 0; c < y.dim(1); ++c) {
    if (state.gamma[c] == 0.0) {
      throw std::domain_error("revin_denormalize: gamma is zero for channel " + std::to_string(c));
    }
    const double denom = std::sqrt(state.var[c] + state.eps);
    for (std::size_t t = 0; t < y.dim(0); ++t) {
      out.at(t, c) = (y.at(t, c) - state.beta[c]) / state.gamma[c] * denom + state.mean[c];
    }
  }
  return out;
}

}  // namespace gcf::model
