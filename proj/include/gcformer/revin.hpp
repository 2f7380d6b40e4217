#pragma once

#include <vector>

#include "gcformer/tensor.hpp"

namespace gcf::model {

/// Instance statistics captured by revin_normalize plus the affine vectors used.
struct RevinState {
  std::vector<double> mean;
  std::vector<double> var;  // population variance
  std::vector<double> gamma;
  std::vector<double> beta;
  double eps = 1e-5;
};

struct RevinResult {
  Tensor normalized;
  RevinState state;
};

/// Per channel k of x [T, C]: gamma_k (x - mean_k) / sqrt(var_k + eps) + beta_k.
RevinResult revin_normalize(const Tensor& x, const std::vector<double>& gamma,
                            const std::vector<double>& beta, double eps);

/// Inverse affine map of revin_normalize using the stored statistics.
/// Throws std::domain_error when some gamma_k is zero.
Tensor revin_denormalize(const Tensor& y, const RevinState& state);

}  // namespace gcf::model
