#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gcformer/fft.hpp"

namespace gcf {

/// y = irfft(rfft(u) * rfft(k)); wraps around. Lengths must match.
std::vector<double> circular_convolve(std::span<const double> u, std::span<const double> k);

/// y_t = sum_{i<=t} k_i u_{t-i}. Computed through a zero-padded circular
/// convolution, so no output sample depends on later inputs.
std::vector<double> causal_convolve(std::span<const double> u, std::span<const double> k);

/// A length-n kernel with its padded spectrum precomputed, for applying the
/// same causal filter to many rows (and for the matching adjoint in backprop).
class CausalFilter {
 public:
  explicit CausalFilter(std::span<const double> kernel);

  std::size_t length() const { return n_; }

  /// Causal convolution of u (length n) with the kernel.
  std::vector<double> apply(std::span<const double> u) const;

  /// Adjoint of apply: out_t = sum_{s>=t} k_{s-t} g_s.
  std::vector<double> apply_adjoint(std::span<const double> g) const;

 private:
  std::size_t n_;
  std::size_t padded_;
  std::vector<Complex> spectrum_;
};

}  // namespace gcf
