#include "gcformer/convolution.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace gcf {
namespace {

void require_same_length(std::span<const double> u, std::span<const double> k, const char* op) {
  if (u.size() != k.size()) {
    throw std::invalid_argument(std::string(op) + ": length mismatch " + std::to_string(u.size()) +
                                " vs " + std::to_string(k.size()));
  }
  if (u.empty()) throw std::invalid_argument(std::string(op) + ": empty input");
}

std::vector<Complex> padded_spectrum(std::span<const double> x, std::size_t padded) {
  std::vector<Complex> buf(padded);
  std::copy(x.begin(), x.end(), buf.begin());
  fft(buf, false);
  return buf;
}

}  // namespace

std::vector<double> circular_convolve(std::span<const double> u, std::span<const double> k) {
  require_same_length(u, k, "circular_convolve");
  Spectrum su = rfft(u);
  const Spectrum sk = rfft(k);
  for (std::size_t i = 0; i < su.size(); ++i) su[i] *= sk[i];
  return irfft(su, u.size());
}

std::vector<double> causal_convolve(std::span<const double> u, std::span<const double> k) {
  require_same_length(u, k, "causal_convolve");
  return CausalFilter(k).apply(u);
}

CausalFilter::CausalFilter(std::span<const double> kernel)
    : n_(kernel.size()), padded_(std::bit_ceil(std::max<std::size_t>(2 * kernel.size(), 2))) {
  if (kernel.empty()) throw std::invalid_argument("CausalFilter: empty kernel");
  // Any padded length >= 2n-1 yields the same linear convolution as padding to 2n.
  spectrum_ = padded_spectrum(kernel, padded_);
}

std::vector<double> CausalFilter::apply(std::span<const double> u) const {
  if (u.size() != n_) {
    throw std::invalid_argument("causal filter: input length " + std::to_string(u.size()) +
                                " != kernel length " + std::to_string(n_));
  }
  std::vector<Complex> buf = padded_spectrum(u, padded_);
  for (std::size_t i = 0; i < padded_; ++i) buf[i] *= spectrum_[i];
  fft(buf, true);
  std::vector<double> out(n_);
  const double scale = 1.0 / static_cast<double>(padded_);
  for (std::size_t t = 0; t < n_; ++t) out[t] = buf[t].real() * scale;
  return out;
}

std::vector<double> CausalFilter::apply_adjoint(std::span<const double> g) const {
  std::vector<double> reversed(g.rbegin(), g.rend());
  std::vector<double> out = apply(reversed);
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace gcf
