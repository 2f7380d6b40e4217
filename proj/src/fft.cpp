#include "gcformer/fft.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gcf {
namespace {

// Iterative radix-2 transform with precomputed twiddles and bit reversal.
class Radix2Plan {
 public:
  explicit Radix2Plan(std::size_t n) : n_(n), twiddles_(n / 2), reversal_(n) {
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      twiddles_[k] = Complex(std::cos(angle), std::sin(angle));
    }
    const int bits = std::countr_zero(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
      reversal_[i] = r;
    }
  }

  void run(Complex* a, bool inverse) const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (i < reversal_[i]) std::swap(a[i], a[reversal_[i]]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t step = n_ / len;
      for (std::size_t start = 0; start < n_; start += len) {
        for (std::size_t j = 0; j < half; ++j) {
          Complex w = twiddles_[j * step];
          if (inverse) w = std::conj(w);
          const Complex t = w * a[start + j + half];
          a[start + j + half] = a[start + j] - t;
          a[start + j] += t;
        }
      }
    }
  }

 private:
  std::size_t n_;
  std::vector<Complex> twiddles_;
  std::vector<std::size_t> reversal_;
};

// Bluestein chirp-z: expresses a length-n DFT as a power-of-two convolution.
class BluesteinPlan {
 public:
  explicit BluesteinPlan(std::size_t n)
      : n_(n), m_(std::bit_ceil(2 * n - 1)), inner_(m_), chirp_(n), filter_(m_) {
    const std::size_t period = 2 * n;
    for (std::size_t k = 0; k < n; ++k) {
      // k^2 mod 2n keeps the angle argument small and exact.
      const std::size_t k2 = (k * k) % period;
      const double angle = std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
      chirp_[k] = Complex(std::cos(angle), -std::sin(angle));
    }
    filter_[0] = std::conj(chirp_[0]);
    for (std::size_t k = 1; k < n; ++k) {
      filter_[k] = std::conj(chirp_[k]);
      filter_[m_ - k] = std::conj(chirp_[k]);
    }
    inner_.run(filter_.data(), false);
  }

  void run(Complex* a, bool inverse) const {
    std::vector<Complex> work(m_);
    for (std::size_t k = 0; k < n_; ++k) {
      const Complex c = inverse ? std::conj(chirp_[k]) : chirp_[k];
      work[k] = a[k] * c;
    }
    inner_.run(work.data(), false);
    for (std::size_t k = 0; k < m_; ++k) {
      work[k] *= inverse ? std::conj(filter_[(m_ - k) % m_]) : filter_[k];
    }
    // conj(filter) reversed is the spectrum of the conjugate chirp filter.
    inner_.run(work.data(), true);
    const double scale = 1.0 / static_cast<double>(m_);
    for (std::size_t k = 0; k < n_; ++k) {
      const Complex c = inverse ? std::conj(chirp_[k]) : chirp_[k];
      a[k] = work[k] * scale * c;
    }
  }

 private:
  std::size_t n_;
  std::size_t m_;
  Radix2Plan inner_;
  std::vector<Complex> chirp_;
  std::vector<Complex> filter_;
};

class Plan {
 public:
  explicit Plan(std::size_t n) {
    if (std::has_single_bit(n)) {
      radix2_ = std::make_unique<Radix2Plan>(n);
    } else {
      bluestein_ = std::make_unique<BluesteinPlan>(n);
    }
  }
  void run(Complex* a, bool inverse) const {
    if (radix2_) {
      radix2_->run(a, inverse);
    } else {
      bluestein_->run(a, inverse);
    }
  }

 private:
  std::unique_ptr<Radix2Plan> radix2_;
  std::unique_ptr<BluesteinPlan> bluestein_;
};

std::shared_ptr<const Plan> plan_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::shared_ptr<const Plan>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const Plan>(n);
  return slot;
}

}  // namespace

void fft(std::vector<Complex>& values, bool inverse) {
  const std::size_t n = values.size();
  if (n <= 1) return;
  plan_for(n)->run(values.data(), inverse);
}

Spectrum rfft(std::span<const double> signal) {
  if (signal.empty()) throw std::invalid_argument("rfft: empty signal");
  std::vector<Complex> full(signal.begin(), signal.end());
  fft(full, false);
  full.resize(rfft_modes(signal.size()));
  return Spectrum{std::move(full)};
}

std::vector<double> irfft(const Spectrum& spectrum, std::size_t n) {
  if (n == 0 || spectrum.size() != rfft_modes(n)) {
    throw std::invalid_argument("irfft: " + std::to_string(spectrum.size()) +
                                " modes do not describe a signal of length " + std::to_string(n));
  }
  std::vector<Complex> full(n);
  for (std::size_t k = 0; k < spectrum.size(); ++k) full[k] = spectrum[k];
  for (std::size_t k = 1; k < spectrum.size(); ++k) {
    if (n - k != k) full[n - k] = std::conj(spectrum[k]);
  }
  full[0] = Complex(spectrum[0].real(), 0.0);
  if (n % 2 == 0) full[n / 2] = Complex(spectrum[n / 2].real(), 0.0);
  fft(full, true);
  std::vector<double> out(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t t = 0; t < n; ++t) out[t] = full[t].real() * scale;
  return out;
}

}  // namespace gcf
