#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace gcf {

using Complex = std::complex<double>;

/// Non-redundant half spectrum of a real signal: floor(n/2)+1 modes.
struct Spectrum {
  std::vector<Complex> modes;

  std::size_t size() const { return modes.size(); }
  Complex& operator[](std::size_t i) { return modes[i]; }
  const Complex& operator[](std::size_t i) const { return modes[i]; }
};

/// Number of modes rfft produces for a length-n signal.
constexpr std::size_t rfft_modes(std::size_t n) { return n / 2 + 1; }

/// In-place complex DFT of any length (radix-2 for powers of two, Bluestein
/// otherwise). Unnormalized in both directions.
void fft(std::vector<Complex>& values, bool inverse = false);

/// Forward real DFT, no normalization. Throws std::invalid_argument on empty input.
Spectrum rfft(std::span<const double> signal);

/// Inverse of rfft with 1/n normalization. The imaginary parts of the DC and
/// (for even n) Nyquist modes are ignored.
std::vector<double> irfft(const Spectrum& spectrum, std::size_t n);

}  // namespace gcf
