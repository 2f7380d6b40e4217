#include <doctest.h>

#include <cmath>
#include <random>

#include "gcformer/convolution.hpp"
#include "gcformer/errors.hpp"
#include "gcformer/fft.hpp"
#include "gcformer/gradcheck.hpp"
#include "gcformer/tensor.hpp"
#include "oracles.hpp"

using namespace gcf;

TEST_SUITE("numerics") {
  TEST_CASE("tensor shape contract") {
    Tensor t({2, 3}, 1.5);
    CHECK(t.size() == 6);
    CHECK(t.at(1, 2) == 1.5);
    CHECK_THROWS_AS(Tensor({2, 2}, std::vector<double>{1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(t.reshaped({4}), std::invalid_argument);
    CHECK(t.reshaped({3, 2}).dim(0) == 3);
    Tensor zero({0, 4});
    CHECK(zero.size() == 0);
  }

  TEST_CASE("rfft of DC and impulse") {
    const std::vector<double> dc{1, 1, 1, 1};
    const Spectrum s = rfft(dc);
    REQUIRE(s.size() == 3);
    CHECK(s[0] == Complex(4, 0));
    CHECK(std::abs(s[1]) == doctest::Approx(0.0));
    CHECK(std::abs(s[2]) == doctest::Approx(0.0));
    const std::vector<double> imp{1, 0, 0, 0};
    const Spectrum f = rfft(imp);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(f[i] - Complex(1, 0)) < 1e-15);
    CHECK_THROWS_AS(rfft(std::vector<double>{}), std::invalid_argument);
  }

  TEST_CASE("rfft matches naive DFT") {
    std::mt19937_64 rng(1);
    for (std::size_t n : {64u, 1u, 2u, 7u, 100u, 255u}) {
      const auto x = oracle::random_vector(n, rng);
      const Spectrum s = rfft(x);
      const auto want = oracle::dft(x);
      REQUIRE(s.size() == n / 2 + 1);
      for (std::size_t k = 0; k < s.size(); ++k) CHECK(std::abs(s[k] - want[k]) < 1e-10);
    }
  }

  TEST_CASE("irfft examples and round trip") {
    Spectrum s;
    s.modes = {Complex(4, 0), Complex(0, 0), Complex(0, 0)};
    const auto y = irfft(s, 4);
    for (double v : y) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
    Spectrum zero;
    zero.modes.assign(5, Complex(0, 0));
    CHECK(oracle::max_abs(irfft(zero, 8)) == 0.0);
    CHECK_THROWS_AS(irfft(zero, 4), std::invalid_argument);

    std::mt19937_64 rng(2);
    const auto x = oracle::random_vector(100, rng);
    CHECK(oracle::max_abs_diff(irfft(rfft(x), 100), x) < 1e-10);
    for (std::size_t n = 1; n <= 512; ++n) {
      const auto u = oracle::random_vector(n, rng);
      REQUIRE(oracle::max_abs_diff(irfft(rfft(u), n), u) < 1e-9);
    }
  }

  TEST_CASE("Parseval identity") {
    std::mt19937_64 rng(3);
    for (std::size_t n : {16u, 17u, 96u, 337u}) {
      const auto u = oracle::random_vector(n, rng);
      const Spectrum s = rfft(u);
      double energy = 0.0;
      for (double v : u) energy += v * v;
      double spec = std::norm(s[0]);
      for (std::size_t m = 1; m < s.size(); ++m) {
        const bool nyquist = (n % 2 == 0) && m == n / 2;
        spec += (nyquist ? 1.0 : 2.0) * std::norm(s[m]);
      }
      CHECK(std::abs(spec / static_cast<double>(n) - energy) / energy < 1e-8);
    }
  }

  TEST_CASE("circular convolution examples and oracle") {
    const std::vector<double> imp{1, 0, 0, 0};
    const std::vector<double> k{2, 3, 5, 7};
    CHECK(oracle::max_abs_diff(circular_convolve(imp, k), k) < 1e-12);
    const std::vector<double> u{1, 2, 3};
    const std::vector<double> id{1, 0, 0};
    CHECK(oracle::max_abs_diff(circular_convolve(u, id), u) < 1e-12);
    CHECK_THROWS_AS(circular_convolve(u, k), std::invalid_argument);

    std::mt19937_64 rng(4);
    const auto a = oracle::random_vector(257, rng);
    const auto b = oracle::random_vector(257, rng);
    CHECK(oracle::rel_diff(circular_convolve(a, b), oracle::circular(a, b)) < 1e-9);
  }

  TEST_CASE("circular convolution is linear") {
    std::mt19937_64 rng(5);
    const auto u = oracle::random_vector(90, rng);
    const auto v = oracle::random_vector(90, rng);
    const auto k = oracle::random_vector(90, rng);
    const double a = 0.7;
    const double b = -1.3;
    std::vector<double> mix(90);
    for (std::size_t i = 0; i < 90; ++i) mix[i] = a * u[i] + b * v[i];
    const auto cu = circular_convolve(u, k);
    const auto cv = circular_convolve(v, k);
    const auto cm = circular_convolve(mix, k);
    for (std::size_t i = 0; i < 90; ++i) CHECK(std::abs(cm[i] - (a * cu[i] + b * cv[i])) < 1e-9);
  }

  TEST_CASE("causal convolution examples and oracle") {
    const std::vector<double> imp{1, 0, 0};
    const std::vector<double> k{1, 2, 3};
    CHECK(oracle::max_abs_diff(causal_convolve(imp, k), k) < 1e-12);
    std::mt19937_64 rng(6);
    const auto u = oracle::random_vector(128, rng);
    std::vector<double> delta(128, 0.0);
    delta[0] = 1.0;
    CHECK(oracle::max_abs_diff(causal_convolve(u, delta), u) < 1e-12);
    const auto kr = oracle::random_vector(128, rng);
    CHECK(oracle::rel_diff(causal_convolve(u, kr), oracle::causal(u, kr)) < 1e-9);
    CHECK_THROWS_AS(causal_convolve(u, k), std::invalid_argument);
  }

  TEST_CASE("causal convolution never looks ahead") {
    std::mt19937_64 rng(7);
    const std::size_t n = 50;
    const auto k = oracle::random_vector(n, rng);
    for (std::size_t t : {0u, 13u, 49u}) {
      std::vector<double> u(n, 0.0);
      u[t] = 1.0;
      const auto y = causal_convolve(u, k);
      for (std::size_t s = 0; s < t; ++s) CHECK(std::abs(y[s]) < 1e-12);
      CHECK(std::abs(y[t] - k[0]) < 1e-12);
    }
  }

  TEST_CASE("causal filter adjoint") {
    std::mt19937_64 rng(8);
    const std::size_t n = 77;
    const auto k = oracle::random_vector(n, rng);
    const auto u = oracle::random_vector(n, rng);
    const auto g = oracle::random_vector(n, rng);
    const CausalFilter f(k);
    const auto y = f.apply(u);
    const auto adj = f.apply_adjoint(g);
    double lhs = 0.0;
    double rhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      lhs += y[i] * g[i];
      rhs += u[i] * adj[i];
    }
    CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(lhs)));
  }

  TEST_CASE("finite difference gradient") {
    const ScalarFunction sq = [](std::span<const double> x) { return x[0] * x[0]; };
    const std::vector<double> two{2.0};
    CHECK(std::abs(finite_difference_gradient(sq, two, 1e-4)[0] - 4.0) < 1e-7);
    const ScalarFunction flat = [](std::span<const double>) { return 3.0; };
    const std::vector<double> x{1.0, -2.0, 0.5};
    for (double v : finite_difference_gradient(flat, x, 1e-4)) CHECK(v == 0.0);
    const ScalarFunction sines = [](std::span<const double> v) { return std::sin(v[0]) + std::sin(v[1]); };
    const std::vector<double> pts{0.0, M_PI / 2};
    const auto g = finite_difference_gradient(sines, pts, 1e-4);
    CHECK(std::abs(g[0] - 1.0) < 1e-6);
    CHECK(std::abs(g[1]) < 1e-6);
    CHECK_THROWS_AS(finite_difference_gradient(sq, two, 0.0), std::invalid_argument);
    const ScalarFunction bad = [](std::span<const double> v) { return v[0] > 0 ? NAN : 0.0; };
    CHECK_THROWS_AS(finite_difference_gradient(bad, std::vector<double>{0.0}, 1e-3), NumericError);
  }
}
