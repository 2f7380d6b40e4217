#include <doctest.h>

#include <functional>
#include <random>

#include "gcformer/autodiff.hpp"
#include "gcformer/gradcheck.hpp"
#include "gcformer/legendre.hpp"

using namespace gcf;
using namespace gcf::ad;

namespace {

using Graph = std::function<Var(Tape&, const std::vector<Var>&)>;

Tensor random_tensor(Tensor::Shape shape, std::mt19937_64& rng, double scale = 1.0) {
  Tensor t(std::move(shape));
  std::normal_distribution<double> g(0.0, scale);
  for (double& v : t.data()) v = g(rng);
  return t;
}

// Scalar probe: sum(out * probe) with a fixed random probe tensor.
double evaluate(const Graph& graph, const std::vector<Tensor>& inputs, const Tensor& probe) {
  Tape tape;
  std::vector<Var> vars;
  for (const auto& t : inputs) vars.push_back(tape.constant(t));
  const Tensor& out = graph(tape, vars).value();
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * probe[i];
  return s;
}

// Compares reverse-mode gradients of every input with central differences.
double worst_gradient_error(const Graph& graph, const std::vector<Tensor>& inputs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Tape tape;
  std::vector<Var> vars;
  for (const auto& t : inputs) vars.push_back(tape.variable(t));
  const Var out = graph(tape, vars);
  const Tensor probe = random_tensor(out.shape(), rng);
  const Var loss = tape.record(Tensor({1}, {[&] {
                                 double s = 0.0;
                                 for (std::size_t i = 0; i < out.value().size(); ++i) s += out.value()[i] * probe[i];
                                 return s;
                               }()}),
                               {out}, [out, probe](const Tensor& g, Tape& t) {
                                 Tensor& d = t.grad(out);
                                 for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[0] * probe[i];
                               });
  tape.backward(loss);
  double worst = 0.0;
  for (std::size_t which = 0; which < inputs.size(); ++which) {
    const Tensor analytic = tape.grad(vars[which]);
    const ScalarFunction f = [&](std::span<const double> x) {
      std::vector<Tensor> moved = inputs;
      std::copy(x.begin(), x.end(), moved[which].data().begin());
      return evaluate(graph, moved, probe);
    };
    const auto numeric = finite_difference_gradient(f, inputs[which].data(), 1e-6);
    for (std::size_t i = 0; i < numeric.size(); ++i) {
      const double scale = std::max(1.0, std::abs(numeric[i]));
      worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / scale);
    }
  }
  return worst;
}

}  // namespace

TEST_SUITE("autodiff") {
  TEST_CASE("dense ops") {
    std::mt19937_64 rng(31);
    const Tensor x = random_tensor({2, 3, 4}, rng);
    const Tensor w = random_tensor({4, 5}, rng);
    const Tensor b = random_tensor({5}, rng);
    CHECK(worst_gradient_error([](Tape&, const std::vector<Var>& v) { return linear(v[0], v[1], v[2]); },
                               {x, w, b}, 1) < 1e-6);
    CHECK(worst_gradient_error([](Tape&, const std::vector<Var>& v) { return linear(v[0], v[1]); }, {x, w}, 2) < 1e-6);
    CHECK(worst_gradient_error([](Tape&, const std::vector<Var>& v) { return relu(v[0]); }, {x}, 3) < 1e-6);
    const Tensor y = random_tensor({2, 3, 4}, rng);
    CHECK(worst_gradient_error([](Tape&, const std::vector<Var>& v) { return add(v[0], v[1]); }, {x, y}, 4) < 1e-6);
    CHECK(worst_gradient_error([](Tape&, const std::vector<Var>& v) { return reshape(v[0], {6, 4}); }, {x}, 5) < 1e-6);
  }

  TEST_CASE("sequence ops") {
    std::mt19937_64 rng(32);
    const Tensor rows = random_tensor({3, 20}, rng);
    CHECK(worst_gradient_error([](Tape&, const std::vector<Var>& v) { return slice_columns(v[0], 7, 9); }, {rows}, 1) < 1e-6);
    CHECK(worst_gradient_error([](Tape&, const std::vector<Var>& v) { return patchify(v[0], 6, 4); }, {rows}, 2) < 1e-6);
    const Tensor a = random_tensor({4, 5, 3}, rng);
    const Tensor c = random_tensor({4, 2, 3}, rng);
    CHECK(worst_gradient_error([](Tape&, const std::vector<Var>& v) { return concat_tokens(v[0], v[1]); }, {a, c}, 3) < 1e-6);
    CHECK(worst_gradient_error([](Tape&, const std::vector<Var>& v) { return swap_groups(v[0], 2, 2); }, {a}, 4) < 1e-6);
    const Tensor mix = random_tensor({6, 5}, rng);
    const Tensor mb = random_tensor({6}, rng);
    CHECK(worst_gradient_error([](Tape&, const std::vector<Var>& v) { return token_mix(v[0], v[1], v[2]); }, {mix, mb, a}, 5) < 1e-6);
  }

  TEST_CASE("patchify layout") {
    Tape tape;
    const Var x = tape.constant(Tensor({1, 6}, {0, 1, 2, 3, 4, 5}));
    const Tensor p = patchify(x, 4, 2).value();
    REQUIRE(p.shape() == Tensor::Shape{1, 2, 4});
    CHECK(p.at(0, 1, 0) == 2.0);
    CHECK(p.at(0, 1, 3) == 5.0);
  }

  TEST_CASE("attention") {
    std::mt19937_64 rng(33);
    const Tensor q = random_tensor({2, 4, 3}, rng);
    const Tensor k = random_tensor({2, 5, 3}, rng);
    const Tensor v = random_tensor({2, 5, 3}, rng);
    CHECK(worst_gradient_error([](Tape&, const std::vector<Var>& x) { return attention(x[0], x[1], x[2]); },
                               {q, k, v}, 1) < 1e-6);
    // Outputs lie in the per-coordinate hull of the value rows.
    Tape tape;
    const Tensor out = attention(tape.constant(q), tape.constant(k), tape.constant(v)).value();
    for (std::size_t g = 0; g < 2; ++g) {
      for (std::size_t c = 0; c < 3; ++c) {
        double lo = 1e300, hi = -1e300;
        for (std::size_t j = 0; j < 5; ++j) {
          lo = std::min(lo, v.at(g, j, c));
          hi = std::max(hi, v.at(g, j, c));
        }
        for (std::size_t i = 0; i < 4; ++i) {
          CHECK(out.at(g, i, c) >= lo - 1e-12);
          CHECK(out.at(g, i, c) <= hi + 1e-12);
        }
      }
    }
  }

  TEST_CASE("convolution and kernels") {
    std::mt19937_64 rng(34);
    const Tensor u = random_tensor({4, 24}, rng);
    const Tensor k1 = random_tensor({1, 24}, rng);
    const Tensor k2 = random_tensor({2, 24}, rng);
    CHECK(worst_gradient_error([](Tape&, const std::vector<Var>& v) { return causal_conv(v[0], v[1]); }, {u, k1}, 1) < 1e-6);
    CHECK(worst_gradient_error([](Tape&, const std::vector<Var>& v) { return causal_conv(v[0], v[1]); }, {u, k2}, 2) < 1e-6);
    const Tensor msk = random_tensor({2, 3, 4}, rng);
    CHECK(worst_gradient_error([](Tape&, const std::vector<Var>& v) { return msk_kernel(v[0], 0.5, 24); }, {msk}, 3) < 1e-6);
    const Tensor fq = random_tensor({2, 13, 2}, rng);
    CHECK(worst_gradient_error([](Tape&, const std::vector<Var>& v) { return freq_kernel(v[0], 24); }, {fq}, 4) < 1e-6);
    const auto basis = std::make_shared<const legendre::LegBasis>(legendre::make_leg_basis(6, 24.0, 24));
    const Tensor lw = random_tensor({2, 4, 6}, rng);
    CHECK(worst_gradient_error([basis](Tape&, const std::vector<Var>& v) { return leg_kernel(v[0], basis); }, {lw}, 5) < 1e-6);
  }

  TEST_CASE("RevIN and loss") {
    std::mt19937_64 rng(35);
    const Tensor x = random_tensor({4, 10}, rng);
    const Tensor gamma = random_tensor({2}, rng);
    const Tensor beta = random_tensor({2}, rng);
    const RowStats stats = row_stats(x, 1e-5);
    CHECK(worst_gradient_error([stats](Tape&, const std::vector<Var>& v) { return revin_normalize(v[0], v[1], v[2], stats); },
                               {x, gamma, beta}, 1) < 1e-6);
    CHECK(worst_gradient_error([stats](Tape&, const std::vector<Var>& v) { return revin_denormalize(v[0], v[1], v[2], stats); },
                               {x, gamma, beta}, 2) < 1e-6);
    const Tensor target = random_tensor({4, 10}, rng);
    CHECK(worst_gradient_error([target](Tape&, const std::vector<Var>& v) { return mse_loss(v[0], target); }, {x}, 3) < 1e-6);
  }

  TEST_CASE("gradients accumulate across uses") {
    Tape tape;
    const Var x = tape.variable(Tensor({1}, {3.0}));
    const Var y = add(x, x);
    const Var loss = mse_loss(y, Tensor({1}, {0.0}));
    tape.backward(loss);
    // loss = (2x)^2 -> d/dx = 8x
    CHECK(tape.grad(x)[0] == doctest::Approx(24.0));
  }
}
