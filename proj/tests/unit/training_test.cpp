#include <doctest.h>

#include <cmath>
#include <random>

#include "gcformer/autodiff.hpp"
#include "gcformer/errors.hpp"
#include "gcformer/kernels.hpp"
#include "gcformer/training.hpp"
#include "oracles.hpp"

using namespace gcf;
using namespace gcf::training;

namespace {

model::ModelConfig tiny_config() {
  model::ModelConfig c;
  c.input_len = 24;
  c.local_len = 12;
  c.pred_len = 4;
  c.channels = 1;
  c.patch_len = 4;
  c.patch_stride = 4;
  c.hidden_dim = 2;
  c.kernel.msk_base_len = 4;
  return c;
}

data::WindowedDataset constant_target(std::size_t count, double value, std::mt19937_64& rng) {
  data::WindowedDataset ds;
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    data::Sample s{Tensor({24, 1}), Tensor({4, 1}, value)};
    for (double& v : s.input.data()) v = g(rng);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

}  // namespace

TEST_SUITE("training") {
  TEST_CASE("metrics") {
    const std::vector<double> p{1, 2};
    const std::vector<double> z{0, 0};
    CHECK(mse(p, z) == 2.5);
    CHECK(mse(p, p) == 0.0);
    const std::vector<double> q{1, -1};
    CHECK(mae(q, z) == 1.0);
    CHECK(mae(q, q) == 0.0);
    CHECK_THROWS_AS(mse(p, std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(mse(Tensor({2, 1}), Tensor({1, 2})), std::invalid_argument);

    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 50; ++trial) {
      const auto a = oracle::random_vector(37, rng);
      const auto b = oracle::random_vector(37, rng);
      std::vector<double> diff(37);
      for (std::size_t i = 0; i < 37; ++i) diff[i] = a[i] - b[i];
      double s = 0.0;
      for (double d : diff) s += d * d;
      CHECK(std::abs(mse(a, b) - s / 37.0) < 1e-12);
      CHECK(mae(a, b) <= std::sqrt(mse(a, b)) + 1e-15);
    }
  }

  TEST_CASE("adam update rule") {
    std::vector<Tensor> params{Tensor({3}, {1.0, -2.0, 0.5})};
    std::vector<Tensor*> ptrs{&params[0]};
    AdamState s = AdamState::for_shapes({{3}}, 1e-3);
    adam_step(s, ptrs, {Tensor({3})});
    CHECK(params[0] == Tensor({3}, {1.0, -2.0, 0.5}));
    CHECK(s.step == 1);

    Tensor w({1}, {0.0});
    Tensor* wp = &w;
    AdamState t = AdamState::for_shapes({{1}}, 1e-3);
    adam_step(t, std::span<Tensor* const>(&wp, 1), {Tensor({1}, {0.37})});
    CHECK(w[0] == doctest::Approx(-1e-3 * 0.37 / (0.37 + 1e-8)).epsilon(1e-12));
    adam_step(t, std::span<Tensor* const>(&wp, 1), {Tensor({1}, {-4.0})});
    CHECK(t.step == 2);

    CHECK_THROWS_AS(adam_step(t, std::span<Tensor* const>(&wp, 1), {Tensor({1}, {NAN})}), NumericError);
    CHECK_THROWS_AS(adam_step(t, std::span<Tensor* const>(&wp, 1), {Tensor({2})}), std::invalid_argument);
  }

  TEST_CASE("adam shrinks a quadratic monotonically") {
    Tensor w({1}, {1.0});
    Tensor* wp = &w;
    AdamState s = AdamState::for_shapes({{1}}, 0.05);
    double prev = w[0] * w[0];
    for (int i = 0; i < 10; ++i) {
      adam_step(s, std::span<Tensor* const>(&wp, 1), {Tensor({1}, {2.0 * w[0]})});
      const double now = w[0] * w[0];
      CHECK(now < prev);
      prev = now;
    }
  }

  TEST_CASE("learns a constant target") {
    std::mt19937_64 rng(62);
    data::ForecastData fd;
    fd.train = constant_target(64, 2.0, rng);
    fd.val = constant_target(16, 2.0, rng);
    fd.test = constant_target(16, 2.0, rng);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.batch_size = 8;
    cfg.lr = 1e-2;
    cfg.patience = 0;
    const auto r = train(model::GCformerModel(tiny_config(), 1), fd, cfg);
    REQUIRE(r.report.epochs.size() == 5);
    CHECK(r.report.epochs.back().train_loss < r.report.epochs.front().train_loss);
  }

  TEST_CASE("training is deterministic and selects the best validation epoch") {
    const data::Series s = data::synth_generate(data::SynthKind::sin_mix, 600, 1, 3, {{24.0}, {1.0}, 0.2});
    const data::ForecastData fd = data::prepare(s, 24, 4, {}, 3);
    TrainConfig cfg;
    cfg.epochs = 4;
    cfg.batch_size = 16;
    cfg.lr = 5e-3;
    cfg.seed = 9;
    const auto a = train(model::GCformerModel(tiny_config(), 9), fd, cfg);
    const auto b = train(model::GCformerModel(tiny_config(), 9), fd, cfg);
    CHECK(a.report.to_csv() == b.report.to_csv());
    for (std::size_t i = 0; i < a.model.parameters().size(); ++i) {
      CHECK(a.model.parameters()[i].value == b.model.parameters()[i].value);
    }
    const auto& best = a.report.epochs.at(a.report.best_epoch - 1);
    for (const auto& e : a.report.epochs) CHECK(best.val_loss <= e.val_loss);
    const Metrics m = evaluate(a.model, fd.test);
    CHECK(m.mse == a.report.test_mse);
    CHECK(m.mae == a.report.test_mae);
    CHECK(a.report.to_csv().rfind("epoch,train_loss,val_loss\n", 0) == 0);
  }

  TEST_CASE("cannot beat a pure-noise target") {
    data::SynthParams p;
    p.amplitudes = {0.0};
    p.noise_std = 1.0;
    const data::Series s = data::synth_generate(data::SynthKind::sin_mix, 3000, 1, 4, p);
    data::DataConfig dc;
    dc.train_stride = 2;
    const data::ForecastData fd = data::prepare(s, 24, 4, dc, 4);
    double var = 0.0;
    std::size_t n = 0;
    for (const auto& smp : fd.test.samples) {
      for (double v : smp.target.data()) {
        var += v * v;
        ++n;
      }
    }
    var /= static_cast<double>(n);
    TrainConfig cfg;
    cfg.epochs = 4;
    cfg.lr = 1e-3;
    const auto r = train(model::GCformerModel(tiny_config(), 4), fd, cfg);
    CHECK(r.report.test_mse >= 0.9 * var);
    CHECK(r.report.test_mse <= 1.1 * var);
  }

  TEST_CASE("freq kernel fits a causal filter") {
    // Target y = k_true * u with k_true realizable by the frequency kernel;
    // the analytic optimum has zero loss.
    std::mt19937_64 rng(63);
    const std::size_t n = 64;
    const std::size_t m = 6;
    Tensor truth({1, m, 2});
    std::normal_distribution<double> g(0.0, 1.0);
    for (double& v : truth.data()) v = g(rng);
    const Tensor k_true = kernels::freq_forward(truth, n);
    Tensor u({32, n});
    for (double& v : u.data()) v = g(rng);
    ad::Tape ref;
    const Tensor y = ad::causal_conv(ref.constant(u), ref.constant(k_true)).value();

    Tensor w({1, m, 2});
    AdamState adam = AdamState::for_shapes({w.shape()}, 0.05);
    auto loss_at = [&](const Tensor& weights, Tensor* grad) {
      ad::Tape tape;
      const ad::Var wv = tape.variable(weights);
      const ad::Var loss = ad::mse_loss(ad::causal_conv(tape.constant(u), ad::freq_kernel(wv, n)), y);
      if (grad) {
        tape.backward(loss);
        *grad = tape.grad(wv);
      }
      return loss.value()[0];
    };
    const double initial = loss_at(w, nullptr);
    for (int epoch = 0; epoch < 200; ++epoch) {
      Tensor grad;
      loss_at(w, &grad);
      Tensor* wp = &w;
      adam_step(adam, std::span<Tensor* const>(&wp, 1), {grad});
    }
    const double final_loss = loss_at(w, nullptr);
    CHECK(final_loss <= 0.1 * initial);
  }

  TEST_CASE("train rejects empty splits") {
    data::ForecastData fd;
    CHECK_THROWS_AS(train(model::GCformerModel(tiny_config(), 1), fd, {}), std::invalid_argument);
  }
}
