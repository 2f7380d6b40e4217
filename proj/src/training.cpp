#include "gcformer/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "gcformer/errors.hpp"

namespace gcf::training {

namespace {

void require_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": size mismatch " + std::to_string(a) + " vs " +
                                std::to_string(b));
  }
}

}  // namespace

double mse(std::span<const double> pred, std::span<const double> target) {
  require_same(pred.size(), target.size(), "mse");
  if (pred.empty()) throw std::invalid_argument("mse: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) total += (pred[i] - target[i]) * (pred[i] - target[i]);
  return total / static_cast<double>(pred.size());
}

double mae(std::span<const double> pred, std::span<const double> target) {
  require_same(pred.size(), target.size(), "mae");
  if (pred.empty()) throw std::invalid_argument("mae: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) total += std::abs(pred[i] - target[i]);
  return total / static_cast<double>(pred.size());
}

double mse(const Tensor& pred, const Tensor& target) {
  if (pred.shape() != target.shape()) throw std::invalid_argument("mse: shape mismatch");
  return mse(pred.data(), target.data());
}

double mae(const Tensor& pred, const Tensor& target) {
  if (pred.shape() != target.shape()) throw std::invalid_argument("mae: shape mismatch");
  return mae(pred.data(), target.data());
}

AdamState AdamState::for_shapes(const std::vector<Tensor::Shape>& shapes, double lr) {
  AdamState s;
  s.lr = lr;
  for (const auto& shape : shapes) {
    s.m.emplace_back(shape);
    s.v.emplace_back(shape);
  }
  return s;
}

void adam_step(AdamState& state, std::span<Tensor* const> params, const std::vector<Tensor>& grads) {
  require_same(params.size(), grads.size(), "adam_step");
  require_same(params.size(), state.m.size(), "adam_step moments");
  for (std::size_t p = 0; p < params.size(); ++p) {
    if (params[p]->shape() != grads[p].shape() || params[p]->shape() != state.m[p].shape()) {
      throw std::invalid_argument("adam_step: shape mismatch at parameter " + std::to_string(p));
    }
    if (!grads[p].all_finite()) {
      throw NumericError("adam_step: non-finite gradient at parameter " + std::to_string(p));
    }
  }
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto w = params[p]->data();
    auto g = grads[p].data();
    auto m = state.m[p].data();
    auto v = state.v[p].data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      w[i] -= state.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + state.eps);
    }
  }
}

void adam_step(AdamState& state, std::vector<model::Parameter>& params, const std::vector<Tensor>& grads) {
  std::vector<Tensor*> ptrs;
  ptrs.reserve(params.size());
  for (auto& p : params) ptrs.push_back(&p.value);
  adam_step(state, ptrs, grads);
}

std::vector<std::string> TrainConfig::validate() const {
  std::vector<std::string> problems;
  if (epochs == 0) problems.push_back("training.epochs must be >= 1");
  if (batch_size == 0) problems.push_back("training.batch_size must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) problems.push_back("training.lr must be a positive number");
  if (!(grad_clip >= 0.0)) problems.push_back("training.grad_clip must be >= 0");
  return problems;
}

std::string TrainReport::to_csv() const {
  std::string out = "epoch,train_loss,val_loss\n";
  char buf[160];
  for (const auto& e : epochs) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", e.epoch, e.train_loss, e.val_loss);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "# best_epoch=%zu,test_mse=%.17g,test_mae=%.17g,seed=%llu\n", best_epoch,
                test_mse, test_mae, static_cast<unsigned long long>(seed));
  out += buf;
  return out;
}

void make_batch(const data::WindowedDataset& ds, const std::vector<std::size_t>& order,
                std::size_t first, std::size_t count, Tensor& x, Tensor& y) {
  const Tensor& in0 = ds.samples.at(order.at(first)).input;
  const Tensor& out0 = ds.samples.at(order.at(first)).target;
  x = Tensor({count, in0.dim(0), in0.dim(1)});
  y = Tensor({count, out0.dim(0), out0.dim(1)});
  for (std::size_t b = 0; b < count; ++b) {
    const auto& s = ds.samples.at(order.at(first + b));
    std::copy(s.input.data().begin(), s.input.data().end(), x.data().begin() + b * in0.size());
    std::copy(s.target.data().begin(), s.target.data().end(), y.data().begin() + b * out0.size());
  }
}

Metrics evaluate(const model::GCformerModel& model, const data::WindowedDataset& ds, std::size_t batch_size) {
  if (ds.empty()) throw std::invalid_argument("evaluate: empty dataset");
  if (batch_size == 0) batch_size = 1;
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  double sq = 0.0;
  double ab = 0.0;
  std::size_t count = 0;
  Tensor x;
  Tensor y;
  for (std::size_t first = 0; first < ds.size(); first += batch_size) {
    const std::size_t n = std::min(batch_size, ds.size() - first);
    make_batch(ds, order, first, n, x, y);
    const Tensor pred = model.predict(x);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const double d = pred[i] - y[i];
      sq += d * d;
      ab += std::abs(d);
    }
    count += pred.size();
  }
  return {sq / static_cast<double>(count), ab / static_cast<double>(count)};
}

TrainResult train(model::GCformerModel model, const data::ForecastData& data, const TrainConfig& config) {
  if (data.train.empty() || data.val.empty() || data.test.empty()) {
    throw std::invalid_argument("train: train, validation and test splits must be non-empty");
  }
  const auto problems = config.validate();
  if (!problems.empty()) throw std::invalid_argument("train: " + problems.front());

  std::vector<Tensor::Shape> shapes;
  for (const auto& p : model.parameters()) shapes.push_back(p.value.shape());
  AdamState adam = AdamState::for_shapes(shapes, config.lr);
  std::mt19937_64 rng(config.seed);

  TrainReport report;
  report.seed = config.seed;
  std::vector<model::Parameter> best = model.parameters();
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  std::vector<std::size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Tensor x;
  Tensor y;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(order[i - 1], order[pick(rng)]);
    }
    double loss_sum = 0.0;
    for (std::size_t first = 0; first < order.size(); first += config.batch_size) {
      const std::size_t n = std::min(config.batch_size, order.size() - first);
      make_batch(data.train, order, first, n, x, y);
      model::Gradients g = model::parameter_gradients(model, x, y);
      loss_sum += g.loss * static_cast<double>(n);
      if (config.grad_clip > 0.0) {
        double norm2 = 0.0;
        for (const auto& t : g.grads) {
          for (double v : t.data()) norm2 += v * v;
        }
        const double norm = std::sqrt(norm2);
        if (norm > config.grad_clip) {
          const double scale = config.grad_clip / norm;
          for (auto& t : g.grads) {
            for (double& v : t.data()) v *= scale;
          }
        }
      }
      adam_step(adam, model.parameters(), g.grads);
    }
    EpochRecord rec{epoch, loss_sum / static_cast<double>(order.size()), evaluate(model, data.val).mse};
    if (!std::isfinite(rec.train_loss) || !std::isfinite(rec.val_loss)) {
      throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch));
    }
    report.epochs.push_back(rec);
    if (rec.val_loss < best_val) {
      best_val = rec.val_loss;
      best = model.parameters();
      report.best_epoch = epoch;
      since_best = 0;
    } else if (config.patience > 0 && ++since_best >= config.patience) {
      break;
    }
  }
  model.parameters() = best;
  const Metrics test = evaluate(model, data.test);
  report.test_mse = test.mse;
  report.test_mae = test.mae;
  return {std::move(model), std::move(report)};
}

}  // namespace gcf::training
