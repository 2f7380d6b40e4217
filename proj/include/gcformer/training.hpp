#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gcformer/data.hpp"
#include "gcformer/model.hpp"
#include "gcformer/tensor.hpp"

namespace gcf::training {

/// Mean squared / absolute difference. Throws std::invalid_argument on a
/// length or shape mismatch.
double mse(std::span<const double> pred, std::span<const double> target);
double mae(std::span<const double> pred, std::span<const double> target);
double mse(const Tensor& pred, const Tensor& target);
double mae(const Tensor& pred, const Tensor& target);

struct AdamState {
  std::size_t step = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double lr = 5e-4;

  /// Zero moments shaped like `params`.
  static AdamState for_shapes(const std::vector<Tensor::Shape>& shapes, double lr);
};

/// One bias-corrected Adam update in place. Throws NumericError on
/// non-finite gradients and std::invalid_argument on misaligned shapes.
void adam_step(AdamState& state, std::span<Tensor* const> params, const std::vector<Tensor>& grads);
void adam_step(AdamState& state, std::vector<model::Parameter>& params, const std::vector<Tensor>& grads);

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  double lr = 5e-4;
  std::size_t patience = 5;  // 0 disables early stopping
  double grad_clip = 5.0;    // global L2 norm, 0 disables
  std::uint64_t seed = 0;
  std::vector<std::string> validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct Metrics {
  double mse = 0.0;
  double mae = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double test_mse = 0.0;
  double test_mae = 0.0;
  std::uint64_t seed = 0;

  /// "epoch,train_loss,val_loss" rows followed by one summary line.
  std::string to_csv() const;
};

/// Stacks samples [first, first + count) into x [B, N, C] and y [B, H, C].
void make_batch(const data::WindowedDataset& ds, const std::vector<std::size_t>& order,
                std::size_t first, std::size_t count, Tensor& x, Tensor& y);

/// Denormalized MSE / MAE over every element of the dataset targets.
Metrics evaluate(const model::GCformerModel& model, const data::WindowedDataset& ds,
                 std::size_t batch_size = 64);

struct TrainResult {
  model::GCformerModel model;  // parameters from the best validation epoch
  TrainReport report;
};

/// Adam on MSE with seeded shuffling, gradient clipping and early stopping on
/// the validation loss. Throws std::invalid_argument on empty splits.
TrainResult train(model::GCformerModel model, const data::ForecastData& data, const TrainConfig& config);

}  // namespace gcf::training
