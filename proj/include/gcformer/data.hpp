#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcformer/tensor.hpp"

namespace gcf::data {

enum class DataErrorKind { file_not_found, io, empty, malformed_row, non_numeric, non_monotone };

std::string to_string(DataErrorKind kind);

class DataError : public std::runtime_error {
 public:
  DataError(DataErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  DataErrorKind kind() const { return kind_; }

 private:
  DataErrorKind kind_;
};

/// A multichannel series with one timestamp label per row.
struct Series {
  std::vector<std::string> timestamps;
  Tensor values;  // [T, C]
  std::vector<std::string> channel_names;

  std::size_t length() const { return values.empty() ? 0 : values.dim(0); }
  std::size_t channels() const { return values.rank() == 2 ? values.dim(1) : 0; }
  /// Rows [begin, begin + len).
  Series slice(std::size_t begin, std::size_t len) const;
};

/// Reads "date,<ch1>,...,<chK>" CSV. Timestamps are integer indices or
/// ISO-8601 strings and must be strictly increasing.
Series load_csv(const std::string& path);
void write_csv(const Series& series, const std::string& path);

struct Splits {
  Series train, val, test;
};

/// Chronological floor(0.7T) / floor(0.1T) / remainder split. T >= 10.
Splits split_712(const Series& series);

enum class SplitTag { train, val, test, none };

struct Sample {
  Tensor input;   // [N, C]
  Tensor target;  // [H, C]
};

struct WindowedDataset {
  std::vector<Sample> samples;
  SplitTag split = SplitTag::none;
  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

/// floor((T - N - H) / stride) + 1 windows; window i starts at row i * stride.
WindowedDataset sliding_windows(const Series& segment, std::size_t input_len, std::size_t pred_len,
                                std::size_t stride = 1, SplitTag tag = SplitTag::none);

enum class SynthKind { sin_mix, trend_seasonal_noise, random_walk };
std::string to_string(SynthKind kind);
SynthKind parse_synth_kind(const std::string& s);

struct SynthParams {
  std::vector<double> periods{24.0};
  std::vector<double> amplitudes{1.0};
  double noise_std = 0.0;
  double trend = 0.0;       // per-step slope, trend_seasonal_noise only
  double walk_sigma = 1.0;  // random_walk step std
};

/// Deterministic given seed. Timestamps are hourly ISO strings.
Series synth_generate(SynthKind kind, std::size_t length, std::size_t channels, std::uint64_t seed,
                      const SynthParams& params = {});

struct NoiseResult {
  Series series;
  std::vector<std::size_t> cells;  // flat row-major indices that were perturbed
};

/// Adds N(0, (scale * channel std)^2) to exactly round(fraction * T * C)
/// distinct cells chosen uniformly by seed. Channel std is the population
/// std of the given segment.
NoiseResult inject_noise(const Series& segment, double fraction, double scale, std::uint64_t seed);

struct DataConfig {
  std::size_t train_stride = 1;
  std::size_t eval_stride = 1;
  double noise_fraction = 0.0;
  double noise_scale = 1.0;
  std::vector<std::string> validate() const;
};

struct ForecastData {
  WindowedDataset train, val, test;
  Splits splits;  // segments after noise injection (train only)
};

/// Split, perturb the training segment, then window each segment separately.
ForecastData prepare(const Series& series, std::size_t input_len, std::size_t pred_len,
                     const DataConfig& config, std::uint64_t seed);

}  // namespace gcf::data
