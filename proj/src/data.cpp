#include "gcformer/data.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace gcf::data {

std::string to_string(DataErrorKind kind) {
  switch (kind) {
    case DataErrorKind::file_not_found: return "file_not_found";
    case DataErrorKind::io: return "io";
    case DataErrorKind::empty: return "empty";
    case DataErrorKind::malformed_row: return "malformed_row";
    case DataErrorKind::non_numeric: return "non_numeric";
    case DataErrorKind::non_monotone: return "non_monotone";
  }
  return "?";
}

Series Series::slice(std::size_t begin, std::size_t len) const {
  if (begin + len > length()) throw std::out_of_range("Series::slice past the end");
  Series out;
  out.channel_names = channel_names;
  out.timestamps.assign(timestamps.begin() + begin, timestamps.begin() + begin + len);
  const std::size_t C = channels();
  Tensor v({len, C});
  std::copy_n(values.data().begin() + begin * C, len * C, v.data().begin());
  out.values = std::move(v);
  return out;
}

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_int(const std::string& s, long long& out) {
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

// Integer labels compare numerically, everything else lexicographically
// (ISO-8601 sorts correctly as text).
bool strictly_before(const std::string& a, const std::string& b) {
  long long ia = 0;
  long long ib = 0;
  if (parse_int(a, ia) && parse_int(b, ib)) return ia < ib;
  return a < b;
}

std::string hourly_stamp(std::size_t hour_index) {
  using namespace std::chrono;
  const sys_days start = year{2016} / July / 1;
  const sys_days day = start + days(static_cast<long>(hour_index / 24));
  const year_month_day ymd(day);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02zu:00:00", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                hour_index % 24);
  return buf;
}

std::vector<double> channel_std(const Tensor& values) {
  const std::size_t T = values.dim(0);
  const std::size_t C = values.dim(1);
  std::vector<double> out(C, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    double mean = 0.0;
    for (std::size_t t = 0; t < T; ++t) mean += values.at(t, c);
    mean /= static_cast<double>(T);
    double var = 0.0;
    for (std::size_t t = 0; t < T; ++t) var += (values.at(t, c) - mean) * (values.at(t, c) - mean);
    out[c] = std::sqrt(var / static_cast<double>(T));
  }
  return out;
}

}  // namespace

Series load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(DataErrorKind::file_not_found, "dataset not found: " + path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_cells(trim(line));
      break;
    }
  }
  if (header.empty()) throw DataError(DataErrorKind::empty, path + ": empty file");
  if (header.size() < 2) {
    throw DataError(DataErrorKind::malformed_row, path + ":" + std::to_string(line_no) +
                                                      ": header needs a date column and at least one channel");
  }
  Series s;
  s.channel_names.assign(header.begin() + 1, header.end());
  const std::size_t C = s.channel_names.size();
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty()) continue;
    const auto cells = split_cells(row);
    const std::string where = path + ":" + std::to_string(line_no);
    if (cells.size() != C + 1) {
      throw DataError(DataErrorKind::malformed_row, where + ": expected " + std::to_string(C + 1) +
                                                        " cells, found " + std::to_string(cells.size()));
    }
    if (cells[0].empty()) throw DataError(DataErrorKind::malformed_row, where + ": empty timestamp");
    if (!s.timestamps.empty() && !strictly_before(s.timestamps.back(), cells[0])) {
      throw DataError(DataErrorKind::non_monotone, where + ": timestamp '" + cells[0] +
                                                       "' does not follow '" + s.timestamps.back() + "'");
    }
    s.timestamps.push_back(cells[0]);
    for (std::size_t c = 1; c <= C; ++c) {
      double v = 0.0;
      if (!parse_real(cells[c], v)) {
        throw DataError(DataErrorKind::non_numeric, where + ": column '" + header[c] +
                                                        "' has non-numeric value '" + cells[c] + "'");
      }
      values.push_back(v);
    }
  }
  if (s.timestamps.empty()) throw DataError(DataErrorKind::empty, path + ": no data rows");
  s.values = Tensor({s.timestamps.size(), C}, std::move(values));
  return s;
}

void write_csv(const Series& series, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(DataErrorKind::io, "cannot write " + path);
  out << "date";
  for (const auto& name : series.channel_names) out << ',' << name;
  out << '\n';
  char buf[40];
  for (std::size_t t = 0; t < series.length(); ++t) {
    out << series.timestamps[t];
    for (std::size_t c = 0; c < series.channels(); ++c) {
      std::snprintf(buf, sizeof buf, ",%.17g", series.values.at(t, c));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw DataError(DataErrorKind::io, "failed writing " + path);
}

Splits split_712(const Series& series) {
  const std::size_t T = series.length();
  if (T < 10) throw std::invalid_argument("split_712 needs at least 10 rows, got " + std::to_string(T));
  const std::size_t n_train = T * 7 / 10;
  const std::size_t n_val = T / 10;
  return {series.slice(0, n_train), series.slice(n_train, n_val),
          series.slice(n_train + n_val, T - n_train - n_val)};
}

WindowedDataset sliding_windows(const Series& segment, std::size_t input_len, std::size_t pred_len,
                                std::size_t stride, SplitTag tag) {
  if (input_len == 0 || pred_len == 0 || stride == 0) {
    throw std::invalid_argument("sliding_windows: N, H and stride must be >= 1");
  }
  const std::size_t T = segment.length();
  if (T < input_len + pred_len) {
    throw std::invalid_argument("sliding_windows: segment of " + std::to_string(T) +
                                " rows is shorter than N + H = " + std::to_string(input_len + pred_len));
  }
  const std::size_t C = segment.channels();
  const std::size_t count = (T - input_len - pred_len) / stride + 1;
  WindowedDataset ds;
  ds.split = tag;
  ds.samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t start = i * stride;
    Sample s{Tensor({input_len, C}), Tensor({pred_len, C})};
    std::copy_n(segment.values.data().begin() + start * C, input_len * C, s.input.data().begin());
    std::copy_n(segment.values.data().begin() + (start + input_len) * C, pred_len * C,
                s.target.data().begin());
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

std::string to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::sin_mix: return "sin_mix";
    case SynthKind::trend_seasonal_noise: return "trend_seasonal_noise";
    case SynthKind::random_walk: return "random_walk";
  }
  return "?";
}

SynthKind parse_synth_kind(const std::string& s) {
  if (s == "sin_mix") return SynthKind::sin_mix;
  if (s == "trend_seasonal_noise") return SynthKind::trend_seasonal_noise;
  if (s == "random_walk") return SynthKind::random_walk;
  throw std::invalid_argument("unknown synthetic kind '" + s +
                              "' (expected sin_mix, trend_seasonal_noise, random_walk)");
}

Series synth_generate(SynthKind kind, std::size_t length, std::size_t channels, std::uint64_t seed,
                      const SynthParams& params) {
  if (length == 0) throw std::invalid_argument("synth_generate: length must be >= 1");
  if (channels == 0) throw std::invalid_argument("synth_generate: channels must be >= 1");
  if (params.periods.size() != params.amplitudes.size()) {
    throw std::invalid_argument("synth_generate: periods and amplitudes differ in length");
  }
  for (double p : params.periods) {
    if (!(p > 0.0)) throw std::invalid_argument("synth_generate: periods must be positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * M_PI);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t K = params.periods.size();
  std::vector<double> phases(channels * K);
  for (double& p : phases) p = phase_dist(rng);

  Series s;
  s.values = Tensor({length, channels});
  for (std::size_t c = 0; c < channels; ++c) s.channel_names.push_back("ch" + std::to_string(c + 1));
  for (std::size_t t = 0; t < length; ++t) s.timestamps.push_back(hourly_stamp(t));

  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t c = 0; c < channels; ++c) {
      double v = 0.0;
      if (kind == SynthKind::random_walk) {
        const double step = params.walk_sigma * gauss(rng);
        v = (t == 0 ? 0.0 : s.values.at(t - 1, c)) + (t == 0 ? 0.0 : step);
      } else {
        for (std::size_t j = 0; j < K; ++j) {
          v += params.amplitudes[j] *
               std::sin(2.0 * M_PI * static_cast<double>(t) / params.periods[j] + phases[c * K + j]);
        }
        if (kind == SynthKind::trend_seasonal_noise) v += params.trend * static_cast<double>(t);
        if (params.noise_std > 0.0) v += params.noise_std * gauss(rng);
      }
      s.values.at(t, c) = v;
    }
  }
  return s;
}

NoiseResult inject_noise(const Series& segment, double fraction, double scale, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("inject_noise: fraction must lie in [0, 1]");
  }
  if (!(scale >= 0.0)) throw std::invalid_argument("inject_noise: scale must be >= 0");
  NoiseResult out{segment, {}};
  const std::size_t cells = segment.values.size();
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(cells)));
  if (count == 0) return out;
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first `count` entries are a uniform subset.
  std::vector<std::size_t> idx(cells);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, cells - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  const std::vector<double> stdev = channel_std(segment.values);
  const std::size_t C = segment.channels();
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t flat : idx) out.series.values[flat] += scale * stdev[flat % C] * gauss(rng);
  out.cells = std::move(idx);
  return out;
}

std::vector<std::string> DataConfig::validate() const {
  std::vector<std::string> problems;
  if (train_stride == 0) problems.push_back("data.train_stride must be >= 1");
  if (eval_stride == 0) problems.push_back("data.eval_stride must be >= 1");
  if (!(noise_fraction >= 0.0 && noise_fraction <= 1.0)) {
    problems.push_back("data.noise_fraction must lie in [0, 1]");
  }
  if (!(noise_scale >= 0.0)) problems.push_back("data.noise_scale must be >= 0");
  return problems;
}

ForecastData prepare(const Series& series, std::size_t input_len, std::size_t pred_len,
                     const DataConfig& config, std::uint64_t seed) {
  ForecastData fd;
  fd.splits = split_712(series);
  if (config.noise_fraction > 0.0) {
    fd.splits.train = inject_noise(fd.splits.train, config.noise_fraction, config.noise_scale, seed).series;
  }
  auto window = [&](const Series& seg, std::size_t stride, SplitTag tag, const char* name) {
    if (seg.length() < input_len + pred_len) {
      throw std::invalid_argument(std::string(name) + " split has " + std::to_string(seg.length()) +
                                  " rows, fewer than N + H = " + std::to_string(input_len + pred_len));
    }
    return sliding_windows(seg, input_len, pred_len, stride, tag);
  };
  fd.train = window(fd.splits.train, config.train_stride, SplitTag::train, "train");
  fd.val = window(fd.splits.val, config.eval_stride, SplitTag::val, "validation");
  fd.test = window(fd.splits.test, config.eval_stride, SplitTag::test, "test");
  return fd;
}

}  // namespace gcf::data
