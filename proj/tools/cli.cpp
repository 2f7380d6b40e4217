#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>

#include "gcformer/checkpoint.hpp"
#include "gcformer/data.hpp"
#include "gcformer/errors.hpp"
#include "gcformer/kernels.hpp"
#include "gcformer/settings.hpp"
#include "gcformer/svg.hpp"
#include "gcformer/theory.hpp"
#include "gcformer/training.hpp"

namespace gcf::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data::DataError(data::DataErrorKind::io, "cannot write " + path.string());
  out << text;
  if (!out) throw data::DataError(data::DataErrorKind::io, "failed writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw data::DataError(data::DataErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
}

// Settings sources shared by train / evaluate / inspect-kernel / param-count.
struct SettingsArgs {
  std::string config;
  std::vector<std::string> sets;
  std::string decoder_mode, attention_axis, kernel, branches;
  std::size_t epochs = 0, input_len = 0, local_len = 0, pred_len = 0;
  long long seed = -1;

  void add_to(CLI::App* app, bool shortcuts) {
    app->add_option("--config", config, "settings file ([model] [kernel] [training] [data])");
    app->add_option("--set", sets, "override, section.key=value (repeatable)");
    app->add_option("--seed", seed, "seed (overrides training.seed)");
    if (!shortcuts) return;
    app->add_option("--decoder-mode", decoder_mode, "attention|concat|series_gl|series_lg");
    app->add_option("--attention-axis", attention_axis, "token|channel");
    app->add_option("--kernel", kernel, "msk|freq|leg");
    app->add_option("--branches", branches, "both|local_only|global_only");
    app->add_option("--epochs", epochs, "training.epochs");
    app->add_option("--input-len", input_len, "model.input_len");
    app->add_option("--local-len", local_len, "model.local_len");
    app->add_option("--pred-len", pred_len, "model.pred_len");
  }

  // Every problem from the file, the overrides and the shortcut flags.
  RunSettings resolve(RunSettings base = {}) const {
    std::vector<std::string> problems;
    RunSettings s = std::move(base);
    if (!config.empty()) {
      try {
        s = load_settings(config, s);
      } catch (const SettingsError& e) {
        for (const auto& p : e.problems()) problems.push_back(config + ": " + p);
      }
    }
    std::vector<std::string> all = sets;
    auto shortcut = [&](const std::string& key, const std::string& value) {
      if (!value.empty()) all.push_back(key + "=" + value);
    };
    auto shortcut_n = [&](const std::string& key, std::size_t value) {
      if (value > 0) all.push_back(key + "=" + std::to_string(value));
    };
    shortcut("model.decoder_mode", decoder_mode);
    shortcut("model.attention_axis", attention_axis);
    shortcut("kernel.variant", kernel);
    shortcut("model.branches", branches);
    shortcut_n("training.epochs", epochs);
    shortcut_n("model.input_len", input_len);
    shortcut_n("model.local_len", local_len);
    shortcut_n("model.pred_len", pred_len);
    if (seed >= 0) all.push_back("training.seed=" + std::to_string(seed));
    for (const auto& a : all) {
      try {
        apply_override(s, a);
      } catch (const SettingsError& e) {
        for (const auto& p : e.problems()) problems.push_back(p);
      }
    }
    if (!problems.empty()) throw SettingsError(problems);
    return s;
  }
};

void require_valid(const RunSettings& s) {
  auto problems = validate_settings(s);
  if (!problems.empty()) throw SettingsError(problems);
}

void bind_channels(RunSettings& s, const data::Series& series) {
  if (s.model.channels == 0) {
    s.model.channels = series.channels();
  } else if (s.model.channels != series.channels()) {
    throw SettingsError({"model.channels = " + std::to_string(s.model.channels) + " but the dataset has " +
                         std::to_string(series.channels()) + " channels"});
  }
}

data::ForecastData prepare_data(const RunSettings& s, const data::Series& series) {
  try {
    return data::prepare(series, s.model.input_len, s.model.pred_len, s.data, s.training.seed ^ 0x5eedull);
  } catch (const std::invalid_argument& e) {
    throw data::DataError(data::DataErrorKind::empty, e.what());
  }
}

const data::WindowedDataset& pick_split(const data::ForecastData& fd, const std::string& split) {
  if (split == "train") return fd.train;
  if (split == "val") return fd.val;
  if (split == "test") return fd.test;
  throw UsageError("unknown split '" + split + "' (expected train, val, test)");
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::string kind = "sin_mix";
  std::size_t len = 0;
  std::size_t channels = 1;
  std::uint64_t seed = 0;
  std::vector<double> periods{24.0};
  std::vector<double> amplitudes{1.0};
  double noise_std = 0.0, trend = 0.0, walk_sigma = 1.0;
  std::string out = ".";
  std::string name;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  if (a.len == 0) throw UsageError("--len must be >= 1");
  if (a.channels == 0) throw UsageError("--channels must be >= 1");
  data::SynthParams p;
  p.periods = a.periods;
  p.amplitudes = a.amplitudes;
  p.noise_std = a.noise_std;
  p.trend = a.trend;
  p.walk_sigma = a.walk_sigma;
  data::Series s;
  try {
    s = data::synth_generate(data::parse_synth_kind(a.kind), a.len, a.channels, a.seed, p);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  ensure_dir(a.out);
  const fs::path path = fs::path(a.out) / (a.name.empty() ? a.kind + ".csv" : a.name);
  data::write_csv(s, path.string());
  out << "wrote " << path.string() << ": " << s.length() << " rows, " << s.channels() << " channels\n";
  return kOk;
}

// ------------------------------------------------------------------- train

struct TrainArgs {
  std::string data;
  std::string out = "run";
  SettingsArgs settings;
};

std::string forecast_csv(const model::GCformerModel& m, const data::ForecastData& fd,
                         std::vector<SvgSeries>& plot) {
  const data::Series& seg = fd.splits.test;
  const std::size_t N = m.config().input_len;
  const std::size_t H = m.config().pred_len;
  const std::size_t start = seg.length() - N - H;
  const Tensor pred = m.predict(seg.slice(start, N).values);
  std::string csv = "time,actual,predicted\n";
  SvgSeries actual{"actual (" + seg.channel_names.at(0) + ")", {}};
  SvgSeries predicted{"predicted", {}};
  for (std::size_t t = 0; t < N + H; ++t) {
    const double v = seg.values.at(start + t, 0);
    csv += seg.timestamps[start + t] + "," + fmt(v) + ",";
    actual.values.push_back(v);
    if (t >= N) {
      csv += fmt(pred.at(t - N, 0));
      predicted.values.push_back(pred.at(t - N, 0));
    } else {
      predicted.values.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    csv += "\n";
  }
  plot = {actual, predicted};
  return csv;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  RunSettings s = a.settings.resolve();
  {
    auto problems = validate_settings(s, false);
    if (!problems.empty()) throw SettingsError(problems);
  }
  const data::Series series = data::load_csv(a.data);
  bind_channels(s, series);
  require_valid(s);
  const data::ForecastData fd = prepare_data(s, series);
  model::GCformerModel m(s.model, s.training.seed);
  out << "training on " << fd.train.size() << " windows (" << fd.val.size() << " val, " << fd.test.size()
      << " test), " << m.parameter_count() << " parameters\n";
  training::TrainResult result = training::train(std::move(m), fd, s.training);
  ensure_dir(a.out);
  const fs::path dir(a.out);
  save_checkpoint(result.model, (dir / "checkpoint.gcf").string(), s);
  write_file(dir / "report.csv", result.report.to_csv());
  write_file(dir / "config.ini", format_settings(s));
  std::vector<SvgSeries> plot;
  write_file(dir / "forecast.csv", forecast_csv(result.model, fd, plot));
  write_file(dir / "forecast.svg", svg_line_plot("forecast, last test window", plot));
  out << "epochs run: " << result.report.epochs.size() << ", best epoch: " << result.report.best_epoch << "\n";
  out << "test mse: " << fmt(result.report.test_mse) << "\ntest mae: " << fmt(result.report.test_mae) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string checkpoint;
  std::string data;
  std::string split = "test";
  std::string out = "eval";
  SettingsArgs settings;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  RunSettings stored;
  model::GCformerModel m = load_checkpoint(a.checkpoint, &stored);
  // Only data-handling settings may change; the model comes from the checkpoint.
  RunSettings s = a.settings.resolve(stored);
  if (format_settings(s, {"model", "kernel"}) != format_settings(stored, {"model", "kernel"})) {
    throw SettingsError({"evaluate: [model] and [kernel] settings are fixed by the checkpoint"});
  }
  require_valid(s);
  const data::Series series = data::load_csv(a.data);
  if (series.channels() != m.config().channels) {
    throw data::DataError(data::DataErrorKind::malformed_row,
                          "checkpoint (version " + std::string(kCheckpointVersion) + ") expects " +
                              std::to_string(m.config().channels) + " channels, dataset has " +
                              std::to_string(series.channels()));
  }
  const data::ForecastData fd = prepare_data(s, series);
  const data::WindowedDataset& ds = pick_split(fd, a.split);
  const training::Metrics all = training::evaluate(m, ds);

  // Per-step errors over the horizon.
  const std::size_t H = m.config().pred_len;
  const std::size_t C = m.config().channels;
  std::vector<double> sq(H, 0.0), ab(H, 0.0);
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Tensor x, y;
  for (std::size_t first = 0; first < ds.size(); first += 64) {
    const std::size_t n = std::min<std::size_t>(64, ds.size() - first);
    training::make_batch(ds, order, first, n, x, y);
    const Tensor pred = m.predict(x);
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t t = 0; t < H; ++t) {
        for (std::size_t c = 0; c < C; ++c) {
          const double d = pred.at(b, t, c) - y.at(b, t, c);
          sq[t] += d * d;
          ab[t] += std::abs(d);
        }
      }
    }
  }
  std::string csv = "split,horizon,mse,mae\n";
  const double denom = static_cast<double>(ds.size() * C);
  for (std::size_t t = 0; t < H; ++t) {
    csv += a.split + "," + std::to_string(t + 1) + "," + fmt(sq[t] / denom) + "," + fmt(ab[t] / denom) + "\n";
  }
  csv += a.split + ",all," + fmt(all.mse) + "," + fmt(all.mae) + "\n";
  ensure_dir(a.out);
  write_file(fs::path(a.out) / "metrics.csv", csv);
  out << "split: " << a.split << " (" << ds.size() << " windows)\n";
  out << "mse: " << fmt(all.mse) << "\nmae: " << fmt(all.mae) << "\n";
  return kOk;
}

// ----------------------------------------------------------- inspect-kernel

struct InspectArgs {
  std::string checkpoint;
  std::size_t length = 0;
  std::size_t channels = 0;
  std::string out = "kernel";
  SettingsArgs settings;
};

int cmd_inspect_kernel(const InspectArgs& a, std::ostream& out) {
  kernels::KernelSpec spec;
  std::size_t n = a.length;
  if (!a.checkpoint.empty()) {
    const model::GCformerModel m = load_checkpoint(a.checkpoint);
    spec = m.kernel_spec();
    if (n == 0) n = m.config().input_len;
  } else {
    const RunSettings s = a.settings.resolve();
    if (n == 0) n = s.model.input_len;
    const auto problems = kernels::validate(s.model.kernel, n);
    if (!problems.empty()) throw SettingsError(problems);
    const std::size_t channels = a.channels > 0 ? a.channels : std::max<std::size_t>(1, s.model.kernel_channels());
    std::mt19937_64 rng(s.training.seed);
    spec = kernels::make_kernel(s.model.kernel, n, channels, rng);
  }
  if (n == 0) throw UsageError("--length must be >= 1");
  const Tensor k = kernels::materialize_kernel(spec, n);
  std::string csv = "channel,index,value\n";
  std::vector<SvgSeries> plot;
  for (std::size_t c = 0; c < k.dim(0); ++c) {
    SvgSeries line{"channel " + std::to_string(c), {}};
    for (std::size_t i = 0; i < n; ++i) {
      csv += std::to_string(c) + "," + std::to_string(i) + "," + fmt(k.at(c, i)) + "\n";
      line.values.push_back(k.at(c, i));
    }
    plot.push_back(std::move(line));
  }
  ensure_dir(a.out);
  write_file(fs::path(a.out) / "kernel.csv", csv);
  write_file(fs::path(a.out) / "kernel.svg",
             svg_line_plot(kernels::to_string(kernels::variant_of(spec)) + " kernel, n = " + std::to_string(n), plot));
  out << "kernel: " << kernels::to_string(kernels::variant_of(spec)) << ", " << k.dim(0) << " channel(s), length "
      << n << ", " << kernels::param_count(spec) << " parameters\n";
  return kOk;
}

// ------------------------------------------------------------- param-count

struct ParamCountArgs {
  SettingsArgs settings;
  std::string compare_config;
  std::vector<std::string> compare_sets;
  std::string out;
};

struct CountTable {
  std::vector<std::pair<std::string, std::size_t>> rows;
  std::size_t dense_kernel = 0;  // n * d, what one explicit length-n kernel per channel would cost
};

CountTable count_table(RunSettings s) {
  if (s.model.channels == 0) s.model.channels = 1;
  require_valid(s);
  const model::GCformerModel m(s.model, 0);
  return {m.component_counts(), s.model.input_len * std::max<std::size_t>(1, s.model.kernel_channels())};
}

std::size_t total(const std::vector<std::pair<std::string, std::size_t>>& t) {
  std::size_t sum = 0;
  for (const auto& [name, n] : t) sum += n;
  return sum;
}

int cmd_param_count(const ParamCountArgs& a, std::ostream& out) {
  const auto table_a = count_table(a.settings.resolve());
  std::string csv = "config,component,params\n";
  auto emit = [&](const std::string& label, const CountTable& table) {
    const auto& t = table.rows;
    out << label << ":\n";
    for (const auto& [name, n] : t) {
      char line[96];
      std::snprintf(line, sizeof line, "  %-16s %12zu\n", name.c_str(), n);
      out << line;
      csv += label + "," + name + "," + std::to_string(n) + "\n";
    }
    char line[96];
    std::snprintf(line, sizeof line, "  %-16s %12zu\n", "total", total(t));
    out << line;
    csv += label + ",total," + std::to_string(total(t)) + "\n";
    std::snprintf(line, sizeof line, "  %-16s %12zu  (not in total)\n", "dense kernel", table.dense_kernel);
    out << line;
    csv += label + ",dense_kernel," + std::to_string(table.dense_kernel) + "\n";
  };
  emit("A", table_a);
  const bool compare = !a.compare_config.empty() || !a.compare_sets.empty();
  if (compare) {
    // B starts from every A source, swaps in the second file, then applies
    // --compare-set last so it wins over shortcut flags.
    SettingsArgs b = a.settings;
    if (!a.compare_config.empty()) b.config = a.compare_config;
    RunSettings sb = b.resolve();
    std::vector<std::string> problems;
    for (const auto& o : a.compare_sets) {
      try {
        apply_override(sb, o);
      } catch (const SettingsError& e) {
        problems.insert(problems.end(), e.problems().begin(), e.problems().end());
      }
    }
    if (!problems.empty()) throw SettingsError(problems);
    const auto table_b = count_table(sb);
    emit("B", table_b);
    const double ta = static_cast<double>(total(table_a.rows));
    const double tb = static_cast<double>(total(table_b.rows));
    char line[96];
    std::snprintf(line, sizeof line, "reduction (A - B) / A: %.2f%%\n", 100.0 * (ta - tb) / ta);
    out << line;
    csv += "A-B,reduction_percent," + fmt(100.0 * (ta - tb) / ta) + "\n";
  }
  if (!a.out.empty()) {
    ensure_dir(a.out);
    write_file(fs::path(a.out) / "param_count.csv", csv);
  }
  return kOk;
}

// ------------------------------------------------------------------ theory

struct TheoryArgs {
  std::string mode = "all";
  theory::NoiseAccumConfig noise;
  std::string kind = "unitary_random";
  theory::ColumnSelectConfig columns;
  std::string projection = "zero";
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_theory(TheoryArgs a, std::ostream& out) {
  if (a.mode != "all" && a.mode != "noise" && a.mode != "columns") {
    throw UsageError("--mode must be all, noise or columns");
  }
  try {
    a.noise.kind = theory::parse_matrix_kind(a.kind);
    a.columns.projection = theory::parse_projection(a.projection);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  a.noise.seed = a.seed;
  a.columns.seed = a.seed;
  if (!a.out.empty()) ensure_dir(a.out);
  bool ok = true;
  bool contrast = false;
  if (a.mode != "columns") {
    const auto problems = a.noise.validate();
    if (!problems.empty()) throw SettingsError(problems);
    const theory::NoiseAccumReport r = theory::noise_accumulation(a.noise);
    char line[256];
    std::snprintf(line, sizeof line,
                  "noise accumulation (%s, d=%zu, theta=%zu, sigma=%g, trials=%zu): scale=%.6g "
                  "ratio=%.4f exceedance=%.4f%s\n",
                  theory::to_string(a.noise.kind).c_str(), a.noise.dim, a.noise.theta, a.noise.sigma,
                  a.noise.trials, r.scale, r.ratio, r.exceedance, r.diverged ? " diverged" : "");
    out << line;
    if (a.noise.kind == theory::MatrixKind::expanding) {
      contrast = r.diverged || r.ratio > 10.0;
      out << (contrast ? "expected contrast: accumulation exceeds the sqrt(theta) scale\n"
                       : "FAIL: expanding matrix did not exceed the sqrt(theta) scale\n");
      ok = ok && contrast;
    } else {
      out << (r.within_bounds() ? "PASS" : "FAIL") << ": ratio in [0.5, 2] and 3-sigma exceedance < 5%\n";
      ok = ok && r.within_bounds();
    }
    if (!a.out.empty()) write_file(fs::path(a.out) / "noise_accumulation.csv", r.to_csv());
  }
  if (a.mode != "noise") {
    const auto problems = a.columns.validate();
    if (!problems.empty()) throw SettingsError(problems);
    const theory::ColumnSelectReport r = theory::column_selection_check(a.columns);
    const double worst = r.errors.empty() ? 0.0 : *std::max_element(r.errors.begin(), r.errors.end());
    char line[256];
    std::snprintf(line, sizeof line,
                  "column selection (%s, d=%zu, n=%zu, s=%zu, a_min=%g, trials=%zu): bound=%.6g "
                  "max error=%.6g violations=%zu\n",
                  theory::to_string(a.columns.projection).c_str(), a.columns.rows, a.columns.cols,
                  a.columns.keep, a.columns.a_min, a.columns.trials, r.bound, worst, r.violations);
    out << line << (r.within_bounds() ? "PASS" : "FAIL") << ": Frobenius error within bound in every trial\n";
    ok = ok && r.within_bounds();
    if (!a.out.empty()) write_file(fs::path(a.out) / "column_selection.csv", r.to_csv());
  }
  if (!ok) return kCheckFailed;
  return contrast ? kExpectedContrast : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Global/local convolution forecaster toolkit", "gcf"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every command");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "write a synthetic series as CSV");
  g->add_option("--kind", gen.kind, "sin_mix|trend_seasonal_noise|random_walk")->capture_default_str();
  g->add_option("--len", gen.len, "rows")->required();
  g->add_option("--channels", gen.channels, "channels")->capture_default_str();
  g->add_option("--seed", gen.seed, "seed")->capture_default_str();
  g->add_option("--periods", gen.periods, "sinusoid periods")->capture_default_str();
  g->add_option("--amplitudes", gen.amplitudes, "sinusoid amplitudes")->capture_default_str();
  g->add_option("--noise-std", gen.noise_std, "additive Gaussian noise std")->capture_default_str();
  g->add_option("--trend", gen.trend, "per-step slope (trend_seasonal_noise)")->capture_default_str();
  g->add_option("--walk-sigma", gen.walk_sigma, "step std (random_walk)")->capture_default_str();
  g->add_option("--out", gen.out, "output directory")->capture_default_str();
  g->add_option("--name", gen.name, "file name, default <kind>.csv");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "train a model and write checkpoint, report and forecast");
  t->add_option("--data", tr.data, "dataset CSV")->required();
  t->add_option("--out", tr.out, "output directory")->capture_default_str();
  tr.settings.add_to(t, true);

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "MSE/MAE of a checkpoint on one split");
  e->add_option("--checkpoint", ev.checkpoint, "checkpoint file")->required();
  e->add_option("--data", ev.data, "dataset CSV")->required();
  e->add_option("--split", ev.split, "train|val|test")->capture_default_str();
  e->add_option("--out", ev.out, "output directory")->capture_default_str();
  ev.settings.add_to(e, true);

  InspectArgs in;
  auto* k = app.add_subcommand("inspect-kernel", "materialize a global kernel to CSV and SVG");
  k->add_option("--checkpoint", in.checkpoint, "take the kernel from a checkpoint");
  k->add_option("--length", in.length, "kernel length n, default model.input_len");
  k->add_option("--channels", in.channels, "kernel channels, default from the model settings");
  k->add_option("--out", in.out, "output directory")->capture_default_str();
  in.settings.add_to(k, true);

  ParamCountArgs pc;
  auto* p = app.add_subcommand("param-count", "learnable parameters per component");
  pc.settings.add_to(p, true);
  p->add_option("--compare-config", pc.compare_config, "second settings file");
  p->add_option("--compare-set", pc.compare_sets, "override applied to the second configuration only");
  p->add_option("--out", pc.out, "write param_count.csv here");

  TheoryArgs th;
  auto* y = app.add_subcommand("theory", "Monte Carlo checks of the noise and column-selection bounds");
  y->add_option("--mode", th.mode, "all|noise|columns")->capture_default_str();
  y->add_option("--kind", th.kind, "unitary_random|identity|expanding")->capture_default_str();
  y->add_option("--dim", th.noise.dim, "state dimension d")->capture_default_str();
  y->add_option("--theta", th.noise.theta, "horizon theta")->capture_default_str();
  y->add_option("--sigma", th.noise.sigma, "noise std")->capture_default_str();
  y->add_option("--trials", th.noise.trials, "noise trials")->capture_default_str();
  y->add_option("--rho", th.noise.rho, "growth factor for expanding")->capture_default_str();
  y->add_option("--rows", th.columns.rows, "matrix rows d")->capture_default_str();
  y->add_option("--cols", th.columns.cols, "matrix columns n")->capture_default_str();
  y->add_option("--keep", th.columns.keep, "kept leading columns s")->capture_default_str();
  y->add_option("--a-min", th.columns.a_min, "tail entry bound")->capture_default_str();
  y->add_option("--sampled", th.columns.sampled, "rank or sampled columns for the tail")->capture_default_str();
  y->add_option("--projection", th.projection, "zero|svd|sampled")->capture_default_str();
  y->add_option("--column-trials", th.columns.trials, "column selection trials")->capture_default_str();
  y->add_option("--seed", th.seed, "seed")->capture_default_str();
  y->add_option("--out", th.out, "write CSV reports here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*g) return cmd_generate(gen, out);
    if (*t) return cmd_train(tr, out);
    if (*e) return cmd_evaluate(ev, out);
    if (*k) return cmd_inspect_kernel(in, out);
    if (*p) return cmd_param_count(pc, out);
    if (*y) return cmd_theory(th, out);
  } catch (const SettingsError& ex) {
    err << "configuration errors:\n";
    for (const auto& prob : ex.problems()) err << "  " << prob << "\n";
    return kUsage;
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << "\n";
    return kUsage;
  } catch (const data::DataError& ex) {
    err << "data error (" << data::to_string(ex.kind()) << "): " << ex.what() << "\n";
    return kDataError;
  } catch (const CheckpointError& ex) {
    err << "checkpoint error: " << ex.what() << "\n";
    return kDataError;
  } catch (const NumericError& ex) {
    err << "numeric failure: " << ex.what() << "\n";
    return kNumericError;
  } catch (const std::invalid_argument& ex) {
    err << "invalid argument: " << ex.what() << "\n";
    return kUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kCheckFailed;
  }
  return kUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace gcf::cli
