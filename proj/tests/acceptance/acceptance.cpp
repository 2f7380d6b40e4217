// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Artifacts (experiment reports) are written to ./acceptance_artifacts.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cli.hpp"
#include "gcformer/autodiff.hpp"
#include "gcformer/convolution.hpp"
#include "gcformer/data.hpp"
#include "gcformer/legendre.hpp"
#include "gcformer/model.hpp"
#include "gcformer/revin.hpp"
#include "gcformer/theory.hpp"
#include "gcformer/training.hpp"
#include "oracles.hpp"
#include "tempdir.hpp"

using namespace gcf;
namespace fs = std::filesystem;

namespace {

const fs::path kArtifacts = "acceptance_artifacts";

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void write_artifact(const std::string& name, const std::string& text) {
  fs::create_directories(kArtifacts);
  testing::write_text((kArtifacts / name).string(), text);
}

// ------------------------------------------------------------------ numerics

Outcome fft_convolution() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<std::size_t> pick_n(3, 1024);
  double worst = 0.0;
  std::size_t non_pow2 = 0;
  for (int c = 0; c < 200; ++c) {
    std::size_t n = pick_n(rng);
    if (c == 0) n = 3;
    if (c == 1) n = 1024;
    if (c == 2) n = 1000;
    if ((n & (n - 1)) != 0) ++non_pow2;
    const auto u = oracle::random_vector(n, rng);
    const auto k = oracle::random_vector(n, rng);
    worst = std::max(worst, oracle::rel_diff(circular_convolve(u, k), oracle::circular(u, k)));
    worst = std::max(worst, oracle::rel_diff(causal_convolve(u, k), oracle::causal(u, k)));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 10.0 && non_pow2 > 0,
          "200 cases (" + std::to_string(non_pow2) + " non-power-of-two), worst relative error " +
              fmt("%.2e", worst) + ", " + fmt("%.2f", secs) + " s"};
}

Outcome ssm_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1002);
  std::uniform_int_distribution<int> pick_d(1, 16);
  std::uniform_int_distribution<int> pick_n(1, 512);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> step(0.05, 1.0);
  double worst = 0.0;
  double worst_oracle = 0.0;
  for (int c = 0; c < 50; ++c) {
    const int d = pick_d(rng);
    const auto n = static_cast<std::size_t>(c == 0 ? 512 : pick_n(rng));
    legendre::StateSpaceSystem sys;
    if (c % 5 == 0) {
      sys = legendre::legt_system(static_cast<std::size_t>(d), 16.0 + 8.0 * c);
      sys.D = g(rng);
    } else {
      // Stable continuous system (eigenvalues shifted into the left half plane), bilinear discretized.
      Eigen::MatrixXd a(d, d);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) a(i, j) = g(rng) / std::sqrt(static_cast<double>(d));
      }
      a -= (a.eigenvalues().real().maxCoeff() + 0.5) * Eigen::MatrixXd::Identity(d, d);
      Eigen::VectorXd b(d);
      for (int i = 0; i < d; ++i) b(i) = g(rng);
      const auto disc = legendre::discretize(a, b, step(rng));
      sys.A = disc.A;
      sys.B = disc.B;
      sys.C = Eigen::RowVectorXd(d);
      for (int i = 0; i < d; ++i) sys.C(i) = g(rng);
      sys.D = g(rng);
      sys.discrete = true;
    }
    const auto u = oracle::random_vector(n, rng);
    const auto rec = legendre::ssm_recurrence(sys, u);
    auto conv = causal_convolve(u, legendre::materialize_ssm_kernel(sys, n));
    for (std::size_t i = 0; i < n; ++i) conv[i] += sys.D * u[i];
    worst = std::max(worst, oracle::rel_diff(conv, rec));

    oracle::Mat am(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(d)));
    std::vector<double> bv(static_cast<std::size_t>(d)), cv(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) am[i][j] = sys.A(i, j);
      bv[i] = sys.B(i);
      cv[i] = sys.C(i);
    }
    worst_oracle = std::max(worst_oracle, oracle::rel_diff(rec, oracle::recurrence(am, bv, cv, sys.D, u)));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && worst_oracle <= 1e-8 && secs < 10.0,
          "50 systems, recurrence vs kernel convolution " + fmt("%.2e", worst) + ", recurrence vs oracle " +
              fmt("%.2e", worst_oracle) + ", " + fmt("%.2f", secs) + " s"};
}

Outcome legt_correctness() {
  const auto m = legendre::legt_matrices(3);
  Eigen::MatrixXd a(3, 3);
  a << 1, 1, 1, -3, 3, 3, 5, -5, 5;
  Eigen::VectorXd b(3);
  b << 1, -3, 5;
  const bool exact = m.A == a && m.B == b;

  double radius = 0.0;
  for (double theta : {64.0, 256.0, 1024.0}) {
    const auto sys = legendre::legt_system(64, theta);
    radius = std::max(radius, sys.A.eigenvalues().cwiseAbs().maxCoeff());
  }

  std::vector<double> u(336);
  for (std::size_t t = 0; t < u.size(); ++t) {
    const double x = static_cast<double>(t);
    u[t] = std::sin(2.0 * M_PI * x / 48.0) + 0.5 * std::sin(2.0 * M_PI * x / 42.0 + 0.3);
  }
  auto rec_mse = [&](std::size_t order) {
    const double theta = static_cast<double>(u.size());
    const auto rec = legendre::legt_reconstruct(legendre::legt_project(u, order, theta), theta);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += (rec[i] - u[i]) * (rec[i] - u[i]);
    return s / static_cast<double>(u.size());
  };
  const double e8 = rec_mse(8);
  const double e64 = rec_mse(64);
  return {exact && radius <= 1.0 + 1e-9 && e8 / e64 >= 10.0,
          std::string("A,B exact: ") + (exact ? "yes" : "no") + ", max spectral radius " + fmt("%.12f", radius) +
              ", reconstruction MSE d=8 " + fmt("%.3e", e8) + " vs d=64 " + fmt("%.3e", e64) + " (" +
              fmt("%.1f", e8 / e64) + "x)"};
}

// ----------------------------------------------------------------- gradients

model::ModelConfig toy_config(kernels::KernelVariant v) {
  model::ModelConfig c;
  c.input_len = 64;
  c.local_len = 32;
  c.pred_len = 8;
  c.channels = 2;
  c.patch_len = 8;
  c.patch_stride = 4;
  c.hidden_dim = 4;
  c.channel_independent = false;
  c.kernel.variant = v;
  c.kernel.msk_base_len = 4;
  c.kernel.freq_modes = 16;
  c.kernel.leg_order = 16;
  c.kernel.leg_kernel_len = 8;
  return c;
}

Tensor random_tensor(Tensor::Shape shape, std::mt19937_64& rng) {
  Tensor t(std::move(shape));
  std::normal_distribution<double> g(0.0, 1.0);
  for (double& v : t.data()) v = g(rng);
  return t;
}

// Worst relative error between analytic and central-difference gradients over
// `samples` random entries of the parameters whose names start with `prefix`.
double gradient_error(const model::GCformerModel& m, const Tensor& x, const Tensor& y, const std::string& prefix,
                      int samples, std::mt19937_64& rng) {
  const model::Gradients g = model::parameter_gradients(m, x, y);
  std::vector<std::size_t> eligible;
  for (std::size_t p = 0; p < m.parameters().size(); ++p) {
    if (m.parameters()[p].name.rfind(prefix, 0) == 0) eligible.push_back(p);
  }
  double worst = 0.0;
  const double h = 1e-6;
  for (int s = 0; s < samples; ++s) {
    const std::size_t p = eligible[std::uniform_int_distribution<std::size_t>(0, eligible.size() - 1)(rng)];
    const std::size_t e = std::uniform_int_distribution<std::size_t>(0, m.parameters()[p].value.size() - 1)(rng);
    model::GCformerModel probe = m;
    double& w = probe.parameters()[p].value[e];
    const double base = w;
    w = base + h;
    const double up = model::batch_loss(probe, x, y);
    w = base - h;
    const double down = model::batch_loss(probe, x, y);
    const double fd = (up - down) / (2.0 * h);
    const double an = g.grads[p][e];
    worst = std::max(worst, std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-5}));
  }
  return worst;
}

Outcome gradient_verification() {
  const auto t0 = Clock::now();
  std::ostringstream detail;
  double worst = 0.0;
  std::mt19937_64 rng(1004);
  for (auto v : {kernels::KernelVariant::msk, kernels::KernelVariant::freq, kernels::KernelVariant::leg}) {
    model::GCformerModel m(toy_config(v), 40);
    std::normal_distribution<double> g(0.0, 0.1);
    for (auto& p : m.parameters()) {
      for (double& w : p.value.data()) w += g(rng);
    }
    const Tensor x = random_tensor({2, 64, 2}, rng);
    const Tensor y = random_tensor({2, 8, 2}, rng);
    const double kernel_err = gradient_error(m, x, y, "global.kernel", 10, rng);
    const double all_err = gradient_error(m, x, y, "", 12, rng);
    worst = std::max({worst, kernel_err, all_err});
    detail << kernels::to_string(v) << " kernel " << fmt("%.1e", kernel_err) << " model " << fmt("%.1e", all_err)
           << "; ";
  }
  const double secs = seconds_since(t0);
  detail << fmt("%.2f", secs) << " s";
  return {worst <= 1e-4 && secs < 60.0, detail.str()};
}

// --------------------------------------------------------------------- RevIN

Outcome revin_invertibility() {
  std::mt19937_64 rng(1005);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_t(2, 512);
  std::uniform_int_distribution<std::size_t> pick_c(1, 8);
  std::uniform_real_distribution<double> uni(0.5, 2.0);
  double worst = 0.0;
  std::size_t near_constant = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t t = pick_t(rng);
    const std::size_t c = pick_c(rng);
    Tensor x({t, c});
    std::vector<double> gamma(c), beta(c);
    for (std::size_t k = 0; k < c; ++k) {
      const double level = 1e3 * g(rng);
      const int kind = (inst + static_cast<int>(k)) % 4;
      const double spread = kind == 0 ? 0.0 : kind == 1 ? 1e-9 : std::exp(3.0 * g(rng));
      if (kind <= 1) ++near_constant;
      for (std::size_t i = 0; i < t; ++i) x.at(i, k) = level + spread * g(rng);
      gamma[k] = (g(rng) < 0 ? -1.0 : 1.0) * uni(rng);
      beta[k] = g(rng);
    }
    const auto norm = model::revin_normalize(x, gamma, beta, 1e-5);
    const Tensor back = model::revin_denormalize(norm.normalized, norm.state);

    // Differentiable path, rows laid out as [C, T].
    Tensor rows({c, t});
    for (std::size_t i = 0; i < t; ++i) {
      for (std::size_t k = 0; k < c; ++k) rows.at(k, i) = x.at(i, k);
    }
    ad::Tape tape;
    const ad::RowStats stats = ad::row_stats(rows, 1e-5);
    const ad::Var gv = tape.constant(Tensor({c}, gamma));
    const ad::Var bv = tape.constant(Tensor({c}, beta));
    const Tensor rows_back =
        ad::revin_denormalize(ad::revin_normalize(tape.constant(rows), gv, bv, stats), gv, bv, stats).value();

    double scale = 1.0;
    for (double v : x.data()) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < t; ++i) {
      for (std::size_t k = 0; k < c; ++k) {
        worst = std::max(worst, std::abs(back.at(i, k) - x.at(i, k)) / scale);
        worst = std::max(worst, std::abs(rows_back.at(k, i) - x.at(i, k)) / scale);
      }
    }
  }
  return {worst <= 1e-10, "100 instances (" + std::to_string(near_constant) +
                              " constant or near-constant channels), worst relative error " + fmt("%.2e", worst)};
}

// ------------------------------------------------------------ param counting

long long csv_value(const std::string& csv, const std::string& key) {
  const auto at = csv.find(key + ",");
  if (at == std::string::npos) return -1;
  return std::stoll(csv.substr(at + key.size() + 1));
}

Outcome parameter_sublinearity() {
  const std::size_t d = 7;
  std::ostringstream out, err;
  const std::string dir = (kArtifacts / "param_count").string();
  const int code = cli::run({"param-count", "--kernel", "msk", "--set", "kernel.msk_base_len=16", "--set",
                             "model.channels=" + std::to_string(d), "--set", "model.channel_independent=false",
                             "--input-len", "1024", "--compare-set", "model.input_len=2048", "--out", dir},
                            out, err);
  if (code != 0) return {false, "param-count exited with " + std::to_string(code) + ": " + err.str()};
  const std::string csv = testing::read_text(dir + "/param_count.csv");
  const long long ka = csv_value(csv, "A,global.kernel");
  const long long kb = csv_value(csv, "B,global.kernel");
  const long long da = csv_value(csv, "A,dense_kernel");
  const long long db = csv_value(csv, "B,dense_kernel");
  const bool pass = kb - ka == static_cast<long long>(16 * d) && db == 2 * da && da == static_cast<long long>(1024 * d);
  return {pass, "msk kernel " + std::to_string(ka) + " -> " + std::to_string(kb) + " (+" + std::to_string(kb - ka) +
                    ", expected +" + std::to_string(16 * d) + "), dense " + std::to_string(da) + " -> " +
                    std::to_string(db) + "; report " + dir + "/param_count.csv"};
}

// ------------------------------------------------------ forecasting fixture

// sin_mix with a 240-step period: longer than the local window, inside the global one.
const data::Series& fixture() {
  static const data::Series s = [] {
    data::SynthParams p;
    p.periods = {240.0};
    p.amplitudes = {1.0};
    p.noise_std = 0.3;
    return data::synth_generate(data::SynthKind::sin_mix, 5000, 1, 7, p);
  }();
  return s;
}

struct RunKey {
  std::string mode;
  std::string branches;
  std::uint64_t seed;
  double noise;
  bool operator<(const RunKey& o) const {
    return std::tie(mode, branches, seed, noise) < std::tie(o.mode, o.branches, o.seed, o.noise);
  }
};

std::map<RunKey, double>& run_cache() {
  static std::map<RunKey, double> cache;
  return cache;
}

double fixture_mse(const std::string& mode, const std::string& branches, std::uint64_t seed, double noise = 0.0) {
  const RunKey key{mode, branches, seed, noise};
  auto it = run_cache().find(key);
  if (it != run_cache().end()) return it->second;
  model::ModelConfig c;
  c.input_len = 336;
  c.local_len = 96;
  c.pred_len = 96;
  c.channels = 1;
  c.hidden_dim = 8;
  c.decoder_mode = model::parse_decoder_mode(mode);
  c.branches = model::parse_branches(branches);
  data::DataConfig dc;
  dc.train_stride = 2;
  dc.noise_fraction = noise;
  const data::ForecastData fd = data::prepare(fixture(), c.input_len, c.pred_len, dc, seed ^ 0x5eedull);
  training::TrainConfig tc;
  tc.epochs = 8;
  tc.lr = 1e-3;
  tc.seed = seed;
  const auto result = training::train(model::GCformerModel(c, seed), fd, tc);
  std::cout << "  trained " << mode << "/" << branches << " seed " << seed << " noise " << noise
            << ": test mse " << fmt("%.6f", result.report.test_mse) << std::endl;
  run_cache()[key] = result.report.test_mse;
  return result.report.test_mse;
}

const std::vector<std::uint64_t> kSeeds{1, 2, 3};

Outcome directional_boosting() {
  const auto t0 = Clock::now();
  double local = 0.0;
  double full = 0.0;
  std::string csv = "seed,local_only_mse,gcformer_mse\n";
  for (auto seed : kSeeds) {
    const double l = fixture_mse("attention", "local_only", seed);
    const double f = fixture_mse("attention", "both", seed);
    local += l / 3.0;
    full += f / 3.0;
    csv += std::to_string(seed) + "," + fmt("%.17g", l) + "," + fmt("%.17g", f) + "\n";
  }
  const double reduction = 100.0 * (local - full) / local;
  csv += "mean," + fmt("%.17g", local) + "," + fmt("%.17g", full) + "\n";
  write_artifact("boosting.csv", csv);
  const double secs = seconds_since(t0);
  return {reduction >= 5.0 && secs < 600.0,
          "mean test MSE local-only " + fmt("%.5f", local) + " vs GCformer " + fmt("%.5f", full) + " (" +
              fmt("%.2f", reduction) + "% lower), " + fmt("%.0f", secs) + " s"};
}

Outcome decoder_ablation() {
  std::string csv = "seed,attention_mse,concat_mse,series_lg_mse\n";
  int attention_wins = 0;
  int concat_wins = 0;
  for (auto seed : kSeeds) {
    const double a = fixture_mse("attention", "both", seed);
    const double c = fixture_mse("concat", "both", seed);
    const double s = fixture_mse("series_lg", "both", seed);
    attention_wins += a < s;
    concat_wins += c < s;
    csv += std::to_string(seed) + "," + fmt("%.17g", a) + "," + fmt("%.17g", c) + "," + fmt("%.17g", s) + "\n";
  }
  write_artifact("decoder_ablation.csv", csv);
  std::cout << csv;
  return {attention_wins >= 2 && concat_wins >= 2,
          "seeds where attention beats series_lg: " + std::to_string(attention_wins) + "/3, concat: " +
              std::to_string(concat_wins) + "/3; report " + (kArtifacts / "decoder_ablation.csv").string()};
}

Outcome robustness() {
  std::string csv = "noise_fraction,test_mse\n";
  std::vector<double> mse;
  for (double p : {0.0, 0.01, 0.05, 0.10}) {
    mse.push_back(fixture_mse("attention", "both", kSeeds.front(), p));
    csv += fmt("%.2f", p) + "," + fmt("%.17g", mse.back()) + "\n";
  }
  write_artifact("robustness.csv", csv);
  bool monotone = true;
  std::string trail;
  for (std::size_t i = 0; i < mse.size(); ++i) {
    if (i > 0 && mse[i] < 0.95 * mse[i - 1]) monotone = false;
    trail += (i ? " -> " : "") + fmt("%.5f", mse[i]);
  }
  return {monotone, "test MSE for p = 0, .01, .05, .10: " + trail};
}

// -------------------------------------------------------------------- theory

Outcome noise_accumulation() {
  const auto t0 = Clock::now();
  std::ostringstream detail;
  bool pass = true;
  theory::NoiseAccumConfig c;
  c.trials = 10000;
  c.seed = 1009;
  c.kind = theory::MatrixKind::unitary_random;
  detail << "unitary ratios";
  for (std::size_t theta : {16u, 64u, 256u, 1024u}) {
    c.theta = theta;
    const auto r = theory::noise_accumulation(c);
    pass = pass && r.ratio >= 0.5 && r.ratio <= 2.0;
    detail << " " << fmt("%.3f", r.ratio);
  }
  c.kind = theory::MatrixKind::identity;
  c.theta = 256;
  const auto id = theory::noise_accumulation(c);
  const double anchor = c.sigma * std::sqrt(static_cast<double>(c.theta - 1));
  pass = pass && std::abs(id.scale - anchor) <= 0.05 * anchor;
  detail << "; identity std " << fmt("%.3f", id.scale) << " vs " << fmt("%.3f", anchor);
  c.kind = theory::MatrixKind::expanding;
  c.rho = 1.05;
  const auto ex = theory::noise_accumulation(c);
  pass = pass && (ex.diverged || ex.ratio > 10.0);
  detail << "; expanding ratio " << fmt("%.3g", ex.ratio);
  const double secs = seconds_since(t0);
  detail << "; " << fmt("%.2f", secs) << " s";
  return {pass && secs < 60.0, detail.str()};
}

Outcome column_selection() {
  std::mt19937_64 rng(1010);
  std::size_t ok = 0;
  double worst_fraction = 0.0;
  for (int t = 0; t < 100; ++t) {
    theory::ColumnSelectConfig c;
    c.rows = std::uniform_int_distribution<std::size_t>(4, 32)(rng);
    c.cols = std::uniform_int_distribution<std::size_t>(8, 64)(rng);
    c.keep = std::uniform_int_distribution<std::size_t>(1, c.cols - 1)(rng);
    c.sampled = std::uniform_int_distribution<std::size_t>(0, std::min(c.rows, c.cols - c.keep))(rng);
    c.a_min = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
    c.projection = static_cast<theory::Projection>(t % 3);
    c.trials = 1;
    c.seed = rng();
    const auto r = theory::column_selection_check(c);
    ok += r.within_bounds();
    worst_fraction = std::max(worst_fraction, r.errors.front() / r.bound);
  }
  return {ok == 100, std::to_string(ok) + "/100 trials within bound, largest error/bound " +
                         fmt("%.3f", worst_fraction)};
}

// --------------------------------------------------------------- determinism

Outcome determinism() {
  testing::TempDir dir;
  std::ostringstream out, err;
  if (cli::run({"generate", "--len", "1500", "--channels", "2", "--noise-std", "0.2", "--out", dir.path().string()},
               out, err) != 0) {
    return {false, "generate failed: " + err.str()};
  }
  const std::vector<std::string> common{"--data", dir.file("sin_mix.csv"), "--input-len", "96", "--local-len", "48",
                                        "--pred-len", "16", "--epochs", "3", "--seed", "11",
                                        "--set", "model.hidden_dim=8", "--set", "data.train_stride=2"};
  for (const char* name : {"a", "b"}) {
    std::vector<std::string> args{"train", "--out", dir.file(name)};
    args.insert(args.end(), common.begin(), common.end());
    if (cli::run(args, out, err) != 0) return {false, "train failed: " + err.str()};
  }
  const bool report = testing::read_text(dir.file("a/report.csv")) == testing::read_text(dir.file("b/report.csv"));
  const bool ckpt =
      testing::read_text(dir.file("a/checkpoint.gcf")) == testing::read_text(dir.file("b/checkpoint.gcf"));
  return {report && ckpt, std::string("report identical: ") + (report ? "yes" : "no") +
                              ", checkpoint identical: " + (ckpt ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"fft-convolution-oracle", fft_convolution},
      {"state-space-equivalence", ssm_equivalence},
      {"legt-correctness", legt_correctness},
      {"gradient-verification", gradient_verification},
      {"revin-invertibility", revin_invertibility},
      {"parameter-sublinearity", parameter_sublinearity},
      {"directional-boosting", directional_boosting},
      {"decoder-ablation", decoder_ablation},
      {"noise-accumulation", noise_accumulation},
      {"column-selection", column_selection},
      {"robustness", robustness},
      {"determinism", determinism},
  };
  int failed = 0;
  std::vector<std::string> summary;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    const std::string line = std::string(o.pass ? "PASS " : "FAIL ") + name + ": " + o.detail;
    std::cout << line << std::endl;
    summary.push_back(line);
  }
  std::cout << "\nsummary\n";
  for (const auto& l : summary) std::cout << l << "\n";
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
