#include <doctest.h>

#include <sstream>

#include "cli.hpp"
#include "gcformer/checkpoint.hpp"
#include "gcformer/data.hpp"
#include "gcformer/kernels.hpp"
#include "tempdir.hpp"

using namespace gcf;
using testing::read_text;
using testing::TempDir;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> small_model() {
  return {"--set", "model.input_len=48", "--set", "model.local_len=24", "--set", "model.pred_len=8",
          "--set", "model.patch_len=8", "--set", "model.patch_stride=8", "--set", "model.hidden_dim=4",
          "--set", "training.epochs=2", "--set", "data.train_stride=4"};
}

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += (c == '\n');
  return n;
}

// Value of "<prefix>,<name>,<value>" in a param_count.csv.
long long csv_value(const std::string& csv, const std::string& key) {
  const auto at = csv.find(key + ",");
  REQUIRE(at != std::string::npos);
  return std::stoll(csv.substr(at + key.size() + 1));
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("generate") {
    TempDir dir;
    const Run r = run({"generate", "--kind", "sin_mix", "--len", "2000", "--channels", "3", "--seed", "1",
                       "--out", dir.path().string()});
    CHECK(r.code == 0);
    const data::Series s = data::load_csv(dir.file("sin_mix.csv"));
    CHECK(s.length() == 2000);
    CHECK(s.channels() == 3);

    run({"generate", "--kind", "sin_mix", "--len", "2000", "--channels", "3", "--seed", "1", "--out",
         dir.path().string(), "--name", "again.csv"});
    CHECK(read_text(dir.file("again.csv")) == read_text(dir.file("sin_mix.csv")));

    CHECK(run({"generate", "--len", "0", "--out", dir.path().string()}).code == 2);
    CHECK(run({"generate", "--kind", "spiral", "--len", "10", "--out", dir.path().string()}).code == 2);
  }

  TEST_CASE("usage") {
    const Run h = run({"--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("train") != std::string::npos);
    CHECK(run({"train", "--bogus"}).code == 2);
    CHECK(run({}).code == 2);
    const Run bad = run({"param-count", "--set", "model.nonsense=3"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("model.nonsense") != std::string::npos);
  }

  TEST_CASE("train and evaluate") {
    TempDir dir;
    REQUIRE(run({"generate", "--len", "600", "--channels", "2", "--noise-std", "0.1", "--out",
                 dir.path().string()}).code == 0);
    const std::string data = dir.file("sin_mix.csv");

    const Run t = run(with({"train", "--data", data, "--out", dir.file("run")}, small_model()));
    REQUIRE(t.code == 0);
    for (const char* f : {"checkpoint.gcf", "report.csv", "config.ini", "forecast.csv", "forecast.svg"}) {
      CHECK(std::filesystem::exists(dir.path() / "run" / f));
    }
    const std::string report = read_text(dir.file("run/report.csv"));
    CHECK(report.rfind("epoch,train_loss,val_loss\n", 0) == 0);
    CHECK(read_text(dir.file("run/forecast.svg")).find("<svg") != std::string::npos);

    const Run concat = run(with({"train", "--data", data, "--out", dir.file("concat"), "--decoder-mode", "concat"},
                                small_model()));
    REQUIRE(concat.code == 0);
    CHECK(read_text(dir.file("concat/report.csv")) != report);

    // Evaluate reproduces the test metrics of the report.
    const Run e = run({"evaluate", "--checkpoint", dir.file("run/checkpoint.gcf"), "--data", data, "--out",
                       dir.file("eval")});
    REQUIRE(e.code == 0);
    const std::string metrics = read_text(dir.file("eval/metrics.csv"));
    CHECK(count_lines(metrics) == 1 + 8 + 1);
    const std::string mse = report.substr(report.find("test_mse=") + 9);
    const std::string all_row = metrics.substr(metrics.find("test,all,") + 9);
    CHECK(std::stod(all_row) == std::stod(mse));

    const Run tr = run({"evaluate", "--checkpoint", dir.file("run/checkpoint.gcf"), "--data", data, "--split",
                        "train", "--out", dir.file("eval_train")});
    CHECK(tr.code == 0);

    // The model section is fixed by the checkpoint.
    CHECK(run({"evaluate", "--checkpoint", dir.file("run/checkpoint.gcf"), "--data", data, "--kernel", "freq",
               "--out", dir.file("eval2")}).code == 2);
    CHECK(run({"train", "--data", dir.file("missing.csv"), "--out", dir.file("x")}).code == 3);

    // Checkpoint errors name the version.
    testing::write_text(dir.file("old.gcf"), "gcf0\nwhatever");
    const Run old = run({"evaluate", "--checkpoint", dir.file("old.gcf"), "--data", data, "--out", dir.file("e3")});
    CHECK(old.code == 3);
    CHECK(old.err.find("gcf0") != std::string::npos);
    CHECK(old.err.find(kCheckpointVersion) != std::string::npos);
    const std::string bytes = read_text(dir.file("run/checkpoint.gcf"));
    testing::write_text(dir.file("cut.gcf"), bytes.substr(0, bytes.size() / 2));
    const Run cut = run({"evaluate", "--checkpoint", dir.file("cut.gcf"), "--data", data, "--out", dir.file("e4")});
    CHECK(cut.code == 3);
    CHECK(cut.err.find(kCheckpointVersion) != std::string::npos);

    const Run k = run({"inspect-kernel", "--checkpoint", dir.file("run/checkpoint.gcf"), "--out", dir.file("k")});
    CHECK(k.code == 0);
    // Channel-independent models share one kernel.
    CHECK(count_lines(read_text(dir.file("k/kernel.csv"))) == 1 + 48);
  }

  TEST_CASE("inspect-kernel") {
    TempDir dir;
    const Run z = run({"inspect-kernel", "--kernel", "freq", "--set", "kernel.init=zero", "--set",
                       "model.input_len=96", "--set", "kernel.freq_modes=8", "--out", dir.path().string()});
    REQUIRE(z.code == 0);
    std::istringstream lines(read_text(dir.file("kernel.csv")));
    std::string line;
    std::getline(lines, line);
    CHECK(line == "channel,index,value");
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
      CHECK(std::stod(line.substr(line.rfind(',') + 1)) == 0.0);
      ++rows;
    }
    CHECK(rows == 96);

    const Run c = run({"inspect-kernel", "--kernel", "msk", "--set", "kernel.init=ones", "--set",
                       "kernel.msk_base_len=4", "--set", "kernel.msk_scales=3", "--length", "40", "--channels", "3",
                       "--out", dir.file("msk")});
    REQUIRE(c.code == 0);
    kernels::MultiScaleKernelParams p{3, 4, 0.5, Tensor({3, 3, 4}, 1.0)};
    const Tensor expect = kernels::materialize_msk(p, 40);
    std::istringstream ml(read_text(dir.file("msk/kernel.csv")));
    std::getline(ml, line);
    rows = 0;
    while (std::getline(ml, line)) {
      std::size_t ch = 0;
      std::size_t idx = 0;
      double v = 0.0;
      REQUIRE(std::sscanf(line.c_str(), "%zu,%zu,%lf", &ch, &idx, &v) == 3);
      CHECK(v == doctest::Approx(expect.at(ch, idx)).epsilon(1e-15));
      ++rows;
    }
    CHECK(rows == 40 * 3);
  }

  TEST_CASE("param-count") {
    TempDir dir;
    const Run g = run({"param-count", "--kernel", "freq", "--set", "kernel.freq_modes=64", "--branches",
                       "global_only", "--set", "model.channel_independent=true", "--out", dir.path().string()});
    REQUIRE(g.code == 0);
    const std::string csv = read_text(dir.file("param_count.csv"));
    CHECK(csv.rfind("config,component,params\n", 0) == 0);
    CHECK(csv_value(csv, "A,global.kernel") == 128);

    const Run d = run({"param-count", "--set", "kernel.msk_base_len=16", "--set", "model.input_len=1024", "--set",
                       "model.channel_independent=true", "--compare-set", "model.input_len=2048", "--out",
                       dir.file("d")});
    REQUIRE(d.code == 0);
    const std::string dcsv = read_text(dir.file("d/param_count.csv"));
    CHECK(csv_value(dcsv, "B,global.kernel") - csv_value(dcsv, "A,global.kernel") == 16);

    const Run same = run({"param-count", "--compare-set", "model.input_len=336"});
    CHECK(same.code == 0);
    CHECK(same.out.find("reduction (A - B) / A: 0.00%") != std::string::npos);
    CHECK(run({"param-count", "--set", "model.local_len=999"}).code == 2);
  }

  TEST_CASE("theory") {
    TempDir dir;
    const Run a = run({"theory", "--trials", "500", "--out", dir.path().string()});
    CHECK(a.code == 0);
    CHECK(a.out.find("PASS") != std::string::npos);
    CHECK(std::filesystem::exists(dir.path() / "noise_accumulation.csv"));
    CHECK(std::filesystem::exists(dir.path() / "column_selection.csv"));
    CHECK(run({"theory", "--mode", "noise", "--kind", "expanding", "--theta", "256", "--trials", "200"}).code == 5);
    CHECK(run({"theory", "--mode", "columns", "--keep", "8", "--cols", "8", "--sampled", "0"}).code == 0);
    CHECK(run({"theory", "--trials", "10"}).code == 2);
  }
}
