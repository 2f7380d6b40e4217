#include "gcformer/settings.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace gcf {

SettingsError::SettingsError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string msg;
        for (const auto& p : problems) msg += (msg.empty() ? "" : "\n") + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

namespace {

struct Entry {
  SettingKey key;
  std::function<void(RunSettings&, const std::string&)> set;
  std::function<std::string(const RunSettings&)> get;
};

std::size_t to_size(const std::string& v) {
  std::size_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw std::invalid_argument("expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

double to_real(const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw std::invalid_argument("expected a real number, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("expected true or false, got '" + v + "'");
}

std::string real_str(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string bool_str(bool v) { return v ? "true" : "false"; }

#define SIZE_KEY(section, field, member, desc)                                                \
  Entry {                                                                                     \
    {section "." #field, "integer", desc},                                                    \
        [](RunSettings& s, const std::string& v) { s.member = to_size(v); },                  \
        [](const RunSettings& s) { return std::to_string(s.member); }                         \
  }
#define REAL_KEY(section, field, member, desc)                                                \
  Entry {                                                                                     \
    {section "." #field, "real", desc}, [](RunSettings& s, const std::string& v) { s.member = to_real(v); }, \
        [](const RunSettings& s) { return real_str(s.member); }                               \
  }
#define BOOL_KEY(section, field, member, desc)                                                \
  Entry {                                                                                     \
    {section "." #field, "bool", desc}, [](RunSettings& s, const std::string& v) { s.member = to_bool(v); }, \
        [](const RunSettings& s) { return bool_str(s.member); }                               \
  }
#define ENUM_KEY(section, field, member, type, parse, desc)                                  \
  Entry {                                                                                     \
    {section "." #field, type, desc}, [](RunSettings& s, const std::string& v) { s.member = parse(v); }, \
        [](const RunSettings& s) { return to_string(s.member); }                              \
  }

const std::vector<Entry>& entries() {
  using namespace model;
  using kernels::parse_init;
  using kernels::parse_variant;
  using kernels::to_string;
  using model::to_string;
  static const std::vector<Entry> table = {
      SIZE_KEY("model", input_len, model.input_len, "global window N"),
      SIZE_KEY("model", local_len, model.local_len, "local window N' (tail of the global window)"),
      SIZE_KEY("model", pred_len, model.pred_len, "forecast horizon H"),
      SIZE_KEY("model", channels, model.channels, "channel count C, 0 = take from the dataset"),
      SIZE_KEY("model", patch_len, model.patch_len, "local patch length"),
      SIZE_KEY("model", patch_stride, model.patch_stride, "local patch stride"),
      SIZE_KEY("model", hidden_dim, model.hidden_dim, "hidden width h"),
      ENUM_KEY("model", decoder_mode, model.decoder_mode, "attention|concat|series_gl|series_lg",
               parse_decoder_mode, "branch fusion"),
      ENUM_KEY("model", attention_axis, model.attention_axis, "token|channel", parse_attention_axis,
               "axis of the decoder attention"),
      BOOL_KEY("model", channel_independent, model.channel_independent,
               "share one global kernel across channels"),
      ENUM_KEY("model", branches, model.branches, "both|local_only|global_only", parse_branches,
               "which branches run"),
      BOOL_KEY("model", decoder_residual, model.decoder_residual,
               "add the decoder query back to the attention output"),
      SIZE_KEY("model", decoder_depth, model.decoder_depth, "linear layers per decoder map"),
      BOOL_KEY("model", revin, model.revin, "reversible instance normalization"),
      REAL_KEY("model", revin_eps, model.revin_eps, "variance guard"),
      ENUM_KEY("kernel", variant, model.kernel.variant, "msk|freq|leg", parse_variant,
               "global kernel parameterization"),
      SIZE_KEY("kernel", msk_base_len, model.kernel.msk_base_len, "sub-kernel length l0"),
      SIZE_KEY("kernel", msk_scales, model.kernel.msk_scales, "number of scales, 0 = cover N"),
      REAL_KEY("kernel", msk_decay, model.kernel.msk_decay, "per-scale decay alpha"),
      SIZE_KEY("kernel", freq_modes, model.kernel.freq_modes, "learned low-frequency modes m"),
      SIZE_KEY("kernel", leg_order, model.kernel.leg_order, "Legendre state order"),
      SIZE_KEY("kernel", leg_kernel_len, model.kernel.leg_kernel_len, "per-state kernel length"),
      REAL_KEY("kernel", leg_theta, model.kernel.leg_theta, "LegT window, 0 = signal length"),
      ENUM_KEY("kernel", init, model.kernel.init, "random|zero|ones", parse_init,
               "kernel weight initialization"),
      REAL_KEY("kernel", init_std, model.kernel.init_std, "std of random kernel init"),
      SIZE_KEY("training", epochs, training.epochs, "maximum epochs"),
      SIZE_KEY("training", batch_size, training.batch_size, "samples per step"),
      REAL_KEY("training", lr, training.lr, "Adam learning rate"),
      SIZE_KEY("training", patience, training.patience, "early stopping patience, 0 = off"),
      REAL_KEY("training", grad_clip, training.grad_clip, "global gradient norm clip, 0 = off"),
      SIZE_KEY("training", seed, training.seed, "seed for init, shuffling and noise"),
      SIZE_KEY("data", train_stride, data.train_stride, "training window stride"),
      SIZE_KEY("data", eval_stride, data.eval_stride, "validation/test window stride"),
      REAL_KEY("data", noise_fraction, data.noise_fraction, "fraction of training cells perturbed"),
      REAL_KEY("data", noise_scale, data.noise_scale, "noise std in units of channel std"),
  };
  return table;
}

#undef SIZE_KEY
#undef REAL_KEY
#undef BOOL_KEY
#undef ENUM_KEY

const Entry* find_entry(const std::string& name) {
  for (const auto& e : entries()) {
    if (e.key.name == name) return &e;
  }
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<SettingKey>& setting_keys() {
  static const std::vector<SettingKey> keys = [] {
    std::vector<SettingKey> out;
    for (const auto& e : entries()) out.push_back(e.key);
    return out;
  }();
  return keys;
}

void apply_setting(RunSettings& s, const std::string& dotted_key, const std::string& value) {
  const Entry* e = find_entry(dotted_key);
  if (!e) throw SettingsError({"unknown key '" + dotted_key + "'"});
  try {
    e->set(s, value);
  } catch (const std::invalid_argument& ex) {
    throw SettingsError({"bad value for '" + dotted_key + "': " + ex.what()});
  }
}

void apply_override(RunSettings& s, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw SettingsError({"override '" + assignment + "' is not of the form section.key=value"});
  }
  apply_setting(s, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

RunSettings parse_settings(const std::string& text, RunSettings base,
                           const std::vector<std::string>& allowed_sections) {
  std::vector<std::string> problems;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (body.front() == '[') {
      if (body.back() != ']') {
        problems.push_back(where + "malformed section header '" + body + "'");
        continue;
      }
      section = trim(body.substr(1, body.size() - 2));
      bool allowed = allowed_sections.empty();
      for (const auto& a : allowed_sections) allowed = allowed || a == section;
      if (!allowed) problems.push_back(where + "section [" + section + "] not allowed here");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      problems.push_back(where + "expected key = value, got '" + body + "'");
      continue;
    }
    if (section.empty()) {
      problems.push_back(where + "key '" + trim(body.substr(0, eq)) + "' outside any section");
      continue;
    }
    try {
      apply_setting(base, section + "." + trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    } catch (const SettingsError& e) {
      problems.push_back(where + e.what());
    }
  }
  if (!problems.empty()) throw SettingsError(std::move(problems));
  return base;
}

RunSettings load_settings(const std::string& path, RunSettings base) {
  std::ifstream in(path);
  if (!in) throw SettingsError({"cannot read config file '" + path + "'"});
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_settings(buf.str(), std::move(base));
}

std::string get_setting(const RunSettings& s, const std::string& dotted_key) {
  const Entry* e = find_entry(dotted_key);
  if (!e) throw SettingsError({"unknown key '" + dotted_key + "'"});
  return e->get(s);
}

std::string format_settings(const RunSettings& s, const std::vector<std::string>& sections) {
  std::string out;
  std::string current;
  for (const auto& e : entries()) {
    const std::string section = e.key.name.substr(0, e.key.name.find('.'));
    bool wanted = sections.empty();
    for (const auto& w : sections) wanted = wanted || w == section;
    if (!wanted) continue;
    if (section != current) {
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
      current = section;
    }
    out += e.key.name.substr(section.size() + 1) + " = " + e.get(s) + "\n";
  }
  return out;
}

std::vector<std::string> validate_settings(const RunSettings& s, bool channels_known) {
  std::vector<std::string> problems;
  model::ModelConfig m = s.model;
  if (!channels_known && m.channels == 0) m.channels = 1;
  for (auto& p : m.validate()) problems.push_back(std::move(p));
  for (auto& p : s.training.validate()) problems.push_back(std::move(p));
  for (auto& p : s.data.validate()) problems.push_back(std::move(p));
  return problems;
}

}  // namespace gcf
