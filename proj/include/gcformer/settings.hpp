#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gcformer/data.hpp"
#include "gcformer/model.hpp"
#include "gcformer/training.hpp"

namespace gcf {

/// Every tunable of a run. Serialized as a sectioned key = value file with
/// sections [model], [kernel], [training] and [data].
struct RunSettings {
  RunSettings() { model.channels = 0; }  // 0: take the count from the dataset

  model::ModelConfig model;
  training::TrainConfig training;
  data::DataConfig data;
};

class SettingsError : public std::runtime_error {
 public:
  explicit SettingsError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct SettingKey {
  std::string name;  // "section.key"
  std::string type;
  std::string description;
};

/// All recognised keys in file order.
const std::vector<SettingKey>& setting_keys();

/// Sets one dotted key. Throws SettingsError naming the key when it is
/// unknown or the value does not parse.
void apply_setting(RunSettings& s, const std::string& dotted_key, const std::string& value);

/// Applies "section.key=value".
void apply_override(RunSettings& s, const std::string& assignment);

/// Parses config text on top of `base`. Collects every bad line before
/// throwing. With `allowed_sections` non-empty, other sections are rejected.
RunSettings parse_settings(const std::string& text, RunSettings base = {},
                           const std::vector<std::string>& allowed_sections = {});
RunSettings load_settings(const std::string& path, RunSettings base = {});

/// Current value of a dotted key in its file spelling.
std::string get_setting(const RunSettings& s, const std::string& dotted_key);

/// Serializes the named sections (all when empty).
std::string format_settings(const RunSettings& s, const std::vector<std::string>& sections = {});

/// Every violated constraint. model.channels = 0 (infer from data) is
/// accepted when `channels_known` is false.
std::vector<std::string> validate_settings(const RunSettings& s, bool channels_known = true);

}  // namespace gcf
