#pragma once

#include <stdexcept>
#include <string>

#include "gcformer/model.hpp"
#include "gcformer/settings.hpp"

namespace gcf {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kCheckpointVersion = "gcf1";

/// Layout: "gcf1\n", "config <bytes>\n" followed by the run settings text
/// (model section taken from the model itself), then per parameter "param <name> <rank> <dims...>\n" and
/// the values as little-endian float64, then "end\n".
std::string serialize_checkpoint(const model::GCformerModel& model, const RunSettings& settings = {});
/// Rebuilds the model; the stored run settings go to `settings` when given.
model::GCformerModel deserialize_checkpoint(const std::string& bytes, RunSettings* settings = nullptr);

void save_checkpoint(const model::GCformerModel& model, const std::string& path,
                     const RunSettings& settings = {});
model::GCformerModel load_checkpoint(const std::string& path, RunSettings* settings = nullptr);

}  // namespace gcf
