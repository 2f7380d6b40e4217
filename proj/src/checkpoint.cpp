#include "gcformer/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>

#include "gcformer/settings.hpp"

namespace gcf {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

std::string serialize_checkpoint(const model::GCformerModel& model, const RunSettings& settings) {
  RunSettings s = settings;
  s.model = model.config();
  const std::string config = format_settings(s);
  std::string out = std::string(kCheckpointVersion) + "\n";
  out += "config " + std::to_string(config.size()) + "\n" + config;
  for (const auto& p : model.parameters()) {
    out += "param " + p.name + " " + std::to_string(p.value.rank());
    for (std::size_t d : p.value.shape()) out += " " + std::to_string(d);
    out += "\n";
    const auto* bytes = reinterpret_cast<const char*>(p.value.data().data());
    out.append(bytes, p.value.size() * sizeof(double));
  }
  out += "end\n";
  return out;
}

namespace {

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::string line() {
    const auto nl = bytes_.find('\n', pos_);
    if (nl == std::string::npos) fail("truncated header line");
    std::string out = bytes_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    return out;
  }

  std::string take(std::size_t n) {
    if (n > bytes_.size() - pos_) fail("truncated payload");
    std::string out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  [[noreturn]] static void fail(const std::string& what) {
    throw CheckpointError(std::string("corrupt checkpoint (version ") + kCheckpointVersion + "): " + what);
  }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

std::string printable(const std::string& s) {
  std::string out;
  for (char c : s.substr(0, 32)) out += (c >= 32 && c < 127) ? c : '?';
  return out;
}

}  // namespace

model::GCformerModel deserialize_checkpoint(const std::string& bytes, RunSettings* settings) {
  const std::string version = bytes.substr(0, bytes.find('\n'));
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version '" + printable(version) + "' (expected " +
                          kCheckpointVersion + ")");
  }
  Reader r(bytes);
  r.line();
  std::istringstream head(r.line());
  std::string tag;
  std::size_t config_len = 0;
  if (!(head >> tag >> config_len) || tag != "config") Reader::fail("missing config block");
  RunSettings s;
  try {
    s = parse_settings(r.take(config_len));
  } catch (const SettingsError& e) {
    Reader::fail(std::string("config block: ") + e.what());
  }
  std::optional<model::GCformerModel> m;
  try {
    m.emplace(s.model, 0);
  } catch (const std::invalid_argument& e) {
    Reader::fail(e.what());
  }
  for (auto& p : m->parameters()) {
    std::istringstream ph(r.line());
    std::string name;
    std::size_t rank = 0;
    if (!(ph >> tag >> name >> rank) || tag != "param") Reader::fail("expected parameter '" + p.name + "'");
    if (name != p.name) Reader::fail("parameter '" + name + "' where '" + p.name + "' was expected");
    Tensor::Shape shape(rank);
    for (auto& d : shape) {
      if (!(ph >> d)) Reader::fail("bad shape for '" + name + "'");
    }
    if (shape != p.value.shape()) {
      Reader::fail("parameter '" + name + "' has shape " + shape_string(shape) + ", config implies " +
                   shape_string(p.value.shape()));
    }
    const std::string raw = r.take(p.value.size() * sizeof(double));
    std::memcpy(p.value.data().data(), raw.data(), raw.size());
  }
  if (r.line() != "end") Reader::fail("missing end marker");
  if (settings) *settings = s;
  return std::move(*m);
}

void save_checkpoint(const model::GCformerModel& model, const std::string& path,
                     const RunSettings& settings) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint " + path);
  const std::string bytes = serialize_checkpoint(model, settings);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("failed writing checkpoint " + path);
}

model::GCformerModel load_checkpoint(const std::string& path, RunSettings* settings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read checkpoint " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str(), settings);
}

}  // namespace gcf
