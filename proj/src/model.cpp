#include "gcformer/model.hpp"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "gcformer/errors.hpp"

namespace gcf::model {

std::string to_string(DecoderMode m) {
  switch (m) {
    case DecoderMode::attention: return "attention";
    case DecoderMode::concat: return "concat";
    case DecoderMode::series_gl: return "series_gl";
    case DecoderMode::series_lg: return "series_lg";
  }
  return "?";
}

std::string to_string(AttentionAxis a) {
  return a == AttentionAxis::token ? "token" : "channel";
}

std::string to_string(Branches b) {
  switch (b) {
    case Branches::both: return "both";
    case Branches::local_only: return "local_only";
    case Branches::global_only: return "global_only";
  }
  return "?";
}

DecoderMode parse_decoder_mode(const std::string& s) {
  if (s == "attention") return DecoderMode::attention;
  if (s == "concat") return DecoderMode::concat;
  if (s == "series_gl") return DecoderMode::series_gl;
  if (s == "series_lg") return DecoderMode::series_lg;
  throw std::invalid_argument("unknown decoder mode '" + s +
                              "' (expected attention, concat, series_gl, series_lg)");
}

AttentionAxis parse_attention_axis(const std::string& s) {
  if (s == "token") return AttentionAxis::token;
  if (s == "channel") return AttentionAxis::channel;
  throw std::invalid_argument("unknown attention axis '" + s + "' (expected token, channel)");
}

Branches parse_branches(const std::string& s) {
  if (s == "both") return Branches::both;
  if (s == "local_only") return Branches::local_only;
  if (s == "global_only") return Branches::global_only;
  throw std::invalid_argument("unknown branches '" + s + "' (expected both, local_only, global_only)");
}

std::size_t ModelConfig::patches() const {
  if (patch_len == 0 || patch_stride == 0 || patch_len > local_len) return 0;
  return (local_len - patch_len) / patch_stride + 1;
}

std::size_t ModelConfig::kernel_channels() const { return channel_independent ? 1 : channels; }

std::vector<std::string> ModelConfig::validate() const {
  std::vector<std::string> problems;
  auto positive = [&](std::size_t v, const char* key) {
    if (v == 0) problems.push_back(std::string(key) + " must be >= 1");
  };
  positive(input_len, "model.input_len");
  positive(local_len, "model.local_len");
  positive(pred_len, "model.pred_len");
  positive(channels, "model.channels");
  positive(hidden_dim, "model.hidden_dim");
  positive(patch_len, "model.patch_len");
  positive(patch_stride, "model.patch_stride");
  positive(decoder_depth, "model.decoder_depth");
  if (local_len > input_len) problems.push_back("model.local_len must be <= model.input_len");
  if (patch_len > local_len) problems.push_back("model.patch_len must be <= model.local_len");
  if (!(revin_eps > 0.0)) problems.push_back("model.revin_eps must be > 0");
  if (input_len > 0 && branches != Branches::local_only) {
    for (auto& p : kernels::validate(kernel, input_len)) problems.push_back(p);
    if (branches == Branches::both && decoder_mode == DecoderMode::series_lg && local_len > 0) {
      for (auto& p : kernels::validate(kernel, local_len)) {
        problems.push_back(p + " (series_lg applies the kernel to the local window)");
      }
    }
  }
  return problems;
}

namespace {

bool uses_global(const ModelConfig& c) { return c.branches != Branches::local_only; }
bool uses_local(const ModelConfig& c) { return c.branches != Branches::global_only; }
bool fused(const ModelConfig& c) { return c.branches == Branches::both; }

bool uses_global_proj(const ModelConfig& c) {
  return uses_global(c) && !(fused(c) && c.decoder_mode == DecoderMode::series_gl);
}

std::size_t decoder_tokens(const ModelConfig& c) {
  switch (c.branches) {
    case Branches::local_only: return c.patches();
    case Branches::global_only: return c.input_len;
    case Branches::both: break;
  }
  switch (c.decoder_mode) {
    case DecoderMode::attention:
    case DecoderMode::concat: return c.input_len;
    case DecoderMode::series_gl: return c.patches();
    case DecoderMode::series_lg: return c.local_len;
  }
  return 0;
}

double leg_theta(const ModelConfig& c, std::size_t n) {
  return c.kernel.leg_theta > 0.0 ? c.kernel.leg_theta : static_cast<double>(n);
}

}  // namespace

GCformerModel::GCformerModel(ModelConfig config, std::uint64_t seed) : config_(std::move(config)) {
  const auto problems = config_.validate();
  if (!problems.empty()) {
    std::string msg = "invalid model config:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw std::invalid_argument(msg);
  }
  std::mt19937_64 rng(seed);
  const std::size_t h = config_.hidden_dim;
  const std::size_t N = config_.input_len;
  const std::size_t Nl = config_.local_len;
  const std::size_t P = config_.patches();
  const std::size_t C = config_.channels;

  auto add_linear = [&](const std::string& prefix, std::size_t in, std::size_t out) {
    Tensor w({in, out});
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> uni(-bound, bound);
    for (double& v : w.data()) v = uni(rng);
    params_.push_back({prefix + ".weight", std::move(w)});
    params_.push_back({prefix + ".bias", Tensor({out})});
  };
  // Token mixing weights are stored [to, from] with fan-in `from`.
  auto add_mix = [&](const std::string& prefix, std::size_t to, std::size_t from) {
    Tensor w({to, from});
    const double bound = 1.0 / std::sqrt(static_cast<double>(from));
    std::uniform_real_distribution<double> uni(-bound, bound);
    for (double& v : w.data()) v = uni(rng);
    params_.push_back({prefix + ".weight", std::move(w)});
    params_.push_back({prefix + ".bias", Tensor({to})});
  };

  if (config_.revin) {
    params_.push_back({"revin.gamma", Tensor({C}, 1.0)});
    params_.push_back({"revin.beta", Tensor({C}, 0.0)});
  }
  if (uses_global(config_)) {
    kernels::KernelSpec spec = kernels::make_kernel(config_.kernel, N, config_.kernel_channels(), rng);
    params_.push_back({"global.kernel", kernels::weights_of(spec)});
    if (uses_global_proj(config_)) add_linear("global.proj", 1, h);
    if (config_.kernel.variant == kernels::KernelVariant::leg) {
      leg_basis_global_ = std::make_shared<const legendre::LegBasis>(
          legendre::make_leg_basis(config_.kernel.leg_order, leg_theta(config_, N), N));
      if (fused(config_) && config_.decoder_mode == DecoderMode::series_lg) {
        leg_basis_local_ = std::make_shared<const legendre::LegBasis>(
            legendre::make_leg_basis(config_.kernel.leg_order, leg_theta(config_, Nl), Nl));
      }
    }
  }
  if (uses_local(config_)) {
    add_linear("local.embed", config_.patch_len, h);
    add_linear("local.attn.query", h, h);
    add_linear("local.attn.key", h, h);
    add_linear("local.attn.value", h, h);
  }
  if (fused(config_)) {
    switch (config_.decoder_mode) {
      case DecoderMode::attention:
        for (const char* role : {"query", "key", "value"}) {
          for (std::size_t i = 0; i < config_.decoder_depth; ++i) {
            add_linear("decoder." + std::string(role) + "." + std::to_string(i), h, h);
          }
        }
        if (config_.attention_axis == AttentionAxis::channel) add_mix("decoder.align", N, P);
        break;
      case DecoderMode::concat:
        add_mix("decoder.align", N, P);
        add_mix("decoder.merge", N, 2 * N);
        break;
      case DecoderMode::series_gl:
        break;
      case DecoderMode::series_lg:
        add_linear("decoder.unpatch", P * h, Nl);
        break;
    }
  }
  add_linear("head", decoder_tokens(config_) * h, config_.pred_len);
}

const Parameter& GCformerModel::parameter(const std::string& name) const {
  for (const auto& p : params_) {
    if (p.name == name) return p;
  }
  throw std::out_of_range("no parameter named '" + name + "'");
}

Parameter& GCformerModel::parameter(const std::string& name) {
  return const_cast<Parameter&>(std::as_const(*this).parameter(name));
}

bool GCformerModel::has_parameter(const std::string& name) const {
  for (const auto& p : params_) {
    if (p.name == name) return true;
  }
  return false;
}

std::size_t GCformerModel::parameter_count() const {
  std::size_t total = 0;
  for (const auto& p : params_) total += p.value.size();
  return total;
}

std::vector<std::pair<std::string, std::size_t>> GCformerModel::component_counts() const {
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const auto& p : params_) {
    std::string component = p.name.substr(0, p.name.find('.'));
    if (component == "global") component = p.name.substr(0, p.name.find('.', 7));
    if (out.empty() || out.back().first != component) out.emplace_back(component, 0);
    out.back().second += p.value.size();
  }
  return out;
}

kernels::KernelSpec GCformerModel::kernel_spec() const {
  if (!has_parameter("global.kernel")) throw std::logic_error("model has no global kernel");
  const Tensor& w = parameter("global.kernel").value;
  const auto& k = config_.kernel;
  switch (k.variant) {
    case kernels::KernelVariant::msk:
      return kernels::MultiScaleKernelParams{w.dim(1), w.dim(2), k.msk_decay, w};
    case kernels::KernelVariant::freq:
      return kernels::FreqKernelParams{w.dim(1), w};
    case kernels::KernelVariant::leg:
      return kernels::LegKernelParams{w.dim(2), w.dim(1), k.leg_theta, w};
  }
  throw std::logic_error("kernel_spec: unreachable");
}

// Assembles the tape for one batch. Rows of every [R, ...] tensor are
// (sample, channel) pairs, r = b * C + c.
struct GraphBuilder {
  const GCformerModel& model;
  ad::Tape& tape;
  std::size_t batch;
  std::map<std::string, ad::Var> vars;

  const ModelConfig& cfg() const { return model.config_; }
  ad::Var p(const std::string& name) const { return vars.at(name); }

  ad::Var kernel(std::size_t n) {
    const ad::Var w = p("global.kernel");
    switch (cfg().kernel.variant) {
      case kernels::KernelVariant::msk:
        return ad::msk_kernel(w, cfg().kernel.msk_decay, n);
      case kernels::KernelVariant::freq:
        return ad::freq_kernel(w, n);
      case kernels::KernelVariant::leg:
        return ad::leg_kernel(w, n == cfg().input_len ? model.leg_basis_global_ : model.leg_basis_local_);
    }
    throw std::logic_error("kernel: unreachable");
  }

  // Causal global convolution over rows [R, n].
  ad::Var convolve(ad::Var series) { return ad::causal_conv(series, kernel(series.shape()[1])); }

  ad::Var project(ad::Var g) {
    const std::size_t rows = g.shape()[0];
    const std::size_t n = g.shape()[1];
    return ad::linear(ad::reshape(g, {rows, n, 1}), p("global.proj.weight"), p("global.proj.bias"));
  }

  ad::Var local(ad::Var tail) {
    const ad::Var patches = ad::patchify(tail, cfg().patch_len, cfg().patch_stride);
    const ad::Var e = ad::linear(patches, p("local.embed.weight"), p("local.embed.bias"));
    const ad::Var q = ad::linear(e, p("local.attn.query.weight"), p("local.attn.query.bias"));
    const ad::Var k = ad::linear(e, p("local.attn.key.weight"), p("local.attn.key.bias"));
    const ad::Var v = ad::linear(e, p("local.attn.value.weight"), p("local.attn.value.bias"));
    return ad::attention(q, k, v);
  }

  ad::Var mlp(ad::Var z, const std::string& role) {
    for (std::size_t i = 0; i < cfg().decoder_depth; ++i) {
      if (i > 0) z = ad::relu(z);
      const std::string prefix = "decoder." + role + "." + std::to_string(i);
      z = ad::linear(z, p(prefix + ".weight"), p(prefix + ".bias"));
    }
    return z;
  }

  ad::Var fuse_attention(ad::Var zg, ad::Var zl) {
    const ad::Var q = mlp(zg, "query");
    ad::Var k = mlp(zl, "key");
    ad::Var v = mlp(zl, "value");
    ad::Var out;
    if (cfg().attention_axis == AttentionAxis::token) {
      out = ad::attention(q, k, v);
    } else {
      const std::size_t C = cfg().channels;
      const std::size_t N = cfg().input_len;
      k = ad::token_mix(p("decoder.align.weight"), p("decoder.align.bias"), k);
      v = ad::token_mix(p("decoder.align.weight"), p("decoder.align.bias"), v);
      const ad::Var mixed = ad::attention(ad::swap_groups(q, batch, C), ad::swap_groups(k, batch, C),
                                          ad::swap_groups(v, batch, C));
      out = ad::swap_groups(mixed, batch, N);
    }
    return cfg().decoder_residual ? ad::add(out, q) : out;
  }

  ad::Var fuse_concat(ad::Var zg, ad::Var zl) {
    const ad::Var aligned = ad::token_mix(p("decoder.align.weight"), p("decoder.align.bias"), zl);
    return ad::token_mix(p("decoder.merge.weight"), p("decoder.merge.bias"),
                         ad::concat_tokens(zg, aligned));
  }

  ad::Var head(ad::Var d) {
    const std::size_t rows = d.shape()[0];
    const std::size_t width = d.value().size() / rows;
    return ad::linear(ad::reshape(d, {rows, width}), p("head.weight"), p("head.bias"));
  }

  ad::Var tail(ad::Var series) {
    const std::size_t n = series.shape()[1];
    return ad::slice_columns(series, n - cfg().local_len, cfg().local_len);
  }

  // Normalized rows [R, N] -> normalized predictions [R, H].
  ad::Var forward_normalized(ad::Var xn) {
    const ModelConfig& c = cfg();
    switch (c.branches) {
      case Branches::local_only:
        return head(local(tail(xn)));
      case Branches::global_only:
        return head(project(convolve(xn)));
      case Branches::both:
        break;
    }
    switch (c.decoder_mode) {
      case DecoderMode::attention:
        return head(fuse_attention(project(convolve(xn)), local(tail(xn))));
      case DecoderMode::concat:
        return head(fuse_concat(project(convolve(xn)), local(tail(xn))));
      case DecoderMode::series_gl:
        return head(local(tail(convolve(xn))));
      case DecoderMode::series_lg: {
        const ad::Var zl = local(tail(xn));
        const std::size_t rows = zl.shape()[0];
        const ad::Var flat = ad::reshape(zl, {rows, zl.value().size() / rows});
        const ad::Var series = ad::linear(flat, p("decoder.unpatch.weight"), p("decoder.unpatch.bias"));
        return head(project(convolve(series)));
      }
    }
    throw std::logic_error("forward: unreachable");
  }
};

namespace {

GraphBuilder make_builder(const GCformerModel& model, ad::Tape& tape, std::size_t batch,
                          std::vector<ad::Var>* param_vars) {
  GraphBuilder b{model, tape, batch, {}};
  for (const auto& prm : model.parameters()) {
    const ad::Var v = param_vars ? tape.variable(prm.value) : tape.constant(prm.value);
    if (param_vars) param_vars->push_back(v);
    b.vars.emplace(prm.name, v);
  }
  return b;
}

Tensor as_batch(const Tensor& x) {
  if (x.rank() == 2) return x.reshaped({1, x.dim(0), x.dim(1)});
  if (x.rank() != 3) throw std::invalid_argument("expected [N, C] or [B, N, C] input");
  return x;
}

// [rows, a, h] group slice as [a, h] -> [C, ...] tensor helpers.
Tensor channels_first(const Tensor& x) {
  // [T, C] -> [C, T]
  Tensor out({x.dim(1), x.dim(0)});
  for (std::size_t t = 0; t < x.dim(0); ++t) {
    for (std::size_t c = 0; c < x.dim(1); ++c) out.at(c, t) = x.at(t, c);
  }
  return out;
}

}  // namespace

Tensor to_rows(const Tensor& batch) {
  const std::size_t B = batch.dim(0);
  const std::size_t T = batch.dim(1);
  const std::size_t C = batch.dim(2);
  Tensor rows({B * C, T});
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t c = 0; c < C; ++c) rows.at(b * C + c, t) = batch.at(b, t, c);
    }
  }
  return rows;
}

Tensor from_rows(const Tensor& rows, std::size_t batch, std::size_t channels) {
  const std::size_t T = rows.dim(1);
  Tensor out({batch, T, channels});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t c = 0; c < channels; ++c) out.at(b, t, c) = rows.at(b * channels + c, t);
    }
  }
  return out;
}

ad::Var GCformerModel::build_forward(ad::Tape& tape, const Tensor& x_in,
                                     std::vector<ad::Var>& param_vars) const {
  const Tensor x = as_batch(x_in);
  if (x.dim(1) != config_.input_len || x.dim(2) != config_.channels) {
    throw std::invalid_argument("model input " + shape_string(x.shape()) + " does not match N=" +
                                std::to_string(config_.input_len) + ", C=" +
                                std::to_string(config_.channels));
  }
  param_vars.clear();
  GraphBuilder b = make_builder(*this, tape, x.dim(0), &param_vars);
  const Tensor rows = to_rows(x);
  const ad::Var input = tape.constant(rows);
  if (!config_.revin) return b.forward_normalized(input);
  const ad::RowStats stats = ad::row_stats(rows, config_.revin_eps);
  const ad::Var xn = ad::revin_normalize(input, b.p("revin.gamma"), b.p("revin.beta"), stats);
  return ad::revin_denormalize(b.forward_normalized(xn), b.p("revin.gamma"), b.p("revin.beta"), stats);
}

Tensor GCformerModel::predict(const Tensor& x_in) const {
  const Tensor x = as_batch(x_in);
  if (x.dim(1) != config_.input_len || x.dim(2) != config_.channels) {
    throw std::invalid_argument("model input " + shape_string(x.shape()) + " does not match the config");
  }
  if (!x.all_finite()) throw std::invalid_argument("model input contains non-finite values");
  ad::Tape tape;
  GraphBuilder b = make_builder(*this, tape, x.dim(0), nullptr);
  const Tensor rows = to_rows(x);
  const ad::Var input = tape.constant(rows);
  ad::Var out;
  if (config_.revin) {
    const ad::RowStats stats = ad::row_stats(rows, config_.revin_eps);
    const ad::Var xn = ad::revin_normalize(input, b.p("revin.gamma"), b.p("revin.beta"), stats);
    out = ad::revin_denormalize(b.forward_normalized(xn), b.p("revin.gamma"), b.p("revin.beta"), stats);
  } else {
    out = b.forward_normalized(input);
  }
  Tensor y = from_rows(out.value(), x.dim(0), config_.channels);
  if (x_in.rank() == 2) return y.reshaped({config_.pred_len, config_.channels});
  return y;
}

Tensor global_branch_forward(const GCformerModel& model, const Tensor& x) {
  const ModelConfig& c = model.config();
  if (!model.has_parameter("global.proj.weight")) {
    throw std::invalid_argument("global_branch_forward: model has no global projection");
  }
  if (x.rank() != 2 || x.dim(0) != c.input_len || x.dim(1) != c.channels) {
    throw std::invalid_argument("global_branch_forward: expected [N, C] input");
  }
  ad::Tape tape;
  GraphBuilder b = make_builder(model, tape, 1, nullptr);
  return b.project(b.convolve(tape.constant(channels_first(x)))).value();
}

Tensor local_branch_forward(const GCformerModel& model, const Tensor& x_tail) {
  const ModelConfig& c = model.config();
  if (!model.has_parameter("local.embed.weight")) {
    throw std::invalid_argument("local_branch_forward: model has no local branch");
  }
  if (x_tail.rank() != 2 || x_tail.dim(1) != c.channels) {
    throw std::invalid_argument("local_branch_forward: expected [N', C] input");
  }
  if (c.patch_len > x_tail.dim(0)) {
    throw std::invalid_argument("local_branch_forward: patch_len exceeds the local window");
  }
  ad::Tape tape;
  GraphBuilder b = make_builder(model, tape, 1, nullptr);
  return b.local(tape.constant(channels_first(x_tail))).value();
}

Tensor cross_attention(const Tensor& q, const Tensor& k, const Tensor& v) {
  if (q.rank() != 2 || k.rank() != 2 || v.rank() != 2) {
    throw std::invalid_argument("cross_attention: expects matrices");
  }
  ad::Tape tape;
  const ad::Var out = ad::attention(tape.constant(q.reshaped({1, q.dim(0), q.dim(1)})),
                                    tape.constant(k.reshaped({1, k.dim(0), k.dim(1)})),
                                    tape.constant(v.reshaped({1, v.dim(0), v.dim(1)})));
  return out.value().reshaped({q.dim(0), v.dim(1)});
}

Tensor decode(const GCformerModel& model, const Tensor& z_global, const Tensor& z_local) {
  const ModelConfig& c = model.config();
  if (c.branches != Branches::both) throw std::invalid_argument("decode: model has a single branch");
  const std::size_t h = c.hidden_dim;
  auto expect = [&](const Tensor& z, std::size_t tokens, const char* what) {
    if (z.rank() != 3 || z.dim(0) != c.channels || z.dim(1) != tokens || z.dim(2) != h) {
      throw std::invalid_argument(std::string("decode: ") + what + " has shape " +
                                  shape_string(z.shape()) + ", mode " + to_string(c.decoder_mode) +
                                  " needs (" + std::to_string(c.channels) + ", " +
                                  std::to_string(tokens) + ", " + std::to_string(h) + ")");
    }
  };
  ad::Tape tape;
  GraphBuilder b = make_builder(model, tape, 1, nullptr);
  ad::Var d;
  switch (c.decoder_mode) {
    case DecoderMode::attention:
      expect(z_global, c.input_len, "z_global");
      expect(z_local, c.patches(), "z_local");
      d = b.fuse_attention(tape.constant(z_global), tape.constant(z_local));
      break;
    case DecoderMode::concat:
      expect(z_global, c.input_len, "z_global");
      expect(z_local, c.patches(), "z_local");
      d = b.fuse_concat(tape.constant(z_global), tape.constant(z_local));
      break;
    case DecoderMode::series_gl:
      expect(z_local, c.patches(), "z_local");
      d = tape.constant(z_local);
      break;
    case DecoderMode::series_lg:
      expect(z_global, c.local_len, "z_global");
      d = tape.constant(z_global);
      break;
  }
  return b.head(d).value();
}

Tensor gcformer_forward(const GCformerModel& model, const Tensor& x) {
  if (x.rank() != 2) throw std::invalid_argument("gcformer_forward: expected [N, C] input");
  return model.predict(x);
}

Gradients parameter_gradients(const GCformerModel& model, const Tensor& x, const Tensor& y) {
  ad::Tape tape;
  std::vector<ad::Var> vars;
  const ad::Var pred = model.build_forward(tape, x, vars);
  const Tensor y3 = y.rank() == 2 ? y.reshaped({1, y.dim(0), y.dim(1)}) : y;
  const ad::Var loss = ad::mse_loss(pred, to_rows(y3));
  const double value = loss.value()[0];
  if (!std::isfinite(value)) throw NumericError("parameter_gradients: non-finite loss");
  tape.backward(loss);
  Gradients out{value, {}};
  out.grads.reserve(vars.size());
  for (const ad::Var& v : vars) out.grads.push_back(tape.grad(v));
  return out;
}

double batch_loss(const GCformerModel& model, const Tensor& x, const Tensor& y) {
  const Tensor pred = model.predict(x);
  if (pred.size() != y.size()) throw std::invalid_argument("batch_loss: target size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) total += (pred[i] - y[i]) * (pred[i] - y[i]);
  return total / static_cast<double>(pred.size());
}

}  // namespace gcf::model
