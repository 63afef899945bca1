#include "gsaudio/binaural/mask_network.hpp"

#include <cmath>
#include <numbers>

#include "gsaudio/core/weights_io.hpp"
#include "gsaudio/error.hpp"

namespace gsaudio::binaural {
namespace {

constexpr std::size_t kXyInputs = 2;
constexpr std::size_t kDirectionInputs = 2;

std::size_t encoded(std::size_t n, int levels) { return 2 * static_cast<std::size_t>(levels) * n; }

// Split a freshly initialized (static + rows) x W layer so that the combined
// fan-in matches a single layer on the concatenated input.
ResidualMlp make_mlp(std::size_t static_in, std::size_t rows_in, std::size_t width, std::size_t out,
                     std::mt19937_64* rng) {
  const std::size_t in = static_in + rows_in;
  core::Linear first = rng ? core::Linear::uniform(in, width, *rng) : core::Linear::zeros(in, width);
  ResidualMlp m;
  std::vector<std::size_t> static_rows(static_in), row_rows(rows_in);
  for (std::size_t i = 0; i < static_in; ++i) static_rows[i] = i;
  for (std::size_t i = 0; i < rows_in; ++i) row_rows[i] = static_in + i;
  m.first_static = first.weight.select_rows(static_rows);
  if (rows_in > 0) m.first_rows = first.weight.select_rows(row_rows);
  m.first_bias = first.bias;
  auto layer = [&](std::size_t a, std::size_t b) {
    return rng ? core::Linear::uniform(a, b, *rng) : core::Linear::zeros(a, b);
  };
  m.second = layer(width, width);
  m.third = layer(width, width);
  m.fourth = layer(width, out);
  return m;
}

core::Var run_mlp(const ResidualMlp& m, core::Var static_in, const core::Var* rows_in, core::ParamBinder& binder) {
  core::Var pre = core::matmul(static_in, binder.bind(m.first_static));
  if (rows_in) pre = core::matmul(*rows_in, binder.bind(m.first_rows)) + pre;
  const core::Var h1 = core::relu(pre + binder.bind(m.first_bias));
  const core::Var h2 = core::relu(core::apply(m.second, h1, binder));
  const core::Var h3 = core::relu(core::apply(m.third, h2, binder) + h1);
  return core::apply(m.fourth, h3, binder);
}

core::Tensor encoded_rows(std::span<const double> values, int levels) {
  const std::size_t w = encoded(1, levels);
  core::Tensor out = core::Tensor::zeros(values.size(), w);
  for (std::size_t r = 0; r < values.size(); ++r) {
    const auto e = positional_encoding(values.subspan(r, 1), levels);
    for (std::size_t c = 0; c < w; ++c) out(r, c) = e[c];
  }
  return out;
}

core::Var listener_row(core::Tape& tape, const ListenerInputs& in, int levels) {
  return tape.constant(core::Tensor::row(positional_encoding(in.xy, levels)));
}

// The encoding has period 2, so sin/cos in [-1, 1] are shifted into [0, 1]
// first; otherwise +1 and -1 (facing left vs right) would encode identically.
core::Var direction_row(core::Tape& tape, const ListenerInputs& in, int levels) {
  const auto d = transform_direction(in.theta);
  const double unit[] = {0.5 * (d[0] + 1.0), 0.5 * (d[1] + 1.0)};
  return tape.constant(core::Tensor::row(positional_encoding(unit, levels)));
}

void check_context(const MaskNetwork& net, core::Var context) {
  const auto& c = context.value();
  if (c.rows() != 1 || c.cols() != net.context_width)
    throw ContractViolation("context width " + std::to_string(c.cols()) + " does not match the binauralizer (" +
                            std::to_string(net.context_width) + ")");
}

void add_mlp(std::vector<std::pair<std::string, const core::Tensor*>>& out, const std::string& prefix,
             const ResidualMlp& m) {
  out.push_back({prefix + ".first_static", &m.first_static});
  if (!m.first_rows.empty()) out.push_back({prefix + ".first_rows", &m.first_rows});
  out.push_back({prefix + ".first_bias", &m.first_bias});
  for (const auto& [name, layer] : {std::pair{"second", &m.second}, {"third", &m.third}, {"fourth", &m.fourth}}) {
    out.push_back({prefix + "." + name + ".weight", &layer->weight});
    out.push_back({prefix + "." + name + ".bias", &layer->bias});
  }
}

}  // namespace

std::vector<double> positional_encoding(std::span<const double> v, int levels) {
  if (levels < 1) throw ContractViolation("positional encoding needs at least one level");
  std::vector<double> out;
  out.reserve(encoded(v.size(), levels));
  for (double x : v) {
    double freq = std::numbers::pi;
    for (int l = 0; l < levels; ++l, freq *= 2.0) {
      out.push_back(std::sin(freq * x));
      out.push_back(std::cos(freq * x));
    }
  }
  return out;
}

std::array<double, 2> transform_direction(double theta) { return {std::sin(theta), std::cos(theta)}; }

double heading(const scene::Pose& pose) {
  if (pose.yaw) return *pose.yaw;
  return std::atan2(pose.direction[1], pose.direction[0]);
}

std::array<double, 2> SceneBounds::normalize_xy(const scene::Vec3& p) const {
  std::array<double, 2> out{};
  for (int a = 0; a < 2; ++a) {
    const double span = hi[a] - lo[a];
    out[a] = span > 0.0 ? (p[a] - lo[a]) / span : 0.0;
  }
  return out;
}

MaskNetwork MaskNetwork::random(Mode mode, std::size_t width, std::size_t context_width, const SceneBounds& bounds,
                                std::mt19937_64& rng) {
  MaskNetwork net;
  net.mode = mode;
  net.width = width;
  net.context_width = context_width;
  net.bounds = bounds;
  const std::size_t xy = encoded(kXyInputs, net.levels), dir = encoded(kDirectionInputs, net.levels),
                    scalar = encoded(1, net.levels);
  if (mode == Mode::binaural) {
    net.mlp1 = make_mlp(xy + context_width, scalar, width, width, &rng);
    net.mixture = core::Linear::uniform(width, 1, rng);
    net.mlp2 = make_mlp(dir, width, width, 1, &rng);
  } else {
    net.mlp1 = make_mlp(xy + context_width, 0, width, width, &rng);
    net.mlp2 = make_mlp(width + dir, scalar, width, 2, &rng);
  }
  return net;
}

MaskNetwork MaskNetwork::zeros(Mode mode, std::size_t width, std::size_t context_width, const SceneBounds& bounds) {
  std::mt19937_64 unused;
  MaskNetwork net = random(mode, width, context_width, bounds, unused);
  for (core::Tensor* t : net.parameters()) t->fill(0.0);
  return net;
}

std::vector<std::pair<std::string, const core::Tensor*>> MaskNetwork::tensors() const {
  std::vector<std::pair<std::string, const core::Tensor*>> out;
  add_mlp(out, "mlp1", mlp1);
  if (mode == Mode::binaural) {
    out.push_back({"mixture.weight", &mixture.weight});
    out.push_back({"mixture.bias", &mixture.bias});
  }
  add_mlp(out, "mlp2", mlp2);
  return out;
}

std::vector<core::Tensor*> MaskNetwork::parameters() {
  std::vector<core::Tensor*> out;
  for (const auto& [name, t] : tensors()) out.push_back(const_cast<core::Tensor*>(t));
  return out;
}

ListenerInputs ListenerInputs::from(const MaskNetwork& net, const scene::Pose& listener) {
  return {net.bounds.normalize_xy(listener.position), heading(listener)};
}

MaskVars forward_masks(const MaskNetwork& net, core::Var context, const ListenerInputs& in, std::size_t bins,
                       core::ParamBinder& binder) {
  if (net.mode != Mode::binaural) throw ContractViolation("forward_masks requires a binaural-mode network");
  if (bins < 2) throw ContractViolation("mask query needs at least two frequency bins");
  check_context(net, context);
  core::Tape& tape = binder.tape();

  std::vector<double> freqs(bins);
  for (std::size_t f = 0; f < bins; ++f) freqs[f] = static_cast<double>(f) / static_cast<double>(bins - 1);
  const core::Var freq_rows = tape.constant(encoded_rows(freqs, net.levels));
  const core::Var s1[] = {listener_row(tape, in, net.levels), context};
  const core::Var feature = core::relu(run_mlp(net.mlp1, core::concat_cols(s1), &freq_rows, binder));
  const core::Var mix = 2.0 * core::sigmoid(core::apply(net.mixture, feature, binder));

  const core::Var diff_logit = run_mlp(net.mlp2, direction_row(tape, in, net.levels), &feature, binder);
  const core::Var ones = tape.constant(core::Tensor::scalar(1.0));
  return {mix, 2.0 * core::sigmoid(diff_logit) - ones};
}

core::Var forward_rir(const MaskNetwork& net, core::Var context, const ListenerInputs& in,
                      std::span<const std::size_t> times, std::size_t length, core::ParamBinder& binder) {
  if (net.mode != Mode::rir) throw ContractViolation("forward_rir requires an rir-mode network");
  if (length < 1 || times.empty()) throw ContractViolation("IR query needs at least one time index");
  check_context(net, context);
  core::Tape& tape = binder.tape();

  const core::Var s1[] = {listener_row(tape, in, net.levels), context};
  const core::Var feature = core::relu(run_mlp(net.mlp1, core::concat_cols(s1), nullptr, binder));

  std::vector<double> t(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= length) throw ContractViolation("IR time index out of range");
    t[i] = static_cast<double>(times[i]) / static_cast<double>(length);
  }
  const core::Var time_rows = tape.constant(encoded_rows(t, net.levels));
  const core::Var s2[] = {feature, direction_row(tape, in, net.levels)};
  const core::Var logits = run_mlp(net.mlp2, core::concat_cols(s2), &time_rows, binder);
  const core::Var ones = tape.constant(core::Tensor::scalar(1.0));
  return 2.0 * core::sigmoid(logits) - ones;
}

void save_mask_network(const std::filesystem::path& path, const MaskNetwork& net, std::uint64_t seed) {
  nlohmann::json header{{"kind", "mask_network"},
                        {"mode", to_string(net.mode)},
                        {"width", net.width},
                        {"context_width", net.context_width},
                        {"levels", net.levels},
                        {"bounds",
                         {{"lo", std::vector<double>(net.bounds.lo.begin(), net.bounds.lo.end())},
                          {"hi", std::vector<double>(net.bounds.hi.begin(), net.bounds.hi.end())}}},
                        {"seed", seed}};
  core::write_weights(path, header, net.tensors());
}

MaskNetwork load_mask_network(const std::filesystem::path& path) {
  const auto file = core::read_weights(path);
  const auto& h = file.header;
  if (h.value("kind", "") != "mask_network") throw SchemaError("kind", path.string() + " is not a binauralizer checkpoint");
  for (const char* key : {"mode", "width", "context_width", "levels", "bounds"})
    if (!h.contains(key)) throw SchemaError(key, path.string() + ": header lacks '" + key + "'");
  SceneBounds bounds;
  for (int a = 0; a < 3; ++a) {
    bounds.lo[a] = h["bounds"]["lo"].at(a).get<double>();
    bounds.hi[a] = h["bounds"]["hi"].at(a).get<double>();
  }
  if (h["levels"].get<int>() != kEncodingLevels) throw SchemaError("levels", "unsupported encoding level count");
  MaskNetwork net = MaskNetwork::zeros(parse_mode(h["mode"].get<std::string>()), h["width"].get<std::size_t>(),
                                       h["context_width"].get<std::size_t>(), bounds);
  for (const auto& [name, tensor] : net.tensors()) {
    const core::Tensor& stored = file.get(name);
    if (stored.shape() != tensor->shape()) throw SchemaError(name, path.string() + ": unexpected shape for " + name);
    *const_cast<core::Tensor*>(tensor) = stored;
  }
  return net;
}

}  // namespace gsaudio::binaural
