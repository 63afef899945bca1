#include "gsaudio/field/acoustic_field.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "gsaudio/core/weights_io.hpp"
#include "gsaudio/error.hpp"
#include "gsaudio/scene/queries.hpp"

namespace gsaudio::field {
namespace {

constexpr double kCoincident = 1e-9;

// (k x 3) guidance rows for the given points, zero where coincident.
core::Tensor guidance_rows(const scene::AudioPointSet& points, std::span<const std::size_t> rows,
                           const scene::Vec3& anchor) {
  core::Tensor g = core::Tensor::zeros(rows.size(), 3);
  std::size_t degenerate = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const scene::Vec3 v = guidance_or_zero(points.position(rows[r]), anchor);
    degenerate += v == scene::Vec3{0.0, 0.0, 0.0};
    for (int c = 0; c < 3; ++c) g(r, c) = v[c];
  }
  if (degenerate > 0) spdlog::debug("{} point(s) coincide with a context anchor; using zero guidance", degenerate);
  return g;
}

core::Var branch(const FieldNetwork& net, core::Var alpha, const scene::AudioPointSet& points,
                 const std::vector<std::size_t>& rows, const scene::Vec3& anchor, core::ParamBinder& binder) {
  if (rows.empty()) throw ConfigError("pooled_context: empty vicinity");
  core::Tape& tape = binder.tape();
  const core::Var a = tape.gather_rows(alpha, rows);
  const core::Var g = tape.constant(guidance_rows(points, rows, anchor));
  const core::Var parts[] = {a, g};
  const core::Var h = core::relu(core::apply(net.hidden, core::concat_cols(parts), binder));
  return core::mean_rows(core::apply(net.output, h, binder));
}

}  // namespace

FieldNetwork FieldNetwork::random(std::size_t alpha_width, std::mt19937_64& rng, std::size_t hidden_width,
                                  std::size_t context_width) {
  FieldNetwork net;
  net.hidden = core::Linear::uniform(alpha_width + 3, hidden_width, rng);
  net.output = core::Linear::uniform(hidden_width, context_width, rng);
  return net;
}

FieldNetwork FieldNetwork::zeros(std::size_t alpha_width, std::size_t hidden_width, std::size_t context_width) {
  return {core::Linear::zeros(alpha_width + 3, hidden_width), core::Linear::zeros(hidden_width, context_width)};
}

std::vector<std::pair<std::string, const core::Tensor*>> FieldNetwork::tensors() const {
  return {{"hidden.weight", &hidden.weight},
          {"hidden.bias", &hidden.bias},
          {"output.weight", &output.weight},
          {"output.bias", &output.bias}};
}

std::vector<core::Tensor*> FieldNetwork::parameters() {
  return {&hidden.weight, &hidden.bias, &output.weight, &output.bias};
}

scene::Vec3 position_guidance(const scene::Vec3& point, const scene::Vec3& anchor) {
  const scene::Vec3 d = point - anchor;
  const double n = scene::norm(d);
  if (!(n > kCoincident)) throw GeometryError("position guidance is undefined for coincident points");
  return (1.0 / n) * d;
}

scene::Vec3 guidance_or_zero(const scene::Vec3& point, const scene::Vec3& anchor) {
  const scene::Vec3 d = point - anchor;
  const double n = scene::norm(d);
  if (!(n > kCoincident)) return {0.0, 0.0, 0.0};
  return (1.0 / n) * d;
}

core::Tensor point_context(const FieldNetwork& net, std::span<const double> alpha, const scene::Vec3& guidance) {
  if (alpha.size() != net.alpha_width())
    throw ContractViolation("point_context: alpha width " + std::to_string(alpha.size()) + " but network expects " +
                            std::to_string(net.alpha_width()));
  std::vector<double> input(alpha.begin(), alpha.end());
  input.insert(input.end(), guidance.begin(), guidance.end());
  core::Tensor h = core::apply(net.hidden, core::Tensor::row(std::move(input)));
  for (double& v : h.data()) v = std::max(v, 0.0);
  return core::apply(net.output, h);
}

Vicinities find_vicinities(const scene::AudioPointSet& points, const scene::Vec3& listener, const scene::Vec3& source,
                           double percentile) {
  Vicinities v{scene::vicinity(points, source, percentile), scene::vicinity(points, listener, percentile)};
  std::sort(v.source.begin(), v.source.end());
  std::sort(v.listener.begin(), v.listener.end());
  return v;
}

core::Var pooled_context(const FieldNetwork& net, core::Var alpha, const scene::AudioPointSet& points,
                         const scene::Vec3& listener, const scene::Vec3& source, const Vicinities& vicinities,
                         core::ParamBinder& binder) {
  if (alpha.value().cols() != net.alpha_width())
    throw ContractViolation("pooled_context: alpha width does not match the field network");
  if (alpha.value().rows() != points.size()) throw ContractViolation("pooled_context: alpha rows differ from points");
  const core::Var parts[] = {branch(net, alpha, points, vicinities.source, source, binder),
                             branch(net, alpha, points, vicinities.listener, listener, binder)};
  return core::concat_cols(parts);
}

core::Tensor pooled_context(const FieldNetwork& net, const scene::AudioPointSet& points, const scene::Pose& listener,
                            const scene::Vec3& source, double percentile) {
  if (points.size() == 0) throw ContractViolation("pooled_context: empty point set");
  core::Tape tape;
  core::ParamBinder binder(tape);
  const core::Var alpha = tape.constant(points.alpha);
  const auto v = find_vicinities(points, listener.position, source, percentile);
  return pooled_context(net, alpha, points, listener.position, source, v, binder).value();
}

void save_field(const std::filesystem::path& path, const FieldNetwork& net, std::uint64_t seed) {
  nlohmann::json header{{"kind", "acoustic_field"},
                        {"alpha_width", net.alpha_width()},
                        {"hidden_width", net.hidden.out()},
                        {"context_width", net.context_width()},
                        {"seed", seed}};
  core::write_weights(path, header, net.tensors());
}

FieldNetwork load_field(const std::filesystem::path& path) {
  const auto file = core::read_weights(path);
  if (file.header.value("kind", "") != "acoustic_field")
    throw SchemaError("kind", path.string() + " is not an acoustic field checkpoint");
  FieldNetwork net;
  net.hidden = {file.get("hidden.weight"), file.get("hidden.bias")};
  net.output = {file.get("output.weight"), file.get("output.bias")};
  if (net.hidden.bias.cols() != net.hidden.out() || net.output.in() != net.hidden.out() ||
      net.output.bias.cols() != net.output.out() || net.hidden.in() < 4)
    throw SchemaError("tensors", path.string() + ": inconsistent field network shapes");
  return net;
}

}  // namespace gsaudio::field
