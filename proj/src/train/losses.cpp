#include "gsaudio/train/losses.hpp"

#include <string>

#include "gsaudio/error.hpp"

namespace gsaudio::train {
namespace {

void require_shape(const core::Tensor& pred, const core::Tensor& gt, const char* what) {
  if (!pred.same_shape(gt) || gt.empty())
    throw ContractViolation(std::string("loss_reconstruction: ") + what + " spectrogram shapes differ");
}

core::Var mse(core::Var pred, const core::Tensor& gt, const char* what) {
  require_shape(pred.value(), gt, what);
  return core::mean(core::square(pred - pred.tape().constant(gt)));
}

void require_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ContractViolation("total_loss: lambda must lie in [0, 1]");
}

}  // namespace

Spectra target_spectra(const core::Tensor& left, const core::Tensor& right) {
  if (!left.same_shape(right)) throw ContractViolation("target_spectra: channel shapes differ");
  Spectra s{left, left, right};
  for (std::size_t i = 0; i < s.mixture.size(); ++i) s.mixture[i] = left[i] + right[i];
  return s;
}

core::Var loss_reconstruction(core::Var mixture, core::Var left, core::Var right, const Spectra& gt) {
  return mse(mixture, gt.mixture, "mixture") + mse(left, gt.left, "left") + mse(right, gt.right, "right");
}

double loss_reconstruction(const Spectra& pred, const Spectra& gt) {
  core::Tape tape;
  return loss_reconstruction(tape.constant(pred.mixture), tape.constant(pred.left), tape.constant(pred.right), gt)
      .value()
      .item();
}

core::Var loss_volume(core::Var alpha, std::span<const std::size_t> active) {
  if (active.empty()) throw ContractViolation("loss_volume: the active set is empty");
  return core::sum(core::row_prod(core::abs(core::gather_rows(alpha, {active.begin(), active.end()}))));
}

double loss_volume(const scene::AudioPointSet& points, std::span<const std::size_t> active) {
  core::Tape tape;
  return loss_volume(tape.constant(points.alpha), active).value().item();
}

core::Var total_loss(core::Var reconstruction, core::Var volume, double lambda) {
  require_lambda(lambda);
  return (1.0 - lambda) * reconstruction + lambda * volume;
}

double total_loss(double reconstruction, double volume, double lambda) {
  require_lambda(lambda);
  return (1.0 - lambda) * reconstruction + lambda * volume;
}

}  // namespace gsaudio::train
