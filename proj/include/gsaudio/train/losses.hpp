#pragma once

#include <span>

#include "gsaudio/core/tape.hpp"
#include "gsaudio/core/tensor.hpp"
#include "gsaudio/scene/audio_points.hpp"

namespace gsaudio::train {

/// Magnitude spectrograms (bins x frames) of the mixture, left and right.
struct Spectra {
  core::Tensor mixture;
  core::Tensor left;
  core::Tensor right;
};

/// Ground-truth spectra of a binaural recording: |L|, |R| and |L| + |R|.
Spectra target_spectra(const core::Tensor& left_magnitude, const core::Tensor& right_magnitude);

/// L_m = MSE(mixture) + MSE(left) + MSE(right). Throws ContractViolation on a
/// shape mismatch.
core::Var loss_reconstruction(core::Var mixture, core::Var left, core::Var right, const Spectra& gt);
double loss_reconstruction(const Spectra& pred, const Spectra& gt);

/// L_v = sum over `active` rows of prod_j |alpha_ij|. Throws
/// ContractViolation when `active` is empty.
core::Var loss_volume(core::Var alpha, std::span<const std::size_t> active);
double loss_volume(const scene::AudioPointSet& points, std::span<const std::size_t> active);

/// (1 - lambda) L_m + lambda L_v. Throws ContractViolation unless lambda is in [0, 1].
core::Var total_loss(core::Var reconstruction, core::Var volume, double lambda);
double total_loss(double reconstruction, double volume, double lambda);

}  // namespace gsaudio::train
