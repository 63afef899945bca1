#pragma once

// Thin wrapper over FFTW. Plans are created once per size with FFTW_ESTIMATE
// (deterministic, no timing) and executed on private aligned buffers, so
// concurrent calls are safe.

#include <complex>
#include <span>
#include <vector>

namespace gsaudio::dsp {

using Complex = std::complex<double>;

/// Unnormalized forward DFT.
std::vector<Complex> fft(std::span<const Complex> x);
/// Inverse DFT scaled by 1/N.
std::vector<Complex> ifft(std::span<const Complex> x);
/// Forward DFT of a real sequence, bins 0..N/2.
std::vector<Complex> rfft(std::span<const double> x);
/// Inverse of rfft for a length-n signal, scaled by 1/n.
std::vector<double> irfft(std::span<const Complex> x, std::size_t n);

/// Full linear convolution (length a + b - 1) via zero-padded FFTs.
std::vector<double> convolve(std::span<const double> a, std::span<const double> b);

}  // namespace gsaudio::dsp
