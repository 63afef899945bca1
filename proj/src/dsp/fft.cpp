#include "gsaudio/dsp/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "gsaudio/error.hpp"

namespace gsaudio::dsp {
namespace {

enum class Kind { forward, backward, r2c, c2r };

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;
using RealBuffer = std::unique_ptr<double[], FftwFree>;

ComplexBuffer complex_buffer(std::size_t n) {
  return ComplexBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * std::max<std::size_t>(n, 1))));
}
RealBuffer real_buffer(std::size_t n) {
  return RealBuffer(static_cast<double*>(fftw_malloc(sizeof(double) * std::max<std::size_t>(n, 1))));
}

// fftw_execute_* on new arrays is thread-safe; only planning needs the lock.
fftw_plan plan_for(Kind kind, std::size_t n) {
  static std::mutex mutex;
  static std::map<std::pair<Kind, std::size_t>, fftw_plan> plans;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(kind, n);
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  const int size = static_cast<int>(n);
  fftw_plan plan = nullptr;
  const unsigned flags = FFTW_ESTIMATE;
  switch (kind) {
    case Kind::forward:
    case Kind::backward: {
      auto in = complex_buffer(n), out = complex_buffer(n);
      plan = fftw_plan_dft_1d(size, in.get(), out.get(), kind == Kind::forward ? FFTW_FORWARD : FFTW_BACKWARD, flags);
      break;
    }
    case Kind::r2c: {
      auto in = real_buffer(n);
      auto out = complex_buffer(n / 2 + 1);
      plan = fftw_plan_dft_r2c_1d(size, in.get(), out.get(), flags);
      break;
    }
    case Kind::c2r: {
      auto in = complex_buffer(n / 2 + 1);
      auto out = real_buffer(n);
      plan = fftw_plan_dft_c2r_1d(size, in.get(), out.get(), flags);
      break;
    }
  }
  if (!plan) throw ConfigError("FFTW could not create a plan of size " + std::to_string(n));
  plans.emplace(key, plan);
  return plan;
}

std::vector<Complex> complex_transform(std::span<const Complex> x, Kind kind) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  fftw_plan plan = plan_for(kind, n);
  auto in = complex_buffer(n), out = complex_buffer(n);
  std::copy(x.begin(), x.end(), reinterpret_cast<Complex*>(in.get()));
  fftw_execute_dft(plan, in.get(), out.get());
  const auto* res = reinterpret_cast<const Complex*>(out.get());
  return {res, res + n};
}

}  // namespace

std::vector<Complex> fft(std::span<const Complex> x) { return complex_transform(x, Kind::forward); }

std::vector<Complex> ifft(std::span<const Complex> x) {
  auto out = complex_transform(x, Kind::backward);
  const double scale = 1.0 / static_cast<double>(x.size());
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<Complex> rfft(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  fftw_plan plan = plan_for(Kind::r2c, n);
  auto in = real_buffer(n);
  auto out = complex_buffer(n / 2 + 1);
  std::copy(x.begin(), x.end(), in.get());
  fftw_execute_dft_r2c(plan, in.get(), out.get());
  const auto* res = reinterpret_cast<const Complex*>(out.get());
  return {res, res + n / 2 + 1};
}

std::vector<double> irfft(std::span<const Complex> x, std::size_t n) {
  if (n == 0) return {};
  if (x.size() != n / 2 + 1) throw ContractViolation("irfft: expected n/2+1 bins");
  fftw_plan plan = plan_for(Kind::c2r, n);
  auto in = complex_buffer(n / 2 + 1);
  auto out = real_buffer(n);
  std::copy(x.begin(), x.end(), reinterpret_cast<Complex*>(in.get()));
  fftw_execute_dft_c2r(plan, in.get(), out.get());
  std::vector<double> result(out.get(), out.get() + n);
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : result) v *= scale;
  return result;
}

std::vector<double> convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  std::size_t n = 1;
  while (n < out_len) n <<= 1;
  std::vector<double> pa(n, 0.0), pb(n, 0.0);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());
  auto fa = rfft(pa);
  const auto fb = rfft(pb);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  auto full = irfft(fa, n);
  full.resize(out_len);
  return full;
}

}  // namespace gsaudio::dsp
