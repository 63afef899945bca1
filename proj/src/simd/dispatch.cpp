#include <atomic>
#include <cstdlib>
#include <string>

#include "gsaudio/error.hpp"
#include "gsaudio/simd/kernels.hpp"

namespace gsaudio::simd {

#if !defined(GSAUDIO_HAVE_AVX2)
const KernelTable* avx2_kernels() { return nullptr; }
#endif
#if !defined(GSAUDIO_HAVE_NEON)
const KernelTable* neon_kernels() { return nullptr; }
#endif

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(GSAUDIO_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
      return neon_kernels() != nullptr;
  }
  return false;
}

namespace {

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::scalar: return &scalar_kernels();
    case Isa::avx2: return avx2_kernels();
    case Isa::neon: return neon_kernels();
  }
  return nullptr;
}

const KernelTable* initial_choice() {
  if (const char* env = std::getenv("GSAUDIO_SIMD")) {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
      if (want == isa_name(isa) && isa_supported(isa)) return table_for(isa);
  }
  for (Isa isa : {Isa::avx2, Isa::neon})
    if (isa_supported(isa)) return table_for(isa);
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_choice()};
  return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

Isa active_isa() { return active().isa; }

void select(Isa isa) {
  if (!isa_supported(isa))
    throw ConfigError("instruction set not available: " + std::string(isa_name(isa)));
  current().store(table_for(isa), std::memory_order_release);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractViolation("dot: length mismatch");
  return active().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw ContractViolation("axpy: length mismatch");
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void gemm_accumulate(std::size_t m, std::size_t n, std::size_t k,
                     std::span<const double> a, std::span<const double> b,
                     std::span<double> c) {
  if (a.size() != m * k || b.size() != k * n || c.size() != m * n)
    throw ContractViolation("gemm: operand sizes do not match dimensions");
  active().gemm_accumulate(m, n, k, a.data(), b.data(), c.data());
}

void squared_distances(std::span<const double> xyz, const double center[3],
                       std::span<double> out) {
  if (xyz.size() != 3 * out.size())
    throw ContractViolation("squared_distances: expected 3 coordinates per output");
  active().squared_distances(xyz.data(), out.size(), center, out.data());
}

double sum_squares(std::span<const double> x) { return active().sum_squares(x.data(), x.size()); }

}  // namespace gsaudio::simd
