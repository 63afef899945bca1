#pragma once

// Data-parallel inner loops shared by the autodiff engine, the spatial queries
// and the DSP metrics. Every kernel has a scalar reference implementation;
// AVX2+FMA (x86-64) and NEON (aarch64) variants are compiled in when the
// toolchain supports them and selected once at runtime. GSAUDIO_SIMD=scalar
// forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace gsaudio::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

/// Function table for one instruction set. Matrices are dense row-major with
/// leading dimension equal to the column count.
struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// C[m x n] += A[m x k] * B[k x n]
  void (*gemm_accumulate)(std::size_t m, std::size_t n, std::size_t k,
                          const double* a, const double* b, double* c);
  /// out[i] = |xyz[i] - center|^2 for interleaved xyz triples. Bit-identical
  /// across ISAs (no fused multiply-add, fixed association order).
  void (*squared_distances)(const double* xyz, std::size_t count,
                            const double* center, double* out);
  double (*sum_squares)(const double* x, std::size_t n);
};

const KernelTable& scalar_kernels();
/// nullptr when the variant is not compiled into this binary.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

/// True when the variant is compiled in and the running CPU supports it.
bool isa_supported(Isa isa);

/// The table used by the convenience wrappers below.
const KernelTable& active();
Isa active_isa();

/// Overrides the runtime choice. Throws ConfigError if unsupported.
void select(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void gemm_accumulate(std::size_t m, std::size_t n, std::size_t k,
                     std::span<const double> a, std::span<const double> b,
                     std::span<double> c);
void squared_distances(std::span<const double> xyz, const double center[3],
                       std::span<double> out);
double sum_squares(std::span<const double> x);

}  // namespace gsaudio::simd
