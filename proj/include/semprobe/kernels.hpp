#pragma once

// Inner-loop arithmetic used by ranking, centroid accumulation and probe
// training. Every kernel exists as a scalar reference and as SIMD variants;
// the widest variant the CPU supports is selected once at startup.
//
// All reductions accumulate in double. Each variant uses a fixed reduction
// order, so results are bit-reproducible for a given variant, but variants may
// differ from each other in the last bits.

#include <cstddef>
#include <span>
#include <string_view>

namespace semprobe::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  double (*dot_f32)(const float* a, const float* b, std::size_t n);
  double (*dot_f32_f64)(const float* a, const double* b, std::size_t n);
  double (*dot_f64)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy_f64)(double alpha, const double* x, double* y, std::size_t n);
  // y += alpha * x, x widened from float
  void (*axpy_f32_f64)(double alpha, const float* x, double* y, std::size_t n);
};

// Per-ISA tables. `table_for` throws std::invalid_argument when the ISA was
// not compiled in or the running CPU lacks it.
const KernelTable& table_for(Isa isa);
bool isa_available(Isa isa);

// Currently selected ISA. Initialised from the best available ISA, or from the
// SEMPROBE_ISA environment variable (scalar|avx2|neon) when set.
Isa active_isa();
void set_active_isa(Isa isa);
const KernelTable& active();

inline double dot(std::span<const float> a, std::span<const float> b) {
  return active().dot_f32(a.data(), b.data(), a.size());
}
inline double dot(std::span<const float> a, std::span<const double> b) {
  return active().dot_f32_f64(a.data(), b.data(), a.size());
}
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot_f64(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy_f64(alpha, x.data(), y.data(), x.size());
}
inline void axpy(double alpha, std::span<const float> x, std::span<double> y) {
  active().axpy_f32_f64(alpha, x.data(), y.data(), x.size());
}

namespace detail {
const KernelTable* scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in
const KernelTable* neon_table();  // nullptr when not compiled in
}  // namespace detail

}  // namespace semprobe::kernels
