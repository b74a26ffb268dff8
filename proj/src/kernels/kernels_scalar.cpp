#include "semprobe/kernels.hpp"

namespace semprobe::kernels {
namespace {

double dot_f32(const float* a, const float* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return sum;
}

double dot_f32_f64(const float* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += static_cast<double>(a[i]) * b[i];
  }
  return sum;
}

double dot_f64(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += a[i] * b[i];
  }
  return sum;
}

void axpy_f64(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += alpha * x[i];
  }
}

void axpy_f32_f64(double alpha, const float* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += alpha * static_cast<double>(x[i]);
  }
}

constexpr KernelTable kScalar{dot_f32, dot_f32_f64, dot_f64, axpy_f64, axpy_f32_f64};

}  // namespace

namespace detail {
const KernelTable* scalar_table() { return &kScalar; }
}  // namespace detail

}  // namespace semprobe::kernels
