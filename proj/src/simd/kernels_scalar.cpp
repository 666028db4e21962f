#include <cmath>

#include "liouville/simd/kernels.hpp"
#include "scalar_impl.hpp"

namespace liouville::simd::scalar {

void add(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}
void sub(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}
void mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}
void div(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] / b[i];
}
void neg(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = -a[i];
}
void sqrt(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::sqrt(a[i]);
}
void exp(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(a[i]);
}
void log(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::log(a[i]);
}
void sin(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::sin(a[i]);
}
void cos(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::cos(a[i]);
}
void ipow(const double* a, int exponent, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = simd::ipow(a[i], exponent);
}
void fill(double value, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = value;
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}
void mul_acc(const double* a, const double* b, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = acc[i] + a[i] * b[i];
}
void scaled_mul_acc(double s, const double* a, const double* b, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = acc[i] + s * (a[i] * b[i]);
}

double wrap(double d, double period) {
  if (period <= 0.0) return d;
  return d - period * std::nearbyint(d / period);
}

void wrapped_diffs(const double* plus, const double* center, const double* minus, double period,
                   double* fwd, double* bwd, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double f = plus[i] - center[i];
    const double b = center[i] - minus[i];
    fwd[i] = wrap(f, period);
    bwd[i] = wrap(b, period);
  }
}

void central_stencil(const double* fwd, const double* bwd, double inv_2h, double inv_h2,
                     double* d1, double* d2, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double s = fwd[i] + bwd[i];
    const double t = fwd[i] - bwd[i];
    d1[i] = s * inv_2h;
    d2[i] = t * inv_h2;
  }
}

}  // namespace liouville::simd::scalar

namespace liouville::simd::detail {

const Kernels& scalar_table() {
  static const Kernels table{
      Isa::Scalar,     scalar::add,  scalar::sub,  scalar::mul,  scalar::div,
      scalar::neg,     scalar::sqrt, scalar::exp,  scalar::log,  scalar::sin,
      scalar::cos,     scalar::ipow, scalar::fill, scalar::axpy, scalar::mul_acc,
      scalar::scaled_mul_acc, scalar::wrapped_diffs, scalar::central_stencil,
  };
  return table;
}

}  // namespace liouville::simd::detail
