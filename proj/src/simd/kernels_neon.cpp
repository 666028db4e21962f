// aarch64 only; NEON is baseline there so no runtime check is needed.
#include <arm_neon.h>

#include "liouville/simd/kernels.hpp"
#include "scalar_impl.hpp"

namespace liouville::simd::neon {
namespace {

constexpr std::size_t kLanes = 2;

template <class F>
inline void binary(const double* a, const double* b, double* out, std::size_t n, F op) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) vst1q_f64(out + i, op(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = vgetq_lane_f64(op(vdupq_n_f64(a[i]), vdupq_n_f64(b[i])), 0);
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](float64x2_t x, float64x2_t y) { return vaddq_f64(x, y); });
}
void sub(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](float64x2_t x, float64x2_t y) { return vsubq_f64(x, y); });
}
void mul(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](float64x2_t x, float64x2_t y) { return vmulq_f64(x, y); });
}
void div(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](float64x2_t x, float64x2_t y) { return vdivq_f64(x, y); });
}

void neg(const double* a, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) vst1q_f64(out + i, vnegq_f64(vld1q_f64(a + i)));
  scalar::neg(a + i, out + i, n - i);
}

void sqrt(const double* a, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) vst1q_f64(out + i, vsqrtq_f64(vld1q_f64(a + i)));
  scalar::sqrt(a + i, out + i, n - i);
}

void fill(double value, double* out, std::size_t n) {
  const float64x2_t v = vdupq_n_f64(value);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) vst1q_f64(out + i, v);
  scalar::fill(value, out + i, n - i);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  scalar::axpy(alpha, x + i, y + i, n - i);
}

void mul_acc(const double* a, const double* b, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i))));
  }
  scalar::mul_acc(a + i, b + i, acc + i, n - i);
}

void scaled_mul_acc(double s, const double* a, const double* b, double* acc, std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t prod = vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vmulq_f64(vs, prod)));
  }
  scalar::scaled_mul_acc(s, a + i, b + i, acc + i, n - i);
}

inline float64x2_t wrap(float64x2_t d, float64x2_t period) {
  return vsubq_f64(d, vmulq_f64(period, vrndnq_f64(vdivq_f64(d, period))));
}

void wrapped_diffs(const double* plus, const double* center, const double* minus, double period,
                   double* fwd, double* bwd, std::size_t n) {
  const float64x2_t vp = vdupq_n_f64(period);
  const bool periodic = period > 0.0;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t c = vld1q_f64(center + i);
    float64x2_t f = vsubq_f64(vld1q_f64(plus + i), c);
    float64x2_t b = vsubq_f64(c, vld1q_f64(minus + i));
    if (periodic) {
      f = wrap(f, vp);
      b = wrap(b, vp);
    }
    vst1q_f64(fwd + i, f);
    vst1q_f64(bwd + i, b);
  }
  scalar::wrapped_diffs(plus + i, center + i, minus + i, period, fwd + i, bwd + i, n - i);
}

void central_stencil(const double* fwd, const double* bwd, double inv_2h, double inv_h2,
                     double* d1, double* d2, std::size_t n) {
  const float64x2_t a = vdupq_n_f64(inv_2h);
  const float64x2_t b = vdupq_n_f64(inv_h2);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t f = vld1q_f64(fwd + i);
    const float64x2_t g = vld1q_f64(bwd + i);
    vst1q_f64(d1 + i, vmulq_f64(vaddq_f64(f, g), a));
    vst1q_f64(d2 + i, vmulq_f64(vsubq_f64(f, g), b));
  }
  scalar::central_stencil(fwd + i, bwd + i, inv_2h, inv_h2, d1 + i, d2 + i, n - i);
}

}  // namespace
}  // namespace liouville::simd::neon

namespace liouville::simd::detail {

const Kernels* neon_table() {
  static const Kernels table{
      Isa::Neon,        neon::add,    neon::sub,    neon::mul,       neon::div,
      neon::neg,        neon::sqrt,   scalar::exp,  scalar::log,     scalar::sin,
      scalar::cos,      scalar::ipow, neon::fill,   neon::axpy,      neon::mul_acc,
      neon::scaled_mul_acc, neon::wrapped_diffs, neon::central_stencil,
  };
  return &table;
}

}  // namespace liouville::simd::detail
