// Compiled with -mavx2 (no -mfma); only reached after a runtime CPU check.
#include <immintrin.h>

#include "liouville/simd/kernels.hpp"
#include "scalar_impl.hpp"

namespace liouville::simd::avx2 {
namespace {

constexpr std::size_t kLanes = 4;

template <class F>
inline void binary(const double* a, const double* b, double* out, std::size_t n, F op) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, op(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) {
    _mm_store_sd(out + i, _mm256_castpd256_pd128(
                              op(_mm256_set1_pd(a[i]), _mm256_set1_pd(b[i]))));
  }
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_add_pd(x, y); });
}
void sub(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_sub_pd(x, y); });
}
void mul(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_mul_pd(x, y); });
}
void div(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_div_pd(x, y); });
}

void neg(const double* a, double* out, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, _mm256_xor_pd(_mm256_loadu_pd(a + i), sign));
  }
  for (; i < n; ++i) out[i] = -a[i];
}

void sqrt(const double* a, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, _mm256_sqrt_pd(_mm256_loadu_pd(a + i)));
  }
  scalar::sqrt(a + i, out + i, n - i);
}

void ipow(const double* a, int exponent, double* out, std::size_t n) {
  const bool invert = exponent < 0;
  const unsigned m0 =
      invert ? static_cast<unsigned>(-static_cast<long>(exponent)) : static_cast<unsigned>(exponent);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d result = one;
    __m256d base = _mm256_loadu_pd(a + i);
    unsigned m = m0;
    while (m != 0) {
      if (m & 1U) result = _mm256_mul_pd(result, base);
      m >>= 1U;
      if (m != 0) base = _mm256_mul_pd(base, base);
    }
    if (invert) result = _mm256_div_pd(one, result);
    _mm256_storeu_pd(out + i, result);
  }
  scalar::ipow(a + i, exponent, out + i, n - i);
}

void fill(double value, double* out, std::size_t n) {
  const __m256d v = _mm256_set1_pd(value);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(out + i, v);
  for (; i < n; ++i) out[i] = value;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  scalar::axpy(alpha, x + i, y + i, n - i);
}

void mul_acc(const double* a, const double* b, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), prod));
  }
  scalar::mul_acc(a + i, b + i, acc + i, n - i);
}

void scaled_mul_acc(double s, const double* a, const double* b, double* acc, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_mul_pd(vs, prod)));
  }
  scalar::scaled_mul_acc(s, a + i, b + i, acc + i, n - i);
}

inline __m256d wrap(__m256d d, __m256d period) {
  const __m256d q = _mm256_round_pd(_mm256_div_pd(d, period),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  return _mm256_sub_pd(d, _mm256_mul_pd(period, q));
}

void wrapped_diffs(const double* plus, const double* center, const double* minus, double period,
                   double* fwd, double* bwd, std::size_t n) {
  const __m256d vp = _mm256_set1_pd(period);
  const bool periodic = period > 0.0;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d c = _mm256_loadu_pd(center + i);
    __m256d f = _mm256_sub_pd(_mm256_loadu_pd(plus + i), c);
    __m256d b = _mm256_sub_pd(c, _mm256_loadu_pd(minus + i));
    if (periodic) {
      f = wrap(f, vp);
      b = wrap(b, vp);
    }
    _mm256_storeu_pd(fwd + i, f);
    _mm256_storeu_pd(bwd + i, b);
  }
  scalar::wrapped_diffs(plus + i, center + i, minus + i, period, fwd + i, bwd + i, n - i);
}

void central_stencil(const double* fwd, const double* bwd, double inv_2h, double inv_h2,
                     double* d1, double* d2, std::size_t n) {
  const __m256d a = _mm256_set1_pd(inv_2h);
  const __m256d b = _mm256_set1_pd(inv_h2);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d f = _mm256_loadu_pd(fwd + i);
    const __m256d g = _mm256_loadu_pd(bwd + i);
    _mm256_storeu_pd(d1 + i, _mm256_mul_pd(_mm256_add_pd(f, g), a));
    _mm256_storeu_pd(d2 + i, _mm256_mul_pd(_mm256_sub_pd(f, g), b));
  }
  scalar::central_stencil(fwd + i, bwd + i, inv_2h, inv_h2, d1 + i, d2 + i, n - i);
}

}  // namespace
}  // namespace liouville::simd::avx2

namespace liouville::simd::detail {

const Kernels* avx2_table() {
  static const Kernels table{
      Isa::Avx2,        avx2::add,    avx2::sub,    avx2::mul,       avx2::div,
      avx2::neg,        avx2::sqrt,   scalar::exp,  scalar::log,     scalar::sin,
      scalar::cos,      avx2::ipow,   avx2::fill,   avx2::axpy,      avx2::mul_acc,
      avx2::scaled_mul_acc, avx2::wrapped_diffs, avx2::central_stencil,
  };
  return &table;
}

}  // namespace liouville::simd::detail
