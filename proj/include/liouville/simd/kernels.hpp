#pragma once

// Elementwise double-precision kernels with a scalar reference table and
// vector tables (AVX2 on x86-64, NEON on aarch64) picked at runtime.
//
// Every vector kernel performs the same IEEE operations in the same order
// as its scalar reference and never contracts to FMA, so results are
// bit-identical across tables. Transcendentals (exp, log, sin, cos) have no
// vector instruction; the vector tables reuse the scalar routines for them.

#include <cstddef>
#include <optional>
#include <string_view>

namespace liouville::simd {

enum class Isa { Scalar, Avx2, Neon };

/// Integer power by repeated squaring. Every backend uses this exact
/// multiplication sequence.
inline double ipow(double x, int n) {
  const bool invert = n < 0;
  unsigned m = invert ? static_cast<unsigned>(-static_cast<long>(n)) : static_cast<unsigned>(n);
  double result = 1.0;
  double base = x;
  while (m != 0) {
    if (m & 1U) result *= base;
    m >>= 1U;
    if (m != 0) base *= base;
  }
  return invert ? 1.0 / result : result;
}

std::string_view to_string(Isa isa);
std::optional<Isa> isa_from_string(std::string_view name);

bool isa_available(Isa isa);
/// Best table the running CPU supports.
Isa detect_isa();
/// Table used by default: the override if set, else LIOUVILLE_SIMD from the
/// environment if it names an available table, else detect_isa().
Isa active_isa();
void set_isa_override(std::optional<Isa> isa);

struct Kernels {
  Isa isa;
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  void (*sub)(const double* a, const double* b, double* out, std::size_t n);
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  void (*div)(const double* a, const double* b, double* out, std::size_t n);
  void (*neg)(const double* a, double* out, std::size_t n);
  void (*sqrt)(const double* a, double* out, std::size_t n);
  void (*exp)(const double* a, double* out, std::size_t n);
  void (*log)(const double* a, double* out, std::size_t n);
  void (*sin)(const double* a, double* out, std::size_t n);
  void (*cos)(const double* a, double* out, std::size_t n);
  void (*ipow)(const double* a, int exponent, double* out, std::size_t n);
  void (*fill)(double value, double* out, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// acc += a * b
  void (*mul_acc)(const double* a, const double* b, double* acc, std::size_t n);
  /// acc += s * (a * b)
  void (*scaled_mul_acc)(double s, const double* a, const double* b, double* acc,
                         std::size_t n);
  /// fwd = plus - center, bwd = center - minus; with period > 0 each
  /// difference is reduced into [-period/2, period/2] (round-half-even).
  void (*wrapped_diffs)(const double* plus, const double* center, const double* minus,
                        double period, double* fwd, double* bwd, std::size_t n);
  /// d1 = (fwd + bwd) * inv_2h, d2 = (fwd - bwd) * inv_h2
  void (*central_stencil)(const double* fwd, const double* bwd, double inv_2h, double inv_h2,
                          double* d1, double* d2, std::size_t n);
};

const Kernels& kernels(Isa isa);
const Kernels& kernels();

namespace detail {
const Kernels& scalar_table();
const Kernels* avx2_table();  // nullptr when not compiled in
const Kernels* neon_table();
}  // namespace detail

}  // namespace liouville::simd
