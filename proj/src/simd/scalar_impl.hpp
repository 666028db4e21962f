#pragma once

#include <cstddef>

// Scalar reference routines, shared by the vector tables for transcendental
// kernels and for loop tails.
namespace liouville::simd::scalar {

void add(const double* a, const double* b, double* out, std::size_t n);
void sub(const double* a, const double* b, double* out, std::size_t n);
void mul(const double* a, const double* b, double* out, std::size_t n);
void div(const double* a, const double* b, double* out, std::size_t n);
void neg(const double* a, double* out, std::size_t n);
void sqrt(const double* a, double* out, std::size_t n);
void exp(const double* a, double* out, std::size_t n);
void log(const double* a, double* out, std::size_t n);
void sin(const double* a, double* out, std::size_t n);
void cos(const double* a, double* out, std::size_t n);
void ipow(const double* a, int exponent, double* out, std::size_t n);
void fill(double value, double* out, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void mul_acc(const double* a, const double* b, double* acc, std::size_t n);
void scaled_mul_acc(double s, const double* a, const double* b, double* acc, std::size_t n);
double wrap(double d, double period);
void wrapped_diffs(const double* plus, const double* center, const double* minus, double period,
                   double* fwd, double* bwd, std::size_t n);
void central_stencil(const double* fwd, const double* bwd, double inv_2h, double inv_h2,
                     double* d1, double* d2, std::size_t n);

}  // namespace liouville::simd::scalar
