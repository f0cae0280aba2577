#include <cassert>

#include "irsopt/kernels.hpp"

namespace irsopt::kernels::scalar {

cdouble dotc(std::span<const cdouble> a, std::span<const cdouble> b) {
  assert(a.size() == b.size());
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

double squared_norm(std::span<const cdouble> a) {
  double s = 0.0;
  for (const auto& z : a) s += z.real() * z.real() + z.imag() * z.imag();
  return s;
}

void axpy(cdouble alpha, std::span<const cdouble> x, std::span<cdouble> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace irsopt::kernels::scalar
