#include <immintrin.h>

#include <cassert>

#include "irsopt/kernels.hpp"

// Two complex doubles per __m256d, laid out [re0, im0, re1, im1].

namespace irsopt::kernels::avx2 {

namespace {
inline const double* raw(std::span<const cdouble> s) {
  return reinterpret_cast<const double*>(s.data());
}
inline double* raw(std::span<cdouble> s) { return reinterpret_cast<double*>(s.data()); }

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}
}  // namespace

cdouble dotc(std::span<const cdouble> a, std::span<const cdouble> b) {
  assert(a.size() == b.size());
  const std::size_t n = a.size();
  const double* pa = raw(a);
  const double* pb = raw(b);

  // rr accumulates [ar*br, ai*bi], ri accumulates [ar*bi, ai*br].
  __m256d rr0 = _mm256_setzero_pd(), rr1 = _mm256_setzero_pd();
  __m256d ri0 = _mm256_setzero_pd(), ri1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va0 = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb0 = _mm256_loadu_pd(pb + 2 * i);
    const __m256d va1 = _mm256_loadu_pd(pa + 2 * i + 4);
    const __m256d vb1 = _mm256_loadu_pd(pb + 2 * i + 4);
    rr0 = _mm256_fmadd_pd(va0, vb0, rr0);
    rr1 = _mm256_fmadd_pd(va1, vb1, rr1);
    ri0 = _mm256_fmadd_pd(va0, _mm256_permute_pd(vb0, 0b0101), ri0);
    ri1 = _mm256_fmadd_pd(va1, _mm256_permute_pd(vb1, 0b0101), ri1);
  }
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    rr0 = _mm256_fmadd_pd(va, vb, rr0);
    ri0 = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0b0101), ri0);
  }
  const __m256d rr = _mm256_add_pd(rr0, rr1);
  // Imaginary part is ar*bi - ai*br: flip the sign of the odd lanes.
  const __m256d ri = _mm256_mul_pd(_mm256_add_pd(ri0, ri1), _mm256_setr_pd(1.0, -1.0, 1.0, -1.0));
  double re = hsum(rr);
  double im = hsum(ri);
  for (; i < n; ++i) {
    const double ar = pa[2 * i], ai = pa[2 * i + 1];
    const double br = pb[2 * i], bi = pb[2 * i + 1];
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

double squared_norm(std::span<const cdouble> a) {
  const std::size_t len = 2 * a.size();
  const double* p = raw(a);
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    const __m256d v0 = _mm256_loadu_pd(p + i);
    const __m256d v1 = _mm256_loadu_pd(p + i + 4);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < len; ++i) s += p[i] * p[i];
  return s;
}

void axpy(cdouble alpha, std::span<const cdouble> x, std::span<cdouble> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  const double* px = raw(x);
  double* py = raw(y);
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(px + 2 * i);
    const __m256d vy = _mm256_loadu_pd(py + 2 * i);
    const __m256d t = _mm256_mul_pd(ar, vx);
    const __m256d u = _mm256_mul_pd(ai, _mm256_permute_pd(vx, 0b0101));
    // [t_re - u_re, t_im + u_im] = alpha * x
    _mm256_storeu_pd(py + 2 * i, _mm256_add_pd(vy, _mm256_addsub_pd(t, u)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace irsopt::kernels::avx2
