#pragma once

// Hot complex inner loops used by the rate evaluators, the per-element BCD
// sweeps and the Monte-Carlo oracles. Each kernel has a scalar reference
// implementation and (on x86-64) an AVX2/FMA variant; the variant is picked
// once at startup from CPUID and can be overridden with IRSOPT_SIMD=scalar or
// select_backend().

#include <span>

#include "irsopt/types.hpp"

namespace irsopt::kernels {

enum class Backend { Scalar, Avx2 };

const char* backend_name(Backend b);
bool backend_available(Backend b);
Backend active_backend();
// Throws std::invalid_argument when the backend is not usable on this CPU.
void select_backend(Backend b);

// sum_i conj(a_i) * b_i
cdouble dotc(std::span<const cdouble> a, std::span<const cdouble> b);
// sum_i |a_i|^2
double squared_norm(std::span<const cdouble> a);
// y += alpha * x
void axpy(cdouble alpha, std::span<const cdouble> x, std::span<cdouble> y);

namespace scalar {
cdouble dotc(std::span<const cdouble> a, std::span<const cdouble> b);
double squared_norm(std::span<const cdouble> a);
void axpy(cdouble alpha, std::span<const cdouble> x, std::span<cdouble> y);
}  // namespace scalar

namespace avx2 {
cdouble dotc(std::span<const cdouble> a, std::span<const cdouble> b);
double squared_norm(std::span<const cdouble> a);
void axpy(cdouble alpha, std::span<const cdouble> x, std::span<cdouble> y);
}  // namespace avx2

// Eigen conveniences over the dispatched kernels.
inline std::span<const cdouble> view(const CVector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<const cdouble> column(const CMatrix& m, Eigen::Index j) {
  return {m.data() + j * m.rows(), static_cast<std::size_t>(m.rows())};
}

inline cdouble dotc(const CVector& a, const CVector& b) { return dotc(view(a), view(b)); }
inline double squared_norm(const CVector& a) { return squared_norm(view(a)); }

// Re(x^H A x) for Hermitian A (column-major, so each term is a column dot).
double hermitian_form(const CMatrix& a, const CVector& x);

}  // namespace irsopt::kernels
