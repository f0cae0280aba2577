#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

#include "irsopt/kernels.hpp"

namespace irsopt::kernels {

namespace {

struct Table {
  Backend backend;
  cdouble (*dotc)(std::span<const cdouble>, std::span<const cdouble>);
  double (*squared_norm)(std::span<const cdouble>);
  void (*axpy)(cdouble, std::span<const cdouble>, std::span<cdouble>);
};

constexpr Table kScalar{Backend::Scalar, &scalar::dotc, &scalar::squared_norm, &scalar::axpy};
#if defined(IRSOPT_HAVE_AVX2_TU)
constexpr Table kAvx2{Backend::Avx2, &avx2::dotc, &avx2::squared_norm, &avx2::axpy};
#endif

bool cpu_has_avx2() {
#if defined(IRSOPT_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table* initial_table() {
  const char* env = std::getenv("IRSOPT_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return &kScalar;
#if defined(IRSOPT_HAVE_AVX2_TU)
  if (cpu_has_avx2()) return &kAvx2;
#endif
  return &kScalar;
}

std::atomic<const Table*>& table() {
  static std::atomic<const Table*> t{initial_table()};
  return t;
}

}  // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool backend_available(Backend b) {
  return b == Backend::Scalar || (b == Backend::Avx2 && cpu_has_avx2());
}

Backend active_backend() { return table().load()->backend; }

void select_backend(Backend b) {
  if (!backend_available(b)) {
    throw std::invalid_argument(std::string("kernel backend not available: ") + backend_name(b));
  }
#if defined(IRSOPT_HAVE_AVX2_TU)
  table().store(b == Backend::Avx2 ? &kAvx2 : &kScalar);
#else
  table().store(&kScalar);
#endif
}

cdouble dotc(std::span<const cdouble> a, std::span<const cdouble> b) {
  return table().load(std::memory_order_relaxed)->dotc(a, b);
}

double squared_norm(std::span<const cdouble> a) {
  return table().load(std::memory_order_relaxed)->squared_norm(a);
}

void axpy(cdouble alpha, std::span<const cdouble> x, std::span<cdouble> y) {
  table().load(std::memory_order_relaxed)->axpy(alpha, x, y);
}

double hermitian_form(const CMatrix& a, const CVector& x) {
  if (a.rows() != x.size() || a.cols() != x.size()) {
    throw std::invalid_argument("hermitian_form: matrix and vector sizes differ");
  }
  const auto xs = view(x);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    // x^H a_j is the j-th entry of x^H A; weight by x_j.
    acc += (dotc(xs, column(a, j)) * x(j)).real();
  }
  return acc;
}

}  // namespace irsopt::kernels
