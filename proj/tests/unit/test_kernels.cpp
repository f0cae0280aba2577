#include <doctest.h>

#include <vector>

#include "irsopt/kernels.hpp"
#include "support/fixtures.hpp"

using namespace irsopt;

namespace {

std::vector<cdouble> random_buffer(std::size_t n, Rng& rng) {
  std::vector<cdouble> v(n);
  for (auto& z : v) z = standard_complex_normal(rng);
  return v;
}

cdouble naive_dotc(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
  cdouble acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

}  // namespace

TEST_CASE("scalar kernels match the textbook definitions") {
  Rng rng(5);
  for (std::size_t n : {0u, 1u, 2u, 3u, 7u, 16u, 33u}) {
    const auto a = random_buffer(n, rng), b = random_buffer(n, rng);
    const cdouble d = kernels::scalar::dotc(a, b);
    CHECK(std::abs(d - naive_dotc(a, b)) <= 1e-12 * (1.0 + std::abs(d)));
    double nrm = 0.0;
    for (const auto& z : a) nrm += std::norm(z);
    CHECK(std::abs(kernels::scalar::squared_norm(a) - nrm) <= 1e-12 * (1.0 + nrm));
    auto y = b;
    const cdouble alpha(0.3, -1.1);
    kernels::scalar::axpy(alpha, a, y);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y[i] - (b[i] + alpha * a[i])) <= 1e-14);
  }
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!kernels::backend_available(kernels::Backend::Avx2)) {
    MESSAGE("AVX2 not available on this CPU; equivalence test skipped");
    return;
  }
#if defined(__x86_64__)
  Rng rng(6);
  // Lengths cover the vector body, every remainder and the empty case.
  for (std::size_t n = 0; n <= 41; ++n) {
    const auto a = random_buffer(n, rng), b = random_buffer(n, rng);
    const cdouble ds = kernels::scalar::dotc(a, b), dv = kernels::avx2::dotc(a, b);
    CHECK(std::abs(ds - dv) <= 1e-13 * (1.0 + std::abs(ds)));
    const double ns = kernels::scalar::squared_norm(a), nv = kernels::avx2::squared_norm(a);
    CHECK(std::abs(ns - nv) <= 1e-13 * (1.0 + ns));
    auto ys = b, yv = b;
    const cdouble alpha(-0.7, 0.25);
    kernels::scalar::axpy(alpha, a, ys);
    kernels::avx2::axpy(alpha, a, yv);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ys[i] - yv[i]) <= 1e-14);
  }
  // Subspans starting at odd offsets (unaligned loads).
  const auto a = random_buffer(37, rng), b = random_buffer(37, rng);
  const std::span<const cdouble> sa(a), sb(b);
  for (std::size_t off = 0; off < 4; ++off) {
    const auto x = sa.subspan(off), y = sb.subspan(off);
    CHECK(std::abs(kernels::scalar::dotc(x, y) - kernels::avx2::dotc(x, y)) <= 1e-12);
  }
#endif
}

TEST_CASE("runtime backend switch") {
  const auto original = kernels::active_backend();
  Rng rng(7);
  const CVector a = fixtures::random_vector(19, rng), b = fixtures::random_vector(19, rng);

  kernels::select_backend(kernels::Backend::Scalar);
  CHECK(kernels::active_backend() == kernels::Backend::Scalar);
  const cdouble scalar_result = kernels::dotc(a, b);
  CHECK(std::abs(scalar_result - a.dot(b)) <= 1e-12);  // Eigen's dot conjugates the first argument

  if (kernels::backend_available(kernels::Backend::Avx2)) {
    kernels::select_backend(kernels::Backend::Avx2);
    CHECK(kernels::active_backend() == kernels::Backend::Avx2);
    CHECK(std::abs(kernels::dotc(a, b) - scalar_result) <= 1e-12);
  } else {
    CHECK_THROWS_AS(kernels::select_backend(kernels::Backend::Avx2), std::invalid_argument);
  }
  kernels::select_backend(original);
  CHECK(std::string(kernels::backend_name(kernels::Backend::Scalar)) == "scalar");
}

TEST_CASE("hermitian_form equals x^H A x") {
  Rng rng(8);
  for (int n : {1, 4, 9}) {
    const CMatrix A = fixtures::random_psd(n, rng);
    const CVector x = fixtures::random_vector(n, rng);
    const double ref = (x.adjoint() * A * x)(0, 0).real();
    CHECK(std::abs(kernels::hermitian_form(A, x) - ref) <= 1e-12 * (1.0 + std::abs(ref)));
  }
  CHECK_THROWS_AS(kernels::hermitian_form(CMatrix::Identity(3, 3), CVector::Ones(2)),
                  std::invalid_argument);
}
