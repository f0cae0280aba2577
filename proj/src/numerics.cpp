#include "irsopt/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace irsopt::numerics {

CMatrix pseudo_inverse(const CMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw std::invalid_argument("pseudo_inverse: matrix has a zero dimension");
  }
  Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  const double cutoff = 1e-12 * s(0);
  RVector inv_s = RVector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) inv_s(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv_s.asDiagonal() * svd.matrixU().adjoint();
}

CVector hermitian_solve(const CMatrix& a, const CVector& b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw std::invalid_argument("hermitian_solve: dimension mismatch");
  }
  if (a.rows() == 0) return CVector();
  Eigen::LLT<CMatrix> llt(a);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(a, Eigen::EigenvaluesOnly);
    std::ostringstream msg;
    msg << "hermitian_solve: matrix is not positive definite (smallest eigenvalue "
        << eig.eigenvalues()(0) << ")";
    throw NumericalError(msg.str());
  }
  return llt.solve(b);
}

double bisection_root(const std::function<double(double)>& f, double target,
                      double lo, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("bisection_root: tol must be positive");
  if (f(lo) <= target) return lo;

  double step = 1.0;
  double hi = lo + step;
  int doublings = 0;
  while (f(hi) > target) {
    if (++doublings > 200) {
      throw BracketError("bisection_root: no upper bracket after 200 doublings");
    }
    step *= 2.0;
    hi = lo + step;
  }

  // Invariant: f(lo) > target >= f(hi).
  double mid = hi;
  for (int it = 0; it < 2000; ++it) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    const double width = hi - lo;
    if (std::abs(fm - target) <= tol && width <= tol * std::max(1.0, std::abs(mid))) {
      return mid;
    }
    if (mid <= lo || mid >= hi) break;  // floating-point resolution reached
    if (fm > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

CMatrix sylvester_hadamard(std::size_t order) {
  if (!is_power_of_two(order)) {
    throw std::invalid_argument("sylvester_hadamard: order " + std::to_string(order) +
                                " is not a power of two");
  }
  const auto n = static_cast<Eigen::Index>(order);
  CMatrix h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto bits = static_cast<unsigned long long>(i & j);
      h(i, j) = (__builtin_popcountll(bits) % 2 == 0) ? 1.0 : -1.0;
    }
  }
  return h;
}

CMatrix dft_matrix(std::size_t order) {
  if (order == 0) throw std::invalid_argument("dft_matrix: order must be >= 1");
  const auto n = static_cast<Eigen::Index>(order);
  CMatrix f(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = 0; k < n; ++k) {
      // Reduce m*k modulo order first so large orders keep full phase accuracy.
      const auto r = static_cast<double>((m * k) % n);
      f(m, k) = std::polar(1.0, -2.0 * std::numbers::pi * r / static_cast<double>(n));
    }
  }
  return f;
}

namespace {
double rel(const CMatrix& diff, const CMatrix& ref) {
  const double denom = ref.norm();
  return denom > 0.0 ? diff.norm() / denom : diff.norm();
}
}  // namespace

double PenroseResiduals::max() const {
  return std::max({a_pinv_a, pinv_a_pinv, a_pinv_herm, pinv_a_herm});
}

PenroseResiduals penrose_residuals(const CMatrix& a, const CMatrix& pinv) {
  const CMatrix ap = a * pinv;
  const CMatrix pa = pinv * a;
  return {rel(ap * a - a, a), rel(pa * pinv - pinv, pinv), rel(ap.adjoint() - ap, ap),
          rel(pa.adjoint() - pa, pa)};
}

}  // namespace irsopt::numerics
