#pragma once

#include <cstddef>
#include <functional>

#include "irsopt/types.hpp"

namespace irsopt::numerics {

/// Moore-Penrose pseudo-inverse via SVD. Singular values below
/// 1e-12 * sigma_max are treated as zero.
CMatrix pseudo_inverse(const CMatrix& a);

/// Solves A x = b for Hermitian positive definite A (Cholesky).
/// Throws NumericalError naming the smallest eigenvalue if A is not PD.
CVector hermitian_solve(const CMatrix& a, const CVector& b);

/// Finds mu >= lo with |f(mu) - target| <= tol for a continuous, strictly
/// decreasing f. Returns lo when f(lo) <= target already. The upper bracket
/// is found by doubling the step from lo + 1 (at most 200 doublings).
double bisection_root(const std::function<double(double)>& f, double target,
                      double lo, double tol);

/// Real +-1 Sylvester-Hadamard matrix; order must be a power of two.
CMatrix sylvester_hadamard(std::size_t order);

/// Unnormalized DFT matrix, entry (m, n) = exp(-j 2 pi m n / order).
CMatrix dft_matrix(std::size_t order);

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

/// Frobenius-relative residuals of the four Moore-Penrose conditions.
struct PenroseResiduals {
  double a_pinv_a;      // ||A A+ A - A|| / ||A||
  double pinv_a_pinv;   // ||A+ A A+ - A+|| / ||A+||
  double a_pinv_herm;   // ||(A A+)^H - A A+|| / ||A A+||
  double pinv_a_herm;   // ||(A+ A)^H - A+ A|| / ||A+ A||
  double max() const;
};
PenroseResiduals penrose_residuals(const CMatrix& a, const CMatrix& pinv);

}  // namespace irsopt::numerics
