#pragma once

#include <complex>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace irsopt {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// All stochastic code takes an explicit engine; nothing seeds itself.
using Rng = std::mt19937_64;

// Raised when a linear-algebra routine meets a matrix it cannot handle
// (indefinite system, rank deficiency).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by bisection when no upper bracket is found.
class BracketError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Sample from CN(0, 1).
inline cdouble standard_complex_normal(Rng& rng) {
  std::normal_distribution<double> half(0.0, 0.7071067811865476);
  const double re = half(rng);
  const double im = half(rng);
  return {re, im};
}

}  // namespace irsopt
