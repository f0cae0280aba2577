#pragma once

#include <cmath>
#include <random>

#include "irsopt/training.hpp"
#include "irsopt/types.hpp"

namespace fixtures {

using irsopt::CMatrix;
using irsopt::CVector;
using irsopt::Rng;
using irsopt::cdouble;

inline CVector random_vector(Eigen::Index n, Rng& rng, double scale = 1.0) {
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * irsopt::standard_complex_normal(rng);
  return v;
}

inline CMatrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double scale = 1.0) {
  CMatrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = scale * irsopt::standard_complex_normal(rng);
  }
  return m;
}

// Hermitian PSD with trace of order n * scale.
inline CMatrix random_psd(Eigen::Index n, Rng& rng, double scale = 1.0) {
  const CMatrix b = random_matrix(n, n, rng);
  CMatrix a = (scale / static_cast<double>(n)) * (b * b.adjoint());
  return 0.5 * (a + a.adjoint());
}

// Point inside the closed unit disc, per entry.
inline CVector random_disc_vector(Eigen::Index n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = std::polar(std::sqrt(u(rng)), 2.0 * M_PI * u(rng));
  return v;
}

// Estimate in noise-normalized units: channel entries O(chan), error
// covariance O(err) on the diagonal.
inline irsopt::training::ChannelEstimate random_estimate(Eigen::Index n, Eigen::Index m, Rng& rng,
                                                          double chan = 1.0, double err = 0.1) {
  irsopt::training::ChannelEstimate est;
  est.stacked = random_matrix(n + 1, m, rng, chan);
  est.error_cov = err > 0.0 ? random_psd(n + 1, rng, err) : CMatrix::Zero(n + 1, n + 1);
  return est;
}

}  // namespace fixtures
