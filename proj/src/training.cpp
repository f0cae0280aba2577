#include "irsopt/training.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "irsopt/numerics.hpp"

namespace irsopt::training {

namespace {

// Nearest grid phase under circular distance; ties go to the smaller index.
double snap_phase(double phase, int levels) {
  const double step = 2.0 * std::numbers::pi / levels;
  double best = 0.0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int l = 0; l < levels; ++l) {
    const double cand = step * l;
    double d = std::fmod(std::abs(phase - cand), 2.0 * std::numbers::pi);
    d = std::min(d, 2.0 * std::numbers::pi - d);
    if (d < best_dist - 1e-12) {
      best_dist = d;
      best = cand;
    }
  }
  return best;
}

void require_full_row_rank(const CMatrix& V) {
  Eigen::BDCSVD<CMatrix> svd(V);
  const RVector& s = svd.singularValues();
  if (s.size() < V.rows() || s(s.size() - 1) <= 1e-12 * s(0)) {
    throw NumericalError("pattern matrix is rank deficient; LS estimate is not unique");
  }
}

}  // namespace

ChannelEstimate ChannelEstimate::without_errors() const {
  return {stacked, CMatrix::Zero(error_cov.rows(), error_cov.cols())};
}

ChannelEstimate ChannelEstimate::scaled(double s) const {
  return {stacked * s, error_cov * (s * s)};
}

PatternMatrix design_patterns(std::size_t n, std::size_t n_r, std::optional<int> q_theta) {
  if (n_r < n + 1) {
    throw std::invalid_argument("design_patterns: N_r >= N+1 required (got N=" +
                                std::to_string(n) + ", N_r=" + std::to_string(n_r) + ")");
  }
  if (q_theta && *q_theta < 1) {
    throw std::invalid_argument("design_patterns: training phase resolution must be >= 1 bit");
  }
  const auto rows = static_cast<Eigen::Index>(n + 1);
  const auto cols = static_cast<Eigen::Index>(n_r);

  PatternMatrix out;
  out.q_theta = q_theta;
  if (q_theta && *q_theta == 1) {
    const std::size_t order = numerics::next_power_of_two(n_r);
    out.V = numerics::sylvester_hadamard(order).topLeftCorner(rows, cols);
    out.source = PatternSource::TruncatedHadamard;
  } else {
    out.V = numerics::dft_matrix(n_r).topLeftCorner(rows, cols);
    out.source = PatternSource::Dft;
    if (q_theta) {
      const int levels = 1 << *q_theta;
      for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
          double phase = std::arg(out.V(i, j));
          if (phase < 0.0) phase += 2.0 * std::numbers::pi;
          out.V(i, j) = std::polar(1.0, snap_phase(phase, levels));
        }
      }
      out.source = PatternSource::QuantizedDft;
    }
  }
  out.V.row(0).setOnes();
  require_full_row_rank(out.V);
  return out;
}

CMatrix draw_unit_noise(std::size_t antennas, std::size_t pilots, Rng& rng) {
  CMatrix n(static_cast<Eigen::Index>(antennas), static_cast<Eigen::Index>(pilots));
  for (Eigen::Index j = 0; j < n.cols(); ++j) {
    for (Eigen::Index i = 0; i < n.rows(); ++i) n(i, j) = standard_complex_normal(rng);
  }
  return n;
}

CMatrix simulate_uplink(const CMatrix& stacked, const PatternMatrix& patterns, double p_u,
                        double eps2, const CMatrix& unit_noise) {
  if (stacked.rows() != patterns.V.rows()) {
    throw std::invalid_argument("simulate_uplink: stacked channel rows != N+1");
  }
  if (unit_noise.rows() != stacked.cols() || unit_noise.cols() != patterns.V.cols()) {
    throw std::invalid_argument("simulate_uplink: noise block must be M x N_r");
  }
  if (!(p_u > 0.0)) throw std::invalid_argument("simulate_uplink: p_u must be positive");
  if (eps2 < 0.0) throw std::invalid_argument("simulate_uplink: negative noise variance");
  CMatrix y = std::sqrt(p_u) * (stacked.adjoint() * patterns.V);
  if (eps2 > 0.0) y += std::sqrt(eps2) * unit_noise;
  return y;
}

CMatrix simulate_uplink(const CMatrix& stacked, const PatternMatrix& patterns, double p_u,
                        double eps2, Rng& rng) {
  const CMatrix noise = draw_unit_noise(static_cast<std::size_t>(stacked.cols()),
                                        patterns.pilots(), rng);
  return simulate_uplink(stacked, patterns, p_u, eps2, noise);
}

CMatrix ls_estimate(const CMatrix& received, const PatternMatrix& patterns, double p_u) {
  if (received.cols() != patterns.V.cols()) {
    throw std::invalid_argument("ls_estimate: received block must have N_r columns");
  }
  if (!(p_u > 0.0)) throw std::invalid_argument("ls_estimate: p_u must be positive");
  require_full_row_rank(patterns.V);
  const CMatrix pinv = numerics::pseudo_inverse(patterns.V);
  return ((1.0 / std::sqrt(p_u)) * received * pinv).adjoint();
}

CMatrix error_covariance(const PatternMatrix& patterns, double eps2, double p_u) {
  if (!(p_u > 0.0)) throw std::invalid_argument("error_covariance: p_u must be positive");
  require_full_row_rank(patterns.V);
  const CMatrix pinv = numerics::pseudo_inverse(patterns.V);
  CMatrix cov = (eps2 / p_u) * (pinv.adjoint() * pinv);
  // Symmetrize away rounding so downstream Cholesky sees an exactly Hermitian matrix.
  return 0.5 * (cov + cov.adjoint());
}

double normalized_mse(const CMatrix& estimate, const CMatrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw std::invalid_argument("normalized_mse: shape mismatch");
  }
  const double ref = truth.squaredNorm();
  if (!(ref > 0.0)) throw std::invalid_argument("normalized_mse: reference channel is zero");
  return (estimate - truth).squaredNorm() / ref;
}

ChannelEstimate estimate_channel(const CMatrix& stacked, const PatternMatrix& patterns,
                                 double p_u, double eps2, const CMatrix& unit_noise) {
  const CMatrix y = simulate_uplink(stacked, patterns, p_u, eps2, unit_noise);
  return {ls_estimate(y, patterns, p_u), error_covariance(patterns, eps2, p_u)};
}

}  // namespace irsopt::training
