#pragma once

#include <cstddef>
#include <optional>

#include "irsopt/types.hpp"

namespace irsopt::training {

enum class PatternSource { Dft, QuantizedDft, TruncatedHadamard };

// Extended reflection patterns used during uplink training, one column per
// pilot symbol. Row 0 is all ones (direct path); rows 1..N are the IRS
// coefficients at full amplitude.
struct PatternMatrix {
  CMatrix V;
  std::optional<int> q_theta;  // nullopt: continuous phases
  PatternSource source = PatternSource::Dft;

  std::size_t elements() const { return static_cast<std::size_t>(V.rows()) - 1; }
  std::size_t pilots() const { return static_cast<std::size_t>(V.cols()); }
};

// LS estimate H_bar = [h_d_hat^H; H_hat] together with the second-order
// statistics of its error, V_bar = (eps2/p_u) (V V^H)^{-1}, block-split as
// [[v11, r^H], [r, R]].
struct ChannelEstimate {
  CMatrix stacked;    // (N+1) x M
  CMatrix error_cov;  // (N+1) x (N+1), Hermitian PSD

  std::size_t elements() const { return static_cast<std::size_t>(stacked.rows()) - 1; }
  std::size_t antennas() const { return static_cast<std::size_t>(stacked.cols()); }

  CVector direct() const { return stacked.row(0).adjoint(); }  // h_d_hat
  CMatrix cascaded() const { return stacked.bottomRows(stacked.rows() - 1); }  // H_hat
  double v11() const { return error_cov(0, 0).real(); }
  CVector r() const { return error_cov.col(0).tail(error_cov.rows() - 1); }
  CMatrix R() const { return error_cov.bottomRightCorner(error_cov.rows() - 1, error_cov.cols() - 1); }

  // Same estimate with the error statistics zeroed (nonrobust design).
  ChannelEstimate without_errors() const;
  // Channel scaled by s and covariance by s^2.
  ChannelEstimate scaled(double s) const;
};

/// Pattern design:
///  - continuous phases: first N_r columns of the order-N_r DFT, first N+1 rows;
///  - q_theta == 1: truncated Sylvester-Hadamard of the smallest power-of-two order
///    >= N_r;
///  - q_theta >= 2: DFT entries with phases snapped to the nearest point of the
///    2^q_theta-level grid (circular distance).
/// Throws std::invalid_argument when N_r < N + 1 or q_theta < 1.
PatternMatrix design_patterns(std::size_t n, std::size_t n_r, std::optional<int> q_theta);

/// Y = sqrt(p_u) H_tilde^H V + noise, noise entries CN(0, eps2).
CMatrix simulate_uplink(const CMatrix& stacked, const PatternMatrix& patterns, double p_u,
                        double eps2, Rng& rng);
/// Same with a caller-supplied unit-variance noise block (M x N_r), scaled by
/// sqrt(eps2). Lets several pattern designs share one noise realization.
CMatrix simulate_uplink(const CMatrix& stacked, const PatternMatrix& patterns, double p_u,
                        double eps2, const CMatrix& unit_noise);
CMatrix draw_unit_noise(std::size_t antennas, std::size_t pilots, Rng& rng);

/// H_bar = ((1/sqrt(p_u)) Y V^+)^H.
CMatrix ls_estimate(const CMatrix& received, const PatternMatrix& patterns, double p_u);

/// V_bar(i, j) = (eps2/p_u) <V^+[:, i], V^+[:, j]>.
CMatrix error_covariance(const PatternMatrix& patterns, double eps2, double p_u);

/// ||H_bar - H_tilde||_F^2 / ||H_tilde||_F^2.
double normalized_mse(const CMatrix& estimate, const CMatrix& truth);

/// Convenience: simulate the training phase for one user and bundle the
/// estimate with its error covariance.
ChannelEstimate estimate_channel(const CMatrix& stacked, const PatternMatrix& patterns,
                                 double p_u, double eps2, const CMatrix& unit_noise);

}  // namespace irsopt::training
