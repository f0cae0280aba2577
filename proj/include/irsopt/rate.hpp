#pragma once

#include <cstddef>
#include <vector>

#include "irsopt/feasible.hpp"
#include "irsopt/training.hpp"
#include "irsopt/types.hpp"

namespace irsopt::rate {

using training::ChannelEstimate;

// Downlink precoders plus the per-user parameters that enter the rate
// expressions: power budget P (mW), rate weights alpha_k, noise sigma_k^2 (mW).
struct PrecoderSet {
  std::vector<CVector> w;
  double power_budget = 0.0;
  std::vector<double> weights;
  std::vector<double> noise;

  std::size_t users() const { return w.size(); }
  double total_power() const;
  void validate() const;
};

/// [1; v]
CVector extended(const CVector& v);

/// Estimated effective channel h_k = H_hat^H v + h_d_hat (so h_k^H w = [1; v]^H H_bar w).
CVector effective_channel(const CVector& v, const ChannelEstimate& est);

/// [1; v]^H V_bar [1; v] = v11 + v^H r + r^H v + v^H R v.
double error_power(const CVector& v, const ChannelEstimate& est);

/// Interference-plus-noise seen by user k: multiuser leakage through the
/// estimated channel, the CSI-error term and receiver noise.
double psi(std::size_t k, const CVector& v, const PrecoderSet& precoders,
           const ChannelEstimate& est_k);

/// Lower bound on user k's rate in bits/s/Hz.
double achievable_rate(std::size_t k, const CVector& v, const PrecoderSet& precoders,
                       const ChannelEstimate& est_k);

/// sum_k alpha_k * achievable_rate(k), bits/s/Hz.
double weighted_sum_rate(const CVector& v, const PrecoderSet& precoders,
                         const std::vector<ChannelEstimate>& estimates);

/// Linear MMSE receive coefficient g_k.
cdouble mmse_receiver(std::size_t k, const CVector& v, const PrecoderSet& precoders,
                      const ChannelEstimate& est_k);

/// MSE e_k of the scaled estimate g_k^* y_k of s_k.
double mse(std::size_t k, cdouble g, const CVector& v, const PrecoderSet& precoders,
           const ChannelEstimate& est_k);

struct Quadratic {
  double a2 = 0.0;
  double a1 = 0.0;
  double a0 = 0.0;
  double at(double a) const { return (a2 * a + a1) * a + a0; }
};

// Single-user rate as a function of one element's amplitude with its phase
// and all other coefficients fixed:
//   rate(a) = log2(1 + num(a) / den(a)),
//   num(a) = a^2 A_nn + a c_n + d_n,  den(a) = a^2 R_nn ||w||^2 + a e_n + f_n.
struct AmplitudeProfile {
  Quadratic num;
  Quadratic den;
  double rate(double a) const;
};

/// Element n takes the value a * exp(j theta); the remaining entries come from v.
AmplitudeProfile amplitude_profile(std::size_t n, double theta, const CVector& v,
                                   const CVector& w, const ChannelEstimate& est, double sigma2);

/// Percentage of elements switched off (|v_n| < 1e-9).
double eop(const CVector& v);

}  // namespace irsopt::rate
