#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "irsopt/feasible.hpp"
#include "irsopt/training.hpp"
#include "irsopt/types.hpp"

namespace irsopt::solver_mu {

using training::ChannelEstimate;

enum class InitMode { Ones, Random };

struct MuSolverConfig {
  double beta0 = 10.0;
  double shrink = 0.6;
  double eps_in = 1e-4;
  double eps_out = 1e-4;
  std::size_t max_inner = 200;
  std::size_t max_outer = 50;
  FeasibleSet set = FeasibleSet::continuous();
  bool robust = true;  // false: optimize as if V_bar_k = 0
  InitMode init = InitMode::Ones;
  std::uint64_t seed = 0;
  std::size_t polish_iterations = 30;  // (g, q, w) sweeps at the final feasible v

  void validate() const;
};

// Per-user data of the weighted sum-rate problem.
struct MuProblem {
  std::vector<ChannelEstimate> estimates;
  double power = 0.0;               // P, mW
  std::vector<double> noise;        // sigma_k^2, mW
  std::vector<double> weights;      // alpha_k

  std::size_t users() const { return estimates.size(); }
  std::size_t elements() const { return estimates.front().elements(); }
  std::size_t antennas() const { return estimates.front().antennas(); }
  void validate() const;
};

struct MuSolveReport {
  std::vector<CVector> w;
  CVector v;
  std::vector<double> rates;           // per user, bits/s/Hz, true error statistics
  double sum_rate = 0.0;               // weighted
  double wmmse_rate = 0.0;             // -sum alpha_k log2 e_k with MMSE receivers
  std::vector<std::vector<double>> al_trace;  // per inner loop: value after every block update
  std::vector<double> violation_trace;
  double eop = 0.0;
  std::size_t outer_iterations = 0;
  std::size_t inner_iterations = 0;
  bool converged = false;
  bool monotone = true;
};

/// MMSE receive coefficients g_k.
std::vector<cdouble> update_receivers(const CVector& v, const std::vector<CVector>& w,
                                      const MuProblem& prob);

/// MSEs e_k for given receivers.
std::vector<double> mses(const CVector& v, const std::vector<CVector>& w,
                         const std::vector<cdouble>& g, const MuProblem& prob);

/// q_k = 1 / e_k.
std::vector<double> update_weights(const std::vector<double>& e);

/// Minimizer of sum_k alpha_k q_k e_k over sum_k ||w_k||^2 <= P.
std::vector<CVector> update_precoders(const CVector& v, const std::vector<cdouble>& g,
                                      const std::vector<double>& q, const MuProblem& prob);

/// Unconstrained minimizer C^-1 d of the v-subproblem.
CVector update_v_mu(const std::vector<cdouble>& g, const std::vector<double>& q,
                    const std::vector<CVector>& w, const MuProblem& prob, const CVector& u,
                    const CVector& dual, double beta);

/// Value of the v-subproblem objective (AL terms depending on v, exact constants kept).
double v_subproblem_objective(const CVector& v, const std::vector<cdouble>& g,
                              const std::vector<double>& q, const std::vector<CVector>& w,
                              const MuProblem& prob, const CVector& u, const CVector& dual,
                              double beta);

/// Entry-wise projection of v + beta * dual onto the feasible set.
CVector update_u_mu(const CVector& v, const CVector& dual, double beta, const FeasibleSet& set);

/// dual + (v - u) / beta.
CVector dual_update(const CVector& dual, const CVector& v, const CVector& u, double beta);

/// sum_k alpha_k (q_k e_k - ln q_k) + ||v - u + beta dual||^2 / (2 beta).
double al_objective(const CVector& v, const CVector& u, const CVector& dual, double beta,
                    const std::vector<cdouble>& g, const std::vector<double>& q,
                    const std::vector<CVector>& w, const MuProblem& prob);

/// Penalty dual decomposition around the five block updates.
MuSolveReport pdd_solve(const MuProblem& prob, const MuSolverConfig& config = {});

/// v = 0; MRT on the direct channel for K = 1, WMMSE on (g, q, w) otherwise.
MuSolveReport no_irs_baseline(const MuProblem& prob, const MuSolverConfig& config = {});

}  // namespace irsopt::solver_mu
