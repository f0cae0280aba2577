#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "irsopt/feasible.hpp"
#include "irsopt/training.hpp"
#include "irsopt/types.hpp"

namespace irsopt::solver_su {

using training::ChannelEstimate;

enum class InitMode { Ones, Random };

struct SuSolverConfig {
  double beta0 = 10.0;
  double shrink = 0.6;  // beta <- shrink * beta after every inner loop
  double eps_d = 1e-4;  // Dinkelbach / discrete BCD relative tolerance
  double eps_p = 1e-4;  // ||v - u||_inf target
  double eps_c = 1e-4;  // continuous BCD relative tolerance
  std::size_t max_inner = 200;
  std::size_t max_outer = 100;
  std::size_t max_bcd_sweeps = 200;
  double bisection_tol = 1e-8;
  std::optional<double> ball_radius;  // defaults to N
  InitMode init = InitMode::Ones;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SuSolveReport {
  CVector v;  // final reflection vector (feasible)
  CVector w;  // MRT precoder on the estimated effective channel
  std::vector<std::vector<double>> y_trace;  // Dinkelbach variable, one list per inner loop
  std::vector<double> violation_trace;       // ||v - u||_inf after each inner loop
  std::vector<double> bcd_trace;             // ratio after every element update
  double objective = 0.0;                    // SNR-type ratio being maximized
  double rate = 0.0;                         // log2(1 + objective)
  double eop = 0.0;
  std::size_t outer_iterations = 0;
  std::size_t inner_iterations = 0;
  std::size_t bcd_sweeps = 0;
  bool converged = false;
  bool monotone = true;  // every monitored sequence moved in its guaranteed direction
};

/// P ||v^H H_hat + h_d_hat^H||^2 / (P [1;v]^H V_bar [1;v] + sigma2).
double su_objective(const CVector& v, const ChannelEstimate& est, double P, double sigma2);

/// sqrt(P) h / ||h||. Throws std::invalid_argument for h == 0.
CVector mrt_precoder(const CVector& h_eff, double P);

/// Dinkelbach ratio with the penalty ||v - u||^2 / beta in the denominator.
double dinkelbach_y(const CVector& v, const CVector& u, const ChannelEstimate& est, double P,
                    double sigma2, double beta);

/// Value of the convex surrogate minimized by update_v_su (constants dropped).
double surrogate_objective(const CVector& v, const CVector& v_prev, const CVector& u, double y,
                           const ChannelEstimate& est, double P, double beta);

/// Minimizer of the surrogate over the ball ||v|| <= radius (KKT + bisection on
/// the multiplier).
CVector update_v_su(const CVector& v_prev, const CVector& u, double y, const ChannelEstimate& est,
                    double P, double beta, double radius, double bisection_tol = 1e-8);

using irsopt::project_disc;
using irsopt::project_discrete;

/// Best value of element n over the closed unit disc with the others fixed.
cdouble per_element_continuous(std::size_t n, const CVector& v, const ChannelEstimate& est,
                               double P, double sigma2);

/// Penalized Dinkelbach-BSUM over F_d, then per-element exhaustive BCD.
SuSolveReport solve_su_discrete(const ChannelEstimate& est, double P, double sigma2,
                                const FeasibleSet& set, const SuSolverConfig& config = {});

/// Same penalty machinery with the disc projection, then per-element continuous BCD.
SuSolveReport solve_su_continuous(const ChannelEstimate& est, double P, double sigma2,
                                  const SuSolverConfig& config = {});

/// Benchmark: random point of F_d followed by the exhaustive BCD only.
SuSolveReport solve_su_random_bcd(const ChannelEstimate& est, double P, double sigma2,
                                  const FeasibleSet& set, const SuSolverConfig& config);

}  // namespace irsopt::solver_su
