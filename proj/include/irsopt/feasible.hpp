#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "irsopt/types.hpp"

namespace irsopt {

enum class ReflectionMode { Discrete, Continuous, Cadp, Dacp };

const char* mode_name(ReflectionMode m);

// Per-element reflection constraint. A missing bit count means the
// corresponding quantity is continuous: amplitude in [0, 1], phase in [0, 2pi).
// Discrete amplitudes: {k / (2^q_a - 1)} (just {1} when q_a == 0).
// Discrete phases: {2 pi l / 2^q_theta}.
struct FeasibleSet {
  std::optional<int> q_a;
  std::optional<int> q_theta;

  static FeasibleSet discrete(int q_a, int q_theta) { return {q_a, q_theta}; }
  static FeasibleSet continuous() { return {std::nullopt, std::nullopt}; }

  ReflectionMode mode() const;
  bool is_discrete() const { return q_a.has_value() && q_theta.has_value(); }

  std::vector<double> amplitudes() const;  // requires q_a
  std::vector<double> phases() const;      // requires q_theta

  // All points of F_d in enumeration order (phase-major, then amplitude).
  std::vector<cdouble> points() const;

  // Euclidean projection of a single coefficient onto the set.
  cdouble project(cdouble x) const;
  CVector project(const CVector& x) const;

  // Exact membership: discrete parts must be bit-equal to set members.
  bool contains(cdouble x, double tol = 1e-12) const;

  std::string describe() const;
  void validate() const;
};

// Nearest phase in S (circular distance), then nearest amplitude in A along
// that phase. Ties go to the smaller phase, then the smaller amplitude.
cdouble project_discrete(cdouble x, std::span<const double> amplitudes,
                         std::span<const double> phases);

// x if |x| <= 1, else x / |x|.
cdouble project_disc(cdouble x);

// Reflection variables carried by the penalty-based solvers: the relaxed copy
// v, its feasible twin u and the dual vector.
struct ReflectionState {
  CVector v;
  CVector u;
  CVector dual;
  FeasibleSet set;

  double violation() const { return (v - u).cwiseAbs().maxCoeff(); }
};

}  // namespace irsopt
