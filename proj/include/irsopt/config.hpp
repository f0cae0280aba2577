#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "irsopt/channel.hpp"
#include "irsopt/feasible.hpp"
#include "irsopt/solver_mu.hpp"
#include "irsopt/solver_su.hpp"

namespace irsopt::harness {

// Exit code 2 at the CLI.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Exit code 3 at the CLI.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemeConfig {
  std::string name;
  FeasibleSet set;
};

struct BaselineFlags {
  bool no_irs = false;
  bool nonrobust = false;
  bool random_bcd = false;
};

struct SweepConfig {
  std::string parameter;  // empty: single point
  std::vector<double> values;
};

struct ExperimentConfig {
  // geometry
  channel::Vec3 ap_ref{2.0, 0.0, 0.0};
  channel::Vec3 irs_ref{0.0, 45.0, 2.0};
  std::size_t irs_ny = 4;
  double spacing_wavelengths = 0.5;
  channel::Vec3 cluster_center{3.0, 45.0, 0.0};
  double cluster_radius = 3.0;

  channel::PathLossModel path_loss;
  channel::RicianSpec rician;

  // system
  std::size_t K = 1;
  std::size_t M = 4;
  std::size_t N = 20;
  std::optional<std::size_t> N_r;  // defaults to N + 1
  std::optional<std::size_t> T0;   // frame length; no overhead factor when unset
  double P_dbm = 26.0;
  double p_u_dbm = 10.0;
  double sigma2_dbm = -80.0;
  double eps2_dbm = -80.0;
  std::vector<double> weights;  // empty: all ones

  std::vector<SchemeConfig> schemes;
  BaselineFlags baselines;
  solver_su::SuSolverConfig su;
  solver_mu::MuSolverConfig mu;
  bool force_mu = false;  // use the multiuser solver even when K == 1

  std::size_t trials = 50;
  std::uint64_t master_seed = 1;
  std::size_t threads = 0;  // 0: hardware concurrency
  SweepConfig sweep;

  std::size_t pilots() const { return N_r.value_or(N + 1); }
  void validate() const;  // throws ConfigError
};

/// Parameters that may appear in a sweep.
const std::vector<std::string>& sweep_whitelist();

ExperimentConfig default_config();

/// Parses a JSON document; unknown keys are rejected. Missing keys keep the defaults.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);  // IoError if unreadable

/// Copy of cfg with one whitelisted parameter set to value.
ExperimentConfig with_parameter(const ExperimentConfig& cfg, const std::string& name, double value);

}  // namespace irsopt::harness
