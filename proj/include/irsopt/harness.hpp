#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "irsopt/config.hpp"

namespace irsopt::harness {

enum class RunMode {
  Full,      // estimate + solve every scheme
  Estimate,  // training and LS estimation only (normalized MSE)
};

struct SchemeResult {
  std::string scheme;
  double sum_rate = 0.0;  // after the training-overhead factor
  std::vector<double> rates;
  std::optional<double> eop;
  double nmse = 0.0;
  std::size_t outer_iterations = 0;
  std::size_t inner_iterations = 0;
  bool converged = true;
  double wall_seconds = 0.0;  // informational; never exported
};

struct TrialRecord {
  std::uint64_t seed = 0;
  std::optional<double> sweep_value;
  std::vector<SchemeResult> schemes;
};

struct AggregateRow {
  std::string sweep_param;  // "none" for a single-point run
  std::optional<double> sweep_value;
  std::string scheme;
  std::string metric;
  double mean = 0.0;
  double std = 0.0;
  std::size_t n_trials = 0;
};

/// Seed of one trial: a SplitMix64 chain over (master, sweep index, trial index).
std::uint64_t trial_seed(std::uint64_t master, std::size_t sweep_index, std::size_t trial_index);

/// (T0 - N_r) / T0, or 1 without a frame length.
double overhead_factor(const ExperimentConfig& cfg);

/// Generate -> train -> estimate -> solve -> evaluate for every scheme on one
/// channel draw. cfg must already carry the sweep value, if any.
TrialRecord run_trial(const ExperimentConfig& cfg, std::optional<double> sweep_value,
                      std::uint64_t seed, RunMode mode = RunMode::Full);

/// Metric name/value pairs exported for one scheme result, in a fixed order.
std::vector<std::pair<std::string, double>> metrics_of(const SchemeResult& r, RunMode mode);

/// Sample mean and (n-1) standard deviation; std = 0 for n == 1.
std::pair<double, double> mean_std(const std::vector<double>& xs);

/// Every trial of every sweep point, run concurrently; rows ordered by
/// (sweep index, scheme, metric).
std::vector<AggregateRow> run_sweep(const ExperimentConfig& cfg, RunMode mode = RunMode::Full);

}  // namespace irsopt::harness
