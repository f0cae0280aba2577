#include "irsopt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "irsopt/rate.hpp"
#include "irsopt/training.hpp"

namespace irsopt::harness {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Training phase resolution for a reflection set. Patterns always use full
// amplitude; a single phase level cannot give full row rank, so at least 1 bit.
std::optional<int> training_bits(const FeasibleSet& set) {
  if (!set.q_theta) return std::nullopt;
  return std::max(*set.q_theta, 1);
}

struct TrainingOutcome {
  std::vector<training::ChannelEstimate> estimates;
  double nmse = 0.0;  // averaged over users
};

struct TrialContext {
  const ExperimentConfig& cfg;
  channel::ChannelSet channels;
  std::vector<CMatrix> unit_noise;  // per user, shared by every training design
  std::map<std::optional<int>, TrainingOutcome> cache;
  double P = 0.0;
  double sigma2 = 0.0;
  double p_u = 0.0;
  double eps2 = 0.0;
  std::uint64_t seed = 0;

  const TrainingOutcome& training_for(const FeasibleSet& set) {
    const auto bits = training_bits(set);
    auto it = cache.find(bits);
    if (it != cache.end()) return it->second;
    const auto patterns = training::design_patterns(cfg.N, cfg.pilots(), bits);
    TrainingOutcome out;
    for (std::size_t k = 0; k < channels.users(); ++k) {
      out.estimates.push_back(
          training::estimate_channel(channels.stacked[k], patterns, p_u, eps2, unit_noise[k]));
      out.nmse += training::normalized_mse(out.estimates.back().stacked, channels.stacked[k]);
    }
    out.nmse /= static_cast<double>(channels.users());
    return cache.emplace(bits, std::move(out)).first->second;
  }

  solver_mu::MuProblem problem(const std::vector<training::ChannelEstimate>& est) const {
    solver_mu::MuProblem prob;
    prob.estimates = est;
    prob.power = P;
    prob.noise.assign(est.size(), sigma2);
    prob.weights = cfg.weights.empty() ? std::vector<double>(est.size(), 1.0) : cfg.weights;
    return prob;
  }
};

void fill_from_su(SchemeResult& r, const solver_su::SuSolveReport& rep,
                  const training::ChannelEstimate& truth_stats, double P, double sigma2) {
  // Evaluate with the true error statistics whatever the solver was told.
  const double ratio = solver_su::su_objective(rep.v, truth_stats, P, sigma2);
  r.rates = {std::log2(1.0 + ratio)};
  r.eop = rep.eop;
  r.outer_iterations = rep.outer_iterations;
  r.inner_iterations = rep.inner_iterations;
  r.converged = rep.converged;
}

void fill_from_mu(SchemeResult& r, const solver_mu::MuSolveReport& rep) {
  r.rates = rep.rates;
  r.eop = rep.eop;
  r.outer_iterations = rep.outer_iterations;
  r.inner_iterations = rep.inner_iterations;
  r.converged = rep.converged;
}

SchemeResult solve_scheme(TrialContext& ctx, const std::string& name, const FeasibleSet& set,
                          bool robust) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig& cfg = ctx.cfg;
  const TrainingOutcome& tr = ctx.training_for(set);
  SchemeResult r;
  r.scheme = name;
  r.nmse = tr.nmse;

  const bool single = cfg.K == 1 && !cfg.force_mu &&
                      (set.mode() == ReflectionMode::Discrete || set.mode() == ReflectionMode::Continuous);
  if (single) {
    const auto& est = tr.estimates[0];
    const auto opt = robust ? est : est.without_errors();
    const auto rep = set.is_discrete()
                         ? solver_su::solve_su_discrete(opt, ctx.P, ctx.sigma2, set, cfg.su)
                         : solver_su::solve_su_continuous(opt, ctx.P, ctx.sigma2, cfg.su);
    fill_from_su(r, rep, est, ctx.P, ctx.sigma2);
  } else {
    solver_mu::MuSolverConfig mc = cfg.mu;
    mc.set = set;
    mc.robust = robust;
    fill_from_mu(r, solver_mu::pdd_solve(ctx.problem(tr.estimates), mc));
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

double weighted_total(const ExperimentConfig& cfg, const std::vector<double>& rates) {
  double acc = 0.0;
  for (std::size_t k = 0; k < rates.size(); ++k) acc += (cfg.weights.empty() ? 1.0 : cfg.weights[k]) * rates[k];
  return acc;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master, std::size_t sweep_index, std::size_t trial_index) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(sweep_index));
  return splitmix64(h ^ static_cast<std::uint64_t>(trial_index));
}

double overhead_factor(const ExperimentConfig& cfg) {
  if (!cfg.T0) return 1.0;
  const double t0 = static_cast<double>(*cfg.T0);
  return (t0 - static_cast<double>(cfg.pilots())) / t0;
}

TrialRecord run_trial(const ExperimentConfig& cfg, std::optional<double> sweep_value,
                      std::uint64_t seed, RunMode mode) {
  cfg.validate();
  Rng rng(seed);
  channel::Geometry geo;
  geo.ap_ref = cfg.ap_ref;
  geo.irs_ref = cfg.irs_ref;
  geo.ap_antennas = cfg.M;
  geo.irs_ny = cfg.irs_ny;
  geo.irs_nz = cfg.N / cfg.irs_ny;
  geo.spacing_wavelengths = cfg.spacing_wavelengths;
  geo.user_positions = channel::draw_user_cluster(cfg.K, cfg.cluster_center, cfg.cluster_radius, rng);

  TrialContext ctx{cfg, channel::generate_channels(geo, cfg.path_loss, cfg.rician, rng), {}, {}};
  for (std::size_t k = 0; k < cfg.K; ++k) {
    ctx.unit_noise.push_back(training::draw_unit_noise(cfg.M, cfg.pilots(), rng));
  }
  ctx.P = channel::dbm_to_mw(cfg.P_dbm);
  ctx.sigma2 = channel::dbm_to_mw(cfg.sigma2_dbm);
  ctx.p_u = channel::dbm_to_mw(cfg.p_u_dbm);
  ctx.eps2 = channel::dbm_to_mw(cfg.eps2_dbm);
  ctx.seed = seed;

  TrialRecord rec;
  rec.seed = seed;
  rec.sweep_value = sweep_value;
  const double factor = overhead_factor(cfg);

  if (mode == RunMode::Estimate) {
    for (const auto& s : cfg.schemes) {
      SchemeResult r;
      r.scheme = s.name;
      r.nmse = ctx.training_for(s.set).nmse;
      rec.schemes.push_back(std::move(r));
    }
    return rec;
  }

  for (const auto& s : cfg.schemes) rec.schemes.push_back(solve_scheme(ctx, s.name, s.set, true));

  const SchemeConfig& first = cfg.schemes.front();
  if (cfg.baselines.nonrobust) {
    rec.schemes.push_back(solve_scheme(ctx, "nonrobust", first.set, false));
  }
  if (cfg.baselines.random_bcd) {
    const auto& disc = *std::find_if(cfg.schemes.begin(), cfg.schemes.end(),
                                     [](const SchemeConfig& s) { return s.set.is_discrete(); });
    const auto t0 = std::chrono::steady_clock::now();
    const TrainingOutcome& tr = ctx.training_for(disc.set);
    SchemeResult r;
    r.scheme = "random_bcd";
    r.nmse = tr.nmse;
    if (cfg.K == 1) {
      solver_su::SuSolverConfig sc = cfg.su;
      sc.seed = splitmix64(seed ^ 0x5bd1e995ULL);
      fill_from_su(r, solver_su::solve_su_random_bcd(tr.estimates[0], ctx.P, ctx.sigma2, disc.set, sc),
                   tr.estimates[0], ctx.P, ctx.sigma2);
    } else {
      solver_mu::MuSolverConfig mc = cfg.mu;
      mc.set = disc.set;
      mc.init = solver_mu::InitMode::Random;
      mc.seed = splitmix64(seed ^ 0x5bd1e995ULL);
      fill_from_mu(r, solver_mu::pdd_solve(ctx.problem(tr.estimates), mc));
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rec.schemes.push_back(std::move(r));
  }
  if (cfg.baselines.no_irs) {
    const auto t0 = std::chrono::steady_clock::now();
    const TrainingOutcome& tr = ctx.training_for(first.set);
    SchemeResult r;
    r.scheme = "no_irs";
    r.nmse = tr.nmse;
    fill_from_mu(r, solver_mu::no_irs_baseline(ctx.problem(tr.estimates), cfg.mu));
    r.eop.reset();
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rec.schemes.push_back(std::move(r));
  }

  for (auto& r : rec.schemes) {
    for (double& x : r.rates) x *= factor;
    r.sum_rate = weighted_total(cfg, r.rates);
  }
  return rec;
}

std::vector<std::pair<std::string, double>> metrics_of(const SchemeResult& r, RunMode mode) {
  if (mode == RunMode::Estimate) return {{"nmse", r.nmse}};
  std::vector<std::pair<std::string, double>> m{{"rate", r.sum_rate}};
  if (r.eop) m.emplace_back("eop", *r.eop);
  m.emplace_back("nmse", r.nmse);
  m.emplace_back("outer_iterations", static_cast<double>(r.outer_iterations));
  m.emplace_back("inner_iterations", static_cast<double>(r.inner_iterations));
  m.emplace_back("converged", r.converged ? 1.0 : 0.0);
  return m;
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

std::vector<AggregateRow> run_sweep(const ExperimentConfig& cfg, RunMode mode) {
  cfg.validate();
  struct Point {
    ExperimentConfig cfg;
    std::optional<double> value;
  };
  std::vector<Point> points;
  if (cfg.sweep.parameter.empty()) {
    points.push_back({cfg, std::nullopt});
  } else {
    for (double v : cfg.sweep.values) points.push_back({with_parameter(cfg, cfg.sweep.parameter, v), v});
  }

  const std::size_t jobs = points.size() * cfg.trials;
  std::vector<TrialRecord> records(jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&]() {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const std::size_t p = j / cfg.trials, t = j % cfg.trials;
      try {
        records[j] = run_trial(points[p].cfg, points[p].value, trial_seed(cfg.master_seed, p, t), mode);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::size_t nthreads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min(nthreads, jobs);
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<AggregateRow> rows;
  const std::string param = cfg.sweep.parameter.empty() ? "none" : cfg.sweep.parameter;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const TrialRecord& first = records[p * cfg.trials];
    for (std::size_t s = 0; s < first.schemes.size(); ++s) {
      const auto names = metrics_of(first.schemes[s], mode);
      for (std::size_t m = 0; m < names.size(); ++m) {
        std::vector<double> xs;
        for (std::size_t t = 0; t < cfg.trials; ++t) {
          const auto vals = metrics_of(records[p * cfg.trials + t].schemes[s], mode);
          for (const auto& [name, val] : vals) {
            if (name == names[m].first) xs.push_back(val);
          }
        }
        const auto [mean, sd] = mean_std(xs);
        rows.push_back({param, points[p].value, first.schemes[s].scheme, names[m].first, mean, sd, xs.size()});
      }
    }
  }
  return rows;
}

}  // namespace irsopt::harness
