#include "irsopt/solver_mu.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "irsopt/kernels.hpp"
#include "irsopt/numerics.hpp"
#include "irsopt/rate.hpp"

namespace irsopt::solver_mu {

namespace {

constexpr double kMonotoneSlack = 1e-9;

bool increased(double before, double after) {
  return after > before + kMonotoneSlack * std::max(1.0, std::abs(before));
}

// What every block update needs about user k at the current v: the effective
// channel h_k = H_bar_k^H [1; v] and the CSI-error power [1; v]^H V_bar_k [1; v].
struct UserView {
  CVector h;
  double err = 0.0;
};

std::vector<UserView> user_views(const CVector& v, const MuProblem& prob) {
  const CVector vt = rate::extended(v);
  std::vector<UserView> out(prob.users());
  for (std::size_t k = 0; k < prob.users(); ++k) {
    const auto& est = prob.estimates[k];
    out[k].h = est.stacked.adjoint() * vt;
    out[k].err = kernels::hermitian_form(est.error_cov, vt);
  }
  return out;
}

double total_power(const std::vector<CVector>& w) {
  double p = 0.0;
  for (const auto& wk : w) p += kernels::squared_norm(wk);
  return p;
}

// Received power T_k = sum_j |h_k^H w_j|^2 + err_k sum_j ||w_j||^2 + sigma_k^2
// and the desired term h_k^H w_k.
struct Received {
  double total;
  cdouble desired;
};

Received received(std::size_t k, const UserView& uv, const std::vector<CVector>& w,
                  double wpow, double noise) {
  Received r{uv.err * wpow + noise, cdouble(0.0)};
  for (std::size_t j = 0; j < w.size(); ++j) {
    const cdouble s = kernels::dotc(uv.h, w[j]);
    r.total += std::norm(s);
    if (j == k) r.desired = s;
  }
  return r;
}

std::vector<double> mses_from_views(const std::vector<UserView>& views,
                                    const std::vector<CVector>& w,
                                    const std::vector<cdouble>& g, const MuProblem& prob) {
  const double wpow = total_power(w);
  std::vector<double> e(prob.users());
  for (std::size_t k = 0; k < prob.users(); ++k) {
    const Received r = received(k, views[k], w, wpow, prob.noise[k]);
    e[k] = std::norm(g[k]) * r.total - 2.0 * (std::conj(g[k]) * r.desired).real() + 1.0;
  }
  return e;
}

std::vector<cdouble> receivers_from_views(const std::vector<UserView>& views,
                                          const std::vector<CVector>& w, const MuProblem& prob) {
  const double wpow = total_power(w);
  std::vector<cdouble> g(prob.users());
  for (std::size_t k = 0; k < prob.users(); ++k) {
    const Received r = received(k, views[k], w, wpow, prob.noise[k]);
    g[k] = r.desired / r.total;
  }
  return g;
}

std::vector<CVector> precoders_from_views(const std::vector<UserView>& views,
                                          const std::vector<cdouble>& g,
                                          const std::vector<double>& q, const MuProblem& prob) {
  const std::size_t K = prob.users();
  const auto M = static_cast<Eigen::Index>(prob.antennas());
  CMatrix B = CMatrix::Zero(M, M);
  for (std::size_t k = 0; k < K; ++k) {
    const double c = prob.weights[k] * q[k] * std::norm(g[k]);
    B.noalias() += c * (views[k].h * views[k].h.adjoint());
    B.diagonal().array() += c * views[k].err;
  }
  B = 0.5 * (B + B.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(B);
  const RVector lam = eig.eigenvalues().cwiseMax(0.0);
  const CMatrix& U = eig.eigenvectors();
  const double lam_max = lam.size() ? lam.maxCoeff() : 0.0;
  const double null_cut = 1e-12 * std::max(lam_max, 1e-300);

  // Coefficients of the right-hand sides in the eigenbasis; directions B cannot
  // see carry no objective value and are dropped.
  std::vector<CVector> coef(K);
  for (std::size_t j = 0; j < K; ++j) {
    coef[j] = U.adjoint() * (prob.weights[j] * q[j] * g[j] * views[j].h);
    for (Eigen::Index i = 0; i < M; ++i) {
      if (lam(i) <= null_cut) coef[j](i) = 0.0;
    }
  }
  auto power_at = [&](double nu) {
    double p = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
      for (Eigen::Index i = 0; i < M; ++i) {
        if (coef[j](i) == 0.0) continue;
        const double d = lam(i) + nu;
        p += std::norm(coef[j](i)) / (d * d);
      }
    }
    return p;
  };
  const double P = prob.power;
  double nu = 0.0;
  if (power_at(0.0) > P) {
    nu = numerics::bisection_root(power_at, P, 0.0, 1e-13 * P);
    for (int k = 0; k < 200 && power_at(nu) > P; ++k) nu = std::nextafter(nu, 1e300) * (1.0 + 1e-15);
  }
  std::vector<CVector> w(K);
  for (std::size_t j = 0; j < K; ++j) {
    CVector scaled = coef[j];
    for (Eigen::Index i = 0; i < M; ++i) {
      if (scaled(i) != 0.0) scaled(i) /= (lam(i) + nu);
    }
    w[j] = U * scaled;
  }
  return w;
}

double wmmse_sum(const std::vector<double>& e, const std::vector<double>& q, const MuProblem& prob) {
  double acc = 0.0;
  for (std::size_t k = 0; k < prob.users(); ++k) {
    acc += prob.weights[k] * (q[k] * e[k] - std::log(q[k]));
  }
  return acc;
}

double penalty_term(const CVector& v, const CVector& u, const CVector& dual, double beta) {
  return kernels::squared_norm(CVector(v - u + beta * dual)) / (2.0 * beta);
}

MuProblem normalized(const MuProblem& prob, bool robust) {
  MuProblem out = prob;
  for (std::size_t k = 0; k < prob.users(); ++k) {
    ChannelEstimate e = prob.estimates[k].scaled(1.0 / std::sqrt(prob.noise[k]));
    out.estimates[k] = robust ? e : e.without_errors();
    out.noise[k] = 1.0;
  }
  return out;
}

CVector initial_v(std::size_t n, const MuSolverConfig& cfg) {
  const auto len = static_cast<Eigen::Index>(n);
  if (cfg.init == InitMode::Ones) return cfg.set.project(CVector::Ones(len));
  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CVector v(len);
  for (Eigen::Index i = 0; i < len; ++i) {
    v(i) = std::polar(std::sqrt(unit(rng)), 2.0 * std::numbers::pi * unit(rng));
  }
  return cfg.set.project(v);
}

std::vector<CVector> equal_power_mrt(const std::vector<UserView>& views, double P) {
  const double share = P / static_cast<double>(views.size());
  std::vector<CVector> w;
  for (const auto& uv : views) {
    const double n2 = kernels::squared_norm(uv.h);
    w.push_back(n2 > 0.0 ? CVector(std::sqrt(share / n2) * uv.h) : CVector::Zero(uv.h.size()));
  }
  return w;
}

// Alternating (g, q, w) at fixed v until the WMMSE objective settles.
void wmmse_at_fixed_v(const CVector& v, std::vector<CVector>& w, const MuProblem& opt,
                      std::size_t iterations, double eps) {
  const auto views = user_views(v, opt);
  double prev = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    const auto g = receivers_from_views(views, w, opt);
    const auto q = update_weights(mses_from_views(views, w, g, opt));
    w = precoders_from_views(views, g, q, opt);
    const auto e = mses_from_views(views, w, g, opt);
    const double cur = wmmse_sum(e, q, opt);
    if (it > 0 && std::abs(prev - cur) <= eps * std::max(1.0, std::abs(prev))) break;
    prev = cur;
  }
}

void evaluate(MuSolveReport& rep, const MuProblem& prob) {
  rate::PrecoderSet ps{rep.w, prob.power, prob.weights, prob.noise};
  rep.rates.assign(prob.users(), 0.0);
  rep.sum_rate = 0.0;
  rep.wmmse_rate = 0.0;
  for (std::size_t k = 0; k < prob.users(); ++k) {
    rep.rates[k] = rate::achievable_rate(k, rep.v, ps, prob.estimates[k]);
    rep.sum_rate += prob.weights[k] * rep.rates[k];
    const cdouble g = rate::mmse_receiver(k, rep.v, ps, prob.estimates[k]);
    const double e = rate::mse(k, g, rep.v, ps, prob.estimates[k]);
    rep.wmmse_rate -= prob.weights[k] * std::log2(e);
  }
  rep.eop = rate::eop(rep.v);
}

}  // namespace

void MuSolverConfig::validate() const {
  if (!(beta0 > 0.0)) throw std::invalid_argument("beta0 must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("penalty shrink c must be in (0, 1)");
  if (!(eps_in > 0.0 && eps_out > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (max_inner == 0 || max_outer == 0) throw std::invalid_argument("iteration limits must be >= 1");
  set.validate();
}

void MuProblem::validate() const {
  if (estimates.empty()) throw std::invalid_argument("MuProblem: K >= 1 users required");
  if (noise.size() != users() || weights.size() != users()) {
    throw std::invalid_argument("MuProblem: noise and weights need one entry per user");
  }
  if (!(power > 0.0)) throw std::invalid_argument("MuProblem: transmit power must be positive");
  for (std::size_t k = 0; k < users(); ++k) {
    const auto& e = estimates[k];
    if (e.elements() != elements() || e.antennas() != antennas()) {
      throw std::invalid_argument("MuProblem: all users must share N and M");
    }
    if (e.error_cov.rows() != e.stacked.rows() || e.error_cov.cols() != e.stacked.rows()) {
      throw std::invalid_argument("MuProblem: error covariance must be (N+1) x (N+1)");
    }
    if (!(noise[k] > 0.0)) throw std::invalid_argument("MuProblem: noise power must be positive");
    if (weights[k] < 0.0) throw std::invalid_argument("MuProblem: weights must be >= 0");
  }
}

std::vector<cdouble> update_receivers(const CVector& v, const std::vector<CVector>& w,
                                      const MuProblem& prob) {
  return receivers_from_views(user_views(v, prob), w, prob);
}

std::vector<double> mses(const CVector& v, const std::vector<CVector>& w,
                         const std::vector<cdouble>& g, const MuProblem& prob) {
  return mses_from_views(user_views(v, prob), w, g, prob);
}

std::vector<double> update_weights(const std::vector<double>& e) {
  std::vector<double> q(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (!(e[k] > 0.0)) throw NumericalError("update_weights: MSE must be positive");
    q[k] = 1.0 / e[k];
  }
  return q;
}

std::vector<CVector> update_precoders(const CVector& v, const std::vector<cdouble>& g,
                                      const std::vector<double>& q, const MuProblem& prob) {
  return precoders_from_views(user_views(v, prob), g, q, prob);
}

CVector update_v_mu(const std::vector<cdouble>& g, const std::vector<double>& q,
                    const std::vector<CVector>& w, const MuProblem& prob, const CVector& u,
                    const CVector& dual, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("update_v_mu: beta must be positive");
  const auto N = static_cast<Eigen::Index>(prob.elements());
  const double wpow = total_power(w);
  CMatrix C = CMatrix::Identity(N, N) / (2.0 * beta);
  CVector d = (u - beta * dual) / (2.0 * beta);
  for (std::size_t k = 0; k < prob.users(); ++k) {
    const auto& est = prob.estimates[k];
    const CMatrix H = est.cascaded();
    const CVector hd = est.direct();
    const double aqg = prob.weights[k] * q[k] * std::norm(g[k]);
    for (std::size_t j = 0; j < w.size(); ++j) {
      const CVector a = H * w[j];
      const cdouble b = kernels::dotc(hd, w[j]);  // h_d^H w_j
      C.noalias() += aqg * (a * a.adjoint());
      d -= (aqg * std::conj(b)) * a;
      if (j == k) d += (prob.weights[k] * q[k] * std::conj(g[k])) * a;
    }
    C.noalias() += (aqg * wpow) * est.R();
    d -= (aqg * wpow) * est.r();
  }
  C = 0.5 * (C + C.adjoint());
  return numerics::hermitian_solve(C, d);
}

double v_subproblem_objective(const CVector& v, const std::vector<cdouble>& g,
                              const std::vector<double>& q, const std::vector<CVector>& w,
                              const MuProblem& prob, const CVector& u, const CVector& dual,
                              double beta) {
  const auto e = mses(v, w, g, prob);
  double acc = penalty_term(v, u, dual, beta);
  for (std::size_t k = 0; k < prob.users(); ++k) acc += prob.weights[k] * q[k] * e[k];
  return acc;
}

CVector update_u_mu(const CVector& v, const CVector& dual, double beta, const FeasibleSet& set) {
  return set.project(CVector(v + beta * dual));
}

CVector dual_update(const CVector& dual, const CVector& v, const CVector& u, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("dual_update: beta must be positive");
  return dual + (v - u) / beta;
}

double al_objective(const CVector& v, const CVector& u, const CVector& dual, double beta,
                    const std::vector<cdouble>& g, const std::vector<double>& q,
                    const std::vector<CVector>& w, const MuProblem& prob) {
  return wmmse_sum(mses(v, w, g, prob), q, prob) + penalty_term(v, u, dual, beta);
}

MuSolveReport pdd_solve(const MuProblem& prob, const MuSolverConfig& config) {
  prob.validate();
  config.validate();
  const MuProblem opt = normalized(prob, config.robust);

  MuSolveReport rep;
  CVector v = initial_v(prob.elements(), config);
  CVector u = v;
  CVector dual = CVector::Zero(v.size());
  double beta = config.beta0;

  auto views = user_views(v, opt);
  std::vector<CVector> w = equal_power_mrt(views, opt.power);
  std::vector<cdouble> g = receivers_from_views(views, w, opt);
  std::vector<double> q = update_weights(mses_from_views(views, w, g, opt));

  auto al = [&]() {
    return wmmse_sum(mses_from_views(views, w, g, opt), q, opt) + penalty_term(v, u, dual, beta);
  };

  for (std::size_t outer = 0; outer < config.max_outer; ++outer) {
    ++rep.outer_iterations;
    std::vector<double> trace{al()};
    for (std::size_t inner = 0; inner < config.max_inner; ++inner) {
      ++rep.inner_iterations;
      const double start = trace.back();
      auto record = [&]() {
        const double val = al();
        if (increased(trace.back(), val)) rep.monotone = false;
        trace.push_back(val);
      };
      g = receivers_from_views(views, w, opt);
      record();
      q = update_weights(mses_from_views(views, w, g, opt));
      record();
      w = precoders_from_views(views, g, q, opt);
      record();
      v = update_v_mu(g, q, w, opt, u, dual, beta);
      views = user_views(v, opt);
      record();
      u = update_u_mu(v, dual, beta, config.set);
      record();
      if (start - trace.back() <= config.eps_in * std::abs(start)) break;
    }
    rep.al_trace.push_back(std::move(trace));
    const double viol = (v - u).cwiseAbs().maxCoeff();
    rep.violation_trace.push_back(viol);
    if (viol <= config.eps_out) {
      rep.converged = true;
      break;
    }
    dual = dual_update(dual, v, u, beta);
    beta *= config.shrink;
  }

  // Report the feasible point and refit the precoders to it.
  rep.v = u;
  wmmse_at_fixed_v(rep.v, w, opt, config.polish_iterations, config.eps_in);
  rep.w = w;
  evaluate(rep, prob);
  return rep;
}

MuSolveReport no_irs_baseline(const MuProblem& prob, const MuSolverConfig& config) {
  prob.validate();
  config.validate();
  const MuProblem opt = normalized(prob, config.robust);
  MuSolveReport rep;
  rep.v = CVector::Zero(static_cast<Eigen::Index>(prob.elements()));
  const auto views = user_views(rep.v, opt);
  if (prob.users() == 1) {
    const double n2 = kernels::squared_norm(views[0].h);
    rep.w = {n2 > 0.0 ? CVector(std::sqrt(opt.power / n2) * views[0].h)
                      : CVector::Zero(views[0].h.size())};
  } else {
    std::vector<CVector> w = equal_power_mrt(views, opt.power);
    wmmse_at_fixed_v(rep.v, w, opt, config.max_inner, config.eps_in);
    rep.w = w;
  }
  rep.converged = true;
  evaluate(rep, prob);
  return rep;
}

}  // namespace irsopt::solver_mu
