#include "irsopt/solver_su.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "irsopt/kernels.hpp"
#include "irsopt/numerics.hpp"
#include "irsopt/rate.hpp"

namespace irsopt::solver_su {

namespace {

constexpr double kMonotoneSlack = 1e-9;

bool decreased(double before, double after) {
  return after < before - kMonotoneSlack * std::max(1.0, std::abs(before));
}

void check_estimate(const ChannelEstimate& est) {
  if (est.stacked.rows() < 2 || est.stacked.cols() < 1) {
    throw std::invalid_argument("single-user estimate must have N >= 1 and M >= 1");
  }
  if (est.error_cov.rows() != est.stacked.rows() || est.error_cov.cols() != est.stacked.rows()) {
    throw std::invalid_argument("error covariance must be (N+1) x (N+1)");
  }
}

void check_power(double P, double sigma2) {
  if (!(P > 0.0)) throw std::invalid_argument("transmit power must be positive");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("noise power must be positive");
}

// Element-wise view of the ratio P x^H Phi x / (P x^H Vb x + sigma2) in one
// coordinate x_i with the rest fixed:
//   num(x) = phi |x|^2 + 2 Re(conj(x) s) + z,  den analogous with (vv, st, zt).
struct ElementTerms {
  double phi = 0.0, vv = 0.0;
  cdouble s, st;
  double z = 0.0, zt = 0.0;

  double ratio(cdouble x, double P, double sigma2) const {
    const double num = phi * std::norm(x) + 2.0 * (std::conj(x) * s).real() + z;
    const double den = vv * std::norm(x) + 2.0 * (std::conj(x) * st).real() + zt;
    return P * num / (P * den + sigma2);
  }
};

class RatioTracker {
 public:
  RatioTracker(const ChannelEstimate& est, CVector vt, double P, double sigma2)
      : phi_(est.stacked * est.stacked.adjoint()),
        vb_(est.error_cov),
        vt_(std::move(vt)),
        P_(P),
        sigma2_(sigma2) {
    refresh();
  }

  void refresh() {
    num_ = kernels::hermitian_form(phi_, vt_);
    den_ = kernels::hermitian_form(vb_, vt_);
  }

  double ratio() const { return P_ * num_ / (P_ * den_ + sigma2_); }
  const CVector& extended() const { return vt_; }
  CVector v() const { return vt_.tail(vt_.size() - 1); }
  Eigen::Index elements() const { return vt_.size() - 1; }

  // Terms for IRS element n (0-based, i.e. entry n+1 of [1; v]).
  ElementTerms terms(Eigen::Index n) const {
    const Eigen::Index i = n + 1;
    const cdouble x = vt_(i);
    ElementTerms t;
    t.phi = phi_(i, i).real();
    t.vv = vb_(i, i).real();
    t.s = kernels::dotc(kernels::column(phi_, i), kernels::view(vt_)) - t.phi * x;
    t.st = kernels::dotc(kernels::column(vb_, i), kernels::view(vt_)) - t.vv * x;
    t.z = num_ - t.phi * std::norm(x) - 2.0 * (std::conj(x) * t.s).real();
    t.zt = den_ - t.vv * std::norm(x) - 2.0 * (std::conj(x) * t.st).real();
    return t;
  }

  void set(Eigen::Index n, cdouble x, const ElementTerms& t) {
    vt_(n + 1) = x;
    num_ = t.phi * std::norm(x) + 2.0 * (std::conj(x) * t.s).real() + t.z;
    den_ = t.vv * std::norm(x) + 2.0 * (std::conj(x) * t.st).real() + t.zt;
  }

  double P() const { return P_; }
  double sigma2() const { return sigma2_; }

 private:
  CMatrix phi_;
  CMatrix vb_;
  CVector vt_;
  double P_;
  double sigma2_;
  double num_ = 0.0;
  double den_ = 0.0;
};

// Roots of a x^2 + b x + c = 0 (linear fallback when a is negligible).
std::vector<cdouble> quadratic_roots(cdouble a, cdouble b, cdouble c) {
  const double scale = std::abs(b) + std::abs(c);
  if (std::abs(a) <= 1e-14 * scale || std::abs(a) == 0.0) {
    if (std::abs(b) > 0.0) return {-c / b};
    return {};
  }
  const cdouble disc = std::sqrt(b * b - 4.0 * a * c);
  // Pick the sign that avoids cancellation.
  const cdouble q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc) : -0.5 * (b - disc);
  if (std::abs(q) == 0.0) return {cdouble(0.0)};
  return {q / a, c / q};
}

cdouble best_continuous(const ElementTerms& t, double P, double sigma2, cdouble current) {
  std::vector<cdouble> cand;
  cand.reserve(10);
  cand.emplace_back(0.0);

  // Interior stationary points.
  const cdouble a = P * (t.phi * std::conj(t.st) - t.vv * std::conj(t.s));
  const cdouble b = P * t.phi * t.zt + sigma2 * t.phi +
                    P * (t.s * std::conj(t.st) - t.st * std::conj(t.s)) - P * t.z * t.vv;
  const cdouble c = P * t.s * t.zt + sigma2 * t.s - P * t.z * t.st;
  for (const cdouble& r : quadratic_roots(a, b, c)) {
    if (std::isfinite(r.real()) && std::isfinite(r.imag()) && std::abs(r) < 1.0) cand.push_back(r);
  }

  // Unit-modulus stationary points: X sin(phase + psi) = T.
  const double A0 = P * (t.phi + t.z);
  const double B0 = P * (t.vv + t.zt) + sigma2;
  const cdouble W = 2.0 * P * (A0 * std::conj(t.st) - B0 * std::conj(t.s));
  const double T = 4.0 * P * P * (t.st * std::conj(t.s)).imag();
  const double X = std::abs(W);
  if (X > 0.0) {
    const double psi = std::arg(W);
    const double sn = T / X;
    if (std::abs(sn) <= 1.0) {
      const double base = std::asin(sn);
      cand.push_back(std::polar(1.0, base - psi));
      cand.push_back(std::polar(1.0, std::numbers::pi - base - psi));
    }
  } else {
    // Ratio is constant in the phase on the unit circle.
    cand.emplace_back(std::abs(current) > 0.0 ? current / std::abs(current) : cdouble(1.0));
  }
  if (std::abs(t.s) > 0.0) cand.push_back(std::polar(1.0, std::arg(t.s)));
  cand.push_back(current);

  cdouble best = cand.front();
  double best_val = t.ratio(best, P, sigma2);
  for (std::size_t k = 1; k < cand.size(); ++k) {
    const double val = t.ratio(cand[k], P, sigma2);
    if (val > best_val) {
      best_val = val;
      best = cand[k];
    }
  }
  return best;
}

struct BcdOutcome {
  std::size_t sweeps = 0;
  bool monotone = true;
};

template <typename Choose>
BcdOutcome run_bcd(RatioTracker& tr, double eps, std::size_t max_sweeps,
                   std::vector<double>& trace, Choose&& choose) {
  BcdOutcome out;
  double before = tr.ratio();
  trace.push_back(before);
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    for (Eigen::Index n = 0; n < tr.elements(); ++n) {
      const double prev = tr.ratio();
      const ElementTerms t = tr.terms(n);
      tr.set(n, choose(t, tr.extended()(n + 1)), t);
      const double now = tr.ratio();
      if (decreased(prev, now)) out.monotone = false;
      trace.push_back(now);
    }
    tr.refresh();  // drop accumulated rounding from the incremental updates
    ++out.sweeps;
    const double after = tr.ratio();
    if (after - before <= eps * std::abs(before)) break;
    before = after;
  }
  return out;
}

CVector initial_point(std::size_t n, const SuSolverConfig& cfg, const FeasibleSet& set) {
  const auto len = static_cast<Eigen::Index>(n);
  if (cfg.init == InitMode::Ones) return set.project(CVector::Ones(len));
  Rng rng(cfg.seed);
  CVector v(len);
  if (set.is_discrete()) {
    const auto pts = set.points();
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    for (Eigen::Index i = 0; i < len; ++i) v(i) = pts[pick(rng)];
    return v;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Eigen::Index i = 0; i < len; ++i) {
    const double r = std::sqrt(unit(rng));
    const double th = 2.0 * std::numbers::pi * unit(rng);
    v(i) = std::polar(r, th);
  }
  return set.project(v);
}

void finish(SuSolveReport& rep, const ChannelEstimate& est, double P, double sigma2) {
  rep.objective = su_objective(rep.v, est, P, sigma2);
  rep.rate = std::log2(1.0 + rep.objective);
  rep.eop = rate::eop(rep.v);
  const CVector h = rate::effective_channel(rep.v, est);
  if (kernels::squared_norm(h) > 0.0) {
    rep.w = mrt_precoder(h, P);
  } else {
    rep.w = CVector::Zero(h.size());
  }
}

// Penalized Dinkelbach-BSUM in noise-normalized units. Returns u (feasible).
void penalty_phase(SuSolveReport& rep, const ChannelEstimate& est_n, double P,
                   const FeasibleSet& set, const SuSolverConfig& cfg) {
  const double radius = cfg.ball_radius.value_or(static_cast<double>(est_n.elements()));
  CVector v = initial_point(est_n.elements(), cfg, set);
  CVector u = v;
  double beta = cfg.beta0;
  rep.converged = false;
  for (std::size_t outer = 0; outer < cfg.max_outer; ++outer) {
    ++rep.outer_iterations;
    double y = dinkelbach_y(v, u, est_n, P, 1.0, beta);
    std::vector<double> trace{y};
    for (std::size_t inner = 0; inner < cfg.max_inner; ++inner) {
      ++rep.inner_iterations;
      v = update_v_su(v, u, y, est_n, P, beta, radius, cfg.bisection_tol);
      u = set.project(v);
      const double y_new = dinkelbach_y(v, u, est_n, P, 1.0, beta);
      trace.push_back(y_new);
      if (decreased(y, y_new)) rep.monotone = false;
      const bool done = (y_new - y) <= cfg.eps_d * std::abs(y);
      y = y_new;
      if (done) break;
    }
    rep.y_trace.push_back(std::move(trace));
    const double viol = (v - u).cwiseAbs().maxCoeff();
    rep.violation_trace.push_back(viol);
    if (viol <= cfg.eps_p) {
      rep.converged = true;
      break;
    }
    beta *= cfg.shrink;
  }
  rep.v = u;
}

ChannelEstimate normalized(const ChannelEstimate& est, double sigma2) {
  return est.scaled(1.0 / std::sqrt(sigma2));
}

}  // namespace

void SuSolverConfig::validate() const {
  if (!(beta0 > 0.0)) throw std::invalid_argument("beta0 must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("penalty shrink c must be in (0, 1)");
  if (!(eps_d > 0.0 && eps_p > 0.0 && eps_c > 0.0 && bisection_tol > 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
  if (max_inner == 0 || max_outer == 0 || max_bcd_sweeps == 0) {
    throw std::invalid_argument("iteration limits must be >= 1");
  }
  if (ball_radius && !(*ball_radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
}

double su_objective(const CVector& v, const ChannelEstimate& est, double P, double sigma2) {
  const CVector h = rate::effective_channel(v, est);
  return P * kernels::squared_norm(h) / (P * rate::error_power(v, est) + sigma2);
}

CVector mrt_precoder(const CVector& h_eff, double P) {
  const double nrm2 = kernels::squared_norm(h_eff);
  if (!(nrm2 > 0.0)) throw std::invalid_argument("mrt_precoder: zero effective channel");
  if (P < 0.0) throw std::invalid_argument("mrt_precoder: negative power");
  return (std::sqrt(P) / std::sqrt(nrm2)) * h_eff;
}

double dinkelbach_y(const CVector& v, const CVector& u, const ChannelEstimate& est, double P,
                    double sigma2, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("dinkelbach_y: beta must be positive");
  const CVector h = rate::effective_channel(v, est);
  const double penalty = kernels::squared_norm(CVector(v - u)) / beta;
  return P * kernels::squared_norm(h) / (P * rate::error_power(v, est) + sigma2 + penalty);
}

double surrogate_objective(const CVector& v, const CVector& v_prev, const CVector& u, double y,
                           const ChannelEstimate& est, double P, double beta) {
  const CMatrix H = est.cascaded();
  const CVector g = H * (H.adjoint() * v_prev) + H * est.direct();
  const CMatrix R = est.R();
  const CVector r = est.r();
  const double quad = kernels::hermitian_form(R, v) + 2.0 * kernels::dotc(v, r).real();
  return y * P * quad + (y / beta) * kernels::squared_norm(CVector(v - u)) -
         2.0 * P * kernels::dotc(v, g).real();
}

CVector update_v_su(const CVector& v_prev, const CVector& u, double y, const ChannelEstimate& est,
                    double P, double beta, double radius, double bisection_tol) {
  if (!(beta > 0.0)) throw std::invalid_argument("update_v_su: beta must be positive");
  if (y < 0.0) throw std::invalid_argument("update_v_su: Dinkelbach variable must be >= 0");
  const auto n = static_cast<Eigen::Index>(est.elements());
  if (v_prev.size() != n || u.size() != n) throw std::invalid_argument("update_v_su: length mismatch");

  const CMatrix H = est.cascaded();
  const CVector g = P * (H * (H.adjoint() * v_prev) + H * est.direct());

  if (y == 0.0) {
    // Linear objective: the minimizer sits on the sphere along g.
    const double gn = std::sqrt(kernels::squared_norm(g));
    if (gn == 0.0) return u;
    return (radius / gn) * g;
  }

  const CMatrix S = y * P * est.R() + (y / beta) * CMatrix::Identity(n, n);
  const CVector rhs = (y / beta) * u + g - y * P * est.r();
  CVector v = numerics::hermitian_solve(S, rhs);
  if (std::sqrt(kernels::squared_norm(v)) <= radius) return v;

  // ||v(mu)||^2 = sum |c_i|^2 / (lambda_i + mu)^2 with S = U diag(lambda) U^H.
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(S);
  const RVector lam = eig.eigenvalues();
  const CVector c = eig.eigenvectors().adjoint() * rhs;
  auto norm_at = [&](double mu) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) acc += std::norm(c(i)) / ((lam(i) + mu) * (lam(i) + mu));
    return std::sqrt(acc);
  };
  double mu = numerics::bisection_root(norm_at, radius, 0.0, bisection_tol);
  v = numerics::hermitian_solve(S + mu * CMatrix::Identity(n, n), rhs);
  // Step toward larger mu until the ball constraint holds exactly in floating point.
  for (int k = 0; k < 60 && std::sqrt(kernels::squared_norm(v)) > radius + 1e-8; ++k) {
    mu += bisection_tol * std::max(1.0, mu);
    v = numerics::hermitian_solve(S + mu * CMatrix::Identity(n, n), rhs);
  }
  return v;
}

cdouble per_element_continuous(std::size_t n, const CVector& v, const ChannelEstimate& est,
                               double P, double sigma2) {
  check_estimate(est);
  check_power(P, sigma2);
  if (static_cast<std::size_t>(v.size()) != est.elements()) {
    throw std::invalid_argument("per_element_continuous: reflection vector length != N");
  }
  if (n >= est.elements()) throw std::out_of_range("per_element_continuous: element index");
  const RatioTracker tr(est, rate::extended(v), P, sigma2);
  const auto idx = static_cast<Eigen::Index>(n);
  return best_continuous(tr.terms(idx), P, sigma2, v(idx));
}

SuSolveReport solve_su_discrete(const ChannelEstimate& est, double P, double sigma2,
                                const FeasibleSet& set, const SuSolverConfig& config) {
  check_estimate(est);
  check_power(P, sigma2);
  config.validate();
  set.validate();
  if (!set.is_discrete()) throw std::invalid_argument("solve_su_discrete: feasible set must be discrete");

  const ChannelEstimate est_n = normalized(est, sigma2);
  SuSolveReport rep;
  penalty_phase(rep, est_n, P, set, config);

  const auto pts = set.points();
  RatioTracker tr(est_n, rate::extended(rep.v), P, 1.0);
  const auto choose = [&](const ElementTerms& t, cdouble current) {
    cdouble best = current;
    double best_val = t.ratio(current, P, 1.0);
    for (const cdouble& p : pts) {
      const double val = t.ratio(p, P, 1.0);
      if (val > best_val) {
        best_val = val;
        best = p;
      }
    }
    return best;
  };
  const BcdOutcome bcd = run_bcd(tr, config.eps_d, config.max_bcd_sweeps, rep.bcd_trace, choose);
  rep.bcd_sweeps = bcd.sweeps;
  rep.monotone = rep.monotone && bcd.monotone;
  rep.v = tr.v();
  finish(rep, est, P, sigma2);
  return rep;
}

SuSolveReport solve_su_continuous(const ChannelEstimate& est, double P, double sigma2,
                                  const SuSolverConfig& config) {
  check_estimate(est);
  check_power(P, sigma2);
  config.validate();

  const ChannelEstimate est_n = normalized(est, sigma2);
  SuSolveReport rep;
  penalty_phase(rep, est_n, P, FeasibleSet::continuous(), config);

  RatioTracker tr(est_n, rate::extended(rep.v), P, 1.0);
  const auto choose = [&](const ElementTerms& t, cdouble current) {
    return best_continuous(t, P, 1.0, current);
  };
  const BcdOutcome bcd = run_bcd(tr, config.eps_c, config.max_bcd_sweeps, rep.bcd_trace, choose);
  rep.bcd_sweeps = bcd.sweeps;
  rep.monotone = rep.monotone && bcd.monotone;
  rep.v = tr.v();
  finish(rep, est, P, sigma2);
  return rep;
}

SuSolveReport solve_su_random_bcd(const ChannelEstimate& est, double P, double sigma2,
                                  const FeasibleSet& set, const SuSolverConfig& config) {
  check_estimate(est);
  check_power(P, sigma2);
  config.validate();
  if (!set.is_discrete()) throw std::invalid_argument("solve_su_random_bcd: feasible set must be discrete");

  SuSolverConfig cfg = config;
  cfg.init = InitMode::Random;
  const ChannelEstimate est_n = normalized(est, sigma2);
  SuSolveReport rep;
  rep.converged = true;
  const auto pts = set.points();
  RatioTracker tr(est_n, rate::extended(initial_point(est.elements(), cfg, set)), P, 1.0);
  const auto choose = [&](const ElementTerms& t, cdouble current) {
    cdouble best = current;
    double best_val = t.ratio(current, P, 1.0);
    for (const cdouble& p : pts) {
      const double val = t.ratio(p, P, 1.0);
      if (val > best_val) {
        best_val = val;
        best = p;
      }
    }
    return best;
  };
  const BcdOutcome bcd = run_bcd(tr, cfg.eps_d, cfg.max_bcd_sweeps, rep.bcd_trace, choose);
  rep.bcd_sweeps = bcd.sweeps;
  rep.monotone = bcd.monotone;
  rep.v = tr.v();
  finish(rep, est, P, sigma2);
  return rep;
}

}  // namespace irsopt::solver_su
