#include <doctest.h>

#include <numbers>

#include "irsopt/rate.hpp"
#include "irsopt/solver_su.hpp"
#include "support/fixtures.hpp"

using namespace irsopt;
using namespace irsopt::solver_su;

namespace {

// Best ratio over every vector of F_d^N.
double brute_force(const ChannelEstimate& est, double P, double sigma2, const FeasibleSet& set) {
  const auto pts = set.points();
  const auto N = static_cast<Eigen::Index>(est.elements());
  std::vector<std::size_t> idx(static_cast<std::size_t>(N), 0);
  double best = -1.0;
  CVector v(N);
  while (true) {
    for (Eigen::Index i = 0; i < N; ++i) v(i) = pts[idx[static_cast<std::size_t>(i)]];
    best = std::max(best, su_objective(v, est, P, sigma2));
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == pts.size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return best;
}

}  // namespace

TEST_CASE("mrt_precoder") {
  CVector e1 = CVector::Zero(3);
  e1(0) = 1.0;
  CHECK((mrt_precoder(e1, 4.0) - 2.0 * e1).norm() == 0.0);
  Rng rng(1);
  const CVector h = fixtures::random_vector(4, rng);
  const CVector w = mrt_precoder(h, 7.0);
  CHECK(w.squaredNorm() == doctest::Approx(7.0).epsilon(1e-14));
  const double gain = std::norm(h.dot(w));
  CHECK(gain == doctest::Approx(7.0 * h.squaredNorm()));
  for (int t = 0; t < 100; ++t) {
    CVector x = fixtures::random_vector(4, rng);
    x *= std::sqrt(7.0) / x.norm() * std::sqrt(std::uniform_real_distribution<double>(0, 1)(rng));
    CHECK(std::norm(h.dot(x)) <= gain * (1.0 + 1e-12));
  }
  CHECK_THROWS_AS(mrt_precoder(CVector::Zero(2), 1.0), std::invalid_argument);
}

TEST_CASE("dinkelbach_y") {
  Rng rng(2);
  const auto est = fixtures::random_estimate(4, 3, rng);
  const double P = 2.0, s2 = 0.5;
  const CVector zero = CVector::Zero(4);
  CHECK(dinkelbach_y(zero, zero, est, P, s2, 10.0) ==
        doctest::Approx(P * est.direct().squaredNorm() / (P * est.v11() + s2)));

  const CVector v = fixtures::random_disc_vector(4, rng);
  CHECK(dinkelbach_y(v, v, est, P, s2, 3.0) == doctest::Approx(su_objective(v, est, P, s2)));

  const CVector u = fixtures::random_disc_vector(4, rng);
  const double y1 = dinkelbach_y(v, u, est, P, s2, 1.0);
  const double y10 = dinkelbach_y(v, u, est, P, s2, 10.0);
  const double y6 = dinkelbach_y(v, u, est, P, s2, 1e6);
  CHECK(y1 < y10);
  CHECK(y10 < y6);
  CHECK(y6 == doctest::Approx(su_objective(v, est, P, s2)).epsilon(1e-5));
}

TEST_CASE("update_v_su: penalty-only recentering") {
  Rng rng(3);
  training::ChannelEstimate est;
  est.stacked = CMatrix::Zero(5, 2);
  est.error_cov = CMatrix::Zero(5, 5);
  const CVector u = fixtures::random_disc_vector(4, rng);
  CHECK((update_v_su(fixtures::random_vector(4, rng), u, 0.7, est, 1.0, 2.0, 4.0) - u).norm() < 1e-14);
}

TEST_CASE("update_v_su: surrogate optimality and the ball constraint") {
  Rng rng(4);
  for (int inst = 0; inst < 10; ++inst) {
    const auto est = fixtures::random_estimate(6, 3, rng);
    const double P = 1.5, beta = 0.8;
    const CVector vp = fixtures::random_disc_vector(6, rng);
    const CVector u = fixtures::random_disc_vector(6, rng);
    const double y = dinkelbach_y(vp, u, est, P, 1.0, beta);
    // Two radii: the literal N (typically slack) and a tight one.
    for (double radius : {6.0, 0.5}) {
      const CVector v = update_v_su(vp, u, y, est, P, beta, radius);
      CHECK(v.norm() <= radius + 1e-6);
      const double f = surrogate_objective(v, vp, u, y, est, P, beta);
      for (int t = 0; t < 100; ++t) {
        CVector x = fixtures::random_vector(6, rng);
        x *= radius * std::sqrt(std::uniform_real_distribution<double>(0, 1)(rng)) / x.norm();
        CHECK(f <= surrogate_objective(x, vp, u, y, est, P, beta) + 1e-9);
        // Small perturbations of v inside the ball do not improve either.
        CVector z = v + 1e-3 * fixtures::random_vector(6, rng);
        if (z.norm() > radius) z *= radius / z.norm();
        CHECK(f <= surrogate_objective(z, vp, u, y, est, P, beta) + 1e-9);
      }
      if (radius == 0.5) CHECK(v.norm() == doctest::Approx(0.5).epsilon(1e-7));
    }
  }
}

TEST_CASE("per_element_continuous: grid oracle") {
  Rng rng(5);
  for (int inst = 0; inst < 30; ++inst) {
    const auto est = fixtures::random_estimate(5, 2, rng, 1.0, 0.3);
    const CVector v = fixtures::random_disc_vector(5, rng);
    const std::size_t n = static_cast<std::size_t>(inst % 5);
    const cdouble x = per_element_continuous(n, v, est, 1.0, 1.0);
    CHECK(std::abs(x) <= 1.0 + 1e-12);
    CVector vv = v;
    vv(static_cast<Eigen::Index>(n)) = x;
    const double got = su_objective(vv, est, 1.0, 1.0);
    double grid = 0.0;
    for (int p = 0; p < 720; ++p) {
      for (int a = 0; a <= 200; ++a) {
        vv(static_cast<Eigen::Index>(n)) = std::polar(a / 200.0, 2 * std::numbers::pi * p / 720);
        grid = std::max(grid, su_objective(vv, est, 1.0, 1.0));
      }
    }
    // Never worse than a fine grid beyond its resolution, never better than the true optimum.
    CHECK(got >= grid * (1.0 - 1e-4));
    CHECK(got >= su_objective(v, est, 1.0, 1.0) - 1e-12);
  }
}

TEST_CASE("per_element_continuous: closed-form and degenerate cases") {
  // N = 1, no direct path, no error: full amplitude with the phase of the reflected path.
  training::ChannelEstimate est;
  est.stacked = CMatrix::Zero(2, 2);
  est.stacked(1, 0) = cdouble(0.3, 0.4);
  est.stacked(1, 1) = cdouble(-0.1, 0.2);
  est.error_cov = CMatrix::Zero(2, 2);
  const cdouble x = per_element_continuous(0, CVector::Zero(1), est, 1.0, 1.0);
  CHECK(std::abs(x) == doctest::Approx(1.0));

  training::ChannelEstimate zero{CMatrix::Zero(3, 2), CMatrix::Zero(3, 3)};
  CVector v(2);
  v << 0.5, cdouble(0.0, 0.7);
  CHECK(per_element_continuous(1, v, zero, 1.0, 1.0) == cdouble(0.0));
  CHECK_THROWS_AS(per_element_continuous(2, v, zero, 1.0, 1.0), std::out_of_range);
}

TEST_CASE("solve_su_discrete: invariants on random instances") {
  Rng rng(6);
  const FeasibleSet set = FeasibleSet::discrete(1, 2);
  for (int inst = 0; inst < 20; ++inst) {
    const auto est = fixtures::random_estimate(8, 3, rng, 1.0, 0.2);
    const auto rep = solve_su_discrete(est, 3.0, 1.0, set);
    CHECK(rep.converged);
    CHECK(rep.monotone);
    CHECK(rep.violation_trace.back() <= 1e-4);
    for (const auto& loop : rep.y_trace) {
      for (std::size_t i = 1; i < loop.size(); ++i) CHECK(loop[i] >= loop[i - 1] - 1e-9 * std::max(1.0, loop[i - 1]));
    }
    for (std::size_t i = 1; i < rep.bcd_trace.size(); ++i) {
      CHECK(rep.bcd_trace[i] >= rep.bcd_trace[i - 1] - 1e-9 * rep.bcd_trace[i - 1]);
    }
    for (Eigen::Index i = 0; i < rep.v.size(); ++i) CHECK(set.contains(rep.v(i)));
    CHECK(rep.w.squaredNorm() == doctest::Approx(3.0));
    CHECK(rep.objective == doctest::Approx(su_objective(rep.v, est, 3.0, 1.0)));
    CHECK(rep.rate == doctest::Approx(std::log2(1.0 + rep.objective)));
  }
}

TEST_CASE("solve_su_discrete: brute-force bound and coordinate-wise optimality at N = 4") {
  Rng rng(7);
  const FeasibleSet set = FeasibleSet::discrete(1, 1);
  const auto pts = set.points();
  for (int inst = 0; inst < 20; ++inst) {
    const auto est = fixtures::random_estimate(4, 2, rng, 1.0, 0.3);
    const double best = brute_force(est, 2.0, 1.0, set);
    const auto rep = solve_su_discrete(est, 2.0, 1.0, set);
    CHECK(rep.objective <= best * (1.0 + 1e-12));
    // The final BCD leaves no single-element move that helps.
    for (Eigen::Index n = 0; n < 4; ++n) {
      for (const cdouble& p : pts) {
        CVector v = rep.v;
        v(n) = p;
        CHECK(su_objective(v, est, 2.0, 1.0) <= rep.objective * (1.0 + 1e-9));
      }
    }
  }
}

TEST_CASE("solve_su_discrete: error-free strong LoS keeps every element on") {
  // Rank-one cascaded channel aligned with the direct path and no CSI error:
  // the denominator is constant, so switching elements off cannot help.
  Rng rng(8);
  const CVector a = fixtures::random_vector(3, rng);
  training::ChannelEstimate est;
  est.stacked = CMatrix(5, 3);
  est.stacked.row(0) = 2.0 * a.adjoint();
  for (Eigen::Index n = 1; n < 5; ++n) est.stacked.row(n) = std::polar(1.0, 0.3 * n) * a.adjoint();
  est.error_cov = CMatrix::Zero(5, 5);
  const FeasibleSet set = FeasibleSet::discrete(1, 4);
  const auto rep = solve_su_discrete(est, 1.0, 1.0, set);
  CHECK(rep.eop == 0.0);
  CHECK(rep.objective == doctest::Approx(brute_force(est, 1.0, 1.0, set)).epsilon(1e-9));
}

TEST_CASE("solve_su_discrete: deterministic") {
  Rng rng(9);
  const auto est = fixtures::random_estimate(6, 2, rng);
  SuSolverConfig cfg;
  const auto a = solve_su_discrete(est, 1.0, 1.0, FeasibleSet::discrete(1, 1), cfg);
  const auto b = solve_su_discrete(est, 1.0, 1.0, FeasibleSet::discrete(1, 1), cfg);
  CHECK(a.v == b.v);
  CHECK(a.y_trace == b.y_trace);
  cfg.init = InitMode::Random;
  cfg.seed = 17;
  const auto c = solve_su_discrete(est, 1.0, 1.0, FeasibleSet::discrete(1, 1), cfg);
  const auto d = solve_su_discrete(est, 1.0, 1.0, FeasibleSet::discrete(1, 1), cfg);
  CHECK(c.v == d.v);
}

TEST_CASE("solve_su_continuous") {
  Rng rng(10);
  int dominates = 0;
  const int trials = 20;
  for (int inst = 0; inst < trials; ++inst) {
    const auto est = fixtures::random_estimate(6, 3, rng, 1.0, 0.2);
    const auto rep = solve_su_continuous(est, 2.0, 1.0);
    CHECK(rep.converged);
    CHECK(rep.monotone);
    for (Eigen::Index i = 0; i < rep.v.size(); ++i) CHECK(std::abs(rep.v(i)) <= 1.0 + 1e-12);
    for (std::size_t i = 1; i < rep.bcd_trace.size(); ++i) {
      CHECK(rep.bcd_trace[i] >= rep.bcd_trace[i - 1] - 1e-9 * rep.bcd_trace[i - 1]);
    }
    const auto disc = solve_su_discrete(est, 2.0, 1.0, FeasibleSet::discrete(1, 2));
    if (rep.objective >= disc.objective * (1.0 - 1e-9)) ++dominates;
  }
  // F_d is a subset of F_c; both methods are local, so allow rare exceptions.
  CHECK(dominates >= trials * 9 / 10);
}

TEST_CASE("solve_su_random_bcd yields a feasible point") {
  Rng rng(11);
  const auto est = fixtures::random_estimate(6, 2, rng);
  SuSolverConfig cfg;
  cfg.seed = 3;
  const FeasibleSet set = FeasibleSet::discrete(1, 2);
  const auto rep = solve_su_random_bcd(est, 1.0, 1.0, set, cfg);
  CHECK(rep.monotone);
  for (Eigen::Index i = 0; i < rep.v.size(); ++i) CHECK(set.contains(rep.v(i)));
}

TEST_CASE("solver config validation") {
  SuSolverConfig cfg;
  cfg.shrink = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.eps_d = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  Rng rng(12);
  const auto est = fixtures::random_estimate(3, 2, rng);
  CHECK_THROWS_AS(solve_su_discrete(est, 1.0, 1.0, FeasibleSet::continuous()), std::invalid_argument);
  CHECK_THROWS_AS(solve_su_discrete(est, 1.0, 0.0, FeasibleSet::discrete(1, 1)), std::invalid_argument);
}
