#include <doctest.h>

#include <cmath>

#include "irsopt/rate.hpp"
#include "support/fixtures.hpp"

using namespace irsopt;
using namespace irsopt::rate;

namespace {

PrecoderSet precoders(std::vector<CVector> w, double noise = 1.0) {
  const std::size_t K = w.size();
  return {std::move(w), 10.0, std::vector<double>(K, 1.0), std::vector<double>(K, noise)};
}

// Samples a CSI error with iid CN(0, cov) columns.
CMatrix sample_error(const Eigen::LLT<CMatrix>& chol, Eigen::Index cols, Rng& rng) {
  return chol.matrixL() * fixtures::random_matrix(chol.matrixL().rows(), cols, rng);
}

}  // namespace

TEST_CASE("psi: no users interfering and no CSI error leaves the noise") {
  Rng rng(1);
  const auto est = fixtures::random_estimate(4, 3, rng, 1.0, 0.0);
  const auto ps = precoders({fixtures::random_vector(3, rng)}, 0.7);
  CHECK(psi(0, fixtures::random_vector(4, rng), ps, est) == doctest::Approx(0.7));
}

TEST_CASE("psi: isotropic error reduces to the i.i.d. expression") {
  Rng rng(2);
  const double dd = 0.3;
  auto est = fixtures::random_estimate(5, 2, rng, 1.0, 0.0);
  est.error_cov = dd * CMatrix::Identity(6, 6);
  const std::vector<CVector> w{fixtures::random_vector(2, rng), fixtures::random_vector(2, rng)};
  const auto ps = precoders(w, 0.2);
  const CVector v = fixtures::random_vector(5, rng);
  const double wpow = w[0].squaredNorm() + w[1].squaredNorm();
  const double leak = std::norm((est.stacked.adjoint() * extended(v)).dot(w[1]));
  const double expect = leak + dd * wpow + dd * wpow * v.squaredNorm() + 0.2;
  CHECK(psi(0, v, ps, est) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("psi: deterministic form equals the Monte-Carlo expectation") {
  Rng rng(3);
  const Eigen::Index N = 4, M = 2;
  for (int inst = 0; inst < 3; ++inst) {
    const auto est = fixtures::random_estimate(N, M, rng, 1.0, 0.5);
    const std::vector<CVector> w{fixtures::random_vector(M, rng), fixtures::random_vector(M, rng)};
    const auto ps = precoders(w, 0.1);
    const CVector v = fixtures::random_disc_vector(N, rng);
    const CVector vt = extended(v);
    Eigen::LLT<CMatrix> chol(est.error_cov);
    const std::size_t samples = 100000;
    double acc = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
      const CMatrix d = sample_error(chol, M, rng);
      const CVector e = d.adjoint() * vt;  // dH^H [1; v]
      for (const auto& wj : w) acc += std::norm(e.dot(wj));
    }
    const double leak = std::norm((est.stacked.adjoint() * vt).dot(w[1]));
    const double mc = acc / samples + leak + 0.1;
    CHECK(psi(0, v, ps, est) == doctest::Approx(mc).epsilon(0.02));
  }
}

TEST_CASE("psi is at least the noise for PSD error statistics") {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const auto est = fixtures::random_estimate(3, 2, rng);
    const auto ps = precoders({fixtures::random_vector(2, rng), fixtures::random_vector(2, rng)}, 0.4);
    CHECK(psi(1, fixtures::random_vector(3, rng), ps, est) >= 0.4);
  }
}

TEST_CASE("achievable_rate") {
  Rng rng(5);
  const auto est = fixtures::random_estimate(3, 2, rng);
  const CVector v = fixtures::random_vector(3, rng);
  CHECK(achievable_rate(0, v, precoders({CVector::Zero(2)}), est) == 0.0);

  // K = 1, no error, ||h|| = 1, MRT at P = 10, sigma^2 = 1 -> log2(11).
  training::ChannelEstimate unit;
  unit.stacked = CMatrix::Zero(2, 2);
  unit.stacked(0, 0) = 1.0;  // h_d = e_1, the IRS path is zero
  unit.error_cov = CMatrix::Zero(2, 2);
  CVector w = CVector::Zero(2);
  w(0) = std::sqrt(10.0);
  CHECK(achievable_rate(0, CVector::Zero(1), precoders({w}), unit) == doctest::Approx(std::log2(11.0)));

  // Doubling the error covariance strictly lowers the rate.
  const auto ps = precoders({fixtures::random_vector(2, rng)});
  const double base = achievable_rate(0, v, ps, est);
  CHECK(achievable_rate(0, v, ps, est.scaled(1.0).without_errors()) > base);
  training::ChannelEstimate worse{est.stacked, 2.0 * est.error_cov};
  CHECK(achievable_rate(0, v, ps, worse) < base);
  CHECK(base >= 0.0);
}

TEST_CASE("weighted_sum_rate") {
  Rng rng(6);
  const auto e1 = fixtures::random_estimate(3, 2, rng);
  const auto e2 = fixtures::random_estimate(3, 2, rng);
  const CVector v = fixtures::random_vector(3, rng);
  CHECK(weighted_sum_rate(v, precoders({CVector::Zero(2), CVector::Zero(2)}), {e1, e2}) == 0.0);
  const auto one = precoders({fixtures::random_vector(2, rng)});
  CHECK(weighted_sum_rate(v, one, {e1}) == achievable_rate(0, v, one, e1));

  // Symmetric pair: user 2's channel is user 1's with antennas swapped, precoders swapped too.
  CMatrix P(2, 2);
  P << 0, 1, 1, 0;
  const training::ChannelEstimate s2{e1.stacked * P, e1.error_cov};
  const CVector w1 = fixtures::random_vector(2, rng);
  const auto sym = precoders({w1, CVector(P * w1)});
  CHECK(achievable_rate(0, v, sym, e1) == doctest::Approx(achievable_rate(1, v, sym, s2)).epsilon(1e-12));
  CHECK_THROWS_AS(weighted_sum_rate(v, one, {e1, e2}), std::invalid_argument);
}

TEST_CASE("mmse_receiver and mse") {
  Rng rng(7);
  const auto est = fixtures::random_estimate(4, 3, rng);
  const CVector v = fixtures::random_vector(4, rng);
  const std::vector<CVector> w{fixtures::random_vector(3, rng), fixtures::random_vector(3, rng)};
  const auto ps = precoders(w, 0.5);

  CHECK(mmse_receiver(0, v, precoders({CVector::Zero(3), w[1]}, 0.5), est) == cdouble(0.0));
  CHECK(mse(0, 0.0, v, ps, est) == 1.0);

  const cdouble g = mmse_receiver(0, v, ps, est);
  const double e = mse(0, g, v, ps, est);
  for (int t = 0; t < 100; ++t) {
    const cdouble other = g + 0.5 * standard_complex_normal(rng);
    CHECK(mse(0, other, v, ps, est) >= e - 1e-14);
  }
  // e = 1 / (1 + SINR) and -log2 e = rate.
  CHECK(-std::log2(e) == doctest::Approx(achievable_rate(0, v, ps, est)).epsilon(1e-9));
  // q = 1/e: alpha (q e - ln q) = alpha (1 + ln e).
  const double q = 1.0 / e;
  CHECK(q * e - std::log(q) == doctest::Approx(1.0 + std::log(e)).epsilon(1e-12));
}

TEST_CASE("mmse_receiver: scalar closed form") {
  // Single real path h, single antenna, no error, w = sqrt(P) h / |h|.
  const double h = 0.8, P = 3.0, s2 = 0.5;
  training::ChannelEstimate est;
  est.stacked = CMatrix::Constant(2, 1, 0.0);
  est.stacked(0, 0) = h;
  est.error_cov = CMatrix::Zero(2, 2);
  const CVector w = CVector::Constant(1, std::sqrt(P));
  const PrecoderSet ps{{w}, P, {1.0}, {s2}};
  const cdouble g = mmse_receiver(0, CVector::Zero(1), ps, est);
  CHECK(g.real() == doctest::Approx(h * std::sqrt(P) / (P * h * h + s2)));
  CHECK(g.imag() == doctest::Approx(0.0));
  CHECK(mse(0, g, CVector::Zero(1), ps, est) == doctest::Approx(s2 / (P * h * h + s2)));
}

TEST_CASE("amplitude_profile reproduces the rate") {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const auto est = fixtures::random_estimate(5, 3, rng);
    const CVector v = fixtures::random_disc_vector(5, rng);
    const CVector w = fixtures::random_vector(3, rng);
    const auto ps = precoders({w}, 0.3);
    const std::size_t n = static_cast<std::size_t>(t % 5);
    const double theta = 0.37 * t;
    const auto prof = amplitude_profile(n, theta, v, w, est, 0.3);
    for (int i = 0; i <= 20; ++i) {
      const double a = i / 20.0;
      CVector vv = v;
      vv(static_cast<Eigen::Index>(n)) = std::polar(a, theta);
      CHECK(prof.rate(a) == doctest::Approx(achievable_rate(0, vv, ps, est)).epsilon(1e-9));
    }
  }
}

TEST_CASE("amplitude_profile: degenerate and error-free cases") {
  Rng rng(9);
  const auto est = fixtures::random_estimate(4, 2, rng);
  const CVector v = fixtures::random_disc_vector(4, rng);
  const auto zero = amplitude_profile(1, 0.2, v, CVector::Zero(2), est, 1.0);
  CHECK(zero.num.a2 == 0.0);
  CHECK(zero.num.a1 == 0.0);
  CHECK(zero.num.a0 == 0.0);

  const auto clean = est.without_errors();
  int checked = 0;
  for (int t = 0; t < 50; ++t) {
    const CVector w = fixtures::random_vector(2, rng);
    const auto prof = amplitude_profile(2, 1.1 * t, v, w, clean, 1.0);
    if (prof.num.a1 < 0.0) continue;
    ++checked;
    double prev = prof.rate(0.0);
    for (int i = 1; i <= 20; ++i) {
      const double r = prof.rate(i / 20.0);
      CHECK(r >= prev - 1e-12);
      prev = r;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("eop") {
  CHECK(eop(CVector::Zero(4)) == 100.0);
  CVector v = CVector::Ones(4);
  CHECK(eop(v) == 0.0);
  v(1) = 0.0;
  v(3) = 0.0;
  CHECK(eop(v) == 50.0);
}
