#include <doctest.h>

#include <cmath>

#include "irsopt/channel.hpp"
#include "support/fixtures.hpp"

using namespace irsopt;
using namespace irsopt::channel;

TEST_CASE("unit conversions") {
  CHECK(db_to_linear(-30.0) == doctest::Approx(1e-3));
  CHECK(dbm_to_mw(26.0) == doctest::Approx(398.1071705534973));
  CHECK(linear_to_db(100.0) == doctest::Approx(20.0));
}

TEST_CASE("path_loss") {
  const PathLossModel m;
  CHECK(linear_to_db(path_loss(1.0, 3.6, m)) == doctest::Approx(-30.0));
  CHECK(linear_to_db(path_loss(1.0, 2.2, m)) == doctest::Approx(-30.0));
  CHECK(linear_to_db(path_loss(10.0, 3.6, m)) == doctest::Approx(-66.0));
  CHECK(linear_to_db(path_loss(45.0, 2.2, m)) == doctest::Approx(-30.0 - 22.0 * std::log10(45.0)));
  CHECK(linear_to_db(path_loss(45.0, 2.2, m)) == doctest::Approx(-66.37).epsilon(1e-4));
  CHECK_THROWS_AS(path_loss(0.0, 2.0, m), std::invalid_argument);
  CHECK_THROWS_AS(path_loss(-1.0, 2.0, m), std::invalid_argument);
}

TEST_CASE("rician_channel: pure LoS limit is exact and draws nothing") {
  Rng rng(1), untouched(1);
  const CMatrix los = ula_steering(4, {0.6, 0.8, 0.0}, 0.5);
  const CMatrix h = rician_channel(4, 1, RicianSpec::kLosCap, los, 2.5e-3, rng);
  CHECK((h - std::sqrt(2.5e-3) * los).norm() == 0.0);
  CHECK(rng() == untouched());
}

TEST_CASE("rician_channel: Rayleigh variance and Rician mean (Monte Carlo)") {
  Rng rng(2);
  const double gain = 4e-6;
  const std::size_t n = 100000;
  const CMatrix los = CMatrix::Ones(static_cast<Eigen::Index>(n), 1);
  const CMatrix rayleigh = rician_channel(n, 1, 0.0, los, gain, rng);
  CHECK(rayleigh.squaredNorm() / static_cast<double>(n) == doctest::Approx(gain).epsilon(0.03));

  const CMatrix rician = rician_channel(n, 1, 1.0, los, gain, rng);
  const cdouble mean = rician.sum() / static_cast<double>(n);
  CHECK(std::abs(mean - std::sqrt(gain / 2.0)) <= 0.03 * std::sqrt(gain / 2.0));
}

TEST_CASE("rician_channel: argument checks") {
  Rng rng(3);
  const CMatrix los = CMatrix::Ones(2, 2);
  CHECK_THROWS_AS(rician_channel(2, 2, -1.0, los, 1.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(rician_channel(2, 2, 1.0, los, 0.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(rician_channel(3, 2, 1.0, los, 1.0, rng), std::invalid_argument);
}

TEST_CASE("cascaded_channel") {
  CMatrix g(1, 3);
  g << cdouble(1, 2), cdouble(-1, 0.5), cdouble(0, 3);
  CHECK(cascaded_channel(CVector::Ones(1), g) == g);
  Rng rng(4);
  const CMatrix G = fixtures::random_matrix(3, 2, rng);
  CHECK(cascaded_channel(CVector::Zero(3), G).norm() == 0.0);

  // v^H H + h_d^H equals the reflected sum h_r^H diag(conj(v))^H G expanded element by element.
  const CVector hr = fixtures::random_vector(3, rng);
  const CVector v = fixtures::random_vector(3, rng);
  const CMatrix H = cascaded_channel(hr, G);
  for (Eigen::Index m = 0; m < 2; ++m) {
    cdouble direct = 0.0;
    for (Eigen::Index n = 0; n < 3; ++n) direct += std::conj(hr(n)) * std::conj(v(n)) * G(n, m);
    CHECK(std::abs((v.adjoint() * H)(0, m) - direct) <= 1e-12);
  }
  CHECK_THROWS_AS(cascaded_channel(CVector::Ones(2), G), std::invalid_argument);
}

TEST_CASE("steering vectors have unit-modulus entries and the expected phase ramp") {
  const Vec3 dir{0.6, 0.0, 0.8};
  const CVector a = ula_steering(5, dir, 0.5);
  for (Eigen::Index m = 0; m < 5; ++m) {
    CHECK(std::abs(a(m)) == doctest::Approx(1.0));
    CHECK(std::abs(a(m) - std::polar(1.0, -M_PI * 0.6 * m)) < 1e-12);
  }
  const CVector b = upa_steering(4, 5, {0.0, 0.6, 0.8}, 0.5);
  CHECK(b.size() == 20);
  // Element n = iz * ny + iy.
  CHECK(std::abs(b(1 * 4 + 2) - std::polar(1.0, -M_PI * (2 * 0.6 + 1 * 0.8))) < 1e-12);
}

TEST_CASE("generate_channels: shapes, identities, determinism") {
  Geometry geo;
  Rng draw(9);
  geo.user_positions = draw_user_cluster(3, {3.0, 45.0, 0.0}, 3.0, draw);
  Rng r1(42), r2(42);
  const ChannelSet a = generate_channels(geo, PathLossModel{}, RicianSpec{}, r1);
  const ChannelSet b = generate_channels(geo, PathLossModel{}, RicianSpec{}, r2);
  CHECK(a.users() == 3);
  CHECK(a.G.rows() == 20);
  CHECK(a.G.cols() == 4);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(a.cascaded[k] == a.h_r[k].conjugate().asDiagonal() * a.G);
    CHECK(a.stacked[k].row(0) == a.h_d[k].adjoint());
    CHECK(a.stacked[k].bottomRows(20) == a.cascaded[k]);
    CHECK(a.stacked[k] == b.stacked[k]);
  }
  CHECK(a.G == b.G);
}

TEST_CASE("generate_channels: deterministic LoS gains match independent geometry") {
  Geometry geo;
  geo.user_positions = {{3.0, 45.0, 0.0}};
  RicianSpec los;
  los.beta_au = los.beta_ai = los.beta_iu = RicianSpec::kLosCap;
  const PathLossModel m;
  Rng rng(1);
  const ChannelSet s = generate_channels(geo, m, los, rng);
  const double d_ai = std::sqrt(2.0 * 2.0 + 45.0 * 45.0 + 2.0 * 2.0);
  const double g_ai = 1e-3 * std::pow(d_ai, -2.2);
  // Every G entry has modulus sqrt(gain) under pure LoS.
  CHECK(s.G.cwiseAbs2().sum() / 80.0 == doctest::Approx(g_ai).epsilon(1e-12));
  const double d_au = std::sqrt(1.0 + 45.0 * 45.0);
  CHECK(s.h_d[0].squaredNorm() == doctest::Approx(4.0 * 1e-3 * std::pow(d_au, -3.6)).epsilon(1e-12));
}

TEST_CASE("generate_channels: user at reference distance recovers M * C0") {
  Geometry geo;
  geo.ap_ref = {0.0, 0.0, 0.0};
  geo.user_positions = {{0.0, 1.0, 0.0}};
  RicianSpec los;
  los.beta_au = los.beta_ai = los.beta_iu = RicianSpec::kLosCap;
  Rng rng(5);
  const ChannelSet s = generate_channels(geo, PathLossModel{}, los, rng);
  CHECK(s.h_d[0].squaredNorm() == doctest::Approx(4.0 * 1e-3).epsilon(1e-12));

  // Doubling C0 (+3.0103 dB) doubles the deterministic gain.
  PathLossModel twice;
  twice.c0_db = -30.0 + linear_to_db(2.0);
  Rng rng2(5);
  const ChannelSet s2 = generate_channels(geo, twice, los, rng2);
  CHECK(s2.h_d[0].squaredNorm() == doctest::Approx(2.0 * s.h_d[0].squaredNorm()).epsilon(1e-12));
}

TEST_CASE("draw_user_cluster stays in the disc") {
  Rng rng(10);
  const Vec3 c{3.0, 45.0, 0.0};
  for (const auto& u : draw_user_cluster(500, c, 3.0, rng)) {
    CHECK(std::hypot(u.x - c.x, u.y - c.y) <= 3.0 + 1e-12);
    CHECK(u.z == 0.0);
  }
  CHECK_THROWS_AS(draw_user_cluster(1, c, -1.0, rng), std::invalid_argument);
}
