#include "irsopt/channel.hpp"

#include <cmath>
#include <numbers>

namespace irsopt::channel {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

double distance(const Vec3& a, const Vec3& b) {
  return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

namespace {

Vec3 unit_direction(const Vec3& from, const Vec3& to) {
  const double d = distance(from, to);
  if (!(d > 0.0)) throw std::invalid_argument("geometry: coincident nodes");
  return {(to.x - from.x) / d, (to.y - from.y) / d, (to.z - from.z) / d};
}

bool finite(const Vec3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

}  // namespace

void Geometry::validate() const {
  if (ap_antennas == 0) throw std::invalid_argument("geometry: ap_antennas must be >= 1");
  if (irs_ny == 0 || irs_nz == 0) throw std::invalid_argument("geometry: empty IRS grid");
  if (!(spacing_wavelengths > 0.0)) throw std::invalid_argument("geometry: spacing must be > 0");
  if (!finite(ap_ref) || !finite(irs_ref)) throw std::invalid_argument("geometry: non-finite node");
  for (const auto& u : user_positions) {
    if (!finite(u)) throw std::invalid_argument("geometry: non-finite user position");
  }
}

double path_loss(double d, double alpha, const PathLossModel& model) {
  if (!(d > 0.0)) throw std::invalid_argument("path_loss: distance must be positive");
  return db_to_linear(model.c0_db) * std::pow(d / model.d0, -alpha);
}

CMatrix rician_channel(std::size_t rows, std::size_t cols, double rician_factor,
                       const CMatrix& los_component, double gain, Rng& rng) {
  if (rician_factor < 0.0) throw std::invalid_argument("rician_channel: negative Rician factor");
  if (!(gain > 0.0)) throw std::invalid_argument("rician_channel: gain must be positive");
  const auto r = static_cast<Eigen::Index>(rows);
  const auto c = static_cast<Eigen::Index>(cols);
  if (los_component.rows() != r || los_component.cols() != c) {
    throw std::invalid_argument("rician_channel: LoS component shape mismatch");
  }
  const double amp = std::sqrt(gain);
  if (rician_factor >= RicianSpec::kLosCap) return amp * los_component;

  const double los_w = std::sqrt(rician_factor / (1.0 + rician_factor));
  const double nlos_w = std::sqrt(1.0 / (1.0 + rician_factor));
  CMatrix out(r, c);
  // Column-major fill order fixes the RNG consumption order.
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) {
      out(i, j) = amp * (los_w * los_component(i, j) + nlos_w * standard_complex_normal(rng));
    }
  }
  return out;
}

CMatrix cascaded_channel(const CVector& h_r, const CMatrix& G) {
  if (h_r.size() != G.rows()) {
    throw std::invalid_argument("cascaded_channel: len(h_r) != rows(G)");
  }
  return h_r.conjugate().asDiagonal() * G;
}

CMatrix stack_channel(const CVector& h_d, const CMatrix& cascaded) {
  if (h_d.size() != cascaded.cols()) {
    throw std::invalid_argument("stack_channel: direct channel length != AP antennas");
  }
  CMatrix out(cascaded.rows() + 1, cascaded.cols());
  out.row(0) = h_d.adjoint();
  out.bottomRows(cascaded.rows()) = cascaded;
  return out;
}

CVector ula_steering(std::size_t antennas, const Vec3& direction, double spacing_wavelengths) {
  CVector a(static_cast<Eigen::Index>(antennas));
  for (std::size_t m = 0; m < antennas; ++m) {
    const double phase = -2.0 * std::numbers::pi * spacing_wavelengths *
                         static_cast<double>(m) * direction.x;
    a(static_cast<Eigen::Index>(m)) = std::polar(1.0, phase);
  }
  return a;
}

CVector upa_steering(std::size_t ny, std::size_t nz, const Vec3& direction,
                     double spacing_wavelengths) {
  CVector a(static_cast<Eigen::Index>(ny * nz));
  // Element index n = iz * ny + iy.
  for (std::size_t iz = 0; iz < nz; ++iz) {
    for (std::size_t iy = 0; iy < ny; ++iy) {
      const double phase = -2.0 * std::numbers::pi * spacing_wavelengths *
                           (static_cast<double>(iy) * direction.y +
                            static_cast<double>(iz) * direction.z);
      a(static_cast<Eigen::Index>(iz * ny + iy)) = std::polar(1.0, phase);
    }
  }
  return a;
}

ChannelSet generate_channels(const Geometry& geometry, const PathLossModel& model,
                             const RicianSpec& rician, Rng& rng) {
  geometry.validate();
  if (model.alpha_au <= 0.0 || model.alpha_ai <= 0.0 || model.alpha_iu <= 0.0) {
    throw std::invalid_argument("path loss exponents must be positive");
  }
  const std::size_t M = geometry.ap_antennas;
  const std::size_t N = geometry.irs_elements();
  const double spacing = geometry.spacing_wavelengths;

  ChannelSet set;
  {
    const Vec3 ap_to_irs = unit_direction(geometry.ap_ref, geometry.irs_ref);
    const Vec3 irs_to_ap = unit_direction(geometry.irs_ref, geometry.ap_ref);
    const CMatrix los = upa_steering(geometry.irs_ny, geometry.irs_nz, irs_to_ap, spacing) *
                        ula_steering(M, ap_to_irs, spacing).adjoint();
    const double gain = path_loss(distance(geometry.ap_ref, geometry.irs_ref), model.alpha_ai, model);
    set.G = rician_channel(N, M, rician.beta_ai, los, gain, rng);
  }

  for (const auto& user : geometry.user_positions) {
    const Vec3 ap_to_user = unit_direction(geometry.ap_ref, user);
    const CMatrix los_d = ula_steering(M, ap_to_user, spacing);
    const double gain_d = path_loss(distance(geometry.ap_ref, user), model.alpha_au, model);
    CVector h_d = rician_channel(M, 1, rician.beta_au, los_d, gain_d, rng).col(0);

    const Vec3 irs_to_user = unit_direction(geometry.irs_ref, user);
    const CMatrix los_r = upa_steering(geometry.irs_ny, geometry.irs_nz, irs_to_user, spacing);
    const double gain_r = path_loss(distance(geometry.irs_ref, user), model.alpha_iu, model);
    CVector h_r = rician_channel(N, 1, rician.beta_iu, los_r, gain_r, rng).col(0);

    CMatrix cascaded = cascaded_channel(h_r, set.G);
    set.stacked.push_back(stack_channel(h_d, cascaded));
    set.cascaded.push_back(std::move(cascaded));
    set.h_d.push_back(std::move(h_d));
    set.h_r.push_back(std::move(h_r));
  }
  return set;
}

std::vector<Vec3> draw_user_cluster(std::size_t count, const Vec3& center, double radius,
                                    Rng& rng) {
  if (radius < 0.0) throw std::invalid_argument("user cluster radius must be >= 0");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec3> users;
  users.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double r = radius * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    users.push_back({center.x + r * std::cos(phi), center.y + r * std::sin(phi), center.z});
  }
  return users;
}

}  // namespace irsopt::channel
