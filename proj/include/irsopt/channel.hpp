#pragma once

#include <cstddef>
#include <vector>

#include "irsopt/types.hpp"

namespace irsopt::channel {

// Centralized unit conversion. Internal power unit is the milliwatt.
double db_to_linear(double db);
double linear_to_db(double lin);
inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance(const Vec3& a, const Vec3& b);

// Node placement. The AP is a ULA along +x starting at ap_ref; the IRS is a
// UPA in the y-z plane with its reference element at irs_ref, irs_ny columns
// along +y and irs_nz rows along +z.
struct Geometry {
  Vec3 ap_ref{2.0, 0.0, 0.0};
  Vec3 irs_ref{0.0, 45.0, 2.0};
  std::vector<Vec3> user_positions;
  std::size_t ap_antennas = 4;
  std::size_t irs_ny = 4;
  std::size_t irs_nz = 5;
  double spacing_wavelengths = 0.5;

  std::size_t irs_elements() const { return irs_ny * irs_nz; }
  void validate() const;
};

struct PathLossModel {
  double c0_db = -30.0;
  double d0 = 1.0;
  double alpha_au = 3.6;
  double alpha_ai = 2.2;
  double alpha_iu = 2.2;
};

// Rician factors in linear scale. Values at or above kLosCap are treated as
// pure line of sight.
struct RicianSpec {
  static constexpr double kLosCap = 1e12;
  double beta_au = 0.0;
  double beta_ai = 1.9952623149688795;  // 3 dB
  double beta_iu = 0.0;
};

// Ground-truth channels for K users. cascaded[k] = diag(h_r[k]^H) G and
// stacked[k] = [h_d[k]^H; cascaded[k]] with shape (N+1) x M.
struct ChannelSet {
  CMatrix G;
  std::vector<CVector> h_d;
  std::vector<CVector> h_r;
  std::vector<CMatrix> cascaded;
  std::vector<CMatrix> stacked;

  std::size_t users() const { return h_d.size(); }
};

/// C0 * (d / D0)^(-alpha), linear power gain.
double path_loss(double d, double alpha, const PathLossModel& model);

/// sqrt(gain) * (sqrt(b/(1+b)) LoS + sqrt(1/(1+b)) NLoS), NLoS ~ CN(0, 1) i.i.d.
CMatrix rician_channel(std::size_t rows, std::size_t cols, double rician_factor,
                       const CMatrix& los_component, double gain, Rng& rng);

/// Row n of the result is conj(h_r[n]) * G.row(n).
CMatrix cascaded_channel(const CVector& h_r, const CMatrix& G);

/// Stacks [h_d^H; H] into an (N+1) x M matrix.
CMatrix stack_channel(const CVector& h_d, const CMatrix& cascaded);

/// Far-field ULA response along +x for a unit direction.
CVector ula_steering(std::size_t antennas, const Vec3& direction, double spacing_wavelengths);
/// Far-field UPA response in the y-z plane for a unit direction.
CVector upa_steering(std::size_t ny, std::size_t nz, const Vec3& direction,
                     double spacing_wavelengths);

/// Builds the full ChannelSet from geometry; one user per user_positions entry.
ChannelSet generate_channels(const Geometry& geometry, const PathLossModel& path_loss_model,
                             const RicianSpec& rician, Rng& rng);

/// Uniform draw in a horizontal disc (constant z).
std::vector<Vec3> draw_user_cluster(std::size_t count, const Vec3& center, double radius,
                                    Rng& rng);

}  // namespace irsopt::channel
