#include "irsopt/feasible.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace irsopt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phase(double phase) {
  double p = std::fmod(phase, kTwoPi);
  if (p < 0.0) p += kTwoPi;
  return p;
}

double circular_distance(double a, double b) {
  const double d = std::abs(wrap_phase(a) - wrap_phase(b));
  return std::min(d, kTwoPi - d);
}

// Index of the nearest phase; strict comparison keeps the first (smallest) on ties.
std::size_t nearest_phase(double phase, std::span<const double> phases) {
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const double d = circular_distance(phase, phases[i]);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

const char* mode_name(ReflectionMode m) {
  switch (m) {
    case ReflectionMode::Discrete:
      return "discrete";
    case ReflectionMode::Continuous:
      return "continuous";
    case ReflectionMode::Cadp:
      return "CADP";
    case ReflectionMode::Dacp:
      return "DACP";
  }
  return "unknown";
}

ReflectionMode FeasibleSet::mode() const {
  if (q_a && q_theta) return ReflectionMode::Discrete;
  if (!q_a && !q_theta) return ReflectionMode::Continuous;
  return q_theta ? ReflectionMode::Cadp : ReflectionMode::Dacp;
}

void FeasibleSet::validate() const {
  if (q_a && (*q_a < 0 || *q_a > 16)) throw std::invalid_argument("q_a must be in [0, 16]");
  if (q_theta && (*q_theta < 0 || *q_theta > 16)) {
    throw std::invalid_argument("q_theta must be in [0, 16]");
  }
}

std::vector<double> FeasibleSet::amplitudes() const {
  if (!q_a) throw std::logic_error("amplitudes(): amplitude is continuous");
  if (*q_a == 0) return {1.0};
  const int levels = 1 << *q_a;
  std::vector<double> a(static_cast<std::size_t>(levels));
  for (int k = 0; k < levels; ++k) a[static_cast<std::size_t>(k)] = static_cast<double>(k) / (levels - 1);
  return a;
}

std::vector<double> FeasibleSet::phases() const {
  if (!q_theta) throw std::logic_error("phases(): phase is continuous");
  const int levels = 1 << *q_theta;
  std::vector<double> s(static_cast<std::size_t>(levels));
  for (int l = 0; l < levels; ++l) s[static_cast<std::size_t>(l)] = kTwoPi * l / levels;
  return s;
}

std::vector<cdouble> FeasibleSet::points() const {
  const auto amps = amplitudes();
  const auto phs = phases();
  std::vector<cdouble> pts;
  pts.reserve(amps.size() * phs.size());
  for (double th : phs) {
    for (double a : amps) pts.push_back(std::polar(a, th));
  }
  return pts;
}

cdouble project_discrete(cdouble x, std::span<const double> amplitudes,
                         std::span<const double> phases) {
  if (amplitudes.empty() || phases.empty()) {
    throw std::invalid_argument("project_discrete: empty amplitude or phase set");
  }
  const double theta = phases[nearest_phase(std::arg(x), phases)];
  double best_a = amplitudes[0];
  double best_d = std::numeric_limits<double>::infinity();
  for (double a : amplitudes) {
    const double d = std::abs(std::polar(a, theta) - x);
    if (d < best_d || (d == best_d && a < best_a)) {
      best_d = d;
      best_a = a;
    }
  }
  return std::polar(best_a, theta);
}

cdouble project_disc(cdouble x) {
  const double r = std::abs(x);
  return r <= 1.0 ? x : x / r;
}

cdouble FeasibleSet::project(cdouble x) const {
  switch (mode()) {
    case ReflectionMode::Continuous:
      return project_disc(x);
    case ReflectionMode::Discrete: {
      const auto a = amplitudes();
      const auto s = phases();
      return project_discrete(x, a, s);
    }
    case ReflectionMode::Cadp: {
      const auto s = phases();
      const double theta = s[nearest_phase(std::arg(x), s)];
      // Best amplitude along a fixed ray is the clipped projection length.
      const double a = std::clamp(std::abs(x) * std::cos(std::arg(x) - theta), 0.0, 1.0);
      return std::polar(a, theta);
    }
    case ReflectionMode::Dacp: {
      const auto amps = amplitudes();
      const double r = std::abs(x);
      double best_a = amps[0];
      for (double a : amps) {
        if (std::abs(a - r) < std::abs(best_a - r)) best_a = a;
      }
      return std::polar(best_a, std::arg(x));
    }
  }
  return x;
}

CVector FeasibleSet::project(const CVector& x) const {
  CVector out(x.size());
  if (is_discrete()) {
    // Hoist the set construction out of the per-element loop.
    const auto a = amplitudes();
    const auto s = phases();
    for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = project_discrete(x(i), a, s);
    return out;
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = project(x(i));
  return out;
}

bool FeasibleSet::contains(cdouble x, double tol) const {
  const double r = std::abs(x);
  switch (mode()) {
    case ReflectionMode::Continuous:
      return r <= 1.0 + tol;
    case ReflectionMode::Discrete: {
      for (const auto& p : points()) {
        if (p == x) return true;
      }
      return false;
    }
    case ReflectionMode::Cadp: {
      if (r > 1.0 + tol) return false;
      if (r == 0.0) return true;
      for (double th : phases()) {
        if (std::polar(r, th) == x || std::abs(std::polar(r, th) - x) <= tol) return true;
      }
      return false;
    }
    case ReflectionMode::Dacp: {
      for (double a : amplitudes()) {
        if (std::abs(r - a) <= tol) return true;
      }
      return false;
    }
  }
  return false;
}

std::string FeasibleSet::describe() const {
  auto bits = [](const std::optional<int>& q) { return q ? std::to_string(*q) : std::string("inf"); };
  return "Qa=" + bits(q_a) + ",Qtheta=" + bits(q_theta);
}

}  // namespace irsopt
