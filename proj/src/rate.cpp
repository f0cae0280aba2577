#include "irsopt/rate.hpp"

#include <cmath>

#include "irsopt/kernels.hpp"

namespace irsopt::rate {

double PrecoderSet::total_power() const {
  double p = 0.0;
  for (const auto& wk : w) p += kernels::squared_norm(wk);
  return p;
}

void PrecoderSet::validate() const {
  if (w.empty()) throw std::invalid_argument("PrecoderSet: no users");
  if (weights.size() != w.size() || noise.size() != w.size()) {
    throw std::invalid_argument("PrecoderSet: weights/noise must have one entry per user");
  }
  for (double s : noise) {
    if (!(s > 0.0)) throw std::invalid_argument("PrecoderSet: noise power must be positive");
  }
}

CVector extended(const CVector& v) {
  CVector out(v.size() + 1);
  out(0) = 1.0;
  out.tail(v.size()) = v;
  return out;
}

namespace {

void check_dims(const CVector& v, const ChannelEstimate& est) {
  if (static_cast<std::size_t>(v.size()) != est.elements()) {
    throw std::invalid_argument("reflection vector length != IRS elements");
  }
}

// [1; v]^H H_bar w_j for every user j.
std::vector<cdouble> signal_terms(const CVector& vt, const PrecoderSet& p,
                                  const ChannelEstimate& est) {
  std::vector<cdouble> s;
  s.reserve(p.users());
  for (const auto& wj : p.w) {
    const CVector hw = est.stacked * wj;
    s.push_back(kernels::dotc(vt, hw));
  }
  return s;
}

struct UserTerms {
  std::vector<cdouble> signal;
  double csi_error;  // [1; v]^H V_bar [1; v] * sum_j ||w_j||^2
  double noise;
};

UserTerms user_terms(std::size_t k, const CVector& v, const PrecoderSet& p,
                     const ChannelEstimate& est) {
  check_dims(v, est);
  if (k >= p.users()) throw std::out_of_range("user index out of range");
  const CVector vt = extended(v);
  return {signal_terms(vt, p, est), kernels::hermitian_form(est.error_cov, vt) * p.total_power(),
          p.noise[k]};
}

}  // namespace

CVector effective_channel(const CVector& v, const ChannelEstimate& est) {
  check_dims(v, est);
  return est.cascaded().adjoint() * v + est.direct();
}

double error_power(const CVector& v, const ChannelEstimate& est) {
  check_dims(v, est);
  return kernels::hermitian_form(est.error_cov, extended(v));
}

double psi(std::size_t k, const CVector& v, const PrecoderSet& precoders,
           const ChannelEstimate& est_k) {
  const UserTerms t = user_terms(k, v, precoders, est_k);
  double leak = 0.0;
  for (std::size_t j = 0; j < t.signal.size(); ++j) {
    if (j != k) leak += std::norm(t.signal[j]);
  }
  return leak + t.csi_error + t.noise;
}

double achievable_rate(std::size_t k, const CVector& v, const PrecoderSet& precoders,
                       const ChannelEstimate& est_k) {
  const UserTerms t = user_terms(k, v, precoders, est_k);
  double leak = 0.0;
  for (std::size_t j = 0; j < t.signal.size(); ++j) {
    if (j != k) leak += std::norm(t.signal[j]);
  }
  const double interference = leak + t.csi_error + t.noise;
  return std::log2(1.0 + std::norm(t.signal[k]) / interference);
}

double weighted_sum_rate(const CVector& v, const PrecoderSet& precoders,
                         const std::vector<ChannelEstimate>& estimates) {
  if (estimates.size() != precoders.users()) {
    throw std::invalid_argument("weighted_sum_rate: one estimate per user required");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    total += precoders.weights[k] * achievable_rate(k, v, precoders, estimates[k]);
  }
  return total;
}

cdouble mmse_receiver(std::size_t k, const CVector& v, const PrecoderSet& precoders,
                      const ChannelEstimate& est_k) {
  const UserTerms t = user_terms(k, v, precoders, est_k);
  double received = t.csi_error + t.noise;
  for (const auto& s : t.signal) received += std::norm(s);
  return t.signal[k] / received;
}

double mse(std::size_t k, cdouble g, const CVector& v, const PrecoderSet& precoders,
           const ChannelEstimate& est_k) {
  const UserTerms t = user_terms(k, v, precoders, est_k);
  double received = t.csi_error + t.noise;
  for (const auto& s : t.signal) received += std::norm(s);
  return std::norm(g) * received - 2.0 * (std::conj(g) * t.signal[k]).real() + 1.0;
}

double AmplitudeProfile::rate(double a) const { return std::log2(1.0 + num.at(a) / den.at(a)); }

AmplitudeProfile amplitude_profile(std::size_t n, double theta, const CVector& v,
                                   const CVector& w, const ChannelEstimate& est, double sigma2) {
  check_dims(v, est);
  if (n >= est.elements()) throw std::out_of_range("amplitude_profile: element index");
  const auto i = static_cast<Eigen::Index>(n + 1);

  CVector vt = extended(v);
  vt(i) = 0.0;  // everything below is "the other elements"
  const cdouble rot = std::polar(1.0, -theta);  // conj(exp(j theta))
  const double wpow = kernels::squared_norm(w);

  const CVector b = est.stacked * w;
  const cdouble rest = kernels::dotc(vt, b);
  AmplitudeProfile prof;
  prof.num.a2 = std::norm(b(i));
  prof.num.a1 = 2.0 * (rot * b(i) * std::conj(rest)).real();
  prof.num.a0 = std::norm(rest);

  const cdouble cross = kernels::dotc(kernels::column(est.error_cov, i), kernels::view(vt));
  // cross = sum_j conj(V_bar(j, i)) vt_j = sum_j V_bar(i, j) vt_j
  prof.den.a2 = est.error_cov(i, i).real() * wpow;
  prof.den.a1 = 2.0 * wpow * (rot * cross).real();
  prof.den.a0 = wpow * kernels::hermitian_form(est.error_cov, vt) + sigma2;
  return prof;
}

double eop(const CVector& v) {
  if (v.size() == 0) return 0.0;
  Eigen::Index off = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) < 1e-9) ++off;
  }
  return 100.0 * static_cast<double>(off) / static_cast<double>(v.size());
}

}  // namespace irsopt::rate
