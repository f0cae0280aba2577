#include "irsopt/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace irsopt::harness {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!ok.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

std::size_t read_count(const json& obj, const char* key, std::size_t fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(where + "." + key + ": expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::optional<std::size_t> read_optional_count(const json& obj, const char* key,
                                               std::optional<std::size_t> fallback,
                                               const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (obj.at(key).is_null()) return std::nullopt;
  return read_count(obj, key, 0, where);
}

std::optional<int> read_bits(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer or null");
  return v.get<int>();
}

channel::Vec3 read_vec3(const json& obj, const char* key, channel::Vec3 fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 3) throw ConfigError(where + "." + key + ": expected [x, y, z]");
  try {
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

// Rician factor given either linear ("beta_xx") or in dB ("beta_xx_db").
double read_rician(const json& obj, const std::string& base, double fallback) {
  const std::string lin = base, db = base + "_db";
  const bool has_lin = obj.contains(lin), has_db = obj.contains(db);
  if (has_lin && has_db) throw ConfigError("rician: give " + lin + " or " + db + ", not both");
  try {
    if (has_lin) return obj.at(lin).get<double>();
    if (has_db) return channel::db_to_linear(obj.at(db).get<double>());
  } catch (const json::exception& e) {
    throw ConfigError("rician." + base + ": " + e.what());
  }
  return fallback;
}

void parse_su(const json& j, solver_su::SuSolverConfig& su) {
  const std::string w = "solver_su";
  check_keys(j, w, {"beta0", "c", "eps_d", "eps_p", "eps_c", "max_inner", "max_outer",
                    "max_bcd_sweeps", "bisection_tol", "ball_radius", "init", "seed"});
  read(j, "beta0", su.beta0, w);
  read(j, "c", su.shrink, w);
  read(j, "eps_d", su.eps_d, w);
  read(j, "eps_p", su.eps_p, w);
  read(j, "eps_c", su.eps_c, w);
  su.max_inner = read_count(j, "max_inner", su.max_inner, w);
  su.max_outer = read_count(j, "max_outer", su.max_outer, w);
  su.max_bcd_sweeps = read_count(j, "max_bcd_sweeps", su.max_bcd_sweeps, w);
  read(j, "bisection_tol", su.bisection_tol, w);
  if (j.contains("ball_radius")) {
    if (j.at("ball_radius").is_null()) {
      su.ball_radius.reset();
    } else {
      double r = 0.0;
      read(j, "ball_radius", r, w);
      su.ball_radius = r;
    }
  }
  if (j.contains("init")) {
    std::string s;
    read(j, "init", s, w);
    if (s == "ones") su.init = solver_su::InitMode::Ones;
    else if (s == "random") su.init = solver_su::InitMode::Random;
    else throw ConfigError("solver_su.init: expected 'ones' or 'random'");
  }
  read(j, "seed", su.seed, w);
}

void parse_mu(const json& j, solver_mu::MuSolverConfig& mu) {
  const std::string w = "solver_mu";
  check_keys(j, w, {"beta0", "c", "eps_in", "eps_out", "max_inner", "max_outer", "init", "seed",
                    "polish_iterations"});
  read(j, "beta0", mu.beta0, w);
  read(j, "c", mu.shrink, w);
  read(j, "eps_in", mu.eps_in, w);
  read(j, "eps_out", mu.eps_out, w);
  mu.max_inner = read_count(j, "max_inner", mu.max_inner, w);
  mu.max_outer = read_count(j, "max_outer", mu.max_outer, w);
  mu.polish_iterations = read_count(j, "polish_iterations", mu.polish_iterations, w);
  if (j.contains("init")) {
    std::string s;
    read(j, "init", s, w);
    if (s == "ones") mu.init = solver_mu::InitMode::Ones;
    else if (s == "random") mu.init = solver_mu::InitMode::Random;
    else throw ConfigError("solver_mu.init: expected 'ones' or 'random'");
  }
  read(j, "seed", mu.seed, w);
}

}  // namespace

const std::vector<std::string>& sweep_whitelist() {
  static const std::vector<std::string> names{"p_u_dbm", "N", "N_r", "P_dbm", "K"};
  return names;
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.schemes = {{"amp_phase", FeasibleSet::discrete(1, 1)}, {"phase", FeasibleSet::discrete(0, 1)}};
  return cfg;
}

void ExperimentConfig::validate() const {
  if (K < 1) throw ConfigError("K must be >= 1");
  if (M < 1) throw ConfigError("M must be >= 1");
  if (N < 1) throw ConfigError("N must be >= 1");
  if (irs_ny < 1 || N % irs_ny != 0) {
    throw ConfigError("N (" + std::to_string(N) + ") must be a multiple of geometry.irs_ny (" +
                      std::to_string(irs_ny) + ")");
  }
  if (pilots() < N + 1) {
    throw ConfigError("N_r must be >= N+1 (N=" + std::to_string(N) + ", N_r=" +
                      std::to_string(pilots()) + ")");
  }
  if (T0 && *T0 <= pilots()) throw ConfigError("T0 must exceed N_r");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (!weights.empty() && weights.size() != K) throw ConfigError("weights needs one entry per user");
  for (double a : weights) {
    if (!(a >= 0.0)) throw ConfigError("weights must be >= 0");
  }
  if (!(cluster_radius >= 0.0)) throw ConfigError("geometry.cluster_radius must be >= 0");
  if (!(spacing_wavelengths > 0.0)) throw ConfigError("geometry.spacing_wavelengths must be > 0");
  if (schemes.empty()) throw ConfigError("at least one scheme is required");
  std::set<std::string> names;
  for (const auto& s : schemes) {
    if (s.name.empty()) throw ConfigError("scheme names must be non-empty");
    if (!names.insert(s.name).second) throw ConfigError("duplicate scheme name '" + s.name + "'");
    try {
      s.set.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("scheme '" + s.name + "': " + e.what());
    }
  }
  if (baselines.random_bcd && std::none_of(schemes.begin(), schemes.end(), [](const SchemeConfig& s) {
        return s.set.is_discrete();
      })) {
    throw ConfigError("baselines.random_bcd needs a discrete scheme");
  }
  if (!sweep.parameter.empty()) {
    const auto& wl = sweep_whitelist();
    if (std::find(wl.begin(), wl.end(), sweep.parameter) == wl.end()) {
      throw ConfigError("sweep.parameter '" + sweep.parameter + "' is not one of p_u_dbm, N, N_r, P_dbm, K");
    }
    if (sweep.values.empty()) throw ConfigError("sweep.values must be non-empty");
    for (double v : sweep.values) with_parameter(*this, sweep.parameter, v);
  }
  try {
    su.validate();
    mu.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("solver config: ") + e.what());
  }
}

ExperimentConfig with_parameter(const ExperimentConfig& cfg, const std::string& name, double value) {
  ExperimentConfig out = cfg;
  auto as_count = [&](double v) {
    if (!(v >= 1.0) || std::floor(v) != v) {
      throw ConfigError("sweep value for " + name + " must be a positive integer");
    }
    return static_cast<std::size_t>(v);
  };
  if (name == "p_u_dbm") {
    out.p_u_dbm = value;
  } else if (name == "P_dbm") {
    out.P_dbm = value;
  } else if (name == "N") {
    out.N = as_count(value);
  } else if (name == "N_r") {
    out.N_r = as_count(value);
  } else if (name == "K") {
    out.K = as_count(value);
    if (!out.weights.empty()) out.weights.assign(out.K, out.weights.front());
  } else {
    throw ConfigError("unknown sweep parameter '" + name + "'");
  }
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg = default_config();
  check_keys(root, "config", {"geometry", "path_loss", "rician", "system", "schemes", "baselines",
                              "solver_su", "solver_mu", "trials", "master_seed", "threads", "sweep"});

  if (root.contains("geometry")) {
    const json& g = root["geometry"];
    check_keys(g, "geometry", {"ap_ref", "irs_ref", "irs_ny", "spacing_wavelengths",
                               "cluster_center", "cluster_radius"});
    cfg.ap_ref = read_vec3(g, "ap_ref", cfg.ap_ref, "geometry");
    cfg.irs_ref = read_vec3(g, "irs_ref", cfg.irs_ref, "geometry");
    cfg.irs_ny = read_count(g, "irs_ny", cfg.irs_ny, "geometry");
    read(g, "spacing_wavelengths", cfg.spacing_wavelengths, "geometry");
    cfg.cluster_center = read_vec3(g, "cluster_center", cfg.cluster_center, "geometry");
    read(g, "cluster_radius", cfg.cluster_radius, "geometry");
  }
  if (root.contains("path_loss")) {
    const json& p = root["path_loss"];
    check_keys(p, "path_loss", {"c0_db", "d0", "alpha_au", "alpha_ai", "alpha_iu"});
    read(p, "c0_db", cfg.path_loss.c0_db, "path_loss");
    read(p, "d0", cfg.path_loss.d0, "path_loss");
    read(p, "alpha_au", cfg.path_loss.alpha_au, "path_loss");
    read(p, "alpha_ai", cfg.path_loss.alpha_ai, "path_loss");
    read(p, "alpha_iu", cfg.path_loss.alpha_iu, "path_loss");
  }
  if (root.contains("rician")) {
    const json& r = root["rician"];
    check_keys(r, "rician", {"beta_au", "beta_au_db", "beta_ai", "beta_ai_db", "beta_iu", "beta_iu_db"});
    cfg.rician.beta_au = read_rician(r, "beta_au", cfg.rician.beta_au);
    cfg.rician.beta_ai = read_rician(r, "beta_ai", cfg.rician.beta_ai);
    cfg.rician.beta_iu = read_rician(r, "beta_iu", cfg.rician.beta_iu);
  }
  if (root.contains("system")) {
    const json& s = root["system"];
    const std::string w = "system";
    check_keys(s, w, {"K", "M", "N", "N_r", "T0", "P_dbm", "p_u_dbm", "sigma2_dbm", "eps2_dbm",
                      "weights", "force_mu"});
    cfg.K = read_count(s, "K", cfg.K, w);
    cfg.M = read_count(s, "M", cfg.M, w);
    cfg.N = read_count(s, "N", cfg.N, w);
    cfg.N_r = read_optional_count(s, "N_r", cfg.N_r, w);
    cfg.T0 = read_optional_count(s, "T0", cfg.T0, w);
    read(s, "P_dbm", cfg.P_dbm, w);
    read(s, "p_u_dbm", cfg.p_u_dbm, w);
    read(s, "sigma2_dbm", cfg.sigma2_dbm, w);
    read(s, "eps2_dbm", cfg.eps2_dbm, w);
    read(s, "weights", cfg.weights, w);
    read(s, "force_mu", cfg.force_mu, w);
  }
  if (root.contains("schemes")) {
    const json& arr = root["schemes"];
    if (!arr.is_array()) throw ConfigError("schemes: expected an array");
    cfg.schemes.clear();
    for (const json& s : arr) {
      check_keys(s, "schemes[]", {"name", "q_a", "q_theta"});
      SchemeConfig sc;
      read(s, "name", sc.name, "schemes[]");
      sc.set.q_a = read_bits(s, "q_a", "schemes[]");
      sc.set.q_theta = read_bits(s, "q_theta", "schemes[]");
      cfg.schemes.push_back(std::move(sc));
    }
  }
  if (root.contains("baselines")) {
    const json& b = root["baselines"];
    check_keys(b, "baselines", {"no_irs", "nonrobust", "random_bcd"});
    read(b, "no_irs", cfg.baselines.no_irs, "baselines");
    read(b, "nonrobust", cfg.baselines.nonrobust, "baselines");
    read(b, "random_bcd", cfg.baselines.random_bcd, "baselines");
  }
  if (root.contains("solver_su")) parse_su(root["solver_su"], cfg.su);
  if (root.contains("solver_mu")) parse_mu(root["solver_mu"], cfg.mu);
  cfg.trials = read_count(root, "trials", cfg.trials, "config");
  read(root, "master_seed", cfg.master_seed, "config");
  cfg.threads = read_count(root, "threads", cfg.threads, "config");
  if (root.contains("sweep") && !root["sweep"].is_null()) {
    const json& sw = root["sweep"];
    check_keys(sw, "sweep", {"parameter", "values"});
    read(sw, "parameter", cfg.sweep.parameter, "sweep");
    read(sw, "values", cfg.sweep.values, "sweep");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace irsopt::harness
