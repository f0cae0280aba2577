// irsopt command line: estimate | solve-su | solve-mu | sweep
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "irsopt/config.hpp"
#include "irsopt/export.hpp"
#include "irsopt/harness.hpp"
#include "irsopt/kernels.hpp"

using namespace irsopt;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "-";
  std::string format = "csv";
  std::optional<std::size_t> trials;
  std::optional<std::size_t> threads;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "JSON experiment config (defaults are used when omitted)");
  cmd->add_option("--seed", o.seed, "Master seed, overrides the config");
  cmd->add_option("--out", o.out, "Output path, '-' for stdout")->capture_default_str();
  cmd->add_option("--format", o.format, "Export format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--trials", o.trials, "Monte-Carlo trials per sweep point");
  cmd->add_option("--threads", o.threads, "Worker threads (0: all cores)");
}

harness::ExperimentConfig resolve(const CommonOptions& o) {
  auto cfg = o.config.empty() ? harness::default_config() : harness::load_config(o.config);
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.trials) cfg.trials = *o.trials;
  if (o.threads) cfg.threads = *o.threads;
  return cfg;
}

int emit(const std::vector<harness::AggregateRow>& rows, const CommonOptions& o) {
  harness::export_rows(rows, o.out,
                       o.format == "json" ? harness::ExportFormat::Json : harness::ExportFormat::Csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IRS reflection and precoder design under imperfect CSI"};
  app.require_subcommand(1);
  std::string simd = "auto";
  app.add_option("--simd", simd, "Kernel backend")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}))
      ->capture_default_str();

  CommonOptions est_o, su_o, mu_o, sweep_o;
  auto* est = app.add_subcommand("estimate", "Channel estimation quality (normalized MSE) per training design");
  auto* su = app.add_subcommand("solve-su", "Single-user solve on one channel draw");
  auto* mu = app.add_subcommand("solve-mu", "Multiuser PDD solve on one channel draw");
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over one parameter");
  add_common(est, est_o);
  add_common(su, su_o);
  add_common(mu, mu_o);
  add_common(sweep, sweep_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (simd == "scalar") kernels::select_backend(kernels::Backend::Scalar);
    if (simd == "avx2") kernels::select_backend(kernels::Backend::Avx2);

    if (*est) return emit(harness::run_sweep(resolve(est_o), harness::RunMode::Estimate), est_o);
    if (*sweep) return emit(harness::run_sweep(resolve(sweep_o)), sweep_o);

    const bool single_user = static_cast<bool>(*su);
    const CommonOptions& o = single_user ? su_o : mu_o;
    auto cfg = resolve(o);
    cfg.sweep = {};
    if (!o.trials) cfg.trials = 1;
    if (single_user) {
      cfg.K = 1;
      cfg.weights.clear();
      cfg.force_mu = false;
    } else {
      cfg.force_mu = true;
    }
    return emit(harness::run_sweep(cfg), o);
  } catch (const harness::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const harness::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
