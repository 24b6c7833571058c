// thermodamage: batch driver for the coupled thermo-elastic damage solver.
//
//   thermodamage run --config <path> [--deterministic]
//   thermodamage convergence --config <path> --levels <k>
//   thermodamage verify
//
// THERMODAMAGE_NUM_THREADS sets the assembly thread count.

#include <CLI11.hpp>

#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "thermodamage/driver.hpp"
#include "thermodamage/parallel.hpp"
#include "thermodamage/verify/verify.hpp"

namespace td = thermodamage;

namespace {

td::RunConfig load(const std::string& config, const std::string& preset) {
  if (!preset.empty()) return td::preset_config(preset);
  return td::load_config(config);
}

int cmd_run(const td::RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = td::run_and_write(cfg, std::cout);
  td::write_assumption_text(std::cout, s.assumptions);
  std::cout << "stability constants: heat " << s.stability.heat_constant << ", strain " << s.stability.strain_constant
            << ", A-norm " << s.stability.anorm_constant << '\n';
  std::cout << "outputs in " << cfg.output.dir << " ("
            << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s)\n";
  if (s.trajectory.failed) {
    const auto& r = s.trajectory.failure_report;
    std::cerr << "run failed: " << s.trajectory.failure << '\n';
    if (!r.damage_residuals.empty()) std::cerr << "  last damage residual " << r.damage_residuals.back() << '\n';
    if (!r.heat_residuals.empty()) std::cerr << "  last heat residual " << r.heat_residuals.back() << '\n';
    return 2;
  }
  return 0;
}

int cmd_convergence(const td::RunConfig& cfg, int levels) {
  const auto res = td::run_convergence(cfg, levels, &std::cout);
  std::filesystem::create_directories(cfg.output.dir);
  const auto path = std::filesystem::path(cfg.output.dir) / "convergence.csv";
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  td::write_error_table_csv(os, res.table);
  if (!res.table.rows.empty()) td::write_error_table_csv(std::cout, res.table);
  if (res.failed) {
    std::cerr << "convergence study aborted: " << res.failure << '\n';
    return 2;
  }
  std::cout << "table written to " << path.string() << '\n';
  return 0;
}

int cmd_verify(double lipschitz_factor) {
  td::verify::VerifyOptions o;
  o.lipschitz_factor = lipschitz_factor;
  const auto t0 = std::chrono::steady_clock::now();
  const bool ok = td::verify::print_summary(std::cout, td::verify::run_all(o));
  std::cout << "elapsed " << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled thermo-elastic damage solver"};
  app.require_subcommand(1);
  bool deterministic = false;
  app.add_flag("--deterministic", deterministic, "Sequential assembly for bitwise reproducible output");

  std::string config, preset;
  auto* run = app.add_subcommand("run", "Run one configuration");
  auto* run_cfg = run->add_option("--config", config, "Configuration file");
  run->add_option("--preset", preset, "Built-in configuration (sens-notch, zero, mms-elastic, mms-heat)")->excludes(run_cfg);
  run->add_flag("--deterministic", deterministic, "Sequential assembly for bitwise reproducible output");

  int levels = 3;
  auto* conv = app.add_subcommand("convergence", "Convergence study against a finer reference");
  auto* conv_cfg = conv->add_option("--config", config, "Configuration file");
  conv->add_option("--preset", preset, "Built-in configuration")->excludes(conv_cfg);
  conv->add_option("--levels", levels, "Number of mesh levels (>= 3)")->required();
  conv->add_flag("--deterministic", deterministic, "Sequential assembly for bitwise reproducible output");

  double lipschitz_factor = 1.0;
  auto* ver = app.add_subcommand("verify", "Run the property suite");
  ver->add_option("--perturb-lipschitz", lipschitz_factor, "Scale the Lipschitz constant (test hook)")->group("");
  ver->add_flag("--deterministic", deterministic, "Sequential assembly for bitwise reproducible output");

  CLI11_PARSE(app, argc, argv);
  if (deterministic) td::set_num_threads(1);

  try {
    if (run->parsed()) {
      if (config.empty() && preset.empty()) throw CLI::RequiredError("--config");
      return cmd_run(load(config, preset));
    }
    if (conv->parsed()) {
      if (config.empty() && preset.empty()) throw CLI::RequiredError("--config");
      if (levels < 3) {
        std::cerr << "error: --levels must be at least 3\n";
        return 1;
      }
      return cmd_convergence(load(config, preset), levels);
    }
    if (ver->parsed()) return cmd_verify(lipschitz_factor);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const td::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
