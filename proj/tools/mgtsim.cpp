// mgtsim: single runs, diffusivity sweeps, validation and rate fits for the
// third-order acoustic wave solvers.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mgt/analysis.hpp"
#include "mgt/error.hpp"
#include "mgt/harness.hpp"
#include "mgt/validation.hpp"

namespace {

struct Overrides {
  std::vector<double> deltas;
  std::optional<double> tau;
  std::optional<double> cfl;
  std::optional<std::string> out;
  std::optional<int> parallelism;
  std::optional<unsigned long> seed;  // reserved: nothing is random
};

void add_overrides(CLI::App* cmd, Overrides& o, bool sweep) {
  if (sweep) {
    cmd->add_option("--deltas", o.deltas, "Diffusivities to sweep (must start with 0)")
        ->delimiter(',');
    cmd->add_option("--parallelism", o.parallelism, "Concurrent runs")->check(CLI::PositiveNumber);
  }
  cmd->add_option("--tau", o.tau, "Thermal relaxation time [s]");
  cmd->add_option("--cfl", o.cfl, "Courant number");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--seed", o.seed, "Reserved; all computations are deterministic");
}

void apply(mgt::SweepConfig& cfg, const Overrides& o) {
  if (!o.deltas.empty()) cfg.deltas = o.deltas;
  if (o.tau) cfg.scenario.tau = *o.tau;
  if (o.cfl) cfg.newmark.cfl = *o.cfl;
  if (o.out) cfg.output_dir = *o.out;
  if (o.parallelism) cfg.parallelism = *o.parallelism;
}

void print_fit(const std::vector<mgt::SweepRecord>& records) {
  try {
    const mgt::RateFit fit = mgt::fit_rate(records);
    std::printf("slope %.6f  intercept %.6f  mean err/delta %.6e  max deviation %.3e\n",
                fit.slope, fit.intercept, fit.mean_ratio, fit.max_ratio_deviation);
  } catch (const mgt::InsufficientData& e) {
    std::printf("rate: %s\n", e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Third-order (MGT / JMGT) acoustic wave simulator"};
  app.require_subcommand(1);

  std::string run_config, sweep_config, sweep_csv;
  std::optional<double> run_delta;
  std::optional<std::string> rate_out;
  Overrides run_o, sweep_o;

  auto* run = app.add_subcommand("run", "Run a single simulation");
  run->add_option("config", run_config, "Scenario config (INI)")->required()->check(CLI::ExistingFile);
  run->add_option("--delta", run_delta, "Sound diffusivity [m^2/s]");
  add_overrides(run, run_o, false);

  auto* sweep = app.add_subcommand("sweep", "Run a diffusivity sweep against delta = 0");
  sweep->add_option("config", sweep_config, "Scenario config (INI)")->required()->check(CLI::ExistingFile);
  add_overrides(sweep, sweep_o, true);

  auto* validate = app.add_subcommand("validate", "Run oracle and invariant checks");

  auto* rate = app.add_subcommand("rate", "Re-fit the convergence rate of a sweep.csv");
  rate->add_option("sweep_csv", sweep_csv, "sweep.csv written by `sweep`")->required()->check(CLI::ExistingFile);
  rate->add_option("--out", rate_out, "Where to write rate.json (default: next to the csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      mgt::SweepConfig cfg = mgt::load_config(run_config);
      apply(cfg, run_o);
      if (run_delta) cfg.scenario.delta = *run_delta;
      const mgt::RunResult res = mgt::run_single(cfg);
      std::printf("dt %.6e  steps %ld  h %.6e  max fixed-point iterations %d  max energy %.6e\n",
                  res.grid.dt, res.grid.steps, res.h, res.max_fp_iters, res.max_energy);
      for (const auto& p : res.snapshots) std::printf("wrote %s\n", p.string().c_str());
    } else if (*sweep) {
      mgt::SweepConfig cfg = mgt::load_config(sweep_config);
      apply(cfg, sweep_o);
      const mgt::SweepResult res = mgt::run_sweep(cfg);
      std::printf("dt %.6e  steps %ld\n", res.grid.dt, res.grid.steps);
      for (const auto& r : res.records) {
        std::printf("delta %-10g err %.6e  fp %d  %s\n", r.delta, r.err_rel, r.max_fp_iters,
                    r.status.c_str());
      }
      print_fit(res.records);
      std::printf("results in %s\n", cfg.output_dir.string().c_str());
    } else if (*validate) {
      int failed = 0;
      for (const auto& c : mgt::run_validation()) {
        std::printf("[%s] %-36s %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        failed += c.passed ? 0 : 1;
      }
      return failed == 0 ? 0 : 1;
    } else if (*rate) {
      const auto records = mgt::read_sweep_csv(sweep_csv);
      print_fit(records);
      const std::filesystem::path out =
          rate_out ? std::filesystem::path(*rate_out)
                   : std::filesystem::path(sweep_csv).parent_path() / "rate.json";
      mgt::write_rate_json(out, records);
    }
  } catch (const mgt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
