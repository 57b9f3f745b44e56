#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mgt/analysis.hpp"
#include "mgt/integrator.hpp"
#include "mgt/models.hpp"

namespace mgt {

/// Scenario selection plus parameter overrides. Unset values keep the
/// scenario defaults.
struct ScenarioConfig {
  std::string name = "channel_1d";  // channel_1d | source_2d | kuznetsov | westervelt_potential
  double delta = 0.0;               // used by single runs only
  std::optional<double> tau, c, rho, b_over_a, alpha0;
  std::optional<double> amplitude, final_time, length, h;
  std::optional<int> n_elements;
  bool linear = false;
  std::optional<double> kappa, sigma;
};

struct SweepConfig {
  ScenarioConfig scenario;
  std::vector<double> deltas{0.0};
  std::optional<double> delta_bar;  // default: max of deltas
  std::vector<double> snapshot_times;
  std::filesystem::path output_dir = "out";
  int parallelism = 1;
  NewmarkParams newmark;

  /// Deltas ascending, first one 0, parallelism >= 1.
  void validate() const;
  double resolved_delta_bar() const;
};

SweepConfig parse_config(std::istream& in);
SweepConfig load_config(const std::filesystem::path& path);

/// Resolves a scenario name and its overrides into a problem at diffusivity delta.
ProblemSpec build_problem(const ScenarioConfig& scenario, double delta);

/// Time stepping of one problem on a fixed grid.
class Simulation {
 public:
  Simulation(const ProblemSpec& spec, const TimeGrid& grid, const NewmarkParams& p,
             std::shared_ptr<const FemOperators> ops = nullptr);

  const ProblemSpec& spec() const noexcept { return spec_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  const Mesh& mesh() const noexcept { return *ops_->mesh; }
  const std::shared_ptr<const FemOperators>& operators() const noexcept { return ops_; }
  const NonlinearStepper& stepper() const noexcept { return *stepper_; }

  const AcousticState& state() const noexcept { return state_; }
  long step_index() const noexcept { return step_; }
  bool done() const noexcept { return step_ >= grid_.steps; }

  /// Advances one step. The final step lands exactly on the final time.
  const StepReport& advance();

 private:
  ProblemSpec spec_;
  TimeGrid grid_;
  std::shared_ptr<const FemOperators> ops_;
  std::unique_ptr<NonlinearStepper> stepper_;
  SourceLoad source_;
  AcousticState state_;
  StepReport last_;
  long step_ = 0;
};

/// Assembles the operators of a problem's mesh.
std::shared_ptr<const FemOperators> build_operators(const ProblemSpec& spec);

struct RunOptions {
  std::vector<double> snapshot_times;
  std::filesystem::path output_dir;  // empty: write nothing
  std::string tag = "run";
  bool record_trajectory = false;
  const Trajectory* reference = nullptr;  // compare against, step by step
  bool write_energy = false;               // energy_<tag>.csv
};

struct RunResult {
  TimeGrid grid;
  double h = 0.0;
  int max_fp_iters = 0;
  double max_energy = 0.0;
  double err_rel = 0.0;  // only with a reference
  AcousticState final_state;
  Trajectory trajectory;  // only when recorded
  std::vector<std::filesystem::path> snapshots;
};

RunResult run_problem(const ProblemSpec& spec, const TimeGrid& grid, const NewmarkParams& p,
                      const RunOptions& opt, std::shared_ptr<const FemOperators> ops = nullptr);

/// Writes x[,y],u,u_t,u_tt, one row per mesh node.
void write_snapshot(const std::filesystem::path& path, const Mesh& mesh, const AcousticState& s);

/// snapshot_<tag>_<time>.csv
std::string snapshot_filename(const std::string& tag, double t);
std::string delta_tag(double delta);

struct SweepResult {
  std::vector<SweepRecord> records;  // ascending delta, reference first
  std::optional<RateFit> fit;
  std::string fit_error;  // set when no fit could be made
  TimeGrid grid;
};

/// Runs delta = 0 first, then every other delta (in parallel up to
/// cfg.parallelism) on the shared time grid, and writes sweep.csv, rate.json,
/// run_meta.json and snapshots into cfg.output_dir.
SweepResult run_sweep(const SweepConfig& cfg);

/// Single run at cfg.scenario.delta; writes snapshots, energy CSV and
/// run_meta.json.
RunResult run_single(const SweepConfig& cfg);

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_sweep_csv(const std::filesystem::path& path);
void write_rate_json(const std::filesystem::path& path, const std::vector<SweepRecord>& records);

/// Shortest round-trip decimal text for a double.
std::string format_double(double v);

}  // namespace mgt
