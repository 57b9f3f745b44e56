#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "mgt/error.hpp"
#include "mgt/harness.hpp"

using namespace mgt;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& leaf) {
  const fs::path dir =
      fs::temp_directory_path() / ("mgt_harness_" + std::to_string(::getpid())) / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t data_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  std::getline(in, line);
  while (std::getline(in, line)) n += !line.empty();
  return n;
}

// A coarse channel that runs in well under a second.
SweepConfig small_channel(const fs::path& out) {
  SweepConfig cfg;
  cfg.scenario.name = "channel_1d";
  cfg.scenario.n_elements = 150;
  cfg.scenario.final_time = 2e-5;
  cfg.deltas = {0.0, 1e-4, 1e-3, 1e-2};
  cfg.output_dir = out;
  return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in(R"(; comment
[scenario]
name = kuznetsov
amplitude = 2e-2
n_elements = 300
linear = false

[medium]
tau = 1e-4
delta = 5e-3

[nonlinearity]
sigma = 0

[integrator]
cfl = 0.05
fp_max_iter = 20

[sweep]
deltas = 0, 1e-4, 1e-3
delta_bar = 1e-2
snapshot_times = 1e-5, 2e-5
parallelism = 3
output_dir = results/k
)");
  const SweepConfig cfg = parse_config(in);
  CHECK(cfg.scenario.name == "kuznetsov");
  CHECK(*cfg.scenario.amplitude == 2e-2);
  CHECK(*cfg.scenario.n_elements == 300);
  CHECK(*cfg.scenario.tau == 1e-4);
  CHECK(cfg.scenario.delta == 5e-3);
  CHECK(*cfg.scenario.sigma == 0.0);
  CHECK_FALSE(cfg.scenario.kappa.has_value());
  CHECK(cfg.newmark.cfl == 0.05);
  CHECK(cfg.newmark.fp_max_iter == 20);
  CHECK(cfg.newmark.a3 == 1.0 / 12.0);
  CHECK(cfg.deltas == std::vector<double>{0.0, 1e-4, 1e-3});
  CHECK(cfg.resolved_delta_bar() == 1e-2);
  CHECK(cfg.snapshot_times.size() == 2);
  CHECK(cfg.parallelism == 3);
  CHECK(cfg.output_dir == fs::path("results/k"));

  const ProblemSpec spec = build_problem(cfg.scenario, 1e-3);
  CHECK(spec.nonlin.sigma == 0.0);
  CHECK(spec.medium.tau == 1e-4);
  CHECK(spec.medium.delta == 1e-3);
}

TEST_CASE("config errors") {
  std::istringstream unknown("[medium]\ntua = 1\n");
  CHECK_THROWS_AS(parse_config(unknown), ConfigError);
  std::istringstream bad_number("[medium]\ntau = fast\n");
  CHECK_THROWS_AS(parse_config(bad_number), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), Error);

  SweepConfig cfg;
  cfg.deltas = {1e-3, 1e-2};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.deltas = {0.0, 1e-2, 1e-3};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.deltas = {0.0, 1e-2};
  cfg.delta_bar = 1e-3;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  ScenarioConfig sc;
  sc.name = "tsunami";
  CHECK_THROWS_AS(build_problem(sc, 0.0), ConfigError);
}

TEST_CASE("medium overrides re-derive the nonlinearity") {
  ScenarioConfig sc;
  sc.c = 3000.0;
  const ProblemSpec spec = build_problem(sc, 0.0);
  CHECK(spec.nonlin.k == Approx(derived_k(spec.medium)).epsilon(1e-15));
  CHECK(spec.nonlin.k == Approx(derived_k(water(1.5e-5, 0.0)) / 4.0).epsilon(1e-14));
}

TEST_CASE("reference-only sweep reports insufficient data") {
  const fs::path out = fresh_dir("ref_only");
  SweepConfig cfg = small_channel(out);
  cfg.deltas = {0.0};
  const SweepResult r = run_sweep(cfg);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].err_rel == 0.0);
  CHECK_FALSE(r.fit.has_value());
  CHECK_FALSE(r.fit_error.empty());
  const auto rate = nlohmann::json::parse(slurp(out / "rate.json"));
  CHECK(rate["status"] == "insufficient_data");
}

TEST_CASE("sweep outputs") {
  const fs::path out = fresh_dir("sweep");
  SweepConfig cfg = small_channel(out);
  cfg.snapshot_times = {1e-5, 2e-5};
  const SweepResult r = run_sweep(cfg);
  REQUIRE(r.records.size() == 4);
  CHECK(r.records[0].err_rel == 0.0);
  for (const auto& rec : r.records) {
    CHECK(rec.ok());
    CHECK(rec.dt == r.grid.dt);
    CHECK(rec.steps == r.grid.steps);
    CHECK(rec.max_fp_iters >= 1);
  }
  REQUIRE(r.fit.has_value());
  CHECK(r.fit->slope == Approx(1.0).epsilon(0.05));

  const auto back = read_sweep_csv(out / "sweep.csv");
  REQUIRE(back.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back[i].delta == r.records[i].delta);
    CHECK(back[i].err_rel == r.records[i].err_rel);
    CHECK(back[i].steps == r.records[i].steps);
    CHECK(back[i].status == "ok");
  }
  CHECK(slurp(out / "sweep.csv").rfind("delta,err_rel,dt,h,steps,max_fp_iters", 0) == 0);

  const auto rate = nlohmann::json::parse(slurp(out / "rate.json"));
  CHECK(rate["status"] == "ok");
  CHECK(rate["slope"].get<double>() == r.fit->slope);
  CHECK(rate["ratios"].size() == 3);

  const auto meta = nlohmann::json::parse(slurp(out / "run_meta.json"));
  CHECK(meta.contains("medium"));
  CHECK(meta["sweep"]["deltas"].size() == 4);

  for (double d : cfg.deltas) {
    for (double t : cfg.snapshot_times) {
      const fs::path snap = out / snapshot_filename(delta_tag(d), t);
      CHECK(fs::exists(snap));
      CHECK(data_rows(snap) == 151);
    }
  }
}

TEST_CASE("sweep rows do not depend on parallelism or on the other deltas") {
  SweepConfig cfg = small_channel(fresh_dir("p1"));
  cfg.parallelism = 1;
  run_sweep(cfg);
  const std::string serial = slurp(cfg.output_dir / "sweep.csv");

  cfg.output_dir = fresh_dir("p4");
  cfg.parallelism = 4;
  run_sweep(cfg);
  CHECK(slurp(cfg.output_dir / "sweep.csv") == serial);

  cfg.output_dir = fresh_dir("subset");
  cfg.deltas = {0.0, 1e-3};
  cfg.delta_bar = 1e-2;
  const SweepResult sub = run_sweep(cfg);
  const auto full = read_sweep_csv(fresh_dir("p1").parent_path() / "p4" / "sweep.csv");
  REQUIRE(sub.records.size() == 2);
  CHECK(sub.records[1].err_rel == full[2].err_rel);
  CHECK(sub.records[1].max_energy == full[2].max_energy);
  CHECK(sub.records[0].max_energy == full[0].max_energy);
}

TEST_CASE("failed runs become marker rows") {
  const fs::path out = fresh_dir("failing");
  SweepConfig cfg = small_channel(out);
  cfg.scenario.amplitude = 1e14;
  const SweepResult r = run_sweep(cfg);
  CHECK(r.records[0].status == "error:no_convergence");
  for (std::size_t i = 1; i < r.records.size(); ++i) {
    CHECK(r.records[i].status == "error:reference_failed");
    CHECK(std::isnan(r.records[i].err_rel));
  }
  CHECK_FALSE(r.fit.has_value());
  const auto back = read_sweep_csv(out / "sweep.csv");
  CHECK(back[0].status == "error:no_convergence");
  CHECK_FALSE(back[2].ok());
}

TEST_CASE("single runs write snapshots of the full mesh") {
  SUBCASE("channel") {
    SweepConfig cfg;
    cfg.scenario.final_time = 7e-6;
    cfg.snapshot_times = {7e-6};
    cfg.output_dir = fresh_dir("single_1d");
    const RunResult r = run_single(cfg);
    REQUIRE(r.snapshots.size() == 1);
    CHECK(data_rows(r.snapshots[0]) == 601);
    CHECK(fs::exists(cfg.output_dir / "energy_delta_0.csv"));
    CHECK(fs::exists(cfg.output_dir / "run_meta.json"));
  }
  SUBCASE("square") {
    SweepConfig cfg;
    cfg.scenario.name = "source_2d";
    cfg.scenario.final_time = 5e-6;
    cfg.snapshot_times = {0.0, 5e-6};
    cfg.output_dir = fresh_dir("single_2d");
    const RunResult r = run_single(cfg);
    REQUIRE(r.snapshots.size() == 2);
    for (const auto& s : r.snapshots) CHECK(data_rows(s) == 2601);
    std::ifstream in(r.snapshots[0]);
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,y,u,u_t,u_tt");
  }
}

TEST_CASE("snapshot of a zero state is all zeros") {
  const Mesh mesh = interval_mesh(0.4, 600);
  const fs::path p = fresh_dir("zero") / "z.csv";
  write_snapshot(p, mesh, AcousticState::zero(601));
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,u,u_t,u_tt");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.substr(line.find(',')) == ",0,0,0");
  }
  CHECK(rows == 601);
}

TEST_CASE("file naming and number formatting") {
  CHECK(snapshot_filename("delta_0.001", 7e-5) == "snapshot_delta_0.001_7e-05.csv");
  CHECK(delta_tag(0.0) == "delta_0");
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("time grid lands exactly on the final time") {
  const ProblemSpec spec = build_problem(ScenarioConfig{}, 0.0);
  const NewmarkParams p;
  const TimeGrid g = stable_dt(spec.medium, 0.0, 0.4 / 600, p, 1e-6);
  Simulation sim(spec, g, p);
  while (!sim.done()) sim.advance();
  CHECK(sim.state().t == 1e-6);
  CHECK(sim.step_index() == g.steps);
}

TEST_CASE("cleanup") {
  fs::remove_all(fs::temp_directory_path() / ("mgt_harness_" + std::to_string(::getpid())));
}
