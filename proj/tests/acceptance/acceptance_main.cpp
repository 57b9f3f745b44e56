// Acceptance suite: one PASS/FAIL line per criterion, exit code = number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "mgt/analysis.hpp"
#include "mgt/error.hpp"
#include "mgt/harness.hpp"
#include "mgt/models.hpp"
#include "mgt/validation.hpp"

namespace fs = std::filesystem;
using namespace mgt;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

int g_failures = 0;

void criterion(const char* name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] %s (%.1fs)\n       %s\n", o.passed ? "PASS" : "FAIL", name, secs,
              o.detail.c_str());
  std::fflush(stdout);
  if (!o.passed) ++g_failures;
}

std::string text(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch_dir(const std::string& leaf) {
  const fs::path dir = fs::temp_directory_path() /
                       ("mgt_acceptance_" + std::to_string(::getpid())) / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Expected relative energy-norm errors per delta.
struct ReferencePoint {
  double delta;
  double err;
};
constexpr ReferencePoint kReference1d[] = {{1e-5, 1.90988704083639e-06},
                                   {1e-4, 1.9098797837469e-05},
                                   {1e-3, 0.000190980721004107},
                                   {1e-2, 0.00190908136705375}};
constexpr ReferencePoint kReference2d[] = {{1e-5, 1.32555697863721e-06},
                                   {1e-4, 1.32555166724341e-05},
                                   {1e-3, 0.000132549855745382},
                                   {1e-2, 0.001324967537783}};

Outcome rate_outcome(const SweepResult& res, const ReferencePoint (&expected)[4], double lo, double hi) {
  if (!res.fit) return {false, "no rate fit: " + res.fit_error};
  bool ok = res.fit->slope >= lo && res.fit->slope <= hi;
  std::string detail = text("slope %.6f in [%.2f, %.2f]; err/expected:", res.fit->slope, lo, hi);
  for (const auto& p : expected) {
    const auto it = std::find_if(res.records.begin(), res.records.end(),
                                 [&](const SweepRecord& r) { return r.delta == p.delta; });
    if (it == res.records.end() || !it->ok()) return {false, text("delta %g missing", p.delta)};
    const double ratio = it->err_rel / p.err;
    ok = ok && ratio >= 0.5 && ratio <= 2.0;
    detail += text(" %g:%.3f", p.delta, ratio);
  }
  return {ok, detail + " (each in [0.5, 2])"};
}

SweepConfig channel_sweep_config(const fs::path& out, int parallelism) {
  SweepConfig cfg;
  cfg.scenario.name = "channel_1d";
  cfg.scenario.tau = 1.5e-5;
  cfg.deltas = {0.0, 1e-5, 1e-4, 1e-3, 1e-2};
  cfg.snapshot_times = {7e-5};
  cfg.output_dir = out;
  cfg.parallelism = parallelism;
  return cfg;
}

double max_gradient_1d(const Mesh& mesh, const Vector& u) {
  double g = 0.0;
  for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
    const auto el = mesh.element(e);
    g = std::max(g, std::abs(u[el[1]] - u[el[0]]) / mesh.element_measure(e));
  }
  return g;
}

Vector final_channel_pressure(double tau, bool linear) {
  ChannelOptions opt;
  opt.linear = linear;
  const ProblemSpec spec = channel_1d_scenario(0.0, tau, opt);
  const NewmarkParams p;
  const TimeGrid grid = stable_dt(spec.medium, 0.0, spec.domain.length / spec.domain.n_elements,
                                  p, spec.final_time);
  return run_problem(spec, grid, p, {}).final_state.u;
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  SweepResult channel;  // reused by the energy-bound and fixed-point criteria

  criterion("linear convergence rate, 1D nonlinear channel", [&] {
    channel = run_sweep(channel_sweep_config(scratch_dir("channel"), 4));
    return rate_outcome(channel, kReference1d, 0.95, 1.05);
  });

  criterion("linear convergence rate, 2D linear source problem", [&] {
    SweepConfig cfg;
    cfg.scenario.name = "source_2d";
    cfg.deltas = {0.0, 1e-5, 1e-4, 1e-3, 1e-2};
    cfg.output_dir = scratch_dir("source_2d");
    cfg.parallelism = 4;
    return rate_outcome(run_sweep(cfg), kReference2d, 0.95, 1.05);
  });

  criterion("modal oracle equivalence (FEM/Newmark vs closed form)", [] {
    const OrderStudy s = fem_modal_order_study(water(1.5e-5, 1e-3), 0.4, 2e-4, 16, 3, 0.1);
    std::string detail = text("order %.4f (>= 1.9), finest relative error %.3e (<= 1e-3); errors:",
                              s.order, s.errors.back());
    for (double e : s.errors) detail += text(" %.3e", e);
    return Outcome{s.order >= 1.9 && s.errors.back() <= 1e-3, detail};
  });

  criterion("time-integrator order on the scalar modal equation", [] {
    const double lambda = std::pow(std::numbers::pi / 0.4, 2);
    const OrderStudy s = scalar_time_order_study(water(1.5e-5, 1e-3), lambda, 5e-4, 100, 4);
    std::string detail = text("order %.4f (>= 1.9); errors:", s.order);
    for (double e : s.errors) detail += text(" %.3e", e);
    return Outcome{s.order >= 1.9, detail};
  });

  criterion("nonlinear steepening vs relaxation dominance", [] {
    const auto mesh = interval_mesh(0.4, 600);
    const double g_nl = max_gradient_1d(mesh, final_channel_pressure(1.5e-7, false));
    const double g_lin = max_gradient_1d(mesh, final_channel_pressure(1.5e-7, true));
    const double steepening = g_nl / g_lin;
    const Vector p_nl = final_channel_pressure(1e-3, false);
    const Vector p_lin = final_channel_pressure(1e-3, true);
    const double rel = (p_nl - p_lin).cwiseAbs().maxCoeff() / p_lin.cwiseAbs().maxCoeff();
    return Outcome{steepening >= 1.2 && rel <= 0.05,
                   text("tau=1.5e-7: max|p_x| nonlinear/linear = %.4f (>= 1.2); "
                        "tau=1e-3: |p_nl - p_lin|_inf / |p_lin|_inf = %.4e (<= 0.05)",
                        steepening, rel)};
  });

  criterion("delta-uniform energy bound", [&] {
    if (channel.records.empty()) return Outcome{false, "channel sweep unavailable"};
    double lo = INFINITY, hi = 0.0;
    for (const auto& r : channel.records) {
      if (!r.ok()) return Outcome{false, "failed run in sweep"};
      lo = std::min(lo, r.max_energy);
      hi = std::max(hi, r.max_energy);
    }
    const double spread = (hi - lo) / lo;
    return Outcome{spread < 0.10,
                   text("max_t E[p] ranges over [%.6e, %.6e]; relative spread %.3e (< 0.1)", lo,
                        hi, spread)};
  });

  criterion("Kuznetsov / Westervelt potential consistency", [] {
    const double tau = 1.5e-5;
    const MediumParams w = water(tau, 0.0);
    KuznetsovOptions kopt;
    kopt.sigma = 0.0;
    kopt.kappa = westervelt_potential_kappa(w);
    const ProblemSpec kuz = kuznetsov_scenario(0.0, tau, kopt);
    const ProblemSpec wes = westervelt_potential_scenario(0.0, tau);
    const NewmarkParams p;
    const TimeGrid grid = stable_dt(w, 0.0, 0.4 / 600, p, kuz.final_time);
    RunOptions rec;
    rec.record_trajectory = true;
    const RunResult a = run_problem(kuz, grid, p, rec);
    const RunResult b = run_problem(wes, grid, p, rec);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
      const double scale = std::max(b.trajectory.u_t[i].norm(), 1e-300);
      worst = std::max(worst, (a.trajectory.u_t[i] - b.trajectory.u_t[i]).norm() / scale);
    }
    worst = std::max(worst, (a.final_state.u - b.final_state.u).norm() / b.final_state.u.norm());

    KuznetsovOptions lin;
    lin.sigma = 0.0;
    lin.kappa = 0.0;
    ProblemSpec kuz_lin = kuznetsov_scenario(0.0, tau, lin);
    ProblemSpec mgt = kuz_lin;
    mgt.equation = Equation::GeneralizedMgt;
    mgt.nonlin = {};
    const RunResult c = run_problem(kuz_lin, grid, p, {});
    const RunResult d = run_problem(mgt, grid, p, {});
    const bool bitwise = c.final_state.u == d.final_state.u && c.final_state.u_t == d.final_state.u_t &&
                         c.final_state.u_tt == d.final_state.u_tt &&
                         c.final_state.u_ttt == d.final_state.u_ttt;
    return Outcome{worst <= 1e-10 && bitwise,
                   text("max relative difference %.3e (<= 1e-10); kappa=sigma=0 bitwise equal to "
                        "linear: %s",
                        worst, bitwise ? "yes" : "no")};
  });

  criterion("fixed-point behaviour", [&] {
    int worst = 0;
    for (const auto& r : channel.records) worst = std::max(worst, r.max_fp_iters);
    const bool bounded = !channel.records.empty() && worst <= 10;
    bool diverged = false;
    std::string why = "no error raised";
    try {
      ChannelOptions opt;
      opt.amplitude = 1e8 * 1e6;
      const ProblemSpec spec = channel_1d_scenario(0.0, 1.5e-5, opt);
      const NewmarkParams p;
      const TimeGrid grid = stable_dt(spec.medium, 1e-2, 0.4 / 600, p, spec.final_time);
      run_problem(spec, grid, p, {});
    } catch (const NoConvergence& e) {
      diverged = true;
      why = e.what();
    }
    return Outcome{bounded && diverged,
                   text("max iterations per step over the sweep %d (<= 10); amplified run: %s",
                        worst, why.c_str())};
  });

  criterion("determinism across parallelism", [] {
    const fs::path one = scratch_dir("det_p1");
    const fs::path four = scratch_dir("det_p4");
    run_sweep(channel_sweep_config(one, 1));
    run_sweep(channel_sweep_config(four, 4));
    const std::string a = slurp(one / "sweep.csv");
    const std::string b = slurp(four / "sweep.csv");
    const bool same = !a.empty() && a == b;
    return Outcome{same, text("sweep.csv (%zu bytes) identical for parallelism 1 and 4: %s",
                              a.size(), same ? "yes" : "no")};
  });

  fs::remove_all(fs::temp_directory_path() / ("mgt_acceptance_" + std::to_string(::getpid())));
  std::printf("%d criteria failed\n", g_failures);
  return g_failures;
}
