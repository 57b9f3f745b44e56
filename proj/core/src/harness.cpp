#include "mgt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "json.hpp"
#include "mgt/error.hpp"

namespace mgt {
namespace {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using nlohmann::json;

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && std::isspace(static_cast<unsigned char>(*first))) ++first;
  while (last > first && std::isspace(static_cast<unsigned char>(last[-1]))) --last;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("config: '" + key + "' is not a number: '" + text + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(parse_double(key, item));
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config: '" + key + "' is not a boolean: '" + text + "'");
}

void open_for_write(std::ofstream& out, const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  out.open(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
}

std::string status_of(const std::exception& e) {
  if (dynamic_cast<const NoConvergence*>(&e)) return "error:no_convergence";
  if (dynamic_cast<const SolverFailure*>(&e)) return "error:solver_failure";
  return "error:other";
}

json medium_json(const MediumParams& m) {
  return {{"tau", m.tau}, {"c", m.c},   {"delta", m.delta},
          {"rho", m.rho}, {"b_over_a", m.b_over_a}, {"alpha0", m.alpha0}};
}

json problem_json(const ProblemSpec& spec, const TimeGrid& grid, double h,
                  const NewmarkParams& p) {
  const NonlinearityParams nl = effective_nonlinearity(spec);
  return {
      {"scenario", spec.name},
      {"equation", to_string(spec.equation)},
      {"medium", medium_json(spec.medium)},
      {"nonlinearity", {{"k", nl.k}, {"kappa", nl.kappa}, {"sigma", nl.sigma}}},
      {"domain",
       {{"dim", spec.domain.dim},
        {"length", spec.domain.length},
        {"n_elements", spec.domain.n_elements},
        {"h", h}}},
      {"integrator",
       {{"a3", p.a3},
        {"beta", p.beta},
        {"gamma", p.gamma},
        {"cfl", p.cfl},
        {"fp_tol", p.fp_tol},
        {"fp_max_iter", p.fp_max_iter}}},
      {"time", {{"final_time", grid.final_time}, {"dt", grid.dt}, {"steps", grid.steps}}},
  };
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out;
  open_for_write(out, path);
  out << j.dump(2) << '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string delta_tag(double delta) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "delta_%g", delta);
  return buf;
}

std::string snapshot_filename(const std::string& tag, double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", t);
  return "snapshot_" + tag + "_" + buf + ".csv";
}

// --- configuration ---------------------------------------------------------

void SweepConfig::validate() const {
  if (deltas.empty() || deltas.front() != 0.0) {
    throw ConfigError("sweep: deltas must start with the reference value 0");
  }
  for (std::size_t i = 1; i < deltas.size(); ++i) {
    if (!(deltas[i] > deltas[i - 1])) throw ConfigError("sweep: deltas must be strictly ascending");
  }
  if (delta_bar && !(*delta_bar >= deltas.back())) {
    throw ConfigError("sweep: delta_bar must be at least the largest delta");
  }
  if (parallelism < 1) throw ConfigError("sweep: parallelism must be at least 1");
  newmark.validate();
}

double SweepConfig::resolved_delta_bar() const {
  return delta_bar.value_or(deltas.empty() ? 0.0 : deltas.back());
}

SweepConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  SweepConfig cfg;
  ScenarioConfig& sc = cfg.scenario;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto num = [](std::optional<double>& slot) -> Setter {
    return [&slot](const std::string& k, const std::string& v) { slot = parse_double(k, v); };
  };
  auto plain = [](double& slot) -> Setter {
    return [&slot](const std::string& k, const std::string& v) { slot = parse_double(k, v); };
  };
  const std::map<std::string, Setter> setters = {
      {"scenario.name", [&](const std::string&, const std::string& v) { sc.name = v; }},
      {"scenario.amplitude", num(sc.amplitude)},
      {"scenario.final_time", num(sc.final_time)},
      {"scenario.length", num(sc.length)},
      {"scenario.h", num(sc.h)},
      {"scenario.n_elements",
       [&](const std::string& k, const std::string& v) {
         sc.n_elements = static_cast<int>(parse_double(k, v));
       }},
      {"scenario.linear", [&](const std::string& k, const std::string& v) { sc.linear = parse_bool(k, v); }},
      {"medium.delta", plain(sc.delta)},
      {"medium.tau", num(sc.tau)},
      {"medium.c", num(sc.c)},
      {"medium.rho", num(sc.rho)},
      {"medium.b_over_a", num(sc.b_over_a)},
      {"medium.alpha0", num(sc.alpha0)},
      {"nonlinearity.kappa", num(sc.kappa)},
      {"nonlinearity.sigma", num(sc.sigma)},
      {"integrator.a3", plain(cfg.newmark.a3)},
      {"integrator.beta", plain(cfg.newmark.beta)},
      {"integrator.gamma", plain(cfg.newmark.gamma)},
      {"integrator.cfl", plain(cfg.newmark.cfl)},
      {"integrator.fp_tol", plain(cfg.newmark.fp_tol)},
      {"integrator.fp_max_iter",
       [&](const std::string& k, const std::string& v) {
         cfg.newmark.fp_max_iter = static_cast<int>(parse_double(k, v));
       }},
      {"sweep.deltas", [&](const std::string& k, const std::string& v) { cfg.deltas = parse_list(k, v); }},
      {"sweep.delta_bar",
       [&](const std::string& k, const std::string& v) { cfg.delta_bar = parse_double(k, v); }},
      {"sweep.snapshot_times",
       [&](const std::string& k, const std::string& v) { cfg.snapshot_times = parse_list(k, v); }},
      {"sweep.parallelism",
       [&](const std::string& k, const std::string& v) {
         cfg.parallelism = static_cast<int>(parse_double(k, v));
       }},
      {"sweep.output_dir", [&](const std::string&, const std::string& v) { cfg.output_dir = v; }},
  };
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("config: key '" + section + "' outside of a section");
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      auto it = setters.find(full);
      if (it == setters.end()) throw ConfigError("config: unknown key '" + full + "'");
      it->second(full, value.data());
    }
  }
  return cfg;
}

SweepConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  return parse_config(in);
}

ProblemSpec build_problem(const ScenarioConfig& sc, double delta) {
  const double tau = sc.tau.value_or(1.5e-5);
  ChannelOptions channel;
  if (sc.final_time) channel.final_time = *sc.final_time;
  if (sc.length) {
    channel.length = *sc.length;
    channel.center = 0.5 * *sc.length;
  }
  if (sc.n_elements) channel.n_elements = *sc.n_elements;
  channel.linear = sc.linear;

  ProblemSpec spec;
  if (sc.name == "channel_1d") {
    if (sc.amplitude) channel.amplitude = *sc.amplitude;
    spec = channel_1d_scenario(delta, tau, channel);
  } else if (sc.name == "source_2d") {
    Source2dOptions opt;
    opt.tau = tau;
    if (sc.amplitude) opt.amplitude = *sc.amplitude;
    if (sc.final_time) opt.final_time = *sc.final_time;
    if (sc.length) {
      opt.side = *sc.length;
      opt.x0 = opt.y0 = 0.5 * *sc.length;
    }
    if (sc.h) opt.h = *sc.h;
    spec = source_2d_scenario(delta, opt);
  } else if (sc.name == "kuznetsov") {
    KuznetsovOptions opt;
    opt.geometry = channel;
    opt.sigma = sc.sigma;
    opt.kappa = sc.kappa;
    if (sc.amplitude) opt.amplitude = *sc.amplitude;
    spec = kuznetsov_scenario(delta, tau, opt);
    if (sc.linear) spec.nonlin = {};
  } else if (sc.name == "westervelt_potential") {
    spec = westervelt_potential_scenario(delta, tau, sc.amplitude.value_or(1e-2), channel);
  } else {
    throw ConfigError("unknown scenario '" + sc.name + "'");
  }

  const bool medium_override = sc.c || sc.rho || sc.b_over_a || sc.alpha0;
  if (sc.c) spec.medium.c = *sc.c;
  if (sc.rho) spec.medium.rho = *sc.rho;
  if (sc.b_over_a) spec.medium.b_over_a = *sc.b_over_a;
  if (sc.alpha0) spec.medium.alpha0 = *sc.alpha0;
  if (medium_override) {
    // re-derive coefficients that depend on the medium
    if (spec.equation == Equation::JmgtWesterveltPressure && !sc.linear) {
      spec.nonlin.k = derived_k(spec.medium);
    }
    if (spec.equation == Equation::JmgtKuznetsovPotential && !sc.kappa && !sc.linear) {
      spec.nonlin.kappa = derived_kappa(spec.medium);
    }
    if (spec.equation == Equation::JmgtWesterveltPotential) {
      spec.nonlin.kappa = westervelt_potential_kappa(spec.medium);
    }
  }
  spec.validate();
  return spec;
}

// --- simulation ------------------------------------------------------------

std::shared_ptr<const FemOperators> build_operators(const ProblemSpec& spec) {
  auto mesh = std::make_shared<const Mesh>(spec.domain.build());
  return std::make_shared<const FemOperators>(assemble(std::move(mesh)));
}

Simulation::Simulation(const ProblemSpec& spec, const TimeGrid& grid, const NewmarkParams& p,
                       std::shared_ptr<const FemOperators> ops)
    : spec_(spec), grid_(grid), ops_(ops ? std::move(ops) : build_operators(spec)) {
  spec_.validate();
  if (grid_.steps < 1 || !(grid_.dt > 0.0)) throw InvalidArgument("simulation: empty time grid");
  stepper_ = std::make_unique<NonlinearStepper>(ops_, spec_.medium, effective_nonlinearity(spec_),
                                                model_of(spec_.equation), grid_.dt, p);
  source_ = make_source_load(spec_, ops_);
  InitialFields init = sample_initial(spec_, *ops_->mesh);
  state_ = stepper_->initial_state(std::move(init.u0), std::move(init.u1), std::move(init.u2),
                                   source_);
}

const StepReport& Simulation::advance() {
  if (done()) throw InvalidArgument("simulation: already at the final time");
  last_ = stepper_->step(state_, source_);
  ++step_;
  last_.state.t = step_ == grid_.steps ? grid_.final_time : grid_.dt * static_cast<double>(step_);
  state_ = last_.state;
  return last_;
}

void write_snapshot(const fs::path& path, const Mesh& mesh, const AcousticState& s) {
  std::ofstream out;
  open_for_write(out, path);
  out << (mesh.dim() == 1 ? "x,u,u_t,u_tt\n" : "x,y,u,u_t,u_tt\n");
  for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
    const Eigen::Index k = static_cast<Eigen::Index>(i);
    out << format_double(mesh.node(i).x) << ',';
    if (mesh.dim() == 2) out << format_double(mesh.node(i).y) << ',';
    out << format_double(s.u[k]) << ',' << format_double(s.u_t[k]) << ','
        << format_double(s.u_tt[k]) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

RunResult run_problem(const ProblemSpec& spec, const TimeGrid& grid, const NewmarkParams& p,
                      const RunOptions& opt, std::shared_ptr<const FemOperators> ops) {
  Simulation sim(spec, grid, p, std::move(ops));
  const FemOperators& o = *sim.operators();

  // step index of each snapshot (nearest grid point)
  std::vector<std::pair<long, double>> snaps;
  for (double t : opt.snapshot_times) {
    if (t < 0.0 || t > grid.final_time * (1.0 + 1e-12)) {
      throw InvalidArgument("snapshot time outside [0, T]");
    }
    snaps.emplace_back(std::clamp(std::lround(t / grid.dt), 0L, grid.steps), t);
  }

  RunResult res;
  res.grid = grid;
  res.h = sim.mesh().h();
  EnergyNormAccumulator diff;
  std::ofstream energy_out;
  const bool writing = !opt.output_dir.empty();
  if (writing && opt.write_energy) {
    open_for_write(energy_out, opt.output_dir / ("energy_" + opt.tag + ".csv"));
    energy_out << "t,e_full,e_z\n";
  }

  auto observe = [&](const AcousticState& s, long n) {
    const EnergySample e = energy(o, spec.medium, s);
    res.max_energy = std::max(res.max_energy, e.e_full);
    if (energy_out.is_open()) {
      energy_out << format_double(e.t) << ',' << format_double(e.e_full) << ','
                 << format_double(e.e_z) << '\n';
    }
    if (opt.record_trajectory) res.trajectory.record(o, s);
    if (opt.reference) {
      const auto idx = static_cast<std::size_t>(n);
      diff.add(o, o.restrict_to_interior(s.u_tt) - opt.reference->u_tt[idx],
               o.restrict_to_interior(s.u_t) - opt.reference->u_t[idx]);
    }
    if (writing) {
      for (const auto& [step, t] : snaps) {
        if (step != n) continue;
        const fs::path path = opt.output_dir / snapshot_filename(opt.tag, t);
        write_snapshot(path, sim.mesh(), s);
        res.snapshots.push_back(path);
      }
    }
  };

  if (opt.reference && opt.reference->size() != static_cast<std::size_t>(grid.steps + 1)) {
    throw InvalidArgument("reference trajectory does not match the time grid");
  }
  observe(sim.state(), 0);
  while (!sim.done()) {
    const StepReport& rep = sim.advance();
    res.max_fp_iters = std::max(res.max_fp_iters, rep.iterations);
    observe(rep.state, sim.step_index());
  }
  if (opt.reference) {
    const double denom = energy_norm(o, *opt.reference);
    if (!(denom >= 1e-300)) throw DegenerateReference("reference run has zero energy norm");
    res.err_rel = diff.value() / denom;
  }
  res.final_state = sim.state();
  return res;
}

// --- sweeps ----------------------------------------------------------------

void write_sweep_csv(const fs::path& path, const std::vector<SweepRecord>& records) {
  std::ofstream out;
  open_for_write(out, path);
  out << "delta,err_rel,dt,h,steps,max_fp_iters,max_energy,status\n";
  for (const auto& r : records) {
    out << format_double(r.delta) << ',' << format_double(r.err_rel) << ','
        << format_double(r.dt) << ',' << format_double(r.h) << ',' << r.steps << ','
        << r.max_fp_iters << ',' << format_double(r.max_energy) << ',' << r.status << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<SweepRecord> read_sweep_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path.string() + "' is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) header.push_back(col);
  }
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto c_delta = column("delta");
  const auto c_err = column("err_rel");
  if (!c_delta || !c_err) throw IoError("sweep csv lacks delta/err_rel columns");

  std::vector<SweepRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    auto get = [&](std::optional<std::size_t> c) -> std::optional<std::string> {
      if (!c || *c >= cells.size()) return std::nullopt;
      return cells[*c];
    };
    SweepRecord r;
    r.delta = parse_double("delta", *get(c_delta));
    r.err_rel = parse_double("err_rel", get(c_err).value_or("nan"));
    if (auto v = get(column("dt"))) r.dt = parse_double("dt", *v);
    if (auto v = get(column("h"))) r.h = parse_double("h", *v);
    if (auto v = get(column("steps"))) r.steps = static_cast<long>(parse_double("steps", *v));
    if (auto v = get(column("max_fp_iters"))) r.max_fp_iters = static_cast<int>(parse_double("max_fp_iters", *v));
    if (auto v = get(column("max_energy"))) r.max_energy = parse_double("max_energy", *v);
    if (auto v = get(column("status"))) r.status = *v;
    records.push_back(r);
  }
  return records;
}

void write_rate_json(const fs::path& path, const std::vector<SweepRecord>& records) {
  json j;
  try {
    const RateFit fit = fit_rate(records);
    json ratios = json::array();
    for (const auto& [d, r] : fit.ratios) ratios.push_back({{"delta", d}, {"ratio", r}});
    j = {{"status", "ok"},
         {"slope", fit.slope},
         {"intercept", fit.intercept},
         {"mean_ratio", fit.mean_ratio},
         {"max_ratio_deviation", fit.max_ratio_deviation},
         {"ratios", ratios}};
  } catch (const InsufficientData& e) {
    j = {{"status", "insufficient_data"}, {"message", e.what()}};
  }
  write_json(path, j);
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const double delta_bar = cfg.resolved_delta_bar();
  const ProblemSpec ref_spec = build_problem(cfg.scenario, 0.0);
  const auto ops = build_operators(ref_spec);
  const double h = ops->mesh->h();
  const TimeGrid grid = stable_dt(ref_spec.medium, delta_bar, h, cfg.newmark, ref_spec.final_time);

  SweepResult result;
  result.grid = grid;
  result.records.resize(cfg.deltas.size());
  for (std::size_t i = 0; i < cfg.deltas.size(); ++i) {
    SweepRecord& r = result.records[i];
    r.delta = cfg.deltas[i];
    r.dt = grid.dt;
    r.h = h;
    r.steps = grid.steps;
  }

  RunOptions ref_opt;
  ref_opt.snapshot_times = cfg.snapshot_times;
  ref_opt.output_dir = cfg.output_dir;
  ref_opt.tag = delta_tag(0.0);
  ref_opt.record_trajectory = cfg.deltas.size() > 1;
  Trajectory reference;
  bool reference_ok = true;
  try {
    RunResult ref = run_problem(ref_spec, grid, cfg.newmark, ref_opt, ops);
    result.records[0].max_fp_iters = ref.max_fp_iters;
    result.records[0].max_energy = ref.max_energy;
    result.records[0].err_rel = 0.0;
    reference = std::move(ref.trajectory);
  } catch (const Error& e) {
    result.records[0].status = status_of(e);
    result.records[0].err_rel = std::nan("");
    reference_ok = false;
  }

  std::atomic<std::size_t> next{1};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.deltas.size(); i = next++) {
      SweepRecord& r = result.records[i];
      if (!reference_ok) {
        r.status = "error:reference_failed";
        r.err_rel = std::nan("");
        continue;
      }
      try {
        RunOptions opt;
        opt.snapshot_times = cfg.snapshot_times;
        opt.output_dir = cfg.output_dir;
        opt.tag = delta_tag(r.delta);
        opt.reference = &reference;
        const RunResult run =
            run_problem(build_problem(cfg.scenario, r.delta), grid, cfg.newmark, opt, ops);
        r.err_rel = run.err_rel;
        r.max_fp_iters = run.max_fp_iters;
        r.max_energy = run.max_energy;
      } catch (const Error& e) {
        r.status = status_of(e);
        r.err_rel = std::nan("");
      }
    }
  };
  const int n_workers =
      std::max(1, std::min<int>(cfg.parallelism, static_cast<int>(cfg.deltas.size()) - 1));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  try {
    result.fit = fit_rate(result.records);
  } catch (const InsufficientData& e) {
    result.fit_error = e.what();
  }

  if (!cfg.output_dir.empty()) {
    write_sweep_csv(cfg.output_dir / "sweep.csv", result.records);
    write_rate_json(cfg.output_dir / "rate.json", result.records);
    json meta = problem_json(ref_spec, grid, h, cfg.newmark);
    meta["medium"].erase("delta");
    meta["sweep"] = {{"deltas", cfg.deltas},
                     {"delta_bar", delta_bar},
                     {"snapshot_times", cfg.snapshot_times},
                     {"parallelism", cfg.parallelism}};
    write_json(cfg.output_dir / "run_meta.json", meta);
  }
  return result;
}

RunResult run_single(const SweepConfig& cfg) {
  cfg.newmark.validate();
  const ProblemSpec spec = build_problem(cfg.scenario, cfg.scenario.delta);
  const auto ops = build_operators(spec);
  const double delta_bar = cfg.delta_bar.value_or(spec.medium.delta);
  const TimeGrid grid = stable_dt(spec.medium, delta_bar, ops->mesh->h(), cfg.newmark,
                                  spec.final_time);
  RunOptions opt;
  opt.snapshot_times = cfg.snapshot_times;
  opt.output_dir = cfg.output_dir;
  opt.tag = delta_tag(spec.medium.delta);
  opt.write_energy = true;
  RunResult res = run_problem(spec, grid, cfg.newmark, opt, ops);
  if (!cfg.output_dir.empty()) {
    json meta = problem_json(spec, grid, res.h, cfg.newmark);
    meta["result"] = {{"max_fp_iters", res.max_fp_iters}, {"max_energy", res.max_energy}};
    write_json(cfg.output_dir / "run_meta.json", meta);
  }
  return res;
}

}  // namespace mgt
