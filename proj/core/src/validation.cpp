#include "mgt/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>

#include "mgt/analysis.hpp"
#include "mgt/error.hpp"
#include "mgt/fem.hpp"
#include "mgt/harness.hpp"
#include "mgt/integrator.hpp"
#include "mgt/mesh.hpp"

namespace mgt {
namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

}  // namespace

double observed_order(std::span<const double> sizes, std::span<const double> errors) {
  if (sizes.size() != errors.size() || sizes.size() < 2) {
    throw InvalidArgument("observed_order: need matching series of length >= 2");
  }
  const double n = static_cast<double>(sizes.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    mx += std::log(sizes[i]);
    my += std::log(errors[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double dx = std::log(sizes[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

OrderStudy scalar_time_order_study(const MediumParams& m, double lambda, double final_time,
                                   long base_steps, int halvings) {
  const ModalData data{1.0, 0.0, 0.0};
  const ModalSolution exact(m, lambda, data);
  SparseMatrix mass(1, 1), stiff(1, 1);
  mass.insert(0, 0) = 1.0;
  stiff.insert(0, 0) = lambda;
  auto ops = std::make_shared<const FemOperators>(FemOperators::from_matrices(mass, stiff));

  OrderStudy study;
  for (int level = 0; level <= halvings; ++level) {
    const long steps = base_steps << level;
    const double dt = final_time / static_cast<double>(steps);
    const NonlinearStepper stepper(ops, m, {}, NonlinearModel::linear, dt, NewmarkParams{});
    Vector u0(1), zero = Vector::Zero(1);
    u0[0] = data.a0;
    AcousticState s = stepper.initial_state(u0, zero, zero, {});
    double err = 0.0, scale = 0.0;
    for (long n = 1; n <= steps; ++n) {
      s = stepper.step(s, {}).state;
      const double t = dt * static_cast<double>(n);
      const double a = exact(t).a;
      err = std::max(err, std::abs(s.u[0] - a));
      scale = std::max(scale, std::abs(a));
    }
    study.sizes.push_back(dt);
    study.errors.push_back(err / scale);
  }
  study.order = observed_order(study.sizes, study.errors);
  return study;
}

OrderStudy fem_modal_order_study(const MediumParams& m, double length, double final_time,
                                 int base_elements, int halvings, double cfl) {
  const DirichletMode mode = interval_mode(length, 1);
  const ModalSolution exact(m, mode.lambda, ModalData{1.0, 0.0, 0.0});
  NewmarkParams p;
  p.cfl = cfl;

  OrderStudy study;
  for (int level = 0; level <= halvings; ++level) {
    const int n_el = base_elements << level;
    auto mesh = std::make_shared<const Mesh>(interval_mesh(length, n_el));
    auto ops = std::make_shared<const FemOperators>(assemble(mesh));
    const TimeGrid grid = stable_dt(m, m.delta, mesh->h(), p, final_time);
    const NonlinearStepper stepper(ops, m, {}, NonlinearModel::linear, grid.dt, p);

    Vector shape(ops->n_nodes);
    for (Eigen::Index i = 0; i < ops->n_nodes; ++i) shape[i] = mode.shape(mesh->node(i).x, 0.0);
    const Vector shape_int = ops->restrict_to_interior(shape);
    const Vector zero = Vector::Zero(ops->n_nodes);
    AcousticState s = stepper.initial_state(shape, zero, zero, {});

    double err = 0.0, scale = 0.0;
    for (long n = 1; n <= grid.steps; ++n) {
      s = stepper.step(s, {}).state;
      const double a = exact(grid.dt * static_cast<double>(n)).a;
      const Vector diff = ops->restrict_to_interior(s.u) - a * shape_int;
      err = std::max(err, mass_norm(*ops, diff));
      scale = std::max(scale, std::abs(a) * mass_norm(*ops, shape_int));
    }
    study.sizes.push_back(mesh->h());
    study.errors.push_back(err / scale);
  }
  study.order = observed_order(study.sizes, study.errors);
  return study;
}

std::vector<CheckResult> run_validation() {
  std::vector<CheckResult> out;
  auto check = [&](const std::string& name, auto&& body) {
    CheckResult r{name, false, ""};
    try {
      body(r);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    out.push_back(std::move(r));
  };

  check("mesh measures", [](CheckResult& r) {
    const Mesh a = interval_mesh(0.4, 600);
    const Mesh b = square_triangle_mesh(0.5, 0.01);
    double la = 0.0, lb = 0.0;
    for (std::size_t e = 0; e < a.n_elements(); ++e) la += a.element_measure(e);
    for (std::size_t e = 0; e < b.n_elements(); ++e) lb += b.element_measure(e);
    const double worst = std::max(std::abs(la - 0.4) / 0.4, std::abs(lb - 0.25) / 0.25);
    r.passed = worst <= 1e-12;
    r.detail = fmt("max relative measure defect %.3e", worst);
  });

  check("operator invariants", [](CheckResult& r) {
    const FemOperators ops = assemble(square_triangle_mesh(0.5, 0.05));
    const double asym = (SparseMatrix(ops.mass - SparseMatrix(ops.mass.transpose()))).norm() +
                        (SparseMatrix(ops.stiffness - SparseMatrix(ops.stiffness.transpose()))).norm();
    const Vector ones = Vector::Ones(ops.n_nodes);
    const double volume = ones.dot(ops.mass_full * ones);
    const double row_sum = (ops.stiffness_full * ones).cwiseAbs().maxCoeff();
    r.passed = asym <= 1e-13 * ops.stiffness.norm() && std::abs(volume - 0.25) <= 1e-10 * 0.25 &&
               row_sum <= 1e-12;
    r.detail = fmt("asymmetry %.2e, |1'M1 - |O|| = %.2e", asym, std::abs(volume - 0.25));
  });

  check("modal roots (Vieta)", [](CheckResult& r) {
    const MediumParams m = water(1.5e-5, 0.0);
    const auto roots = characteristic_roots(m, std::pow(std::numbers::pi / 0.4, 2));
    const Complex sum = roots[0] + roots[1] + roots[2];
    const double defect = std::abs(sum + 1.0 / m.tau) * m.tau;
    r.passed = defect <= 1e-12;
    r.detail = fmt("relative defect of root sum %.2e", defect);
  });

  check("time integrator order", [](CheckResult& r) {
    const double lambda = std::pow(std::numbers::pi / 0.4, 2);
    const OrderStudy s = scalar_time_order_study(water(1.5e-5, 1e-3), lambda, 5e-4, 100, 4);
    r.passed = s.order >= 1.9;
    r.detail = fmt("observed order %.3f, finest error %.3e", s.order, s.errors.back());
  });

  check("FEM vs modal oracle", [](CheckResult& r) {
    const OrderStudy s = fem_modal_order_study(water(1.5e-5, 1e-3), 0.4, 2e-4, 16, 3, 0.1);
    r.passed = s.order >= 1.9 && s.errors.back() <= 1e-3;
    r.detail = fmt("observed order %.3f, finest error %.3e", s.order, s.errors.back());
  });

  check("z-energy conservation (delta = 0)", [](CheckResult& r) {
    const MediumParams m = water(1.5e-5, 0.0);
    auto mesh = std::make_shared<const Mesh>(interval_mesh(0.4, 100));
    auto ops = std::make_shared<const FemOperators>(assemble(mesh));
    const NewmarkParams p;
    const double dt = cfl_time_step(m, 0.0, mesh->h(), p);
    const NonlinearStepper stepper(ops, m, {}, NonlinearModel::linear, dt, p);
    const DirichletMode mode = interval_mode(0.4, 2);
    Vector u0(ops->n_nodes);
    for (Eigen::Index i = 0; i < ops->n_nodes; ++i) u0[i] = mode.shape(mesh->node(i).x, 0.0);
    const Vector zero = Vector::Zero(ops->n_nodes);
    AcousticState s = stepper.initial_state(u0, zero, zero, {});
    const double e0 = energy(*ops, m, s).e_z;
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
      s = stepper.step(s, {}).state;
      worst = std::max(worst, std::abs(energy(*ops, m, s).e_z - e0) / e0);
    }
    r.passed = worst <= 0.05;
    r.detail = fmt("max relative drift %.3e over 100 steps", worst);
  });

  check("determinism", [](CheckResult& r) {
    ChannelOptions opt;
    opt.n_elements = 100;
    opt.final_time = 5e-6;
    const ProblemSpec spec = channel_1d_scenario(1e-3, 1.5e-5, opt);
    const NewmarkParams p;
    const double h = spec.domain.length / spec.domain.n_elements;
    const TimeGrid grid = stable_dt(spec.medium, spec.medium.delta, h, p, spec.final_time);
    const RunResult a = run_problem(spec, grid, p, {});
    const RunResult b = run_problem(spec, grid, p, {});
    r.passed = a.final_state.u == b.final_state.u && a.final_state.u_tt == b.final_state.u_tt;
    r.detail = r.passed ? "bitwise identical" : "trajectories differ";
  });

  return out;
}

}  // namespace mgt
