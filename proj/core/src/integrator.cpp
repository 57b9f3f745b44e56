#include "mgt/integrator.hpp"

#include <cmath>
#include <string>

#include "mgt/error.hpp"

namespace mgt {

void NewmarkParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidArgument(std::string("newmark: ") + what);
  };
  require(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
  require(beta > 0.0 && beta <= 0.5, "beta must lie in (0, 1/2]");
  require(a3 > 0.0 && a3 <= 1.0 / 6.0, "a3 must lie in (0, 1/6]");
  require(cfl > 0.0 && std::isfinite(cfl), "cfl must be positive");
  require(fp_tol > 0.0, "fp_tol must be positive");
  require(fp_max_iter >= 1, "fp_max_iter must be at least 1");
}

double cfl_time_step(const MediumParams& m, double delta_bar, double h, const NewmarkParams& p) {
  if (!(h > 0.0)) throw InvalidArgument("cfl_time_step: h must be positive");
  if (!(delta_bar >= 0.0)) throw InvalidArgument("cfl_time_step: delta_bar must be non-negative");
  const double speed = m.c + std::sqrt(delta_bar / m.tau);
  return p.cfl * h / speed;
}

TimeGrid stable_dt(const MediumParams& m, double delta_bar, double h, const NewmarkParams& p,
                   double final_time) {
  if (!(final_time > 0.0)) throw InvalidArgument("stable_dt: final time must be positive");
  const double raw = cfl_time_step(m, delta_bar, h, p);
  const double ratio = final_time / raw;
  // An integer ratio polluted by rounding must not gain a step.
  long steps = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio) {
    steps = static_cast<long>(std::ceil(ratio));
  }
  steps = std::max(steps, 1L);
  return {final_time / static_cast<double>(steps), steps, final_time};
}

PredictedState newmark_predict(const AcousticState& s, double dt, const NewmarkParams& p) {
  const double dt2 = dt * dt;
  const double dt3 = dt2 * dt;
  PredictedState pred;
  pred.t = s.t + dt;
  pred.u = s.u + dt * s.u_t + (0.5 * dt2) * s.u_tt + (dt3 * (1.0 / 6.0 - p.a3)) * s.u_ttt;
  pred.u_t = s.u_t + dt * s.u_tt + (dt2 * (0.5 - p.beta)) * s.u_ttt;
  pred.u_tt = s.u_tt + (dt * (1.0 - p.gamma)) * s.u_ttt;
  return pred;
}

AcousticState newmark_correct(const PredictedState& pred, const Vector& jerk, double dt,
                              const NewmarkParams& p) {
  AcousticState s;
  s.t = pred.t;
  s.u = pred.u + (dt * dt * dt * p.a3) * jerk;
  s.u_t = pred.u_t + (dt * dt * p.beta) * jerk;
  s.u_tt = pred.u_tt + (dt * p.gamma) * jerk;
  s.u_ttt = jerk;
  return s;
}

namespace {

// Clamps round-off negatives but lets NaN through; std::max(0.0, NaN) would hide an overflow.
double root_of_form(double q) { return q < 0.0 ? 0.0 : std::sqrt(q); }

}  // namespace

double mass_norm(const FemOperators& ops, const Vector& v) {
  return root_of_form(v.dot(ops.mass * v));
}

double stiffness_norm(const FemOperators& ops, const Vector& v) {
  return root_of_form(v.dot(ops.stiffness * v));
}

// ---------------------------------------------------------------------------

LinearStepper::LinearStepper(std::shared_ptr<const FemOperators> ops, const MediumParams& m,
                             double dt, const NewmarkParams& p, const CoefficientFields& coeffs)
    : ops_(std::move(ops)), medium_(m), dt_(dt), params_(p) {
  if (!ops_) throw InvalidArgument("LinearStepper: null operators");
  m.validate();
  p.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("LinearStepper: dt must be positive");

  const FemOperators& o = *ops_;
  mass_alpha_ = coeffs.alpha ? weighted_mass(o, *coeffs.alpha) : SparseMatrix(m.alpha0 * o.mass);
  damping_ = m.b() * o.stiffness;
  if (coeffs.mu) damping_ -= weighted_mass(o, *coeffs.mu);
  elastic_ = (m.c * m.c) * o.stiffness;
  if (coeffs.eta) elastic_ -= weighted_mass(o, *coeffs.eta);

  const double dt2 = dt * dt;
  system_ = m.tau * o.mass + (dt * p.gamma) * mass_alpha_ + (dt2 * p.beta) * damping_ +
            (dt2 * dt * p.a3) * elastic_;
  system_.makeCompressed();

  step_solver_.compute(system_);
  if (step_solver_.info() != Eigen::Success || !(step_solver_.vectorD().minCoeff() > 0.0)) {
    throw SolverFailure("step matrix is not symmetric positive definite");
  }
  mass_solver_.compute(o.mass);
  if (mass_solver_.info() != Eigen::Success || !(mass_solver_.vectorD().minCoeff() > 0.0)) {
    throw SolverFailure("mass matrix is not symmetric positive definite");
  }
}

Vector LinearStepper::apply_stiffness_terms(const Vector& u, const Vector& u_t,
                                            const Vector& u_tt) const {
  return mass_alpha_ * u_tt + damping_ * u_t + elastic_ * u;
}

AcousticState LinearStepper::step_from(const PredictedState& pred, const Vector& load) const {
  const FemOperators& o = *ops_;
  const Vector rhs = load - apply_stiffness_terms(o.restrict_to_interior(pred.u),
                                                  o.restrict_to_interior(pred.u_t),
                                                  o.restrict_to_interior(pred.u_tt));
  const Vector jerk = step_solver_.solve(rhs);
  return newmark_correct(pred, o.extend_to_full(jerk), dt_, params_);
}

AcousticState LinearStepper::step(const AcousticState& s, const Vector& load) const {
  return step_from(newmark_predict(s, dt_, params_), load);
}

AcousticState LinearStepper::step(const AcousticState& s, const SourceLoad& source) const {
  const Vector load = source ? source(s.t + dt_) : Vector::Zero(ops_->n_interior());
  return step(s, load);
}

Vector LinearStepper::consistent_jerk(const AcousticState& s, const Vector& load) const {
  const FemOperators& o = *ops_;
  const Vector rhs = load - apply_stiffness_terms(o.restrict_to_interior(s.u),
                                                  o.restrict_to_interior(s.u_t),
                                                  o.restrict_to_interior(s.u_tt));
  const Vector jerk = mass_solver_.solve(rhs) / medium_.tau;
  return o.extend_to_full(jerk);
}

Vector LinearStepper::equation_residual(const AcousticState& s, const Vector& load) const {
  const FemOperators& o = *ops_;
  return medium_.tau * (o.mass * o.restrict_to_interior(s.u_ttt)) +
         apply_stiffness_terms(o.restrict_to_interior(s.u), o.restrict_to_interior(s.u_t),
                               o.restrict_to_interior(s.u_tt)) -
         load;
}

// ---------------------------------------------------------------------------

const char* to_string(NonlinearModel m) noexcept {
  switch (m) {
    case NonlinearModel::linear: return "linear";
    case NonlinearModel::westervelt: return "westervelt";
    case NonlinearModel::kuznetsov: return "kuznetsov";
  }
  return "unknown";
}

NonlinearStepper::NonlinearStepper(std::shared_ptr<const FemOperators> ops,
                                   const MediumParams& m, const NonlinearityParams& nl,
                                   NonlinearModel model, double dt, const NewmarkParams& p,
                                   const CoefficientFields& coeffs)
    : ops_(ops),
      nl_(nl),
      model_(model),
      params_(p),
      linear_(model == NonlinearModel::linear ||
              (model == NonlinearModel::westervelt && nl.k == 0.0) ||
              (model == NonlinearModel::kuznetsov && nl.kappa == 0.0 && nl.sigma == 0.0)),
      linear_stepper_(std::move(ops), m, dt, p, coeffs) {}

Vector NonlinearStepper::nonlinear_load(const AcousticState& s) const {
  switch (model_) {
    case NonlinearModel::westervelt: return westervelt_rhs(*ops_, nl_, s);
    case NonlinearModel::kuznetsov: return kuznetsov_rhs(*ops_, nl_, s);
    case NonlinearModel::linear: break;
  }
  return Vector::Zero(ops_->n_interior());
}

AcousticState NonlinearStepper::initial_state(Vector u0, Vector u1, Vector u2,
                                              const SourceLoad& source, double t0) const {
  const FemOperators& o = *ops_;
  if (u0.size() != o.n_nodes || u1.size() != o.n_nodes || u2.size() != o.n_nodes) {
    throw InvalidArgument("initial_state: fields must have one entry per node");
  }
  AcousticState s;
  s.t = t0;
  // Zero the boundary by a round trip through the interior.
  s.u = o.extend_to_full(o.restrict_to_interior(u0));
  s.u_t = o.extend_to_full(o.restrict_to_interior(u1));
  s.u_tt = o.extend_to_full(o.restrict_to_interior(u2));
  Vector load = source ? source(t0) : Vector::Zero(o.n_interior());
  if (!linear_) load += nonlinear_load(s);
  s.u_ttt = linear_stepper_.consistent_jerk(s, load);
  return s;
}

StepReport NonlinearStepper::step(const AcousticState& s, const SourceLoad& source) const {
  const FemOperators& o = *ops_;
  const double dt = linear_stepper_.dt();
  const PredictedState pred = newmark_predict(s, dt, params_);
  const Vector load = source ? source(pred.t) : Vector::Zero(o.n_interior());

  if (linear_) return {linear_stepper_.step_from(pred, load), 1, 0.0};

  AcousticState iterate{pred.t, pred.u, pred.u_t, pred.u_tt, s.u_ttt};
  Vector prev_tt = o.restrict_to_interior(iterate.u_tt);
  Vector prev_t = o.restrict_to_interior(iterate.u_t);
  double increment = 0.0;
  for (int it = 1; it <= params_.fp_max_iter; ++it) {
    AcousticState next = linear_stepper_.step_from(pred, load + nonlinear_load(iterate));
    const Vector cur_tt = o.restrict_to_interior(next.u_tt);
    const Vector cur_t = o.restrict_to_interior(next.u_t);
    const double change = mass_norm(o, cur_tt - prev_tt) + stiffness_norm(o, cur_t - prev_t);
    const double scale = mass_norm(o, cur_tt) + stiffness_norm(o, cur_t);
    if (!std::isfinite(change) || !std::isfinite(scale) || !next.all_finite()) {
      throw NoConvergence("fixed-point iteration produced non-finite values at t=" +
                              std::to_string(pred.t),
                          it, change);
    }
    increment = scale > 0.0 ? change / scale : change;
    if (change <= params_.fp_tol * scale) return {std::move(next), it, increment};
    iterate = std::move(next);
    prev_tt = cur_tt;
    prev_t = cur_t;
  }
  throw NoConvergence("fixed-point iteration did not converge in " +
                          std::to_string(params_.fp_max_iter) + " iterations at t=" +
                          std::to_string(pred.t),
                      params_.fp_max_iter, increment);
}

}  // namespace mgt
