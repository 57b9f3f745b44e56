#pragma once

#include <functional>
#include <memory>
#include <optional>

#include <Eigen/SparseCholesky>

#include "mgt/fem.hpp"
#include "mgt/medium.hpp"
#include "mgt/state.hpp"

namespace mgt {

/// Weights of the third-order Newmark predictor-corrector plus the step and
/// fixed-point controls.
struct NewmarkParams {
  double a3 = 1.0 / 12.0;  // weight of the new jerk in u
  double beta = 0.25;      // weight of the new jerk in u_t
  double gamma = 0.5;      // weight of the new jerk in u_tt
  double cfl = 0.1;
  double fp_tol = 1e-8;
  int fp_max_iter = 50;

  void validate() const;
};

struct TimeGrid {
  double dt = 0.0;
  long steps = 0;
  double final_time = 0.0;
};

/// cfl * h / (c + sqrt(delta_bar / tau)), before any rounding.
double cfl_time_step(const MediumParams& m, double delta_bar, double h, const NewmarkParams& p);

/// The CFL step reduced so that final_time is an integer number of steps.
TimeGrid stable_dt(const MediumParams& m, double delta_bar, double h, const NewmarkParams& p,
                   double final_time);

struct PredictedState {
  double t = 0.0;  // time the prediction is for
  Vector u;
  Vector u_t;
  Vector u_tt;
};

/// Taylor predictors with the new-jerk contributions left out:
///   u*    = u + dt u_t + dt^2/2 u_tt + dt^3 (1/6 - a3) u_ttt
///   u_t*  = u_t + dt u_tt + dt^2 (1/2 - beta) u_ttt
///   u_tt* = u_tt + dt (1 - gamma) u_ttt
PredictedState newmark_predict(const AcousticState& s, double dt, const NewmarkParams& p);

/// Adds the new jerk with weights (dt^3 a3, dt^2 beta, dt gamma).
AcousticState newmark_correct(const PredictedState& pred, const Vector& jerk, double dt,
                              const NewmarkParams& p);

/// Returns the interior-node load vector of the source at time t.
using SourceLoad = std::function<Vector(double)>;

/// Optional space-dependent coefficients of the generalized linear equation
///   tau p_ttt + alpha p_tt - (delta + tau c^2) lap p_t - c^2 lap p - mu p_t - eta p = f.
/// Missing alpha means the constant alpha0 of the medium; missing mu, eta mean zero.
/// Fields are nodal, one entry per mesh node.
struct CoefficientFields {
  std::optional<Vector> alpha;
  std::optional<Vector> mu;
  std::optional<Vector> eta;
};

/// Implicit step of the linear semi-discrete system
///   tau M u''' + M_alpha u'' + (b K - M_mu) u' + (c^2 K - M_eta) u = F.
/// The step matrix depends only on dt and the coefficients, so it is
/// factorized once at construction.
class LinearStepper {
 public:
  LinearStepper(std::shared_ptr<const FemOperators> ops, const MediumParams& m, double dt,
                const NewmarkParams& p, const CoefficientFields& coeffs = {});

  /// Advances s by dt with the given interior load at t + dt.
  AcousticState step(const AcousticState& s, const Vector& load) const;
  AcousticState step(const AcousticState& s, const SourceLoad& source) const;

  /// Solves for the new jerk given a prediction and the load at pred.t.
  AcousticState step_from(const PredictedState& pred, const Vector& load) const;

  /// The u_ttt that satisfies the semi-discrete equation for (u, u_t, u_tt)
  /// and the given interior load.
  Vector consistent_jerk(const AcousticState& s, const Vector& load) const;

  /// Residual of the semi-discrete equation at a state (interior vector).
  Vector equation_residual(const AcousticState& s, const Vector& load) const;

  double dt() const noexcept { return dt_; }
  const NewmarkParams& params() const noexcept { return params_; }
  const FemOperators& operators() const noexcept { return *ops_; }
  const SparseMatrix& step_matrix() const noexcept { return system_; }

 private:
  Vector apply_stiffness_terms(const Vector& u, const Vector& u_t, const Vector& u_tt) const;

  std::shared_ptr<const FemOperators> ops_;
  MediumParams medium_;
  double dt_;
  NewmarkParams params_;
  SparseMatrix mass_alpha_;  // M_alpha
  SparseMatrix damping_;     // b K - M_mu
  SparseMatrix elastic_;     // c^2 K - M_eta
  SparseMatrix system_;
  Eigen::SimplicialLDLT<SparseMatrix> step_solver_;
  Eigen::SimplicialLDLT<SparseMatrix> mass_solver_;
};

enum class NonlinearModel { linear, westervelt, kuznetsov };

const char* to_string(NonlinearModel m) noexcept;

struct StepReport {
  AcousticState state;
  int iterations = 0;
  double increment = 0.0;  // relative energy-seminorm change of the last iterate
};

/// Quadratic right-hand side resolved by fixed-point iteration: the whole
/// nonlinear load is evaluated at the previous iterate and the linear step is
/// re-solved until the change in ||u_tt||_M + ||u_t||_K falls below
/// fp_tol times the size of the iterate.
class NonlinearStepper {
 public:
  NonlinearStepper(std::shared_ptr<const FemOperators> ops, const MediumParams& m,
                   const NonlinearityParams& nl, NonlinearModel model, double dt,
                   const NewmarkParams& p, const CoefficientFields& coeffs = {});

  /// Throws NoConvergence if fp_max_iter iterations do not suffice.
  StepReport step(const AcousticState& s, const SourceLoad& source) const;

  /// Builds the initial state at t0 from nodal (u, u_t, u_tt), completing it
  /// with the consistent jerk. Boundary entries are zeroed.
  AcousticState initial_state(Vector u0, Vector u1, Vector u2, const SourceLoad& source,
                              double t0 = 0.0) const;

  /// Interior load of the nonlinear term at a state.
  Vector nonlinear_load(const AcousticState& s) const;

  bool is_linear() const noexcept { return linear_; }
  const LinearStepper& linear_stepper() const noexcept { return linear_stepper_; }

 private:
  std::shared_ptr<const FemOperators> ops_;
  NonlinearityParams nl_;
  NonlinearModel model_;
  NewmarkParams params_;
  bool linear_;
  LinearStepper linear_stepper_;
};

/// sqrt(v^T M v) and sqrt(v^T K v) for interior vectors.
double mass_norm(const FemOperators& ops, const Vector& interior);
double stiffness_norm(const FemOperators& ops, const Vector& interior);

}  // namespace mgt
