#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mgt/fem.hpp"
#include "mgt/medium.hpp"
#include "mgt/state.hpp"

namespace mgt {

struct EnergySample {
  double t = 0.0;
  double e_full = 0.0;  // tau^2/2 |u_tt|_M^2 + tau^2 c^2/2 |u_t|_K^2 + c^2/2 |u|_K^2
  double e_z = 0.0;     // 1/2 |z_t|_M^2 + c^2/2 |z|_K^2 with z = tau u_t + u
};

EnergySample energy(const FemOperators& ops, const MediumParams& m, const AcousticState& s);

/// Running sup-in-time of |u_tt|_M and |u_t|_K; value() is their sum, the
/// discrete energy norm used for the relative error.
class EnergyNormAccumulator {
 public:
  void add(const FemOperators& ops, const Vector& u_tt_interior, const Vector& u_t_interior);
  double sup_u_tt() const noexcept { return sup_u_tt_; }
  double sup_u_t() const noexcept { return sup_u_t_; }
  double value() const noexcept { return sup_u_tt_ + sup_u_t_; }

 private:
  double sup_u_tt_ = 0.0;
  double sup_u_t_ = 0.0;
};

/// Interior values of u_t and u_tt at every recorded time level.
struct Trajectory {
  std::vector<double> t;
  std::vector<Vector> u_t;
  std::vector<Vector> u_tt;

  void record(const FemOperators& ops, const AcousticState& s);
  std::size_t size() const noexcept { return t.size(); }
};

double energy_norm(const FemOperators& ops, const Trajectory& run);

/// |run - ref|_E / |ref|_E with sup norms over the common step grid. Throws
/// InvalidArgument on mismatched grids, DegenerateReference if |ref|_E < 1e-300.
double energy_norm_error(const FemOperators& ops, const Trajectory& run, const Trajectory& ref);

/// One member of a diffusivity sweep.
struct SweepRecord {
  double delta = 0.0;
  double err_rel = 0.0;
  double dt = 0.0;
  double h = 0.0;
  long steps = 0;
  int max_fp_iters = 0;
  double max_energy = 0.0;  // max over steps of e_full
  std::string status = "ok";

  bool ok() const noexcept { return status == "ok"; }
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;  // of log(err) against log(delta)
  double mean_ratio = 0.0;
  double max_ratio_deviation = 0.0;  // max |err/delta - mean| / mean
  std::vector<std::pair<double, double>> ratios;  // (delta, err/delta)
};

/// Least-squares fit of log(err) against log(delta) over the successful
/// records with delta > 0 and err > 0. Throws InsufficientData with fewer
/// than three distinct such deltas.
RateFit fit_rate(std::span<const SweepRecord> records);

// --- Modal oracle ----------------------------------------------------------

using Complex = std::complex<double>;

/// Roots of tau s^3 + alpha0 s^2 + (delta + tau c^2) lambda s + c^2 lambda.
std::array<Complex, 3> characteristic_roots(const MediumParams& m, double lambda);

struct ModalData {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
};

struct ModalValue {
  double a = 0.0;
  double a_t = 0.0;
  double a_tt = 0.0;
};

/// Closed-form solution of the single-mode equation
///   tau a''' + alpha0 a'' + (delta + tau c^2) lambda a' + c^2 lambda a = 0
/// as a sum of (polynomial) x exponential terms over the characteristic roots.
/// Repeated roots use the t^k e^{st} basis; distinct roots closer than 1e-8
/// (relative) raise IllConditionedRoots.
class ModalSolution {
 public:
  ModalSolution(const MediumParams& m, double lambda, const ModalData& data);

  ModalValue operator()(double t) const;
  const std::array<Complex, 3>& roots() const noexcept { return roots_; }
  /// Number of distinct roots (1, 2 or 3).
  int distinct_roots() const noexcept { return distinct_; }

 private:
  struct Term {
    Complex rate;
    int power;
    Complex coeff;
  };
  std::array<Complex, 3> roots_;
  int distinct_ = 3;
  std::vector<Term> terms_;
};

ModalValue modal_oracle(const MediumParams& m, double lambda, const ModalData& data, double t);

/// Dirichlet eigenpair of -Laplace on an interval or a square.
struct DirichletMode {
  double lambda;
  std::function<double(double x, double y)> shape;
};

DirichletMode interval_mode(double length, int n);
DirichletMode square_mode(double side, int m, int n);

}  // namespace mgt
