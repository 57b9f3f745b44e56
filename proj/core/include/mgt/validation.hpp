#pragma once

#include <span>
#include <string>
#include <vector>

#include "mgt/medium.hpp"

namespace mgt {

/// Least-squares slope of log(error) against log(size).
double observed_order(std::span<const double> sizes, std::span<const double> errors);

struct OrderStudy {
  std::vector<double> sizes;   // dt (time study) or h (space-time study)
  std::vector<double> errors;  // relative sup-in-time errors
  double order = 0.0;
};

/// Newmark integration of the single-mode equation (a 1x1 semi-discrete
/// system, no mesh) against the closed-form modal solution. The time step is
/// halved `halvings` times; errors are sup over the step grid of |a_h - a|
/// relative to sup |a|.
OrderStudy scalar_time_order_study(const MediumParams& m, double lambda, double final_time,
                                   long base_steps, int halvings);

/// P1/Newmark solution with the first Dirichlet eigenmode as initial pressure
/// on (0, length), compared against the modal solution in the sup-in-time
/// discrete L2 norm. h and dt are halved together `halvings` times.
OrderStudy fem_modal_order_study(const MediumParams& m, double length, double final_time,
                                 int base_elements, int halvings, double cfl);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Oracle and invariant checks run by the `validate` command.
std::vector<CheckResult> run_validation();

}  // namespace mgt
