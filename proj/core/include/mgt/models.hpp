#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "mgt/integrator.hpp"
#include "mgt/medium.hpp"
#include "mgt/mesh.hpp"

namespace mgt {

enum class Equation {
  GeneralizedMgt,           // linear, alpha = alpha0, mu = eta = 0
  JmgtWesterveltPressure,   // RHS 1/2 (k p^2)_tt
  JmgtKuznetsovPotential,   // RHS 1/2 (kappa psi_t^2 + sigma |grad psi|^2)_t
  JmgtWesterveltPotential,  // Kuznetsov form with kappa = (1 + B/2A)/c^2, sigma = 0
};

const char* to_string(Equation e) noexcept;
Equation equation_from_string(const std::string& name);
NonlinearModel model_of(Equation e) noexcept;

struct DomainSpec {
  int dim = 1;
  double length = 0.4;  // interval length or square side [m]
  int n_elements = 600; // 1D only
  double h = 0.01;      // 2D grid spacing [m]

  Mesh build() const;
};

using NodalGenerator = std::function<double(const Point&)>;
using SourceField = std::function<double(const Point&, double)>;

struct ProblemSpec {
  std::string name;
  Equation equation = Equation::GeneralizedMgt;
  MediumParams medium;
  NonlinearityParams nonlin;
  DomainSpec domain;
  std::array<NodalGenerator, 3> initial;  // u, u_t, u_tt at t = 0; empty means zero
  SourceField source;                     // empty means no source
  double final_time = 0.0;

  void validate() const;
};

struct InitialFields {
  Vector u0, u1, u2;
};

/// Samples the initial generators at the mesh nodes; boundary entries are
/// forced to zero.
InitialFields sample_initial(const ProblemSpec& spec, const Mesh& mesh);

/// Interior load of the source at time t, or an empty SourceLoad if the
/// problem has none.
SourceLoad make_source_load(const ProblemSpec& spec, std::shared_ptr<const FemOperators> ops);

struct ChannelOptions {
  double amplitude = 1e8;  // peak initial pressure [Pa]
  double width = 0.01;     // Gaussian standard deviation [m]
  double center = 0.2;
  double length = 0.4;
  int n_elements = 600;
  double final_time = 7e-5;
  bool linear = false;  // k = 0
};

/// Westervelt pressure equation in water on (0, 0.4), Gaussian initial
/// pressure, zero initial rates.
ProblemSpec channel_1d_scenario(double delta, double tau, const ChannelOptions& opt = {});

struct Source2dOptions {
  double amplitude = 1e10;
  double x0 = 0.25, y0 = 0.25;
  double sigma_x = 0.02, sigma_y = 0.01;
  double frequency = 2e4;  // [Hz]
  double side = 0.5;
  double h = 0.01;
  double tau = 1.5e-5;
  double final_time = 1.5e-4;
};

/// Linear equation (alpha = 1) on the square with a time-harmonic Gaussian
/// source and zero initial data.
ProblemSpec source_2d_scenario(double delta, const Source2dOptions& opt = {});

struct KuznetsovOptions {
  std::optional<double> sigma;  // default kDefaultSigma
  std::optional<double> kappa;  // default (B/A)/c^2
  double amplitude = 1e-2;      // peak initial potential [m^2/s]
  ChannelOptions geometry;      // amplitude and linear flag are ignored
};

/// Kuznetsov-type equation for the potential on the channel geometry.
ProblemSpec kuznetsov_scenario(double delta, double tau, const KuznetsovOptions& opt = {});

/// Westervelt equation in potential form on the channel geometry.
ProblemSpec westervelt_potential_scenario(double delta, double tau, double amplitude = 1e-2,
                                          const ChannelOptions& geometry = {});

/// Resolved nonlinearity for an equation (kappa mapping for the potential
/// Westervelt form, zeros for the linear equation).
NonlinearityParams effective_nonlinearity(const ProblemSpec& spec);

}  // namespace mgt
