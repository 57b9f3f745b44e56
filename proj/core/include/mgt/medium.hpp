#pragma once

namespace mgt {

/// Physical constants of a thermally relaxing fluid, SI units.
struct MediumParams {
  double tau = 1.5e-5;     // thermal relaxation time [s]
  double c = 1500.0;       // speed of sound [m/s]
  double delta = 0.0;      // sound diffusivity [m^2/s]
  double rho = 1000.0;     // density [kg/m^3]
  double b_over_a = 5.0;   // parameter of nonlinearity B/A
  double alpha0 = 1.0;     // coefficient of the second time derivative

  /// Throws InvalidArgument unless tau, c, rho > 0 and delta >= 0.
  void validate() const;

  /// Coefficient of the strong damping term, delta + tau c^2.
  double b() const noexcept { return delta + tau * c * c; }
};

/// Coefficients of the quadratic right-hand sides. All zero gives the
/// linear equation.
struct NonlinearityParams {
  double k = 0.0;      // pressure form, 1/2 (k p^2)_tt
  double kappa = 0.0;  // potential form, 1/2 (kappa psi_t^2)_t
  double sigma = 0.0;  // potential form, 1/2 (sigma |grad psi|^2)_t

  bool is_linear() const noexcept { return k == 0.0 && kappa == 0.0 && sigma == 0.0; }
};

inline constexpr double kDefaultSigma = 2.0;

/// Water at the given relaxation time and diffusivity.
MediumParams water(double tau, double delta);

/// k = (1 + B/2A) / (rho c^2), pressure-form Westervelt coefficient.
double derived_k(const MediumParams& m);

/// kappa = (B/A) / c^2, the usual Kuznetsov coefficient (paired with sigma = 2).
double derived_kappa(const MediumParams& m);

/// kappa = (1 + B/2A) / c^2; with sigma = 0 this turns the Kuznetsov-type
/// equation into the Westervelt equation in potential form.
double westervelt_potential_kappa(const MediumParams& m);

enum class Stability { stable, marginal, unstable };

struct StabilityClass {
  double gamma;
  Stability tag;
};

/// gamma = alpha0 - tau c^2 / (delta + tau c^2). The sign decides whether the
/// linear dynamics are exponentially stable.
StabilityClass stability(const MediumParams& m);

const char* to_string(Stability s) noexcept;

}  // namespace mgt
