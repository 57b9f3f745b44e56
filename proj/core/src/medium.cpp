#include "mgt/medium.hpp"

#include <cmath>
#include <string>

#include "mgt/error.hpp"

namespace mgt {

void MediumParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidArgument(std::string("medium: ") + what);
  };
  require(std::isfinite(tau) && tau > 0.0, "tau must be positive");
  require(std::isfinite(c) && c > 0.0, "c must be positive");
  require(std::isfinite(rho) && rho > 0.0, "rho must be positive");
  require(std::isfinite(delta) && delta >= 0.0, "delta must be non-negative");
  require(std::isfinite(b_over_a), "B/A must be finite");
  require(std::isfinite(alpha0), "alpha0 must be finite");
}

MediumParams water(double tau, double delta) {
  MediumParams m;
  m.tau = tau;
  m.delta = delta;
  m.c = 1500.0;
  m.rho = 1000.0;
  m.b_over_a = 5.0;
  m.alpha0 = 1.0;
  return m;
}

double derived_k(const MediumParams& m) {
  return (1.0 + 0.5 * m.b_over_a) / (m.rho * m.c * m.c);
}

double derived_kappa(const MediumParams& m) { return m.b_over_a / (m.c * m.c); }

double westervelt_potential_kappa(const MediumParams& m) {
  return (1.0 + 0.5 * m.b_over_a) / (m.c * m.c);
}

StabilityClass stability(const MediumParams& m) {
  const double tc2 = m.tau * m.c * m.c;
  // delta == 0 must give exactly alpha0 - 1.
  const double fraction = m.delta == 0.0 ? 1.0 : tc2 / (m.delta + tc2);
  const double gamma = m.alpha0 - fraction;
  Stability tag = Stability::marginal;
  if (gamma > 0.0) tag = Stability::stable;
  if (gamma < 0.0) tag = Stability::unstable;
  return {gamma, tag};
}

const char* to_string(Stability s) noexcept {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::marginal: return "marginal";
    case Stability::unstable: return "unstable";
  }
  return "unknown";
}

}  // namespace mgt
