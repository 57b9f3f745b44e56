#include "mgt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "mgt/error.hpp"
#include "mgt/integrator.hpp"

namespace mgt {

EnergySample energy(const FemOperators& ops, const MediumParams& m, const AcousticState& s) {
  const Vector u = ops.restrict_to_interior(s.u);
  const Vector u_t = ops.restrict_to_interior(s.u_t);
  const Vector u_tt = ops.restrict_to_interior(s.u_tt);
  auto m2 = [&](const Vector& v) { return v.dot(ops.mass * v); };
  auto k2 = [&](const Vector& v) { return v.dot(ops.stiffness * v); };
  const double tau2 = m.tau * m.tau;
  const double c2 = m.c * m.c;

  EnergySample e;
  e.t = s.t;
  e.e_full = 0.5 * tau2 * m2(u_tt) + 0.5 * tau2 * c2 * k2(u_t) + 0.5 * c2 * k2(u);
  const Vector z = m.tau * u_t + u;
  const Vector z_t = m.tau * u_tt + u_t;
  e.e_z = 0.5 * m2(z_t) + 0.5 * c2 * k2(z);
  return e;
}

void EnergyNormAccumulator::add(const FemOperators& ops, const Vector& u_tt, const Vector& u_t) {
  sup_u_tt_ = std::max(sup_u_tt_, mass_norm(ops, u_tt));
  sup_u_t_ = std::max(sup_u_t_, stiffness_norm(ops, u_t));
}

void Trajectory::record(const FemOperators& ops, const AcousticState& s) {
  t.push_back(s.t);
  u_t.push_back(ops.restrict_to_interior(s.u_t));
  u_tt.push_back(ops.restrict_to_interior(s.u_tt));
}

double energy_norm(const FemOperators& ops, const Trajectory& run) {
  EnergyNormAccumulator acc;
  for (std::size_t i = 0; i < run.size(); ++i) acc.add(ops, run.u_tt[i], run.u_t[i]);
  return acc.value();
}

double energy_norm_error(const FemOperators& ops, const Trajectory& run, const Trajectory& ref) {
  if (run.size() != ref.size()) {
    throw InvalidArgument("energy_norm_error: trajectories have different lengths");
  }
  EnergyNormAccumulator diff;
  for (std::size_t i = 0; i < run.size(); ++i) {
    if (run.t[i] != ref.t[i]) throw InvalidArgument("energy_norm_error: time grids differ");
    diff.add(ops, run.u_tt[i] - ref.u_tt[i], run.u_t[i] - ref.u_t[i]);
  }
  const double denom = energy_norm(ops, ref);
  if (!(denom >= 1e-300)) throw DegenerateReference("energy_norm_error: reference norm vanishes");
  return diff.value() / denom;
}

RateFit fit_rate(std::span<const SweepRecord> records) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : records) {
    if (r.ok() && r.delta > 0.0 && r.err_rel > 0.0 && std::isfinite(r.err_rel)) {
      pts.emplace_back(r.delta, r.err_rel);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& a, const auto& b) { return a.first == b.first; }),
            pts.end());
  if (pts.size() < 3) {
    throw InsufficientData("fit_rate: need at least 3 distinct positive deltas, have " +
                           std::to_string(pts.size()));
  }
  const double n = static_cast<double>(pts.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [d, e] : pts) {
    mx += std::log(d);
    my += std::log(e);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [d, e] : pts) {
    const double dx = std::log(d) - mx;
    sxy += dx * (std::log(e) - my);
    sxx += dx * dx;
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (const auto& [d, e] : pts) {
    fit.ratios.emplace_back(d, e / d);
    fit.mean_ratio += e / d;
  }
  fit.mean_ratio /= n;
  for (const auto& [d, r] : fit.ratios) {
    fit.max_ratio_deviation =
        std::max(fit.max_ratio_deviation, std::abs(r - fit.mean_ratio) / fit.mean_ratio);
  }
  return fit;
}

// --- Modal oracle ----------------------------------------------------------

namespace {

// Monic cubic s^3 + a s^2 + b s + c.
struct Cubic {
  double a, b, c;

  Complex operator()(Complex s) const { return ((s + a) * s + b) * s + c; }
  Complex derivative(Complex s) const { return (3.0 * s + 2.0 * a) * s + b; }
  double scale(double s) const {
    const double x = std::abs(s);
    return x * x * x + std::abs(a) * x * x + std::abs(b) * x + std::abs(c);
  }
};

Cubic normalized(const MediumParams& m, double lambda) {
  return {m.alpha0 / m.tau, m.b() * lambda / m.tau, m.c * m.c * lambda / m.tau};
}

std::array<Complex, 2> quadratic_roots(double b, double c) {
  // s^2 + b s + c
  const double disc = b * b - 4.0 * c;
  if (disc < 0.0) {
    const double im = 0.5 * std::sqrt(-disc);
    return {Complex(-0.5 * b, im), Complex(-0.5 * b, -im)};
  }
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  if (q == 0.0) return {Complex(0.0), Complex(0.0)};
  return {Complex(q), Complex(c / q)};
}

std::array<Complex, 3> closed_form_roots(const Cubic& p) {
  const double shift = p.a / 3.0;
  const double pp = p.b - p.a * shift;
  const double qq = 2.0 * shift * shift * shift - shift * p.b + p.c;
  const double half_q = 0.5 * qq;
  const double third_p = pp / 3.0;
  const double disc = half_q * half_q + third_p * third_p * third_p;
  std::array<Complex, 3> r;
  if (disc <= 0.0 && third_p < 0.0) {
    const double radius = 2.0 * std::sqrt(-third_p);
    const double arg = std::clamp(-half_q / std::sqrt(-third_p * third_p * third_p), -1.0, 1.0);
    const double theta = std::acos(arg);
    for (int k = 0; k < 3; ++k) {
      r[k] = radius * std::cos((theta - 2.0 * std::numbers::pi * k) / 3.0) - shift;
    }
    return r;
  }
  // One real root; pick the branch without cancellation.
  const double big = std::cbrt(-half_q - std::copysign(std::sqrt(std::max(disc, 0.0)), half_q));
  const double y = big == 0.0 ? 0.0 : big - third_p / big;
  const double real_root = y - shift;
  const double e = p.a + real_root;
  const double f = real_root != 0.0 ? -p.c / real_root : p.b + e * real_root;
  const auto q = quadratic_roots(e, f);
  return {Complex(real_root), q[0], q[1]};
}

// j-th derivative at t = 0 of t^k e^{s t}.
Complex basis_derivative_at_zero(Complex s, int k, int j) {
  if (j < k) return 0.0;
  double falling = 1.0;
  for (int i = 0; i < k; ++i) falling *= static_cast<double>(j - i);
  return falling * std::pow(s, j - k);
}

}  // namespace

std::array<Complex, 3> characteristic_roots(const MediumParams& m, double lambda) {
  const Cubic p = normalized(m, lambda);
  auto roots = closed_form_roots(p);
  for (auto& s : roots) {
    const Complex d = p.derivative(s);
    if (std::abs(d) > 0.0) s -= p(s) / d;
  }
  std::sort(roots.begin(), roots.end(), [](const Complex& x, const Complex& y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return roots;
}

ModalSolution::ModalSolution(const MediumParams& m, double lambda, const ModalData& data) {
  m.validate();
  if (!(lambda > 0.0)) throw InvalidArgument("modal oracle: lambda must be positive");
  const Cubic p = normalized(m, lambda);
  constexpr double kRootTol = 64.0 * std::numeric_limits<double>::epsilon();

  // Repeated roots sit at the critical points of p.
  const double crit_disc = p.a * p.a - 3.0 * p.b;
  std::vector<std::pair<Complex, int>> groups;  // (root, multiplicity)
  if (std::abs(crit_disc) <= kRootTol * p.a * p.a) {
    const double r = -p.a / 3.0;
    if (std::abs(p(r)) <= kRootTol * p.scale(r)) groups = {{Complex(r), 3}};
  }
  if (groups.empty() && crit_disc > 0.0) {
    const double sq = std::sqrt(crit_disc);
    for (double r : {(-p.a + sq) / 3.0, (-p.a - sq) / 3.0}) {
      if (std::abs(p(r)) <= kRootTol * p.scale(r)) {
        groups = {{Complex(r), 2}, {Complex(-p.a - 2.0 * r), 1}};
        break;
      }
    }
  }
  if (groups.empty()) {
    roots_ = characteristic_roots(m, lambda);
    double largest = 0.0;
    for (const auto& s : roots_) largest = std::max(largest, std::abs(s));
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        if (std::abs(roots_[i] - roots_[j]) < 1e-8 * largest) {
          throw IllConditionedRoots("modal oracle: characteristic roots nearly coincide");
        }
      }
      groups.emplace_back(roots_[i], 1);
    }
  } else {
    int k = 0;
    for (const auto& [s, mult] : groups) {
      for (int i = 0; i < mult; ++i) roots_[k++] = s;
    }
  }
  distinct_ = static_cast<int>(groups.size());

  for (const auto& [s, mult] : groups) {
    for (int power = 0; power < mult; ++power) terms_.push_back({s, power, 0.0});
  }
  Eigen::Matrix3cd basis;
  for (int j = 0; j < 3; ++j) {
    for (int col = 0; col < 3; ++col) {
      basis(j, col) = basis_derivative_at_zero(terms_[col].rate, terms_[col].power, j);
    }
  }
  const Eigen::Vector3cd rhs(data.a0, data.a1, data.a2);
  const Eigen::Vector3cd coeff = basis.fullPivLu().solve(rhs);
  for (int col = 0; col < 3; ++col) terms_[col].coeff = coeff[col];
}

ModalValue ModalSolution::operator()(double t) const {
  Complex a = 0.0, a_t = 0.0, a_tt = 0.0;
  for (const auto& term : terms_) {
    const Complex e = term.coeff * std::exp(term.rate * t);
    const Complex s = term.rate;
    const int k = term.power;
    // derivatives of t^k e^{st}: sum_i binom(j, i) (k)_i t^{k-i} s^{j-i}
    auto tp = [&](int p) { return p < 0 ? 0.0 : std::pow(t, p); };
    const double kk = static_cast<double>(k);
    a += e * tp(k);
    a_t += e * (kk * tp(k - 1) + s * tp(k));
    a_tt += e * (kk * (kk - 1.0) * tp(k - 2) + 2.0 * kk * s * tp(k - 1) + s * s * tp(k));
  }
  return {a.real(), a_t.real(), a_tt.real()};
}

ModalValue modal_oracle(const MediumParams& m, double lambda, const ModalData& data, double t) {
  return ModalSolution(m, lambda, data)(t);
}

DirichletMode interval_mode(double length, int n) {
  if (!(length > 0.0) || n < 1) throw InvalidArgument("interval_mode: bad length or index");
  const double k = n * std::numbers::pi / length;
  return {k * k, [k](double x, double) { return std::sin(k * x); }};
}

DirichletMode square_mode(double side, int m, int n) {
  if (!(side > 0.0) || m < 1 || n < 1) throw InvalidArgument("square_mode: bad side or index");
  const double kx = m * std::numbers::pi / side;
  const double ky = n * std::numbers::pi / side;
  return {kx * kx + ky * ky,
          [kx, ky](double x, double y) { return std::sin(kx * x) * std::sin(ky * y); }};
}

}  // namespace mgt
