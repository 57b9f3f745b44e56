#include "mgt/models.hpp"

#include <cmath>
#include <numbers>

#include "mgt/error.hpp"

namespace mgt {

const char* to_string(Equation e) noexcept {
  switch (e) {
    case Equation::GeneralizedMgt: return "generalized_mgt";
    case Equation::JmgtWesterveltPressure: return "jmgt_westervelt_pressure";
    case Equation::JmgtKuznetsovPotential: return "jmgt_kuznetsov_potential";
    case Equation::JmgtWesterveltPotential: return "jmgt_westervelt_potential";
  }
  return "unknown";
}

Equation equation_from_string(const std::string& name) {
  for (Equation e : {Equation::GeneralizedMgt, Equation::JmgtWesterveltPressure,
                     Equation::JmgtKuznetsovPotential, Equation::JmgtWesterveltPotential}) {
    if (name == to_string(e)) return e;
  }
  throw InvalidArgument("unknown equation '" + name + "'");
}

NonlinearModel model_of(Equation e) noexcept {
  switch (e) {
    case Equation::GeneralizedMgt: return NonlinearModel::linear;
    case Equation::JmgtWesterveltPressure: return NonlinearModel::westervelt;
    case Equation::JmgtKuznetsovPotential:
    case Equation::JmgtWesterveltPotential: return NonlinearModel::kuznetsov;
  }
  return NonlinearModel::linear;
}

Mesh DomainSpec::build() const {
  if (dim == 1) return interval_mesh(length, n_elements);
  if (dim == 2) return square_triangle_mesh(length, h);
  throw InvalidArgument("domain: dim must be 1 or 2");
}

void ProblemSpec::validate() const {
  medium.validate();
  if (!(final_time > 0.0)) throw InvalidArgument("problem '" + name + "': final time must be positive");
}

NonlinearityParams effective_nonlinearity(const ProblemSpec& spec) {
  NonlinearityParams nl = spec.nonlin;
  switch (spec.equation) {
    case Equation::GeneralizedMgt: return {};
    case Equation::JmgtWesterveltPressure: nl.kappa = nl.sigma = 0.0; return nl;
    case Equation::JmgtKuznetsovPotential: nl.k = 0.0; return nl;
    case Equation::JmgtWesterveltPotential:
      return {0.0, westervelt_potential_kappa(spec.medium), 0.0};
  }
  return nl;
}

InitialFields sample_initial(const ProblemSpec& spec, const Mesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.n_nodes());
  std::array<Vector, 3> fields;
  for (int f = 0; f < 3; ++f) {
    fields[f] = Vector::Zero(n);
    if (!spec.initial[f]) continue;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!mesh.is_boundary(i)) fields[f][i] = spec.initial[f](mesh.node(i));
    }
  }
  return {std::move(fields[0]), std::move(fields[1]), std::move(fields[2])};
}

SourceLoad make_source_load(const ProblemSpec& spec, std::shared_ptr<const FemOperators> ops) {
  if (!spec.source) return {};
  if (!ops || !ops->mesh) throw InvalidArgument("make_source_load: operators carry no mesh");
  return [field = spec.source, ops = std::move(ops)](double t) {
    const Mesh& mesh = *ops->mesh;
    Vector g(ops->n_nodes);
    for (Eigen::Index i = 0; i < ops->n_nodes; ++i) {
      g[i] = mesh.is_boundary(i) ? 0.0 : field(mesh.node(i), t);
    }
    return load_vector(*ops, g);
  };
}

namespace {

NodalGenerator gaussian_1d(double amplitude, double center, double width) {
  return [=](const Point& p) {
    const double d = p.x - center;
    return amplitude * std::exp(-d * d / (2.0 * width * width));
  };
}

DomainSpec channel_domain(const ChannelOptions& opt) {
  DomainSpec d;
  d.dim = 1;
  d.length = opt.length;
  d.n_elements = opt.n_elements;
  return d;
}

}  // namespace

ProblemSpec channel_1d_scenario(double delta, double tau, const ChannelOptions& opt) {
  ProblemSpec spec;
  spec.name = "channel_1d";
  spec.equation = Equation::JmgtWesterveltPressure;
  spec.medium = water(tau, delta);
  spec.nonlin.k = opt.linear ? 0.0 : derived_k(spec.medium);
  spec.domain = channel_domain(opt);
  spec.initial[0] = gaussian_1d(opt.amplitude, opt.center, opt.width);
  spec.final_time = opt.final_time;
  spec.validate();
  return spec;
}

ProblemSpec source_2d_scenario(double delta, const Source2dOptions& opt) {
  ProblemSpec spec;
  spec.name = "source_2d";
  spec.equation = Equation::GeneralizedMgt;
  spec.medium = water(opt.tau, delta);
  spec.domain.dim = 2;
  spec.domain.length = opt.side;
  spec.domain.h = opt.h;
  const double w = 2.0 * std::numbers::pi * opt.frequency;
  spec.source = [=](const Point& p, double t) {
    const double dx = p.x - opt.x0;
    const double dy = p.y - opt.y0;
    return opt.amplitude *
           std::exp(-dx * dx / (2.0 * opt.sigma_x * opt.sigma_x) -
                    dy * dy / (2.0 * opt.sigma_y * opt.sigma_y)) *
           std::sin(w * t);
  };
  spec.final_time = opt.final_time;
  spec.validate();
  return spec;
}

ProblemSpec kuznetsov_scenario(double delta, double tau, const KuznetsovOptions& opt) {
  ProblemSpec spec;
  spec.name = "kuznetsov";
  spec.equation = Equation::JmgtKuznetsovPotential;
  spec.medium = water(tau, delta);
  spec.nonlin.sigma = opt.sigma.value_or(kDefaultSigma);
  spec.nonlin.kappa = opt.kappa.value_or(derived_kappa(spec.medium));
  spec.domain = channel_domain(opt.geometry);
  spec.initial[0] = gaussian_1d(opt.amplitude, opt.geometry.center, opt.geometry.width);
  spec.final_time = opt.geometry.final_time;
  spec.validate();
  return spec;
}

ProblemSpec westervelt_potential_scenario(double delta, double tau, double amplitude,
                                          const ChannelOptions& geometry) {
  ProblemSpec spec;
  spec.name = "westervelt_potential";
  spec.equation = Equation::JmgtWesterveltPotential;
  spec.medium = water(tau, delta);
  spec.nonlin.kappa = westervelt_potential_kappa(spec.medium);
  spec.domain = channel_domain(geometry);
  spec.initial[0] = gaussian_1d(amplitude, geometry.center, geometry.width);
  spec.final_time = geometry.final_time;
  spec.validate();
  return spec;
}

}  // namespace mgt
