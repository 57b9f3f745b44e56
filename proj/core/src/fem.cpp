#include "mgt/fem.hpp"

#include <array>
#include <cmath>

#include "mgt/error.hpp"

namespace mgt {
namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct ElementGeometry {
  double measure;
  // gradients of the barycentric basis functions, one (x, y) pair per vertex
  std::array<std::array<double, 2>, 3> grad;
};

ElementGeometry geometry(const Mesh& mesh, std::size_t e) {
  ElementGeometry g{};
  const auto el = mesh.element(e);
  if (mesh.dim() == 1) {
    const double len = mesh.node(el[1]).x - mesh.node(el[0]).x;
    g.measure = len;
    g.grad[0] = {-1.0 / len, 0.0};
    g.grad[1] = {1.0 / len, 0.0};
    return g;
  }
  const Point& a = mesh.node(el[0]);
  const Point& b = mesh.node(el[1]);
  const Point& c = mesh.node(el[2]);
  const double twice_area = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  g.measure = 0.5 * twice_area;
  g.grad[0] = {(b.y - c.y) / twice_area, (c.x - b.x) / twice_area};
  g.grad[1] = {(c.y - a.y) / twice_area, (a.x - c.x) / twice_area};
  g.grad[2] = {(a.y - b.y) / twice_area, (b.x - a.x) / twice_area};
  return g;
}

// Exact integral of phi_i phi_j over a simplex, divided by its measure.
double mass_factor(int dim, bool same) {
  if (dim == 1) return same ? 1.0 / 3.0 : 1.0 / 6.0;
  return same ? 1.0 / 6.0 : 1.0 / 12.0;
}

// Exact integral of phi_i phi_j phi_k over a simplex, divided by its measure.
double triple_factor(int dim, int i, int j, int k) {
  const bool ij = i == j;
  const bool jk = j == k;
  const bool ik = i == k;
  if (dim == 1) return (ij && jk) ? 0.25 : 1.0 / 12.0;
  if (ij && jk) return 0.1;
  if (ij || jk || ik) return 1.0 / 30.0;
  return 1.0 / 60.0;
}

SparseMatrix build(Eigen::Index n, const Triplets& t) {
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

Vector FemOperators::restrict_to_interior(const Vector& full) const {
  Vector out(n_interior());
  for (Eigen::Index r = 0; r < n_interior(); ++r) out[r] = full[interior_nodes[r]];
  return out;
}

Vector FemOperators::extend_to_full(const Vector& interior) const {
  Vector out = Vector::Zero(n_nodes);
  for (Eigen::Index r = 0; r < n_interior(); ++r) out[interior_nodes[r]] = interior[r];
  return out;
}

FemOperators FemOperators::from_matrices(SparseMatrix mass, SparseMatrix stiffness) {
  if (mass.rows() != mass.cols() || stiffness.rows() != mass.rows() ||
      stiffness.cols() != mass.cols()) {
    throw InvalidArgument("from_matrices: mass and stiffness must be square and equal-sized");
  }
  FemOperators ops;
  ops.n_nodes = mass.rows();
  ops.interior_nodes.resize(mass.rows());
  for (Eigen::Index i = 0; i < mass.rows(); ++i) ops.interior_nodes[i] = static_cast<int>(i);
  ops.mass_full = mass;
  ops.stiffness_full = stiffness;
  ops.mass = std::move(mass);
  ops.stiffness = std::move(stiffness);
  return ops;
}

FemOperators assemble(std::shared_ptr<const Mesh> mesh_ptr) {
  if (!mesh_ptr) throw InvalidArgument("assemble: null mesh");
  const Mesh& mesh = *mesh_ptr;
  const int npe = mesh.nodes_per_element();
  const auto& reduced = mesh.interior_index();

  Triplets mass_full, stiff_full, mass_int, stiff_int;
  const std::size_t per_element = static_cast<std::size_t>(npe) * npe;
  mass_full.reserve(per_element * mesh.n_elements());
  stiff_full.reserve(per_element * mesh.n_elements());

  for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
    const auto el = mesh.element(e);
    const ElementGeometry g = geometry(mesh, e);
    for (int a = 0; a < npe; ++a) {
      for (int b = 0; b < npe; ++b) {
        const double m = g.measure * mass_factor(mesh.dim(), a == b);
        const double k = g.measure * (g.grad[a][0] * g.grad[b][0] + g.grad[a][1] * g.grad[b][1]);
        mass_full.emplace_back(el[a], el[b], m);
        stiff_full.emplace_back(el[a], el[b], k);
        const int ra = reduced[el[a]];
        const int rb = reduced[el[b]];
        if (ra >= 0 && rb >= 0) {
          mass_int.emplace_back(ra, rb, m);
          stiff_int.emplace_back(ra, rb, k);
        }
      }
    }
  }

  FemOperators ops;
  ops.n_nodes = static_cast<Eigen::Index>(mesh.n_nodes());
  ops.interior_nodes = mesh.interior_nodes();
  const auto n_int = ops.n_interior();
  ops.mass_full = build(ops.n_nodes, mass_full);
  ops.stiffness_full = build(ops.n_nodes, stiff_full);
  ops.mass = build(n_int, mass_int);
  ops.stiffness = build(n_int, stiff_int);
  ops.mesh = std::move(mesh_ptr);
  return ops;
}

SparseMatrix weighted_mass(const FemOperators& ops, const Vector& nodal_weight) {
  if (!ops.mesh) throw InvalidArgument("weighted_mass: operators carry no mesh");
  const Mesh& mesh = *ops.mesh;
  if (nodal_weight.size() != ops.n_nodes) {
    throw InvalidArgument("weighted_mass: weight must have one entry per node");
  }
  const int npe = mesh.nodes_per_element();
  const auto& reduced = mesh.interior_index();
  Triplets t;
  for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
    const auto el = mesh.element(e);
    const double measure = mesh.element_measure(e);
    for (int a = 0; a < npe; ++a) {
      const int ra = reduced[el[a]];
      if (ra < 0) continue;
      for (int b = 0; b < npe; ++b) {
        const int rb = reduced[el[b]];
        if (rb < 0) continue;
        double v = 0.0;
        for (int k = 0; k < npe; ++k) v += nodal_weight[el[k]] * triple_factor(mesh.dim(), a, b, k);
        t.emplace_back(ra, rb, measure * v);
      }
    }
  }
  return build(ops.n_interior(), t);
}

Vector load_vector(const FemOperators& ops, const Vector& nodal_g) {
  if (nodal_g.size() != ops.n_nodes) {
    throw InvalidArgument("load_vector: field must have one entry per node");
  }
  const Vector full = ops.mass_full * nodal_g;
  return ops.restrict_to_interior(full);
}

Vector westervelt_rhs(const FemOperators& ops, const NonlinearityParams& nl,
                      const AcousticState& s) {
  if (nl.k == 0.0) return Vector::Zero(ops.n_interior());
  const Vector g = nl.k * (s.u.cwiseProduct(s.u_tt) + s.u_t.cwiseProduct(s.u_t));
  return load_vector(ops, g);
}

Vector kuznetsov_rhs(const FemOperators& ops, const NonlinearityParams& nl,
                     const AcousticState& s) {
  Vector out = Vector::Zero(ops.n_interior());
  if (nl.kappa != 0.0) {
    out += load_vector(ops, nl.kappa * s.u_t.cwiseProduct(s.u_tt));
  }
  if (nl.sigma != 0.0) {
    if (!ops.mesh) throw InvalidArgument("kuznetsov_rhs: gradient term needs a mesh");
    const Mesh& mesh = *ops.mesh;
    const int npe = mesh.nodes_per_element();
    const auto& reduced = mesh.interior_index();
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
      const auto el = mesh.element(e);
      const ElementGeometry g = geometry(mesh, e);
      std::array<double, 2> grad_u{0.0, 0.0};
      std::array<double, 2> grad_ut{0.0, 0.0};
      for (int a = 0; a < npe; ++a) {
        for (int d = 0; d < 2; ++d) {
          grad_u[d] += s.u[el[a]] * g.grad[a][d];
          grad_ut[d] += s.u_t[el[a]] * g.grad[a][d];
        }
      }
      const double integrand = grad_u[0] * grad_ut[0] + grad_u[1] * grad_ut[1];
      const double share = nl.sigma * integrand * g.measure / npe;
      for (int a = 0; a < npe; ++a) {
        const int r = reduced[el[a]];
        if (r >= 0) out[r] += share;
      }
    }
  }
  return out;
}

}  // namespace mgt
