#pragma once

#include <memory>
#include <vector>

#include <Eigen/SparseCore>

#include "mgt/medium.hpp"
#include "mgt/mesh.hpp"
#include "mgt/state.hpp"

namespace mgt {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// P1 mass and stiffness operators. The reduced matrices act on interior
/// (non-Dirichlet) nodes; the full ones on every node.
struct FemOperators {
  SparseMatrix mass;
  SparseMatrix stiffness;
  SparseMatrix mass_full;
  SparseMatrix stiffness_full;
  std::vector<int> interior_nodes;  // reduced index -> node
  Eigen::Index n_nodes = 0;
  std::shared_ptr<const Mesh> mesh;  // null for operators built from raw matrices

  Eigen::Index n_interior() const noexcept { return static_cast<Eigen::Index>(interior_nodes.size()); }

  Vector restrict_to_interior(const Vector& full) const;
  /// Scatters interior values into a full-node vector with zero boundary.
  Vector extend_to_full(const Vector& interior) const;

  /// Operators of an abstract semi-discrete system with no boundary nodes,
  /// e.g. a 1x1 system for a single mode.
  static FemOperators from_matrices(SparseMatrix mass, SparseMatrix stiffness);
};

/// Exact P1 element matrices summed in element order, then reduced to the
/// interior. Deterministic: equal meshes give bitwise equal operators.
FemOperators assemble(std::shared_ptr<const Mesh> mesh);
inline FemOperators assemble(const Mesh& mesh) { return assemble(std::make_shared<const Mesh>(mesh)); }

/// Interior-node matrix of the weighted mass form (w phi_i, phi_j) with w the
/// P1 interpolant of the nodal weights; integrated exactly.
SparseMatrix weighted_mass(const FemOperators& ops, const Vector& nodal_weight);

/// M_full * g restricted to interior nodes: the load of the P1 interpolant of g.
Vector load_vector(const FemOperators& ops, const Vector& nodal_g);

/// Load of k (p p_tt + p_t^2), products formed on nodal values.
Vector westervelt_rhs(const FemOperators& ops, const NonlinearityParams& nl,
                      const AcousticState& state);

/// Load of kappa psi_t psi_tt + sigma grad(psi) . grad(psi_t). The first term
/// uses nodal products; the gradient term is integrated exactly per element.
Vector kuznetsov_rhs(const FemOperators& ops, const NonlinearityParams& nl,
                     const AcousticState& state);

}  // namespace mgt
