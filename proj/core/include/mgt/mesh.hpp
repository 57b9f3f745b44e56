#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mgt {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Uniform simplicial mesh of an interval (segments) or a square
/// (right triangles), with homogeneous Dirichlet bookkeeping.
///
/// Nodes on the boundary carry interior_index == -1; every other node has a
/// dense reduced index in [0, n_interior()).
class Mesh {
 public:
  int dim() const noexcept { return dim_; }
  double h() const noexcept { return h_; }
  std::size_t n_nodes() const noexcept { return nodes_.size(); }
  std::size_t n_elements() const noexcept { return connectivity_.size() / nodes_per_element(); }
  std::size_t n_interior() const noexcept { return interior_nodes_.size(); }
  int nodes_per_element() const noexcept { return dim_ + 1; }

  const std::vector<Point>& nodes() const noexcept { return nodes_; }
  const Point& node(std::size_t i) const { return nodes_[i]; }
  std::span<const int> element(std::size_t e) const {
    return {connectivity_.data() + e * nodes_per_element(),
            static_cast<std::size_t>(nodes_per_element())};
  }

  /// Length (1D) or area (2D) of element e; triangle areas are signed.
  double element_measure(std::size_t e) const;
  double domain_measure() const noexcept { return domain_measure_; }

  const std::vector<int>& interior_index() const noexcept { return interior_index_; }
  const std::vector<int>& interior_nodes() const noexcept { return interior_nodes_; }
  const std::vector<int>& boundary_nodes() const noexcept { return boundary_nodes_; }
  bool is_boundary(std::size_t i) const { return interior_index_[i] < 0; }

  friend Mesh interval_mesh(double length, int n_elements);
  friend Mesh square_triangle_mesh(double side, double h);

 private:
  Mesh() = default;
  void finalize_boundary(std::vector<bool> on_boundary);

  int dim_ = 1;
  double h_ = 0.0;
  double domain_measure_ = 0.0;
  std::vector<Point> nodes_;
  std::vector<int> connectivity_;
  std::vector<int> interior_index_;
  std::vector<int> interior_nodes_;
  std::vector<int> boundary_nodes_;
};

/// n_elements + 1 equispaced nodes on [0, length]; the two end points are
/// the boundary.
Mesh interval_mesh(double length, int n_elements);

/// (side/h + 1)^2 grid nodes on [0, side]^2. Each cell is split along its
/// lower-left to upper-right diagonal. Throws InvalidArgument unless side/h is
/// an integer to within 1e-9 * side.
Mesh square_triangle_mesh(double side, double h);

}  // namespace mgt
