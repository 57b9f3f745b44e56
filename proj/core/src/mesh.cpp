#include "mgt/mesh.hpp"

#include <cmath>
#include <string>

#include "mgt/error.hpp"

namespace mgt {

double Mesh::element_measure(std::size_t e) const {
  const auto el = element(e);
  if (dim_ == 1) return nodes_[el[1]].x - nodes_[el[0]].x;
  const Point& a = nodes_[el[0]];
  const Point& b = nodes_[el[1]];
  const Point& c = nodes_[el[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

void Mesh::finalize_boundary(std::vector<bool> on_boundary) {
  interior_index_.assign(nodes_.size(), -1);
  interior_nodes_.clear();
  boundary_nodes_.clear();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (on_boundary[i]) {
      boundary_nodes_.push_back(static_cast<int>(i));
    } else {
      interior_index_[i] = static_cast<int>(interior_nodes_.size());
      interior_nodes_.push_back(static_cast<int>(i));
    }
  }
}

Mesh interval_mesh(double length, int n_elements) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw InvalidArgument("interval_mesh: length must be positive");
  }
  if (n_elements < 2) {
    throw InvalidArgument("interval_mesh: need at least 2 elements, got " +
                          std::to_string(n_elements));
  }
  Mesh mesh;
  mesh.dim_ = 1;
  mesh.h_ = length / n_elements;
  mesh.domain_measure_ = length;
  mesh.nodes_.resize(n_elements + 1);
  for (int i = 0; i <= n_elements; ++i) {
    // i * length / n keeps the last node exactly at length
    mesh.nodes_[i] = {static_cast<double>(i) * length / n_elements, 0.0};
  }
  mesh.connectivity_.reserve(2 * n_elements);
  for (int e = 0; e < n_elements; ++e) {
    mesh.connectivity_.push_back(e);
    mesh.connectivity_.push_back(e + 1);
  }
  std::vector<bool> boundary(n_elements + 1, false);
  boundary.front() = boundary.back() = true;
  mesh.finalize_boundary(std::move(boundary));
  return mesh;
}

Mesh square_triangle_mesh(double side, double h) {
  if (!(side > 0.0) || !(h > 0.0) || !std::isfinite(side) || !std::isfinite(h)) {
    throw InvalidArgument("square_triangle_mesh: side and h must be positive");
  }
  const double cells = side / h;
  const long n = std::lround(cells);
  if (n < 1 || std::abs(cells - static_cast<double>(n)) * h > 1e-9 * side) {
    throw InvalidArgument("square_triangle_mesh: h does not divide the side");
  }
  const int nc = static_cast<int>(n);
  const int np = nc + 1;
  Mesh mesh;
  mesh.dim_ = 2;
  mesh.domain_measure_ = side * side;
  const double spacing = side / nc;
  // Mesh size is the grid spacing (the legs of the right triangles).
  mesh.h_ = spacing;
  mesh.nodes_.resize(static_cast<std::size_t>(np) * np);
  std::vector<bool> boundary(mesh.nodes_.size(), false);
  for (int j = 0; j < np; ++j) {
    for (int i = 0; i < np; ++i) {
      const std::size_t id = static_cast<std::size_t>(j) * np + i;
      mesh.nodes_[id] = {static_cast<double>(i) * side / nc, static_cast<double>(j) * side / nc};
      boundary[id] = i == 0 || j == 0 || i == nc || j == nc;
    }
  }
  mesh.connectivity_.reserve(static_cast<std::size_t>(6) * nc * nc);
  for (int j = 0; j < nc; ++j) {
    for (int i = 0; i < nc; ++i) {
      const int ll = j * np + i;
      const int lr = ll + 1;
      const int ul = ll + np;
      const int ur = ul + 1;
      // counter-clockwise on both sides of the ll-ur diagonal
      for (int v : {ll, lr, ur, ll, ur, ul}) mesh.connectivity_.push_back(v);
    }
  }
  mesh.finalize_boundary(std::move(boundary));
  return mesh;
}

}  // namespace mgt
