#include <cmath>
#include <vector>

#include "doctest.h"
#include "mgt/error.hpp"
#include "mgt/mesh.hpp"

using namespace mgt;
using doctest::Approx;

TEST_CASE("interval mesh") {
  const Mesh m = interval_mesh(0.4, 600);
  CHECK(m.dim() == 1);
  CHECK(m.n_nodes() == 601);
  CHECK(m.n_elements() == 600);
  CHECK(m.n_interior() == 599);
  CHECK(m.h() == Approx(6.6667e-4).epsilon(1e-4));
  CHECK(m.node(600).x == 0.4);

  const Mesh small = interval_mesh(1.0, 2);
  CHECK(small.node(0).x == 0.0);
  CHECK(small.node(1).x == 0.5);
  CHECK(small.node(2).x == 1.0);
  CHECK(small.n_interior() == 1);
  CHECK(small.interior_index()[1] == 0);
  CHECK(small.is_boundary(0));
  CHECK(small.is_boundary(2));

  CHECK_THROWS_AS(interval_mesh(0.4, 0), InvalidArgument);
  CHECK_THROWS_AS(interval_mesh(-1.0, 4), InvalidArgument);
}

TEST_CASE("square triangle mesh") {
  const Mesh m = square_triangle_mesh(0.5, 0.01);
  CHECK(m.dim() == 2);
  CHECK(m.n_nodes() == 2601);
  CHECK(m.n_elements() == 5000);
  CHECK(m.n_interior() == 49 * 49);
  CHECK(m.boundary_nodes().size() == 200);
  CHECK(m.h() == Approx(0.01));

  const Mesh tiny = square_triangle_mesh(1.0, 0.5);
  CHECK(tiny.n_nodes() == 9);
  CHECK(tiny.n_elements() == 8);
  CHECK(tiny.n_interior() == 1);
  const Point& c = tiny.node(tiny.interior_nodes()[0]);
  CHECK(c.x == 0.5);
  CHECK(c.y == 0.5);

  CHECK_THROWS_AS(square_triangle_mesh(0.5, 0.013), InvalidArgument);
}

TEST_CASE("element measures sum to the domain measure") {
  for (const Mesh& m : {interval_mesh(0.4, 37), square_triangle_mesh(0.5, 0.05)}) {
    double sum = 0.0;
    for (std::size_t e = 0; e < m.n_elements(); ++e) {
      CHECK(m.element_measure(e) > 0.0);  // counter-clockwise triangles
      sum += m.element_measure(e);
    }
    CHECK(sum == Approx(m.domain_measure()).epsilon(1e-13));
  }
}

TEST_CASE("interior nodes of the triangle mesh touch six triangles") {
  const Mesh m = square_triangle_mesh(1.0, 0.125);
  std::vector<int> count(m.n_nodes(), 0);
  for (std::size_t e = 0; e < m.n_elements(); ++e)
    for (int v : m.element(e)) ++count[v];
  for (int i : m.interior_nodes()) CHECK(count[i] == 6);
}

TEST_CASE("interior and boundary sets partition the nodes") {
  const Mesh m = square_triangle_mesh(0.5, 0.1);
  CHECK(m.n_interior() + m.boundary_nodes().size() == m.n_nodes());
  for (std::size_t r = 0; r < m.n_interior(); ++r)
    CHECK(m.interior_index()[m.interior_nodes()[r]] == static_cast<int>(r));
  for (int b : m.boundary_nodes()) {
    const Point& p = m.node(b);
    const bool on_edge = p.x == 0.0 || p.y == 0.0 || std::abs(p.x - 0.5) < 1e-12 ||
                         std::abs(p.y - 0.5) < 1e-12;
    CHECK(on_edge);
  }
}
