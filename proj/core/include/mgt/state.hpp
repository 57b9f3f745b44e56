#pragma once

#include <Eigen/Core>

namespace mgt {

using Vector = Eigen::VectorXd;

/// Nodal field and its first three time derivatives at time t. Vectors span
/// every mesh node; boundary entries are zero.
struct AcousticState {
  double t = 0.0;
  Vector u;
  Vector u_t;
  Vector u_tt;
  Vector u_ttt;

  static AcousticState zero(Eigen::Index n_nodes, double t = 0.0) {
    return {t, Vector::Zero(n_nodes), Vector::Zero(n_nodes), Vector::Zero(n_nodes),
            Vector::Zero(n_nodes)};
  }

  Eigen::Index size() const noexcept { return u.size(); }

  bool all_finite() const {
    return u.allFinite() && u_t.allFinite() && u_tt.allFinite() && u_ttt.allFinite();
  }
};

}  // namespace mgt
