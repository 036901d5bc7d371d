#pragma once

// Internal component-wise evaluation of the discontinuous saddle-point field.
// The plain and the stale-information (link failure) paths share this kernel
// so that they perform the identical floating-point operations whenever no
// link is failed.

#include <Eigen/Dense>
#include <set>
#include <utility>
#include <vector>

#include "saddleflow/lp.hpp"

namespace saddleflow::detail {

using EdgePairSet = std::set<std::pair<int, int>>;

/// Nonzero structure of A; the agent sums only visit coupled entries.
struct Pattern {
  std::vector<std::vector<int>> cols_of_row;
  std::vector<std::vector<int>> rows_of_col;

  static Pattern build(const Eigen::MatrixXd& A) {
    Pattern p;
    p.cols_of_row.resize(A.rows());
    p.rows_of_col.resize(A.cols());
    for (Eigen::Index l = 0; l < A.rows(); ++l) {
      for (Eigen::Index j = 0; j < A.cols(); ++j) {
        if (A(l, j) != 0.0) {
          p.cols_of_row[l].push_back(static_cast<int>(j));
          p.rows_of_col[j].push_back(static_cast<int>(l));
        }
      }
    }
    return p;
  }
};

/// Stale-information context for recurrently connected graphs: values owned
/// by an agent across a failed link are read from the snapshot instead of
/// the current state.
struct StaleView {
  const Eigen::VectorXd* x_snapshot = nullptr;
  const Eigen::VectorXd* z_snapshot = nullptr;
  const std::vector<int>* agent_of_var = nullptr;   // size n
  const std::vector<int>* agent_of_row = nullptr;   // z_l owner agents, size m
  const EdgePairSet* failed = nullptr;

  bool link_failed(int a, int b) const {
    if (a == b) return false;
    return failed->count(a < b ? std::make_pair(a, b)
                                : std::make_pair(b, a)) != 0;
  }
};

/// Raw (unprojected) velocities:
///   xdot_i = -c_i - sum_l a(l,i) (z_l^seen + sum_j a(l,j) x_j^seen - b_l) + w_x_i
///   zdot_l = sum_i a(l,i) x_i^seen - b_l + w_z_l
/// where "seen" values come from the snapshot across failed links and from
/// the current state otherwise.
inline void eval_raw_flow(const StandardFormLP& lp, const Pattern& pat,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                          const PerturbationVector* w, const StaleView* stale,
                          Eigen::VectorXd& xdot, Eigen::VectorXd& zdot) {
  const Eigen::Index n = lp.A.cols();
  const Eigen::Index m = lp.A.rows();
  xdot.resize(n);
  zdot.resize(m);

  if (!stale) {
    // Every agent sees the same row values; share the row sums. The loop
    // order matches the stale path exactly, so a failure-free link run and
    // a plain run produce bit-identical velocities.
    Eigen::VectorXd inner(m);
    for (Eigen::Index l = 0; l < m; ++l) {
      double acc = -lp.b(l);
      for (int j : pat.cols_of_row[l]) acc += lp.A(l, j) * x(j);
      inner(l) = acc;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      double acc = -lp.c(i);
      for (int l : pat.rows_of_col[i]) {
        acc -= lp.A(l, i) * (z(l) + inner(l));
      }
      if (w) acc += w->w_x(i);
      xdot(i) = acc;
    }
    for (Eigen::Index l = 0; l < m; ++l) {
      zdot(l) = w ? inner(l) + w->w_z(l) : inner(l);
    }
    return;
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    const int agent_i =
        stale ? (*stale->agent_of_var)[static_cast<size_t>(i)] : 0;
    double acc = -lp.c(i);
    for (int l : pat.rows_of_col[i]) {
      double z_seen = z(l);
      if (stale && stale->link_failed(agent_i, (*stale->agent_of_row)[l])) {
        z_seen = (*stale->z_snapshot)(l);
      }
      double inner = -lp.b(l);
      for (int j : pat.cols_of_row[l]) {
        double x_seen = x(j);
        if (stale &&
            stale->link_failed(agent_i, (*stale->agent_of_var)[j])) {
          x_seen = (*stale->x_snapshot)(j);
        }
        inner += lp.A(l, j) * x_seen;
      }
      acc -= lp.A(l, i) * (z_seen + inner);
    }
    if (w) acc += w->w_x(i);
    xdot(i) = acc;
  }

  for (Eigen::Index l = 0; l < m; ++l) {
    const int owner =
        stale ? (*stale->agent_of_row)[static_cast<size_t>(l)] : 0;
    double acc = -lp.b(l);
    for (int i : pat.cols_of_row[l]) {
      double x_seen = x(i);
      if (stale && stale->link_failed(owner, (*stale->agent_of_var)[i])) {
        x_seen = (*stale->x_snapshot)(i);
      }
      acc += lp.A(l, i) * x_seen;
    }
    if (w) acc += w->w_z(l);
    zdot(l) = acc;
  }
}

}  // namespace saddleflow::detail
