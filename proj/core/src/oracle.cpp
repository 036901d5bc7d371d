#include "saddleflow/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "saddleflow/errors.hpp"

namespace saddleflow {
namespace {

constexpr double kSingularTol = 1e-10;
constexpr double kFeasTol = 1e-9;
constexpr double kTieTol = 1e-9;

long binomial_capped(int n, int k, long cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > cap) return cap + 1;
  }
  return result;
}

/// Advances `idx` to the next k-combination of {0..n-1}; false when done.
bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

struct RowReduction {
  std::vector<int> kept;  // indices of a maximal independent row set
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  bool consistent = true;
};

/// Gaussian elimination with partial pivoting over [A | b]; pivot rows form
/// the kept set, eliminated rows must have matching b to be consistent.
RowReduction reduce_rows(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const Eigen::Index m = A.rows(), n = A.cols();
  Eigen::MatrixXd M(m, n + 1);
  M.leftCols(n) = A;
  M.col(n) = b;
  std::vector<int> original(m);
  for (Eigen::Index i = 0; i < m; ++i) original[i] = static_cast<int>(i);

  RowReduction out;
  Eigen::Index rank = 0;
  for (Eigen::Index col = 0; col < n && rank < m; ++col) {
    Eigen::Index pivot = rank;
    double best = std::abs(M(rank, col));
    for (Eigen::Index r = rank + 1; r < m; ++r) {
      if (std::abs(M(r, col)) > best) {
        best = std::abs(M(r, col));
        pivot = r;
      }
    }
    if (best <= kSingularTol) continue;
    M.row(rank).swap(M.row(pivot));
    std::swap(original[rank], original[pivot]);
    for (Eigen::Index r = rank + 1; r < m; ++r) {
      const double f = M(r, col) / M(rank, col);
      if (f != 0.0) M.row(r) -= f * M.row(rank);
    }
    out.kept.push_back(original[rank]);
    ++rank;
  }
  const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
  for (Eigen::Index r = rank; r < m; ++r) {
    if (std::abs(M(r, n)) > 1e-8 * scale) out.consistent = false;
  }
  std::sort(out.kept.begin(), out.kept.end());
  out.A.resize(rank, n);
  out.b.resize(rank);
  for (Eigen::Index k = 0; k < rank; ++k) {
    out.A.row(k) = A.row(out.kept[k]);
    out.b(k) = b(out.kept[k]);
  }
  return out;
}

struct BasisCandidate {
  std::vector<int> cols;
  Eigen::VectorXd x;  // full length, zeros off basis
  double cost = 0.0;
};

struct Enumeration {
  bool any_feasible = false;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<BasisCandidate> optimal;  // ties within kTieTol, lexicographic
};

/// Visits every basis of the (full row rank) system Ax = b, x >= 0 and keeps
/// the cost-minimal feasible basic solutions.
Enumeration enumerate_bases(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                            const Eigen::VectorXd& c, long max_bases,
                            double feas_tol = kFeasTol) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  Enumeration result;
  if (m == 0 || m > n) return result;
  if (binomial_capped(n, m, max_bases) > max_bases) {
    throw Error(ErrorCode::BudgetExceeded,
                "basis enumeration over budget: C(" + std::to_string(n) + "," +
                    std::to_string(m) + ") bases");
  }

  std::vector<int> cols(m);
  for (int i = 0; i < m; ++i) cols[i] = i;
  Eigen::MatrixXd basis(m, m);
  do {
    for (int k = 0; k < m; ++k) basis.col(k) = A.col(cols[k]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    lu.setThreshold(kSingularTol);
    if (!lu.isInvertible()) continue;
    Eigen::VectorXd xb = lu.solve(b);
    if ((xb.array() < -feas_tol).any()) continue;

    result.any_feasible = true;
    double cost = 0.0;
    for (int k = 0; k < m; ++k) cost += c(cols[k]) * xb(k);
    const double tol = kTieTol * std::max(1.0, std::abs(result.best_cost));
    if (cost < result.best_cost - tol) {
      result.best_cost = cost;
      result.optimal.clear();
    }
    if (cost <= result.best_cost + tol) {
      result.best_cost = std::min(result.best_cost, cost);
      BasisCandidate cand;
      cand.cols = cols;
      cand.cost = cost;
      cand.x = Eigen::VectorXd::Zero(n);
      for (int k = 0; k < m; ++k) cand.x(cols[k]) = xb(k);
      result.optimal.push_back(std::move(cand));
    }
  } while (next_combination(cols, n));
  return result;
}

/// Phase-one feasibility value: min 1's s.t. Ax + Es = b, x, s >= 0 with
/// E = diag(sign(b)). Zero iff the original system is feasible.
double phase_one_value(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                       long max_bases) {
  const Eigen::Index m = A.rows(), n = A.cols();
  Eigen::MatrixXd Aext(m, n + m);
  Aext.leftCols(n) = A;
  Aext.rightCols(m) = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index l = 0; l < m; ++l) {
    Aext(l, n + l) = b(l) >= 0.0 ? 1.0 : -1.0;
  }
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(n + m);
  cost.tail(m).setOnes();
  Enumeration e = enumerate_bases(Aext, b, cost, max_bases);
  // The artificial basis is always feasible.
  return e.any_feasible ? e.best_cost
                        : std::numeric_limits<double>::infinity();
}

Eigen::VectorXd lift_dual(const Eigen::VectorXd& z_reduced,
                          const std::vector<int>& kept, Eigen::Index m) {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
  for (size_t k = 0; k < kept.size(); ++k) z(kept[k]) = z_reduced(k);
  return z;
}

/// Feasibility of the polyhedron { u : C u >= d, E u = e } in a small
/// dimension, assuming it contains no line. Checks every active set that
/// pins a vertex.
bool pointed_polyhedron_feasible(const Eigen::MatrixXd& C,
                                 const Eigen::VectorXd& d,
                                 const Eigen::MatrixXd& E,
                                 const Eigen::VectorXd& e) {
  const int dim = static_cast<int>(C.cols());
  const int nc = static_cast<int>(C.rows());

  auto check_active_set = [&](const std::vector<int>& active) {
    Eigen::MatrixXd S(E.rows() + static_cast<Eigen::Index>(active.size()),
                      dim);
    Eigen::VectorXd rhs(S.rows());
    S.topRows(E.rows()) = E;
    rhs.head(E.rows()) = e;
    for (size_t k = 0; k < active.size(); ++k) {
      S.row(E.rows() + static_cast<Eigen::Index>(k)) = C.row(active[k]);
      rhs(E.rows() + static_cast<Eigen::Index>(k)) = d(active[k]);
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(S);
    cod.setThreshold(kSingularTol);
    if (cod.rank() < dim) return false;
    Eigen::VectorXd u = cod.solve(rhs);
    if ((S * u - rhs).lpNorm<Eigen::Infinity>() > 1e-8) return false;
    if (E.rows() > 0 &&
        (E * u - e).lpNorm<Eigen::Infinity>() > 1e-8)
      return false;
    return !((C * u - d).array() < -1e-8).any();
  };

  for (int size = 0; size <= std::min(dim, nc); ++size) {
    std::vector<int> active(size);
    for (int i = 0; i < size; ++i) active[i] = i;
    if (size == 0) {
      if (check_active_set(active)) return true;
      continue;
    }
    do {
      if (check_active_set(active)) return true;
    } while (next_combination(active, nc));
  }
  return false;
}

void throw_if_invalid(const StandardFormLP& lp) {
  ValidationReport report = validate_lp(lp);
  if (!report.ok) {
    std::string what = "invalid LP";
    for (const auto& d : report.messages) {
      if (d.severity == Diagnostic::Severity::Error) what += "; " + d.text;
    }
    throw Error(ErrorCode::InvalidInput, what);
  }
}

}  // namespace

OracleSolution solve_primal_dual(const StandardFormLP& lp,
                                 const OracleBudget& budget) {
  throw_if_invalid(lp);
  const Eigen::Index m = lp.A.rows(), n = lp.A.cols();
  if (n > budget.max_vars) {
    throw Error(ErrorCode::BudgetExceeded,
                "oracle limited to " + std::to_string(budget.max_vars) +
                    " variables, got " + std::to_string(n));
  }

  RowReduction red = reduce_rows(lp.A, lp.b);
  if (!red.consistent) {
    throw Error(ErrorCode::Infeasible,
                "equality constraints are inconsistent");
  }

  Enumeration primal = enumerate_bases(red.A, red.b, lp.c, budget.max_bases);
  if (!primal.any_feasible) {
    if (phase_one_value(red.A, red.b, budget.max_bases) > 1e-7) {
      throw Error(ErrorCode::Infeasible, "no feasible basic solution");
    }
    // Feasible per phase one but every basis missed the tolerance band.
    primal = enumerate_bases(red.A, red.b, lp.c, budget.max_bases, 1e-7);
    if (!primal.any_feasible) {
      throw Error(ErrorCode::Infeasible,
                  "feasibility is numerically marginal");
    }
  }

  // Recession-direction scan: a ray nu >= 0, A nu = 0 with negative cost
  // certifies an unbounded value.
  {
    Eigen::MatrixXd Ar(red.A.rows() + 1, n);
    Ar.topRows(red.A.rows()) = red.A;
    Ar.bottomRows(1).setOnes();
    Eigen::VectorXd br = Eigen::VectorXd::Zero(Ar.rows());
    br(Ar.rows() - 1) = 1.0;
    RowReduction ray_red = reduce_rows(Ar, br);
    if (ray_red.consistent) {
      Enumeration rays =
          enumerate_bases(ray_red.A, ray_red.b, lp.c, budget.max_bases);
      if (rays.any_feasible && rays.best_cost < -1e-7) {
        throw Error(ErrorCode::Unbounded,
                    "feasible ray with negative cost found");
      }
    }
  }

  std::sort(primal.optimal.begin(), primal.optimal.end(),
            [](const BasisCandidate& a, const BasisCandidate& b) {
              return a.cols < b.cols;
            });

  OracleSolution sol;
  sol.x_star = primal.optimal.front().x;
  sol.optimal_value = primal.optimal.front().cost;

  const Eigen::Index mr = red.A.rows();
  const double dual_tol = 1e-9 * (1.0 + lp.c.lpNorm<Eigen::Infinity>());
  Eigen::MatrixXd basis(mr, mr);
  Eigen::VectorXd cb(mr);
  for (const BasisCandidate& cand : primal.optimal) {
    sol.optimal_bases.push_back(cand.cols);
    for (Eigen::Index k = 0; k < mr; ++k) {
      basis.col(k) = red.A.col(cand.cols[k]);
      cb(k) = lp.c(cand.cols[k]);
    }
    Eigen::VectorXd z_reduced =
        Eigen::FullPivLU<Eigen::MatrixXd>(basis.transpose()).solve(-cb);
    Eigen::VectorXd z = lift_dual(z_reduced, red.kept, m);
    if (((lp.A.transpose() * z + lp.c).array() < -dual_tol).any()) continue;
    const bool seen =
        std::any_of(sol.dual_vertices.begin(), sol.dual_vertices.end(),
                    [&](const Eigen::VectorXd& v) {
                      return (v - z).lpNorm<Eigen::Infinity>() <= 1e-9;
                    });
    if (!seen) sol.dual_vertices.push_back(std::move(z));
  }
  if (sol.dual_vertices.empty()) {
    throw Error(ErrorCode::InvalidInput,
                "no dual-feasible optimal basis found");
  }
  sol.z_star = sol.dual_vertices.front();
  return sol;
}

double compute_K_star(const StandardFormLP& lp, const OracleSolution& sol,
                      double rho) {
  if (!(rho > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "rho must be positive");
  }
  if (!is_solution_set_bounded(lp, sol)) {
    throw Error(ErrorCode::UnboundedSolutionSet,
                "solution set is unbounded; K_star is undefined");
  }
  // Over-approximation: the maximum over all dual vertices dominates the
  // maximum over the rho-sublevel slice of the solution set.
  double k_star = (lp.A.transpose() * sol.z_star + lp.c)
                      .lpNorm<Eigen::Infinity>();
  for (const Eigen::VectorXd& z : sol.dual_vertices) {
    k_star = std::max(
        k_star, (lp.A.transpose() * z + lp.c).lpNorm<Eigen::Infinity>());
  }
  return k_star;
}

bool is_solution_set_bounded(const StandardFormLP& lp,
                             const OracleSolution& sol,
                             const OracleBudget& budget) {
  // The recession cones of the optimal faces do not depend on which face
  // point `sol` reports; the argument asserts solvability.
  (void)sol;
  const Eigen::Index m = lp.A.rows(), n = lp.A.cols();
  RowReduction red = reduce_rows(lp.A, lp.b);

  // Primal face: a direction nu >= 0 with A nu = 0 and c'nu = 0 keeps
  // optimality; normalize with 1'nu = 1 and test feasibility.
  {
    Eigen::MatrixXd Ar(red.A.rows() + 2, n);
    Ar.topRows(red.A.rows()) = red.A;
    Ar.row(red.A.rows()) = lp.c.transpose();
    Ar.bottomRows(1).setOnes();
    Eigen::VectorXd br = Eigen::VectorXd::Zero(Ar.rows());
    br(Ar.rows() - 1) = 1.0;
    RowReduction ray = reduce_rows(Ar, br);
    if (ray.consistent) {
      Enumeration e = enumerate_bases(ray.A, ray.b, Eigen::VectorXd::Zero(n),
                                      budget.max_bases);
      if (e.any_feasible) return false;
    }
  }

  // Redundant equality rows leave the dual multipliers free along the row
  // dependency, so the dual face is unbounded.
  if (static_cast<Eigen::Index>(red.kept.size()) < m) return false;

  // Dual face: probe each coordinate direction for a recession direction
  // u with A'u >= 0 and b'u = 0.
  for (Eigen::Index j = 0; j < m; ++j) {
    for (double sigma : {1.0, -1.0}) {
      Eigen::MatrixXd E(2, m);
      E.row(0) = lp.b.transpose();
      E.row(1).setZero();
      E(1, j) = sigma;
      Eigen::VectorXd e(2);
      e << 0.0, 1.0;
      if (pointed_polyhedron_feasible(lp.A.transpose(),
                                      Eigen::VectorXd::Zero(n), E, e)) {
        return false;
      }
    }
  }
  return true;
}

std::optional<Eigen::VectorXd> primal_recession_direction(
    const StandardFormLP& lp, const OracleBudget& budget) {
  throw_if_invalid(lp);
  const Eigen::Index n = lp.A.cols();
  Eigen::MatrixXd Ar(lp.A.rows() + 1, n);
  Ar.topRows(lp.A.rows()) = lp.A;
  Ar.bottomRows(1).setOnes();
  Eigen::VectorXd br = Eigen::VectorXd::Zero(Ar.rows());
  br(Ar.rows() - 1) = 1.0;
  RowReduction red = reduce_rows(Ar, br);
  if (!red.consistent) return std::nullopt;
  Enumeration e = enumerate_bases(red.A, red.b, lp.c, budget.max_bases);
  if (!e.any_feasible) return std::nullopt;
  std::sort(e.optimal.begin(), e.optimal.end(),
            [](const BasisCandidate& a, const BasisCandidate& b) {
              return a.cols < b.cols;
            });
  Eigen::VectorXd nu = e.optimal.front().x;
  return nu / nu.norm();
}

}  // namespace saddleflow
