#pragma once

#include <optional>
#include <vector>

#include "saddleflow/lp.hpp"

namespace saddleflow {

/// Enumeration limits. Exceeding either throws ErrorCode::BudgetExceeded.
struct OracleBudget {
  int max_vars = 25;
  long max_bases = 4'000'000;
};

/// Ground truth for a small LP, produced by exhaustive basis enumeration.
struct OracleSolution {
  Eigen::VectorXd x_star;
  Eigen::VectorXd z_star;
  double optimal_value = 0.0;
  /// All optimal bases as sorted column index sets, in lexicographic order.
  std::vector<std::vector<int>> optimal_bases;
  /// Dual-feasible vertices z = -inv(A_B)' c_B collected over optimal bases,
  /// deduplicated, in basis order. Never empty on success.
  std::vector<Eigen::VectorXd> dual_vertices;
};

/// Enumerates every basis of Ax = b; the cheapest feasible basic solution is
/// optimal. Reports the lexicographically smallest optimal basis as
/// (x_star, z_star).
///
/// Throws Infeasible, Unbounded (detected by a recession-direction scan) or
/// BudgetExceeded.
OracleSolution solve_primal_dual(const StandardFormLP& lp,
                                 const OracleBudget& budget = {});

/// Upper bound for the penalty parameter: max over the collected dual
/// vertices (and z_star) of |A'z + c|_inf. Over-approximates the sublevel-set
/// restricted maximum, so any K >= compute_K_star stays valid. `rho` is the
/// sublevel radius the bound is quoted for; it must be positive but does not
/// affect the over-approximation.
///
/// Throws UnboundedSolutionSet when the solution set fails the boundedness
/// check.
double compute_K_star(const StandardFormLP& lp, const OracleSolution& sol,
                      double rho);

/// True iff neither the primal nor the dual optimal face admits a nonzero
/// recession direction.
bool is_solution_set_bounded(const StandardFormLP& lp,
                             const OracleSolution& sol,
                             const OracleBudget& budget = {});

/// A unit recession direction of {Ax = b, x >= 0}: nu >= 0, A nu = 0,
/// |nu| = 1. Returns nullopt when the feasible set has no ray. Among the
/// normalized directions, the one minimizing c'nu is reported.
std::optional<Eigen::VectorXd> primal_recession_direction(
    const StandardFormLP& lp, const OracleBudget& budget = {});

}  // namespace saddleflow
