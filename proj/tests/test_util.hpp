#pragma once

// Shared fixtures for the test suites: pinned desk-scale problems and the
// seeded random LP sampler used by the property tests.

#include <optional>
#include <random>

#include "saddleflow/errors.hpp"
#include "saddleflow/lp.hpp"
#include "saddleflow/oracle.hpp"

namespace saddleflow::testing {

/// min x1 + 2 x2  s.t.  x1 + x2 = 1, x >= 0; optimum x = (1, 0), z = -1.
inline StandardFormLP make_lp1() {
  StandardFormLP lp;
  lp.name = "lp1";
  lp.A = Eigen::MatrixXd::Ones(1, 2);
  lp.b = Eigen::VectorXd::Ones(1);
  lp.c = Eigen::VectorXd(2);
  lp.c << 1.0, 2.0;
  return lp;
}

/// min x1  s.t.  x1 - x2 = 0, x >= 0; unbounded feasible ray along (1, 1).
inline StandardFormLP make_ray_lp() {
  StandardFormLP lp;
  lp.name = "ray";
  lp.A = Eigen::MatrixXd(1, 2);
  lp.A << 1.0, -1.0;
  lp.b = Eigen::VectorXd::Zero(1);
  lp.c = Eigen::VectorXd(2);
  lp.c << 1.0, 0.0;
  return lp;
}

/// min x1 + x2  s.t.  x1 + x2 = 1, x >= 0; the whole segment is optimal.
inline StandardFormLP make_segment_lp() {
  StandardFormLP lp;
  lp.name = "segment";
  lp.A = Eigen::MatrixXd::Ones(1, 2);
  lp.b = Eigen::VectorXd::Ones(1);
  lp.c = Eigen::VectorXd::Ones(2);
  return lp;
}

/// Feasible-by-construction random instance: entries in [-2, 2] and
/// b = A x_feas for a nonnegative x_feas.
inline StandardFormLP random_feasible_lp(std::uint64_t seed, int max_n = 8,
                                         int max_m = 4) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> n_dist(2, max_n);
  const int n = n_dist(rng);
  std::uniform_int_distribution<int> m_dist(1, std::min(max_m, n - 1));
  const int m = m_dist(rng);
  std::uniform_real_distribution<double> entry(-2.0, 2.0);
  std::uniform_real_distribution<double> nonneg(0.0, 2.0);

  StandardFormLP lp;
  lp.name = "rand-" + std::to_string(seed);
  lp.A.resize(m, n);
  for (int r = 0; r < m; ++r) {
    for (int j = 0; j < n; ++j) lp.A(r, j) = entry(rng);
  }
  Eigen::VectorXd x_feas(n);
  for (int j = 0; j < n; ++j) x_feas(j) = nonneg(rng);
  lp.b = lp.A * x_feas;
  lp.c.resize(n);
  for (int j = 0; j < n; ++j) lp.c(j) = entry(rng);
  return lp;
}

/// First seed >= `seed` whose instance the oracle solves (bounded value);
/// advances `seed` past the one used.
inline std::pair<StandardFormLP, OracleSolution> next_solvable_lp(
    std::uint64_t& seed) {
  for (;; ++seed) {
    StandardFormLP lp = random_feasible_lp(seed);
    try {
      OracleSolution sol = solve_primal_dual(lp);
      ++seed;
      return {std::move(lp), std::move(sol)};
    } catch (const Error&) {
      // unbounded or numerically marginal draw; skip it
    }
  }
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index size,
                                     double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = dist(rng);
  return v;
}

}  // namespace saddleflow::testing
