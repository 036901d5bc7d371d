#include "saddleflow/lp.hpp"

#include <algorithm>
#include <cmath>

#include "saddleflow/errors.hpp"

namespace saddleflow {

bool ValidationReport::mentions(const std::string& needle) const {
  return std::any_of(messages.begin(), messages.end(),
                     [&](const Diagnostic& d) {
                       return d.text.find(needle) != std::string::npos;
                     });
}

ValidationReport validate_lp(const StandardFormLP& lp) {
  ValidationReport report;
  const Eigen::Index m = lp.A.rows();
  const Eigen::Index n = lp.A.cols();

  if (lp.b.size() != m) {
    report.error("dimension mismatch: |b| = " + std::to_string(lp.b.size()) +
                 " but A has " + std::to_string(m) + " rows");
  }
  if (lp.c.size() != n) {
    report.error("dimension mismatch: |c| = " + std::to_string(lp.c.size()) +
                 " but A has " + std::to_string(n) + " columns");
  }
  for (Eigen::Index l = 0; l < m; ++l) {
    if (lp.A.row(l).cwiseAbs().maxCoeff() == 0.0) {
      report.error("zero row: constraint " + std::to_string(l + 1) +
                   " involves no variable");
    }
  }
  if (!lp.A.allFinite()) report.error("non-finite entry in A");
  if (!lp.b.allFinite()) report.error("non-finite entry in b");
  if (!lp.c.allFinite()) report.error("non-finite entry in c");
  if (report.ok) {
    report.info("problem '" + lp.name + "': " + std::to_string(n) +
                " variables, " + std::to_string(m) + " equality constraints");
  }
  return report;
}

DualProgram dual_of(const StandardFormLP& lp) {
  return {lp.A.transpose(), lp.c, -lp.b};
}

StandardFormLP primal_of(const DualProgram& dual) {
  return {"", dual.matrix.transpose(), -dual.objective, dual.shift};
}

double lagrangian_value(const StandardFormLP& lp, double K,
                        const PrimalDualState& s) {
  const Eigen::VectorXd residual = lp.A * s.x - lp.b;
  const double penalty = (-s.x).cwiseMax(0.0).sum();
  return lp.c.dot(s.x) + 0.5 * residual.squaredNorm() + s.z.dot(residual) +
         K * penalty;
}

double kkt_residual(const StandardFormLP& lp, const PrimalDualState& s) {
  const Eigen::VectorXd primal_residual = lp.A * s.x - lp.b;
  const Eigen::VectorXd dual_slack = lp.A.transpose() * s.z + lp.c;

  const double primal_feas = primal_residual.lpNorm<Eigen::Infinity>();
  const double nonneg = s.x.cwiseMin(0.0).lpNorm<Eigen::Infinity>();
  const double dual_feas = dual_slack.cwiseMin(0.0).lpNorm<Eigen::Infinity>();
  const double comp_slack = std::abs(dual_slack.dot(s.x));
  // Redundant at exact optima, binding under finite tolerance.
  const double duality_gap = std::abs(lp.c.dot(s.x) + lp.b.dot(s.z));

  return std::max({primal_feas, nonneg, dual_feas, comp_slack, duality_gap});
}

StandardFormLP perturbed_program(const StandardFormLP& lp,
                                 const PerturbationVector& wbar) {
  StandardFormLP out = lp;
  out.c = lp.c - wbar.w_x - lp.A.transpose() * wbar.w_z;
  out.b = lp.b - wbar.w_z;
  return out;
}

}  // namespace saddleflow
