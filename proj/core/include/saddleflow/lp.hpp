#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace saddleflow {

/// Standard form linear program:  min c'x  s.t.  Ax = b, x >= 0.
struct StandardFormLP {
  std::string name;
  Eigen::MatrixXd A;  // m x n
  Eigen::VectorXd b;  // m
  Eigen::VectorXd c;  // n

  Eigen::Index num_constraints() const { return A.rows(); }
  Eigen::Index num_vars() const { return A.cols(); }
};

/// Primal-dual pair (x, z) evolved by every dynamics variant.
struct PrimalDualState {
  Eigen::VectorXd x;  // n
  Eigen::VectorXd z;  // m
};

/// Disturbance value w = (w_x, w_z).
struct PerturbationVector {
  Eigen::VectorXd w_x;  // n
  Eigen::VectorXd w_z;  // m

  static PerturbationVector zero(Eigen::Index n, Eigen::Index m) {
    return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(m)};
  }
};

struct Diagnostic {
  enum class Severity { Info, Error };
  Severity severity;
  std::string text;
};

/// Result of a validation pass. `ok` is true iff no error-level entry exists.
struct ValidationReport {
  bool ok = true;
  std::vector<Diagnostic> messages;

  void error(std::string text) {
    ok = false;
    messages.push_back({Diagnostic::Severity::Error, std::move(text)});
  }
  void info(std::string text) {
    messages.push_back({Diagnostic::Severity::Info, std::move(text)});
  }
  bool mentions(const std::string& needle) const;
};

/// Dual program record:  max objective'z  s.t.  matrix*z + shift >= 0.
/// For a standard form LP this holds (A', c, -b) so that the program reads
/// max -b'z s.t. A'z + c >= 0.
struct DualProgram {
  Eigen::MatrixXd matrix;     // n x m
  Eigen::VectorXd shift;      // n
  Eigen::VectorXd objective;  // m
};

/// Reports dimension mismatches, all-zero rows and non-finite entries.
/// Problems are reported in the result, never thrown.
ValidationReport validate_lp(const StandardFormLP& lp);

/// Transcribes the dual program. No solving happens here.
DualProgram dual_of(const StandardFormLP& lp);

/// Maps a dual record back to standard form data; primal_of(dual_of(lp))
/// reproduces lp bit-for-bit.
StandardFormLP primal_of(const DualProgram& dual);

/// Modified Lagrangian with quadratic equality penalty and exact nonsmooth
/// penalty K on the negative part of x:
///   L_K(x, z) = c'x + (1/2)|Ax-b|^2 + z'(Ax-b) + K * sum_i max(0, -x_i).
double lagrangian_value(const StandardFormLP& lp, double K,
                        const PrimalDualState& s);

/// Max violation over primal feasibility, dual feasibility, complementary
/// slackness and strong duality; zero exactly on the primal-dual solution set.
double kkt_residual(const StandardFormLP& lp, const PrimalDualState& s);

/// LP whose data absorbs the constant disturbance wbar:
/// cost c - w_x - A'w_z, right-hand side b - w_z, same A.
StandardFormLP perturbed_program(const StandardFormLP& lp,
                                 const PerturbationVector& wbar);

}  // namespace saddleflow
