#pragma once

#include <optional>
#include <string>

#include "saddleflow/disturbances.hpp"
#include "saddleflow/dynamics.hpp"
#include "saddleflow/network.hpp"
#include "saddleflow/oracle.hpp"

namespace saddleflow {

/// Finite-horizon optimal control data:
///   min sum_tau |x(tau+1)|_1 + |u(tau)|_1
///   s.t. x(tau+1) = G x(tau) + H u(tau),  tau = 0..T,
/// with diagonal actuation H = diag(H_diag) and known x(0).
struct OptimalControlSpec {
  std::string name;
  Eigen::MatrixXd G;       // N x N
  Eigen::VectorXd H_diag;  // N
  Eigen::VectorXd x0;      // N
  int T = 0;

  int n_agents() const { return static_cast<int>(G.rows()); }
};

enum OptCtrlBlock { kXPlus = 0, kXMinus = 1, kUPlus = 2, kUMinus = 3 };

/// Column of (agent, tau, block). Variables are laid out agent-major with
/// four blocks per time step: (x+(tau+1), x-(tau+1), u+(tau), u-(tau)), so
/// each agent owns the contiguous slice of 4(T+1) columns.
Eigen::Index optctrl_var_index(const OptimalControlSpec& spec, int agent,
                               int tau, OptCtrlBlock block);

/// Standard form LP for the split-variable reformulation: n = 4N(T+1)
/// variables, m = N(T+1) equality rows, all-ones cost; the tau = 0 rows carry
/// G x(0) on the right-hand side.
StandardFormLP build_optimal_control_lp(const OptimalControlSpec& spec);

/// u(tau) = u+(tau) - u-(tau) from an LP solution vector; N x (T+1).
Eigen::MatrixXd extract_controls(const Eigen::VectorXd& x_solution,
                                 const OptimalControlSpec& spec);

/// Applies the recursion x(tau+1) = G x(tau) + H u(tau); returns the states
/// x(1..T+1) as an N x (T+1) matrix.
Eigen::MatrixXd rollout(const OptimalControlSpec& spec,
                        const Eigen::MatrixXd& controls);

/// Agent-major block ownership of the LP columns.
AgentAssignment optctrl_agent_assignment(const OptimalControlSpec& spec);

/// Graph with one link per pair of agents coupled through G.
CommGraph optctrl_comm_graph(const OptimalControlSpec& spec);

/// Constant disturbance whose perturbed program has an unbounded optimal
/// set, certifying that no LP dynamics can be input-to-state stable.
struct IssCounterexample {
  PerturbationVector wbar;         // w_z = 0 by construction
  Eigen::VectorXd ray_point;       // feasible minimizer of the perturbed cost
  Eigen::VectorXd ray_direction;   // unit recession direction nu
  Eigen::VectorXd perturbed_cost;  // eta = c - wbar_x, orthogonal to nu
  Eigen::VectorXd perturbed_dual;  // oracle dual of the perturbed program
};

/// Requires an unbounded feasible set; throws BoundedFeasibleSet otherwise
/// (the dual-side construction is reported, not built). Every point
/// ray_point + lambda * ray_direction, lambda >= 0, is optimal for the
/// perturbed program.
IssCounterexample iss_counterexample(const StandardFormLP& lp);

struct ScenarioConfig {
  std::string name;
  std::optional<StandardFormLP> lp;
  std::optional<OptimalControlSpec> optctrl;  // exactly one source
  std::optional<Eigen::VectorXd> x0;          // default: zeros
  std::optional<Eigen::VectorXd> z0;
  IntegratorConfig integrator;
  std::optional<DisturbanceSignal> disturbance;
  std::optional<CommGraph> graph;
  std::optional<FailureSchedule> schedule;  // requires graph
  std::string output_dir;                   // empty: write no files
  bool use_oracle = true;
};

struct RunMetrics {
  double terminal_kkt = 0.0;
  /// |c'x_T - opt|; NaN when the oracle was skipped (over budget).
  double terminal_value_gap = std::numeric_limits<double>::quiet_NaN();
  double time_to_tol = -1.0;
  long steps = 0;
  /// KKT residual of the perturbed program at the terminal state; set for
  /// disturbances with a constant part.
  std::optional<double> perturbed_kkt;
};

/// Everything a scenario produced; run_scenario keeps only the metrics.
struct ScenarioResult {
  StandardFormLP lp;
  RunMetrics metrics;
  Trajectory trajectory;
  std::optional<OracleSolution> oracle;
  std::optional<Eigen::MatrixXd> controls;  // optctrl runs
  std::optional<Eigen::MatrixXd> states;
};

ScenarioResult run_scenario_full(const ScenarioConfig& cfg);
RunMetrics run_scenario(const ScenarioConfig& cfg);

}  // namespace saddleflow
