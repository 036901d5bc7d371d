#pragma once

#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "saddleflow/dynamics.hpp"
#include "saddleflow/lp.hpp"

namespace saddleflow {

/// Unordered agent pairs, stored normalized as (low, high), 0-based.
using EdgeSet = std::set<std::pair<int, int>>;

/// Undirected communication graph over the agents.
struct CommGraph {
  int n_agents = 0;
  EdgeSet edges;

  void add_edge(int i, int j);
  bool has_edge(int i, int j) const;
  static CommGraph complete(int n);
};

/// Which agent owns each LP variable. The base case is one agent per
/// variable; grouped assignments cover problems where an agent controls a
/// contiguous block (the optimal-control reformulation).
struct AgentAssignment {
  int n_agents = 0;
  std::vector<int> agent_of_var;

  static AgentAssignment identity(Eigen::Index n);
  static AgentAssignment contiguous_blocks(int n_agents, int vars_per_agent);
};

/// Recurrently connected graph schedule. Interval k spans
/// [breakpoints[k], breakpoints[k+1]) (the last one extends to infinity);
/// links may fail on even intervals only, and a failed link stays down for
/// the entire interval. Before breakpoints[0] the base graph is intact.
struct FailureSchedule {
  std::vector<double> breakpoints;
  std::vector<EdgeSet> failing;  // one set per interval
  CommGraph base_graph;

  /// Schedule alternating `t_disconnected` seconds of failures with
  /// `t_connected` seconds of full connectivity, starting at t = 0.
  static FailureSchedule alternating(CommGraph base, double t_disconnected,
                                     double t_connected, int cycles,
                                     bool fail_all = true);

  int interval_at(double t) const;  // -1 before the first breakpoint
  const EdgeSet& failing_at(double t) const;
  void validate() const;
};

/// Last state exchanged before a failure interval; refreshed at breakpoints.
struct StaleCache {
  Eigen::VectorXd x_snapshot;
  Eigen::VectorXd z_snapshot;
  double snapshot_time = 0.0;

  static StaleCache of(const PrimalDualState& s, double t) {
    return {s.x, s.z, t};
  }
};

/// A graph is connected with respect to A when every pair of agents coupled
/// by a common constraint row shares an edge.
bool is_connected_wrt(const CommGraph& g, const Eigen::MatrixXd& A,
                      const std::optional<AgentAssignment>& agents = {});

/// The smallest graph connected with respect to A: one clique per
/// constraint row over the agents that row couples.
CommGraph minimal_connected_graph(
    const Eigen::MatrixXd& A, const std::optional<AgentAssignment>& agents = {});

/// Owner of the z_l dynamics: the minimum variable index with a nonzero
/// coefficient in row l. Throws ZeroRow.
int z_owner(const Eigen::MatrixXd& A, Eigen::Index row);

/// Owner agent of row l under an assignment.
int z_owner_agent(const Eigen::MatrixXd& A, Eigen::Index row,
                  const AgentAssignment& agents);

/// Checks (D1)-(D4): reports each agent's required knowledge, the z
/// variables it integrates, and whether the graph is connected w.r.t. A.
ValidationReport validate_distributed(
    const StandardFormLP& lp, const CommGraph& g,
    const std::optional<AgentAssignment>& agents = {});

/// Stale-information velocity: values across links in `failed` are read from
/// the cache, own and intact-link values from the current state. Identical
/// to projected_velocity(lp, s, 0) when `failed` is empty.
std::pair<Eigen::VectorXd, Eigen::VectorXd> rcg_velocity(
    const StandardFormLP& lp, const PrimalDualState& s,
    const StaleCache& cache, const EdgeSet& failed,
    const std::optional<AgentAssignment>& agents = {});

/// Euler integration under the failure schedule. The cache snaps at every
/// breakpoint, and every breakpoint state is recorded.
Trajectory rcg_integrate(const StandardFormLP& lp, const CommGraph& g,
                         const FailureSchedule& schedule,
                         const PrimalDualState& s0,
                         const IntegratorConfig& cfg,
                         const std::optional<AgentAssignment>& agents = {},
                         const std::optional<PrimalDualState>& star = {});

/// (t_2k, KKT residual) samples at the start of each degraded interval.
std::vector<std::pair<double, double>> degraded_start_residuals(
    const Trajectory& traj, const FailureSchedule& schedule);

}  // namespace saddleflow
