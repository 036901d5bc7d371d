#include "saddleflow/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "flow_kernel.hpp"
#include "saddleflow/errors.hpp"

namespace saddleflow {
namespace {

constexpr double kTimeTol = 1e-9;

std::pair<int, int> normalized(int i, int j) {
  return i < j ? std::make_pair(i, j) : std::make_pair(j, i);
}

AgentAssignment resolve(const std::optional<AgentAssignment>& agents,
                        Eigen::Index n) {
  if (!agents) return AgentAssignment::identity(n);
  if (static_cast<Eigen::Index>(agents->agent_of_var.size()) != n) {
    throw Error(ErrorCode::InvalidInput,
                "agent assignment does not cover every variable");
  }
  return *agents;
}

std::vector<int> row_owner_agents(const Eigen::MatrixXd& A,
                                  const AgentAssignment& agents) {
  std::vector<int> owners(static_cast<size_t>(A.rows()));
  for (Eigen::Index l = 0; l < A.rows(); ++l) {
    owners[static_cast<size_t>(l)] = z_owner_agent(A, l, agents);
  }
  return owners;
}

}  // namespace

void CommGraph::add_edge(int i, int j) {
  if (i == j) {
    throw Error(ErrorCode::InvalidInput, "self-loops are not allowed");
  }
  if (i < 0 || j < 0 || i >= n_agents || j >= n_agents) {
    throw Error(ErrorCode::InvalidInput, "edge endpoint out of range");
  }
  edges.insert(normalized(i, j));
}

bool CommGraph::has_edge(int i, int j) const {
  if (i == j) return false;
  return edges.count(normalized(i, j)) != 0;
}

CommGraph CommGraph::complete(int n) {
  CommGraph g;
  g.n_agents = n;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) g.edges.insert({i, j});
  }
  return g;
}

AgentAssignment AgentAssignment::identity(Eigen::Index n) {
  AgentAssignment a;
  a.n_agents = static_cast<int>(n);
  a.agent_of_var.resize(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    a.agent_of_var[static_cast<size_t>(i)] = static_cast<int>(i);
  }
  return a;
}

AgentAssignment AgentAssignment::contiguous_blocks(int n_agents,
                                                   int vars_per_agent) {
  AgentAssignment a;
  a.n_agents = n_agents;
  a.agent_of_var.reserve(static_cast<size_t>(n_agents) * vars_per_agent);
  for (int agent = 0; agent < n_agents; ++agent) {
    for (int k = 0; k < vars_per_agent; ++k) a.agent_of_var.push_back(agent);
  }
  return a;
}

FailureSchedule FailureSchedule::alternating(CommGraph base,
                                             double t_disconnected,
                                             double t_connected, int cycles,
                                             bool fail_all) {
  if (!(t_disconnected > 0.0) || !(t_connected > 0.0) || cycles < 1) {
    throw Error(ErrorCode::InvalidInput, "invalid alternating schedule");
  }
  FailureSchedule s;
  s.base_graph = std::move(base);
  double t = 0.0;
  for (int k = 0; k < cycles; ++k) {
    s.breakpoints.push_back(t);
    s.failing.push_back(fail_all ? s.base_graph.edges : EdgeSet{});
    t += t_disconnected;
    s.breakpoints.push_back(t);
    s.failing.push_back({});
    t += t_connected;
  }
  return s;
}

int FailureSchedule::interval_at(double t) const {
  int k = -1;
  for (size_t i = 0; i < breakpoints.size(); ++i) {
    if (breakpoints[i] <= t + kTimeTol) k = static_cast<int>(i);
  }
  return k;
}

const EdgeSet& FailureSchedule::failing_at(double t) const {
  static const EdgeSet kEmpty;
  const int k = interval_at(t);
  if (k < 0 || static_cast<size_t>(k) >= failing.size()) return kEmpty;
  return failing[static_cast<size_t>(k)];
}

void FailureSchedule::validate() const {
  if (breakpoints.size() != failing.size()) {
    throw Error(ErrorCode::InvalidInput,
                "schedule needs one failing set per interval");
  }
  for (size_t i = 1; i < breakpoints.size(); ++i) {
    if (breakpoints[i] <= breakpoints[i - 1]) {
      throw Error(ErrorCode::InvalidInput,
                  "breakpoints must be strictly increasing");
    }
  }
  for (size_t k = 0; k < failing.size(); ++k) {
    if (k % 2 == 1 && !failing[k].empty()) {
      throw Error(ErrorCode::InvalidInput,
                  "odd intervals are connected; failing set must be empty");
    }
    for (const auto& e : failing[k]) {
      if (!base_graph.has_edge(e.first, e.second)) {
        throw Error(ErrorCode::InvalidInput,
                    "failing edge is not part of the base graph");
      }
    }
  }
  // The last interval extends to infinity, so it must be a connected one;
  // otherwise the maximum disconnected duration is unbounded.
  if (!failing.empty() && failing.size() % 2 == 1 &&
      !failing.back().empty()) {
    throw Error(ErrorCode::InvalidInput,
                "the final interval fails links forever; end the schedule "
                "on a connected interval");
  }
}

bool is_connected_wrt(const CommGraph& g, const Eigen::MatrixXd& A,
                      const std::optional<AgentAssignment>& agents) {
  const AgentAssignment a = resolve(agents, A.cols());
  if (g.n_agents != a.n_agents) {
    throw Error(ErrorCode::InvalidInput,
                "graph covers " + std::to_string(g.n_agents) +
                    " agents but the problem has " +
                    std::to_string(a.n_agents));
  }
  for (Eigen::Index l = 0; l < A.rows(); ++l) {
    std::vector<int> coupled;
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (A(l, j) != 0.0) {
        const int agent = a.agent_of_var[static_cast<size_t>(j)];
        if (std::find(coupled.begin(), coupled.end(), agent) ==
            coupled.end()) {
          coupled.push_back(agent);
        }
      }
    }
    for (size_t p = 0; p < coupled.size(); ++p) {
      for (size_t q = p + 1; q < coupled.size(); ++q) {
        if (!g.has_edge(coupled[p], coupled[q])) return false;
      }
    }
  }
  return true;
}

CommGraph minimal_connected_graph(
    const Eigen::MatrixXd& A, const std::optional<AgentAssignment>& agents) {
  const AgentAssignment a = resolve(agents, A.cols());
  CommGraph g;
  g.n_agents = a.n_agents;
  for (Eigen::Index l = 0; l < A.rows(); ++l) {
    std::vector<int> coupled;
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (A(l, j) != 0.0) {
        const int agent = a.agent_of_var[static_cast<size_t>(j)];
        if (std::find(coupled.begin(), coupled.end(), agent) ==
            coupled.end()) {
          coupled.push_back(agent);
        }
      }
    }
    for (size_t p = 0; p < coupled.size(); ++p) {
      for (size_t q = p + 1; q < coupled.size(); ++q) {
        g.add_edge(coupled[p], coupled[q]);
      }
    }
  }
  return g;
}

int z_owner(const Eigen::MatrixXd& A, Eigen::Index row) {
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    if (A(row, j) != 0.0) return static_cast<int>(j);
  }
  throw Error(ErrorCode::ZeroRow,
              "row " + std::to_string(row + 1) + " has no nonzero entry");
}

int z_owner_agent(const Eigen::MatrixXd& A, Eigen::Index row,
                  const AgentAssignment& agents) {
  return agents.agent_of_var[static_cast<size_t>(z_owner(A, row))];
}

ValidationReport validate_distributed(
    const StandardFormLP& lp, const CommGraph& g,
    const std::optional<AgentAssignment>& agents) {
  ValidationReport report = validate_lp(lp);
  if (!report.ok) return report;

  const Eigen::Index n = lp.A.cols(), m = lp.A.rows();
  AgentAssignment assignment;
  try {
    assignment = resolve(agents, n);
  } catch (const Error& e) {
    report.error(e.what());
    return report;
  }
  if (g.n_agents != assignment.n_agents) {
    report.error("graph has " + std::to_string(g.n_agents) +
                 " agents but the assignment expects " +
                 std::to_string(assignment.n_agents));
    return report;
  }

  if (!is_connected_wrt(g, lp.A, assignment)) {
    report.error(
        "violates (D3): the graph is not connected with respect to A");
  }

  // (D1): per-agent knowledge set; (D2) is structural under the assignment.
  std::vector<std::vector<int>> rows_of_agent(
      static_cast<size_t>(assignment.n_agents));
  for (Eigen::Index l = 0; l < m; ++l) {
    std::vector<bool> seen(static_cast<size_t>(assignment.n_agents), false);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (lp.A(l, j) != 0.0) {
        const int agent = assignment.agent_of_var[static_cast<size_t>(j)];
        if (!seen[static_cast<size_t>(agent)]) {
          seen[static_cast<size_t>(agent)] = true;
          rows_of_agent[static_cast<size_t>(agent)].push_back(
              static_cast<int>(l));
        }
      }
    }
  }
  for (int agent = 0; agent < assignment.n_agents; ++agent) {
    std::string rows = "{";
    for (size_t k = 0; k < rows_of_agent[static_cast<size_t>(agent)].size();
         ++k) {
      rows += (k ? "," : "") +
              std::to_string(rows_of_agent[static_cast<size_t>(agent)][k] + 1);
    }
    rows += "}";
    report.info("(D1) agent " + std::to_string(agent + 1) +
                " needs its cost entries, b and the nonzero row entries for "
                "rows " +
                rows + " and tracks the matching z variables");
  }
  for (Eigen::Index l = 0; l < m; ++l) {
    report.info("agent " +
                std::to_string(z_owner_agent(lp.A, l, assignment) + 1) +
                " owns z_" + std::to_string(l + 1));
  }
  report.info(
      "(D2)/(D4): each agent controls its own variables and reads "
      "neighbors' values over the graph");
  return report;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> rcg_velocity(
    const StandardFormLP& lp, const PrimalDualState& s,
    const StaleCache& cache, const EdgeSet& failed,
    const std::optional<AgentAssignment>& agents) {
  if ((s.x.array() < -1e-12).any()) {
    throw Error(ErrorCode::NegativePrimal,
                "primal state has a component below -1e-12");
  }
  const AgentAssignment assignment = resolve(agents, lp.A.cols());
  const std::vector<int> owners = row_owner_agents(lp.A, assignment);
  const detail::Pattern pat = detail::Pattern::build(lp.A);

  detail::StaleView view{&cache.x_snapshot, &cache.z_snapshot,
                         &assignment.agent_of_var, &owners, &failed};
  Eigen::VectorXd xdot, zdot;
  detail::eval_raw_flow(lp, pat, s.x, s.z, nullptr,
                        failed.empty() ? nullptr : &view, xdot, zdot);
  for (Eigen::Index i = 0; i < s.x.size(); ++i) {
    if (s.x(i) <= 0.0) xdot(i) = std::max(0.0, xdot(i));
  }
  return {std::move(xdot), std::move(zdot)};
}

Trajectory rcg_integrate(const StandardFormLP& lp, const CommGraph& g,
                         const FailureSchedule& schedule,
                         const PrimalDualState& s0,
                         const IntegratorConfig& cfg,
                         const std::optional<AgentAssignment>& agents,
                         const std::optional<PrimalDualState>& star) {
  if (!(cfg.dt > 0.0) || cfg.dt > 0.1 || cfg.stop_tol < 0.0 ||
      !(cfg.t_max > 0.0) || cfg.record_every < 1) {
    throw Error(ErrorCode::InvalidInput, "invalid integrator configuration");
  }
  if ((s0.x.array() < -1e-12).any()) {
    throw Error(ErrorCode::NegativePrimal, "x0 must be nonnegative");
  }
  schedule.validate();
  const AgentAssignment assignment = resolve(agents, lp.A.cols());
  if (!is_connected_wrt(g, lp.A, assignment)) {
    throw Error(ErrorCode::InvalidInput,
                "base graph is not connected with respect to A");
  }
  const std::vector<int> owners = row_owner_agents(lp.A, assignment);
  const detail::Pattern pat = detail::Pattern::build(lp.A);
  const auto k_max = static_cast<long>(std::ceil(cfg.t_max / cfg.dt - 1e-9));

  Trajectory traj;
  PrimalDualState s{s0.x.cwiseMax(0.0), s0.z};
  StaleCache cache = StaleCache::of(s, 0.0);
  int current_interval = schedule.interval_at(0.0);

  auto record = [&](double t, double residual) {
    if (!traj.times.empty() && traj.times.back() >= t) return;
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.lyapunov.push_back(
        star ? lyapunov_value(s, *star)
             : std::numeric_limits<double>::quiet_NaN());
    traj.residuals.push_back(residual);
    traj.disturbance_log.push_back(
        PerturbationVector::zero(lp.A.cols(), lp.A.rows()));
  };

  long k = 0;
  double t = 0.0;
  double residual = kkt_residual(lp, s);
  if (residual <= cfg.stop_tol) traj.time_to_tol = 0.0;
  record(t, residual);

  Eigen::VectorXd xdot, zdot;
  while (residual > cfg.stop_tol && k < k_max) {
    const EdgeSet& failed = schedule.failing_at(t);
    detail::StaleView view{&cache.x_snapshot, &cache.z_snapshot,
                           &assignment.agent_of_var, &owners, &failed};
    detail::eval_raw_flow(lp, pat, s.x, s.z, nullptr,
                          failed.empty() ? nullptr : &view, xdot, zdot);
    s.x = (s.x + cfg.dt * xdot).cwiseMax(0.0);
    s.z += cfg.dt * zdot;
    ++k;
    t = static_cast<double>(k) * cfg.dt;
    if (!s.x.allFinite() || !s.z.allFinite()) {
      throw Error(ErrorCode::NonFinite,
                  "state left the finite range at t = " + std::to_string(t) +
                      "; reduce dt");
    }
    residual = kkt_residual(lp, s);
    if (residual <= cfg.stop_tol && traj.time_to_tol < 0.0) {
      traj.time_to_tol = t;
    }
    const int interval = schedule.interval_at(t);
    const bool at_breakpoint = interval != current_interval;
    if (at_breakpoint) {
      cache = StaleCache::of(s, t);
      current_interval = interval;
    }
    if (k % cfg.record_every == 0 || at_breakpoint ||
        residual <= cfg.stop_tol || k == k_max) {
      record(t, residual);
    }
  }
  record(t, residual);
  traj.steps = k;
  return traj;
}

std::vector<std::pair<double, double>> degraded_start_residuals(
    const Trajectory& traj, const FailureSchedule& schedule) {
  std::vector<std::pair<double, double>> out;
  for (size_t k = 0; k < schedule.breakpoints.size(); k += 2) {
    const double t = schedule.breakpoints[k];
    if (traj.times.empty() || t > traj.times.back() + kTimeTol) break;
    size_t best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < traj.times.size(); ++i) {
      const double gap = std::abs(traj.times[i] - t);
      if (gap < best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    out.emplace_back(t, traj.residuals[best]);
  }
  return out;
}

}  // namespace saddleflow
