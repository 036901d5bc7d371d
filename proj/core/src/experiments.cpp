#include "saddleflow/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "saddleflow/errors.hpp"
#include "saddleflow/io.hpp"

namespace saddleflow {
namespace {

void check_spec(const OptimalControlSpec& spec) {
  const Eigen::Index N = spec.G.rows();
  if (spec.G.cols() != N || spec.H_diag.size() != N || spec.x0.size() != N ||
      spec.T < 0) {
    throw Error(ErrorCode::InvalidInput,
                "inconsistent optimal control dimensions");
  }
}

}  // namespace

Eigen::Index optctrl_var_index(const OptimalControlSpec& spec, int agent,
                               int tau, OptCtrlBlock block) {
  const Eigen::Index per_agent = 4 * (spec.T + 1);
  return agent * per_agent + 4 * tau + block;
}

StandardFormLP build_optimal_control_lp(const OptimalControlSpec& spec) {
  check_spec(spec);
  const int N = spec.n_agents();
  const int T = spec.T;
  const Eigen::Index n = 4LL * N * (T + 1);
  const Eigen::Index m = static_cast<Eigen::Index>(N) * (T + 1);

  StandardFormLP lp;
  lp.name = spec.name.empty() ? "optctrl" : spec.name;
  lp.A = Eigen::MatrixXd::Zero(m, n);
  lp.b = Eigen::VectorXd::Zero(m);
  lp.c = Eigen::VectorXd::Ones(n);

  for (int tau = 0; tau <= T; ++tau) {
    for (int r = 0; r < N; ++r) {
      const Eigen::Index row = static_cast<Eigen::Index>(tau) * N + r;
      lp.A(row, optctrl_var_index(spec, r, tau, kXPlus)) = 1.0;
      lp.A(row, optctrl_var_index(spec, r, tau, kXMinus)) = -1.0;
      lp.A(row, optctrl_var_index(spec, r, tau, kUPlus)) = -spec.H_diag(r);
      lp.A(row, optctrl_var_index(spec, r, tau, kUMinus)) = spec.H_diag(r);
      if (tau == 0) {
        lp.b(row) = spec.G.row(r).dot(spec.x0);
      } else {
        for (int rp = 0; rp < N; ++rp) {
          if (spec.G(r, rp) == 0.0) continue;
          lp.A(row, optctrl_var_index(spec, rp, tau - 1, kXPlus)) -=
              spec.G(r, rp);
          lp.A(row, optctrl_var_index(spec, rp, tau - 1, kXMinus)) +=
              spec.G(r, rp);
        }
      }
    }
  }
  return lp;
}

Eigen::MatrixXd extract_controls(const Eigen::VectorXd& x_solution,
                                 const OptimalControlSpec& spec) {
  check_spec(spec);
  const int N = spec.n_agents();
  if (x_solution.size() != 4LL * N * (spec.T + 1)) {
    throw Error(ErrorCode::InvalidInput,
                "solution vector does not match the variable layout");
  }
  Eigen::MatrixXd u(N, spec.T + 1);
  for (int a = 0; a < N; ++a) {
    for (int tau = 0; tau <= spec.T; ++tau) {
      u(a, tau) = x_solution(optctrl_var_index(spec, a, tau, kUPlus)) -
                  x_solution(optctrl_var_index(spec, a, tau, kUMinus));
    }
  }
  return u;
}

Eigen::MatrixXd rollout(const OptimalControlSpec& spec,
                        const Eigen::MatrixXd& controls) {
  check_spec(spec);
  if (controls.rows() != spec.n_agents() || controls.cols() != spec.T + 1) {
    throw Error(ErrorCode::InvalidInput,
                "control sequence must be N x (T+1)");
  }
  Eigen::MatrixXd states(spec.n_agents(), spec.T + 1);
  Eigen::VectorXd x = spec.x0;
  for (int tau = 0; tau <= spec.T; ++tau) {
    x = spec.G * x + spec.H_diag.asDiagonal() * controls.col(tau);
    states.col(tau) = x;
  }
  return states;
}

AgentAssignment optctrl_agent_assignment(const OptimalControlSpec& spec) {
  return AgentAssignment::contiguous_blocks(spec.n_agents(),
                                            4 * (spec.T + 1));
}

CommGraph optctrl_comm_graph(const OptimalControlSpec& spec) {
  // One clique per dynamics row: agent r talks to every agent feeding its
  // state, and those agents to each other (they share r's constraint rows).
  return minimal_connected_graph(build_optimal_control_lp(spec).A,
                                 optctrl_agent_assignment(spec));
}

IssCounterexample iss_counterexample(const StandardFormLP& lp) {
  const std::optional<Eigen::VectorXd> nu = primal_recession_direction(lp);
  if (!nu) {
    throw Error(ErrorCode::BoundedFeasibleSet,
                "feasible set has no recession direction; the dual-side "
                "construction is not implemented");
  }
  const Eigen::Index n = lp.A.cols();

  // eta must support the feasible set along a face containing the ray:
  // eta'nu = 0 and eta'd >= 0 for every recession direction d. First choice:
  // the cost with its nu-component removed, scaled to unit max norm.
  auto supports_recession = [&](const Eigen::VectorXd& eta) {
    StandardFormLP probe = lp;
    probe.c = eta;
    const auto worst = primal_recession_direction(probe);
    if (!worst) return true;
    return eta.dot(*worst) >= -1e-9;
  };

  Eigen::VectorXd eta = lp.c - (lp.c.dot(*nu)) * (*nu);
  const double scale = eta.lpNorm<Eigen::Infinity>();
  bool usable = scale > 1e-9;
  if (usable) {
    eta /= scale;
    usable = supports_recession(eta);
  }
  if (!usable) {
    // Fall back to the indicator of the coordinates the ray leaves at zero.
    eta = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((*nu)(i) <= 1e-9) eta(i) = 1.0;
    }
  }

  IssCounterexample out;
  out.ray_direction = *nu;
  out.perturbed_cost = eta;
  out.wbar.w_x = lp.c - eta;
  out.wbar.w_z = Eigen::VectorXd::Zero(lp.A.rows());

  StandardFormLP perturbed = perturbed_program(lp, out.wbar);
  const OracleSolution sol = solve_primal_dual(perturbed);
  out.ray_point = sol.x_star;
  out.perturbed_dual = sol.z_star;
  return out;
}

ScenarioResult run_scenario_full(const ScenarioConfig& cfg) {
  if (cfg.lp.has_value() == cfg.optctrl.has_value()) {
    throw Error(ErrorCode::InvalidInput,
                "scenario needs exactly one of an LP or an optimal control "
                "spec");
  }
  if (cfg.schedule && !cfg.graph) {
    throw Error(ErrorCode::InvalidInput, "a failure schedule requires a graph");
  }

  ScenarioResult result;
  std::optional<AgentAssignment> assignment;
  if (cfg.optctrl) {
    result.lp = build_optimal_control_lp(*cfg.optctrl);
    assignment = optctrl_agent_assignment(*cfg.optctrl);
  } else {
    result.lp = *cfg.lp;
  }
  const StandardFormLP& lp = result.lp;
  {
    const ValidationReport report = validate_lp(lp);
    if (!report.ok) {
      std::string what = "invalid LP";
      for (const auto& d : report.messages) {
        if (d.severity == Diagnostic::Severity::Error) what += "; " + d.text;
      }
      throw Error(ErrorCode::InvalidInput, what);
    }
  }
  const Eigen::Index n = lp.A.cols(), m = lp.A.rows();

  if (cfg.graph) {
    const ValidationReport report =
        validate_distributed(lp, *cfg.graph, assignment);
    if (!report.ok) {
      throw Error(ErrorCode::InvalidInput,
                  "problem is not distributed over the given graph");
    }
  }

  if (cfg.use_oracle) {
    try {
      result.oracle = solve_primal_dual(lp);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BudgetExceeded) throw;
    }
  }

  PrimalDualState s0;
  s0.x = cfg.x0 ? *cfg.x0 : Eigen::VectorXd::Zero(n);
  s0.z = cfg.z0 ? *cfg.z0 : Eigen::VectorXd::Zero(m);
  if (s0.x.size() != n || s0.z.size() != m) {
    throw Error(ErrorCode::InvalidInput, "initial state has wrong dimensions");
  }

  const DisturbanceSignal dist =
      cfg.disturbance ? *cfg.disturbance : DisturbanceSignal::zero(n, m);
  if (dist.n != n || dist.m != m) {
    throw Error(ErrorCode::InvalidInput, "disturbance has wrong dimensions");
  }

  std::optional<PrimalDualState> star;
  if (result.oracle) {
    star = PrimalDualState{result.oracle->x_star, result.oracle->z_star};
  }

  if (cfg.schedule) {
    if (dist.kind != DisturbanceKind::Zero) {
      throw Error(ErrorCode::InvalidInput,
                  "link-failure runs take no disturbance");
    }
    result.trajectory = rcg_integrate(lp, *cfg.graph, *cfg.schedule, s0,
                                      cfg.integrator, assignment, star);
  } else {
    result.trajectory = integrate(lp, s0, cfg.integrator, dist, star);
  }

  const Trajectory& traj = result.trajectory;
  RunMetrics& metrics = result.metrics;
  metrics.terminal_kkt = traj.residuals.back();
  metrics.time_to_tol = traj.time_to_tol;
  metrics.steps = traj.steps;
  if (result.oracle) {
    metrics.terminal_value_gap =
        std::abs(lp.c.dot(traj.terminal().x) - result.oracle->optimal_value);
  }
  const PerturbationVector settle = dist.settle_point();
  if (settle.w_x.lpNorm<Eigen::Infinity>() > 0.0 ||
      settle.w_z.lpNorm<Eigen::Infinity>() > 0.0) {
    metrics.perturbed_kkt =
        kkt_residual(perturbed_program(lp, settle), traj.terminal());
  }

  if (cfg.optctrl) {
    result.controls = extract_controls(traj.terminal().x, *cfg.optctrl);
    result.states = rollout(*cfg.optctrl, *result.controls);
  }

  if (!cfg.output_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    write_trajectory_csv(traj, (fs::path(cfg.output_dir) / "trajectory.csv").string());
    write_metrics_json(metrics, (fs::path(cfg.output_dir) / "metrics.json").string());
    if (result.controls) {
      write_time_series_csv(*result.controls, "u",
                            (fs::path(cfg.output_dir) / "controls.csv").string());
      write_time_series_csv(*result.states, "x",
                            (fs::path(cfg.output_dir) / "states.csv").string());
    }
  }
  return result;
}

RunMetrics run_scenario(const ScenarioConfig& cfg) {
  return run_scenario_full(cfg).metrics;
}

}  // namespace saddleflow
