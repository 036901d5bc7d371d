#pragma once

#include <iosfwd>
#include <string>

#include "saddleflow/experiments.hpp"

namespace saddleflow {

// LP JSON: {"name": str, "A": [[row], ...], "b": [...], "c": [...]}.
// Non-rectangular A is rejected.
StandardFormLP lp_from_json(const std::string& text);
StandardFormLP load_lp(const std::string& path);
std::string lp_to_json(const StandardFormLP& lp);
void save_lp(const StandardFormLP& lp, const std::string& path);

// Optimal control JSON: {"name": str, "G": [[...]], "H_diag": [...],
// "x0": [...], "T": int}.
OptimalControlSpec optctrl_from_json(const std::string& text);
OptimalControlSpec load_optctrl(const std::string& path);

// Graph JSON: {"n": int, "edges": [[i, j], ...]} with 1-based agent ids.
CommGraph graph_from_json(const std::string& text);

// Schedule JSON: {"breakpoints": [...], "fail_all": bool} or
// {"breakpoints": [...], "failing": [[k, [[i, j], ...]], ...]} (1-based).
FailureSchedule schedule_from_json(const std::string& text,
                                   const CommGraph& base);

// Disturbance JSON: {"kind": str, "params": {...}, "seed": int}.
DisturbanceSignal disturbance_from_json(const std::string& text,
                                        Eigen::Index n, Eigen::Index m);

// Scenario JSON combines the pieces above with "lp" | "lp_file" | "optctrl",
// optional "x0"/"z0", "integrator", "out". Relative lp_file paths resolve
// against base_dir.
ScenarioConfig scenario_from_json(const std::string& text,
                                  const std::string& base_dir = "");
ScenarioConfig load_scenario(const std::string& path);

// CSV with header t,x_1..x_n,z_1..z_m,V,kkt; 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

// CSV with header tau,<prefix>_1..<prefix>_N; one row per time step.
void write_time_series_csv(const Eigen::MatrixXd& series,
                           const std::string& prefix,
                           const std::string& path);

std::string metrics_to_json(const RunMetrics& metrics);
void write_metrics_json(const RunMetrics& metrics, const std::string& path);

std::string iss_certificate_to_json(const IssCounterexample& cert,
                                    const StandardFormLP& lp);

}  // namespace saddleflow
