// saddleflow — solve and simulate standard form linear programs with the
// discontinuous saddle-point dynamics, with disturbance and link-failure
// experiments.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "saddleflow/errors.hpp"
#include "saddleflow/io.hpp"

namespace {

using namespace saddleflow;

constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInfeasible = 4;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Infeasible:
    case ErrorCode::Unbounded:
    case ErrorCode::BoundedFeasibleSet:
    case ErrorCode::UnboundedSolutionSet:
      return kExitInfeasible;
    case ErrorCode::NonFinite:
      return kExitNumerical;
    default:
      return kExitInvalidInput;
  }
}

void print_vector(const char* label, const Eigen::VectorXd& v) {
  std::printf("%s [", label);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::printf("%s%.10g", i ? ", " : "", v(i));
  }
  std::printf("]\n");
}

void print_metrics(const RunMetrics& m) {
  std::printf("terminal_kkt       %.6g\n", m.terminal_kkt);
  if (std::isfinite(m.terminal_value_gap)) {
    std::printf("terminal_value_gap %.6g\n", m.terminal_value_gap);
  } else {
    std::printf("terminal_value_gap n/a (oracle skipped)\n");
  }
  std::printf("time_to_tol        %.6g\n", m.time_to_tol);
  std::printf("steps              %ld\n", m.steps);
  if (m.perturbed_kkt) {
    std::printf("perturbed_kkt      %.6g\n", *m.perturbed_kkt);
  }
}

int run_solve(const std::string& lp_path, bool with_oracle, double dt,
              double t_max, double tol, const std::string& out_dir) {
  ScenarioConfig cfg;
  cfg.lp = load_lp(lp_path);
  cfg.integrator.dt = dt;
  cfg.integrator.t_max = t_max;
  cfg.integrator.stop_tol = tol;
  cfg.integrator.record_every = 10;
  cfg.output_dir = out_dir;

  const ScenarioResult result = run_scenario_full(cfg);
  std::printf("problem %s: n=%ld m=%ld\n", result.lp.name.c_str(),
              static_cast<long>(result.lp.A.cols()),
              static_cast<long>(result.lp.A.rows()));
  print_vector("x ", result.trajectory.terminal().x);
  print_vector("z ", result.trajectory.terminal().z);
  if (with_oracle && result.oracle) {
    std::printf("oracle value       %.10g\n", result.oracle->optimal_value);
    print_vector("oracle x*", result.oracle->x_star);
    print_vector("oracle z*", result.oracle->z_star);
    std::printf("optimal bases     ");
    for (const auto& basis : result.oracle->optimal_bases) {
      std::printf(" {");
      for (size_t k = 0; k < basis.size(); ++k) {
        std::printf("%s%d", k ? "," : "", basis[k] + 1);
      }
      std::printf("}");
    }
    std::printf("\n");
  }
  print_metrics(result.metrics);
  return kExitOk;
}

int run_from_scenario(const std::string& path, bool needs_schedule) {
  const ScenarioConfig cfg = load_scenario(path);
  if (needs_schedule && (!cfg.schedule || !cfg.graph)) {
    std::fprintf(stderr, "error: this subcommand needs a graph and a schedule\n");
    return kExitInvalidInput;
  }
  const ScenarioResult result = run_scenario_full(cfg);
  std::printf("scenario %s on %s\n", cfg.name.c_str(),
              result.lp.name.c_str());
  print_metrics(result.metrics);
  if (!cfg.output_dir.empty()) {
    std::printf("outputs in %s\n", cfg.output_dir.c_str());
  }
  return kExitOk;
}

int run_optctrl(const std::string& path, double dt, double t_max, double tol,
                const std::string& out_dir) {
  ScenarioConfig cfg;
  cfg.optctrl = load_optctrl(path);
  cfg.integrator.dt = dt;
  cfg.integrator.t_max = t_max;
  cfg.integrator.stop_tol = tol;
  cfg.integrator.record_every = 100;
  cfg.output_dir = out_dir;

  const ScenarioResult result = run_scenario_full(cfg);
  const OptimalControlSpec& spec = *cfg.optctrl;
  std::printf("%s: N=%d T=%d -> LP n=%ld m=%ld (%d control vars per agent)\n",
              result.lp.name.c_str(), spec.n_agents(), spec.T,
              static_cast<long>(result.lp.A.cols()),
              static_cast<long>(result.lp.A.rows()), 2 * (spec.T + 1));
  const double value = result.lp.c.dot(result.trajectory.terminal().x);
  std::printf("objective          %.10g\n", value);
  print_metrics(result.metrics);
  if (result.controls) {
    for (int a = 0; a < spec.n_agents(); ++a) {
      std::printf("u_%d(0..%d):", a + 1, spec.T);
      for (int tau = 0; tau <= spec.T; ++tau) {
        std::printf(" %.6g", (*result.controls)(a, tau));
      }
      std::printf("\n");
    }
  }
  if (!out_dir.empty()) std::printf("outputs in %s\n", out_dir.c_str());
  return kExitOk;
}

int run_noiss(const std::string& lp_path, const std::string& out_dir) {
  const StandardFormLP lp = load_lp(lp_path);
  const IssCounterexample cert = iss_counterexample(lp);
  const std::string text = iss_certificate_to_json(cert, lp);
  if (out_dir.empty()) {
    std::printf("%s", text.c_str());
  } else {
    std::filesystem::create_directories(out_dir);
    const std::string path =
        (std::filesystem::path(out_dir) / "noiss_certificate.json").string();
    std::ofstream(path) << text;
    std::printf("certificate written to %s\n", path.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "saddle-point dynamics for standard form linear programs:\n"
      "  min c'x  s.t.  Ax = b, x >= 0"};
  app.require_subcommand(1);

  std::string lp_path, scenario_path, out_dir;
  bool with_oracle = false;
  double dt = 0.01, t_max = 100.0, tol = 1e-6;

  CLI::App* solve = app.add_subcommand("solve", "integrate the dynamics on an LP");
  solve->add_option("lp", lp_path, "LP JSON file")->required();
  solve->add_flag("--oracle", with_oracle, "also solve by basis enumeration");
  solve->add_option("--dt", dt, "Euler step (s)");
  solve->add_option("--tmax", t_max, "simulated horizon (s)");
  solve->add_option("--tol", tol, "KKT residual stopping tolerance");
  solve->add_option("--out", out_dir, "output directory");

  CLI::App* simulate =
      app.add_subcommand("simulate", "run a scenario (disturbances, starts)");
  simulate->add_option("scenario", scenario_path, "scenario JSON file")
      ->required();

  CLI::App* rcg = app.add_subcommand(
      "rcg", "run a scenario under a link-failure schedule");
  rcg->add_option("scenario", scenario_path, "scenario JSON file")->required();

  CLI::App* optctrl = app.add_subcommand(
      "optctrl", "solve a finite-horizon optimal control problem as an LP");
  optctrl->add_option("spec", lp_path, "optimal control JSON file")
      ->required();
  optctrl->add_option("--dt", dt, "Euler step (s)");
  optctrl->add_option("--tmax", t_max, "simulated horizon (s)");
  optctrl->add_option("--tol", tol, "KKT residual stopping tolerance");
  optctrl->add_option("--out", out_dir, "output directory");

  CLI::App* noiss = app.add_subcommand(
      "noiss", "construct the constant disturbance that breaks ISS");
  noiss->add_option("lp", lp_path, "LP JSON file")->required();
  noiss->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      return run_solve(lp_path, with_oracle, dt, t_max, tol, out_dir);
    }
    if (simulate->parsed()) {
      return run_from_scenario(scenario_path, false);
    }
    if (rcg->parsed()) {
      return run_from_scenario(scenario_path, true);
    }
    if (optctrl->parsed()) {
      return run_optctrl(lp_path, dt, t_max, tol, out_dir);
    }
    if (noiss->parsed()) {
      return run_noiss(lp_path, out_dir);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", to_string(e.code()), e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
