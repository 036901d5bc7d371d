#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "saddleflow/errors.hpp"
#include "saddleflow/experiments.hpp"
#include "test_util.hpp"

using namespace saddleflow;
using namespace saddleflow::testing;

namespace {

OptimalControlSpec scalar_spec() {
  OptimalControlSpec spec;
  spec.name = "scalar";
  spec.G = Eigen::MatrixXd::Constant(1, 1, 2.0);
  spec.H_diag = Eigen::VectorXd::Constant(1, 2.0);
  spec.x0 = Eigen::VectorXd::Ones(1);
  spec.T = 0;
  return spec;
}

OptimalControlSpec random_spec(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> n_dist(1, 2);
  const int N = n_dist(rng);
  const int T = std::uniform_int_distribution<int>(0, 2)(rng);
  std::uniform_real_distribution<double> entry(-1.5, 1.5);
  std::uniform_real_distribution<double> gain(0.5, 2.0);

  OptimalControlSpec spec;
  spec.name = "rand-ocp-" + std::to_string(seed);
  spec.G.resize(N, N);
  for (int r = 0; r < N; ++r) {
    for (int c = 0; c < N; ++c) spec.G(r, c) = entry(rng);
  }
  spec.H_diag.resize(N);
  for (int r = 0; r < N; ++r) spec.H_diag(r) = gain(rng);
  spec.x0.resize(N);
  for (int r = 0; r < N; ++r) spec.x0(r) = entry(rng);
  spec.T = T;
  return spec;
}

}  // namespace

TEST_CASE("scalar one-step problem transcribes and solves exactly") {
  const OptimalControlSpec spec = scalar_spec();
  const StandardFormLP lp = build_optimal_control_lp(spec);
  REQUIRE(lp.A.rows() == 1);
  REQUIRE(lp.A.cols() == 4);
  // x+ - x- - 2u+ + 2u- = 2
  CHECK(lp.A(0, 0) == 1.0);
  CHECK(lp.A(0, 1) == -1.0);
  CHECK(lp.A(0, 2) == -2.0);
  CHECK(lp.A(0, 3) == 2.0);
  CHECK(lp.b(0) == 2.0);
  CHECK(lp.c == Eigen::VectorXd::Ones(4));

  const OracleSolution sol = solve_primal_dual(lp);
  CHECK(sol.optimal_value == doctest::Approx(1.0).epsilon(1e-12));
  const Eigen::MatrixXd u = extract_controls(sol.x_star, spec);
  CHECK(u(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
  const Eigen::MatrixXd x = rollout(spec, u);
  CHECK(x(0, 0) == 0.0);  // 2*1 + 2*(-1), exact
}

TEST_CASE("zero transition matrix needs no control") {
  OptimalControlSpec spec = scalar_spec();
  spec.G.setZero();
  spec.x0 << 3.7;
  const StandardFormLP lp = build_optimal_control_lp(spec);
  const OracleSolution sol = solve_primal_dual(lp);
  CHECK(sol.optimal_value == 0.0);
  CHECK(sol.x_star.isZero(0.0));
}

TEST_CASE("dimension bookkeeping for five agents over twelve steps") {
  OptimalControlSpec spec;
  spec.G = Eigen::MatrixXd::Identity(5, 5);
  spec.H_diag = Eigen::VectorXd::Ones(5);
  spec.x0 = Eigen::VectorXd::Ones(5);
  spec.T = 11;
  const StandardFormLP lp = build_optimal_control_lp(spec);
  CHECK(lp.A.cols() == 240);  // 4 N (T+1)
  CHECK(lp.A.rows() == 60);   // N (T+1)

  const AgentAssignment assignment = optctrl_agent_assignment(spec);
  CHECK(assignment.n_agents == 5);
  // Each agent owns a contiguous block of 4(T+1) = 48 columns, 2(T+1) = 24
  // of which are its control variables.
  for (int a = 0; a < 5; ++a) {
    int controls = 0;
    for (int tau = 0; tau <= spec.T; ++tau) {
      const auto up = optctrl_var_index(spec, a, tau, kUPlus);
      const auto um = optctrl_var_index(spec, a, tau, kUMinus);
      CHECK(assignment.agent_of_var[static_cast<size_t>(up)] == a);
      CHECK(assignment.agent_of_var[static_cast<size_t>(um)] == a);
      controls += 2;
    }
    CHECK(controls == 24);
  }
}

TEST_CASE("control extraction matches the block layout") {
  const OptimalControlSpec spec = scalar_spec();
  Eigen::VectorXd sol = Eigen::VectorXd::Zero(4);
  CHECK(extract_controls(sol, spec)(0, 0) == 0.0);
  sol(2) = 0.75;  // u+
  sol(3) = 0.75;  // u- cancels it
  CHECK(extract_controls(sol, spec)(0, 0) == 0.0);
}

TEST_CASE("rollout without controls iterates G") {
  OptimalControlSpec spec = scalar_spec();
  spec.T = 3;
  const Eigen::MatrixXd zero_u = Eigen::MatrixXd::Zero(1, 4);
  const Eigen::MatrixXd x = rollout(spec, zero_u);
  CHECK(x(0, 0) == 2.0);
  CHECK(x(0, 1) == 4.0);
  CHECK(x(0, 2) == 8.0);
  CHECK(x(0, 3) == 16.0);

  spec.x0.setZero();
  CHECK(rollout(spec, zero_u).isZero(0.0));
}

TEST_CASE("oracle solutions of the reformulation round trip the cost") {
  std::uint64_t seed = 5000;
  int done = 0;
  while (done < 6) {
    const OptimalControlSpec spec = random_spec(seed++);
    const StandardFormLP lp = build_optimal_control_lp(spec);
    OracleSolution sol;
    try {
      sol = solve_primal_dual(lp);
    } catch (const Error&) {
      continue;  // enumeration budget or marginal draw
    }
    const Eigen::MatrixXd u = extract_controls(sol.x_star, spec);
    const Eigen::MatrixXd x = rollout(spec, u);
    const double replay =
        x.cwiseAbs().sum() + u.cwiseAbs().sum();
    CHECK(std::abs(replay - sol.optimal_value) <= 1e-8);
    ++done;
  }
}

TEST_CASE("comm graph mirrors the coupling pattern of G") {
  OptimalControlSpec spec;
  spec.G.resize(3, 3);
  spec.G << 1.0, 0.5, 0.0,
            0.0, 1.0, 0.0,
            0.3, 0.0, 1.0;
  spec.H_diag = Eigen::VectorXd::Ones(3);
  spec.x0 = Eigen::VectorXd::Ones(3);
  spec.T = 1;
  const CommGraph g = optctrl_comm_graph(spec);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(0, 2));
  CHECK_FALSE(g.has_edge(1, 2));

  const StandardFormLP lp = build_optimal_control_lp(spec);
  const ValidationReport report =
      validate_distributed(lp, g, optctrl_agent_assignment(spec));
  CHECK(report.ok);
}

TEST_CASE("iss counterexample on the canonical ray instance") {
  const IssCounterexample cert = iss_counterexample(make_ray_lp());
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(cert.ray_direction(0) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
  CHECK(cert.ray_direction(1) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
  CHECK(cert.ray_point.isZero(1e-12));
  CHECK(cert.perturbed_cost(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cert.perturbed_cost(1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(cert.wbar.w_x(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(cert.wbar.w_x(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cert.wbar.w_z.isZero(0.0));

  const StandardFormLP pert = perturbed_program(make_ray_lp(), cert.wbar);
  for (double lambda : {0.0, 1.0, 10.0, 100.0}) {
    PrimalDualState s{cert.ray_point + lambda * cert.ray_direction,
                      cert.perturbed_dual};
    CHECK(kkt_residual(pert, s) <= 1e-9);
  }
}

TEST_CASE("iss counterexample asserts w_z = 0 on other unbounded instances") {
  StandardFormLP lp = make_ray_lp();
  lp.c << 2.0, 1.0;
  const IssCounterexample cert = iss_counterexample(lp);
  CHECK(cert.wbar.w_z.isZero(0.0));
  CHECK(std::abs(cert.perturbed_cost.dot(cert.ray_direction)) <= 1e-12);
  const StandardFormLP pert = perturbed_program(lp, cert.wbar);
  for (double lambda : {0.0, 1.0, 10.0, 100.0}) {
    PrimalDualState s{cert.ray_point + lambda * cert.ray_direction,
                      cert.perturbed_dual};
    CHECK(kkt_residual(pert, s) <= 1e-9);
  }
}

TEST_CASE("iss counterexample rejects bounded feasible sets") {
  try {
    iss_counterexample(make_lp1());
    FAIL("expected BoundedFeasibleSet");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BoundedFeasibleSet);
  }
}

TEST_CASE("run_scenario on the default lp1 setup") {
  ScenarioConfig cfg;
  cfg.lp = make_lp1();
  cfg.integrator.dt = 0.01;
  cfg.integrator.t_max = 60.0;
  cfg.integrator.stop_tol = 1e-3;
  cfg.integrator.record_every = 10;
  const RunMetrics metrics = run_scenario(cfg);
  CHECK(metrics.terminal_kkt <= 1e-3);
  CHECK(metrics.terminal_value_gap <= 1e-2);
  CHECK(metrics.time_to_tol > 0.0);
  CHECK_FALSE(metrics.perturbed_kkt.has_value());
}

TEST_CASE("run_scenario reports the perturbed residual under constant noise") {
  ScenarioConfig cfg;
  cfg.lp = make_lp1();
  Eigen::VectorXd wx(2);
  wx << 0.1, -0.05;
  Eigen::VectorXd wz(1);
  wz << 0.1;
  cfg.disturbance = DisturbanceSignal::constant(wx, wz);
  cfg.integrator.dt = 0.01;
  cfg.integrator.t_max = 80.0;
  cfg.integrator.stop_tol = 0.0;
  cfg.integrator.record_every = 100;
  const RunMetrics metrics = run_scenario(cfg);
  REQUIRE(metrics.perturbed_kkt.has_value());
  CHECK(*metrics.perturbed_kkt <= 1e-3);
}

TEST_CASE("run_scenario from the optimum is free") {
  const StandardFormLP lp = make_lp1();
  const OracleSolution sol = solve_primal_dual(lp);
  ScenarioConfig cfg;
  cfg.lp = lp;
  cfg.x0 = sol.x_star;
  cfg.z0 = sol.z_star;
  cfg.integrator.stop_tol = 0.0;
  const RunMetrics metrics = run_scenario(cfg);
  CHECK(metrics.steps == 0);
  CHECK(metrics.time_to_tol == 0.0);
}

TEST_CASE("run_scenario_full writes the output files") {
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / "saddleflow_scenario_out_test";
  fs::remove_all(dir);

  ScenarioConfig cfg;
  cfg.optctrl = scalar_spec();
  cfg.integrator.dt = 0.01;
  cfg.integrator.t_max = 30.0;
  cfg.integrator.stop_tol = 1e-5;
  cfg.integrator.record_every = 10;
  cfg.output_dir = dir.string();
  const ScenarioResult result = run_scenario_full(cfg);

  CHECK(fs::exists(dir / "trajectory.csv"));
  CHECK(fs::exists(dir / "metrics.json"));
  CHECK(fs::exists(dir / "controls.csv"));
  CHECK(fs::exists(dir / "states.csv"));
  REQUIRE(result.controls.has_value());
  CHECK(std::abs((*result.controls)(0, 0) + 1.0) <= 1e-2);

  std::ifstream csv(dir / "trajectory.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,x_1,x_2,x_3,x_4,z_1,V,kkt");
  fs::remove_all(dir);
}

TEST_CASE("scenario validation") {
  ScenarioConfig cfg;  // no problem source at all
  CHECK_THROWS_AS(run_scenario(cfg), Error);

  cfg.lp = make_lp1();
  cfg.schedule = FailureSchedule{};  // schedule without a graph
  CHECK_THROWS_AS(run_scenario(cfg), Error);
}
