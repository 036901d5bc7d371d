#include "saddleflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "saddleflow/errors.hpp"

namespace saddleflow {
namespace {

using nlohmann::json;

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::InvalidInput, "malformed JSON");
  }
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  }
  out << text;
}

Eigen::VectorXd vector_from(const json& j, const std::string& what) {
  if (!j.is_array()) {
    throw Error(ErrorCode::InvalidInput, what + " must be an array");
  }
  Eigen::VectorXd v(j.size());
  Eigen::Index i = 0;
  for (const auto& e : j) {
    if (!e.is_number()) {
      throw Error(ErrorCode::InvalidInput, what + " must be numeric");
    }
    v(i++) = e.get<double>();
  }
  return v;
}

Eigen::MatrixXd matrix_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) {
    throw Error(ErrorCode::InvalidInput, what + " must be a nonempty array of rows");
  }
  const size_t cols = j.front().is_array() ? j.front().size() : 0;
  Eigen::MatrixXd a(j.size(), cols);
  Eigen::Index r = 0;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols) {
      throw Error(ErrorCode::InvalidInput, what + " must be rectangular");
    }
    Eigen::Index k = 0;
    for (const auto& e : row) {
      if (!e.is_number()) {
        throw Error(ErrorCode::InvalidInput, what + " must be numeric");
      }
      a(r, k++) = e.get<double>();
    }
    ++r;
  }
  return a;
}

json vector_to(const Eigen::VectorXd& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

json matrix_to(const Eigen::MatrixXd& a) {
  json j = json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
    j.push_back(row);
  }
  return j;
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

StandardFormLP lp_from(const json& j) {
  StandardFormLP lp;
  lp.name = j.value("name", "");
  if (!j.contains("A") || !j.contains("b") || !j.contains("c")) {
    throw Error(ErrorCode::InvalidInput, "LP JSON needs A, b and c");
  }
  lp.A = matrix_from(j.at("A"), "A");
  lp.b = vector_from(j.at("b"), "b");
  lp.c = vector_from(j.at("c"), "c");
  const ValidationReport report = validate_lp(lp);
  if (!report.ok) {
    std::string what = "invalid LP";
    for (const auto& d : report.messages) {
      if (d.severity == Diagnostic::Severity::Error) what += "; " + d.text;
    }
    throw Error(ErrorCode::InvalidInput, what);
  }
  return lp;
}

OptimalControlSpec optctrl_from(const json& j) {
  OptimalControlSpec spec;
  spec.name = j.value("name", "");
  if (!j.contains("G") || !j.contains("H_diag") || !j.contains("x0") ||
      !j.contains("T")) {
    throw Error(ErrorCode::InvalidInput,
                "optimal control JSON needs G, H_diag, x0 and T");
  }
  spec.G = matrix_from(j.at("G"), "G");
  spec.H_diag = vector_from(j.at("H_diag"), "H_diag");
  spec.x0 = vector_from(j.at("x0"), "x0");
  spec.T = j.at("T").get<int>();
  return spec;
}

CommGraph graph_from(const json& j) {
  CommGraph g;
  g.n_agents = j.at("n").get<int>();
  if (j.contains("edges")) {
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) {
        throw Error(ErrorCode::InvalidInput, "edges must be [i, j] pairs");
      }
      // 1-based ids on the wire.
      g.add_edge(e.at(0).get<int>() - 1, e.at(1).get<int>() - 1);
    }
  }
  return g;
}

FailureSchedule schedule_from(const json& j, const CommGraph& base) {
  FailureSchedule s;
  s.base_graph = base;
  for (const auto& t : j.at("breakpoints")) {
    s.breakpoints.push_back(t.get<double>());
  }
  s.failing.assign(s.breakpoints.size(), {});
  if (j.value("fail_all", false)) {
    for (size_t k = 0; k < s.failing.size(); k += 2) {
      s.failing[k] = base.edges;
    }
  }
  if (j.contains("failing")) {
    for (const auto& entry : j.at("failing")) {
      const int k = entry.at(0).get<int>();
      if (k < 0 || static_cast<size_t>(k) >= s.failing.size()) {
        throw Error(ErrorCode::InvalidInput, "failing interval out of range");
      }
      EdgeSet edges;
      for (const auto& e : entry.at(1)) {
        const int i = e.at(0).get<int>() - 1;
        const int jj = e.at(1).get<int>() - 1;
        edges.insert(i < jj ? std::make_pair(i, jj) : std::make_pair(jj, i));
      }
      s.failing[static_cast<size_t>(k)] = std::move(edges);
    }
  }
  s.validate();
  return s;
}

DisturbanceSignal disturbance_from(const json& j, Eigen::Index n,
                                   Eigen::Index m) {
  const std::string kind = j.value("kind", "zero");
  const json params = j.value("params", json::object());
  const auto seed = j.value("seed", std::uint64_t{0});

  auto wbar = [&]() -> std::pair<Eigen::VectorXd, Eigen::VectorXd> {
    Eigen::VectorXd wx = params.contains("w_x")
                             ? vector_from(params.at("w_x"), "w_x")
                             : Eigen::VectorXd::Zero(n);
    Eigen::VectorXd wz = params.contains("w_z")
                             ? vector_from(params.at("w_z"), "w_z")
                             : Eigen::VectorXd::Zero(m);
    if (wx.size() != n || wz.size() != m) {
      throw Error(ErrorCode::InvalidInput, "disturbance dimensions mismatch");
    }
    return {std::move(wx), std::move(wz)};
  };

  if (kind == "zero") return DisturbanceSignal::zero(n, m);
  if (kind == "constant") {
    auto [wx, wz] = wbar();
    return DisturbanceSignal::constant(std::move(wx), std::move(wz));
  }
  if (kind == "finite_energy") {
    return DisturbanceSignal::finite_energy(
        n, m, params.value("amplitude", 1.0), params.value("t0", 0.0),
        params.value("lambda", 1.0), params.value("omega", 0.0),
        params.value("component", -1));
  }
  if (kind == "finite_variation") {
    auto [wx, wz] = wbar();
    return DisturbanceSignal::finite_variation(
        std::move(wx), std::move(wz), params.value("amplitude", 1.0),
        params.value("t0", 0.0), params.value("lambda", 1.0),
        params.value("component", -1));
  }
  if (kind == "seeded_noise") {
    DisturbanceSignal sig = DisturbanceSignal::seeded_noise(
        n, m, params.value("amplitude", 1.0), seed,
        params.value("hold_dt", 0.01));
    return sig;
  }
  throw Error(ErrorCode::InvalidInput, "unknown disturbance kind: " + kind);
}

}  // namespace

StandardFormLP lp_from_json(const std::string& text) {
  return lp_from(parse(text));
}

StandardFormLP load_lp(const std::string& path) {
  return lp_from_json(read_file(path));
}

std::string lp_to_json(const StandardFormLP& lp) {
  json j;
  j["name"] = lp.name;
  j["A"] = matrix_to(lp.A);
  j["b"] = vector_to(lp.b);
  j["c"] = vector_to(lp.c);
  return j.dump(2) + "\n";
}

void save_lp(const StandardFormLP& lp, const std::string& path) {
  write_file(path, lp_to_json(lp));
}

OptimalControlSpec optctrl_from_json(const std::string& text) {
  return optctrl_from(parse(text));
}

OptimalControlSpec load_optctrl(const std::string& path) {
  return optctrl_from_json(read_file(path));
}

CommGraph graph_from_json(const std::string& text) {
  return graph_from(parse(text));
}

FailureSchedule schedule_from_json(const std::string& text,
                                   const CommGraph& base) {
  return schedule_from(parse(text), base);
}

DisturbanceSignal disturbance_from_json(const std::string& text,
                                        Eigen::Index n, Eigen::Index m) {
  return disturbance_from(parse(text), n, m);
}

ScenarioConfig scenario_from_json(const std::string& text,
                                  const std::string& base_dir) {
  const json j = parse(text);
  ScenarioConfig cfg;
  cfg.name = j.value("name", "scenario");

  const int sources = static_cast<int>(j.contains("lp")) +
                      static_cast<int>(j.contains("lp_file")) +
                      static_cast<int>(j.contains("optctrl"));
  if (sources != 1) {
    throw Error(ErrorCode::InvalidInput,
                "scenario needs exactly one of lp, lp_file or optctrl");
  }
  if (j.contains("lp")) {
    cfg.lp = lp_from(j.at("lp"));
  } else if (j.contains("lp_file")) {
    std::filesystem::path p = j.at("lp_file").get<std::string>();
    if (p.is_relative() && !base_dir.empty()) {
      p = std::filesystem::path(base_dir) / p;
    }
    cfg.lp = load_lp(p.string());
  } else {
    cfg.optctrl = optctrl_from(j.at("optctrl"));
  }

  Eigen::Index n, m;
  if (cfg.lp) {
    n = cfg.lp->A.cols();
    m = cfg.lp->A.rows();
  } else {
    n = 4LL * cfg.optctrl->G.rows() * (cfg.optctrl->T + 1);
    m = cfg.optctrl->G.rows() * (cfg.optctrl->T + 1);
  }

  if (j.contains("x0")) cfg.x0 = vector_from(j.at("x0"), "x0");
  if (j.contains("z0")) cfg.z0 = vector_from(j.at("z0"), "z0");
  if (j.contains("integrator")) {
    const json& ji = j.at("integrator");
    cfg.integrator.dt = ji.value("dt", cfg.integrator.dt);
    cfg.integrator.t_max = ji.value("t_max", cfg.integrator.t_max);
    cfg.integrator.stop_tol = ji.value("stop_tol", cfg.integrator.stop_tol);
    cfg.integrator.record_every =
        ji.value("record_every", cfg.integrator.record_every);
  }
  if (j.contains("disturbance")) {
    cfg.disturbance = disturbance_from(j.at("disturbance"), n, m);
  }
  if (j.contains("graph")) {
    cfg.graph = graph_from(j.at("graph"));
  }
  if (j.contains("schedule")) {
    if (!cfg.graph) {
      throw Error(ErrorCode::InvalidInput, "schedule requires a graph");
    }
    cfg.schedule = schedule_from(j.at("schedule"), *cfg.graph);
  }
  cfg.output_dir = j.value("out", "");
  cfg.use_oracle = j.value("oracle", true);
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  return scenario_from_json(
      read_file(path), std::filesystem::path(path).parent_path().string());
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  if (traj.states.empty()) return;
  const Eigen::Index n = traj.states.front().x.size();
  const Eigen::Index m = traj.states.front().z.size();
  out << "t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x_" << (i + 1);
  for (Eigen::Index l = 0; l < m; ++l) out << ",z_" << (l + 1);
  out << ",V,kkt\n";
  for (size_t k = 0; k < traj.times.size(); ++k) {
    out << g17(traj.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) {
      out << ',' << g17(traj.states[k].x(i));
    }
    for (Eigen::Index l = 0; l < m; ++l) {
      out << ',' << g17(traj.states[k].z(l));
    }
    out << ',' << g17(traj.lyapunov[k]) << ',' << g17(traj.residuals[k])
        << '\n';
  }
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  }
  write_trajectory_csv(traj, out);
}

void write_time_series_csv(const Eigen::MatrixXd& series,
                           const std::string& prefix,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  }
  out << "tau";
  for (Eigen::Index i = 0; i < series.rows(); ++i) {
    out << ',' << prefix << '_' << (i + 1);
  }
  out << '\n';
  for (Eigen::Index tau = 0; tau < series.cols(); ++tau) {
    out << tau;
    for (Eigen::Index i = 0; i < series.rows(); ++i) {
      out << ',' << g17(series(i, tau));
    }
    out << '\n';
  }
}

std::string metrics_to_json(const RunMetrics& metrics) {
  json j;
  j["terminal_kkt"] = metrics.terminal_kkt;
  if (std::isfinite(metrics.terminal_value_gap)) {
    j["terminal_value_gap"] = metrics.terminal_value_gap;
  } else {
    j["terminal_value_gap"] = nullptr;  // oracle skipped
  }
  j["time_to_tol"] = metrics.time_to_tol;
  j["steps"] = metrics.steps;
  if (metrics.perturbed_kkt) {
    j["perturbed_kkt"] = *metrics.perturbed_kkt;
  } else {
    j["perturbed_kkt"] = nullptr;
  }
  return j.dump(2) + "\n";
}

void write_metrics_json(const RunMetrics& metrics, const std::string& path) {
  write_file(path, metrics_to_json(metrics));
}

std::string iss_certificate_to_json(const IssCounterexample& cert,
                                    const StandardFormLP& lp) {
  json j;
  j["w_x"] = vector_to(cert.wbar.w_x);
  j["w_z"] = vector_to(cert.wbar.w_z);
  j["ray_point"] = vector_to(cert.ray_point);
  j["ray_direction"] = vector_to(cert.ray_direction);
  j["perturbed_cost"] = vector_to(cert.perturbed_cost);
  j["perturbed_dual"] = vector_to(cert.perturbed_dual);
  json residuals = json::array();
  const StandardFormLP perturbed = perturbed_program(lp, cert.wbar);
  for (double lambda : {0.0, 1.0, 10.0, 100.0}) {
    PrimalDualState s{cert.ray_point + lambda * cert.ray_direction,
                      cert.perturbed_dual};
    residuals.push_back(
        {{"lambda", lambda}, {"kkt", kkt_residual(perturbed, s)}});
  }
  j["certificate"] = residuals;
  return j.dump(2) + "\n";
}

}  // namespace saddleflow
