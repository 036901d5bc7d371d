#include "saddleflow/dynamics.hpp"

#include <cmath>
#include <limits>

#include "flow_kernel.hpp"
#include "saddleflow/errors.hpp"

namespace saddleflow {
namespace {

constexpr double kBoundaryTol = 1e-12;

void check_primal_nonnegative(const Eigen::VectorXd& x) {
  if ((x.array() < -kBoundaryTol).any()) {
    throw Error(ErrorCode::NegativePrimal,
                "primal state has a component below -1e-12");
  }
}

void check_config(const IntegratorConfig& cfg) {
  if (!(cfg.dt > 0.0) || cfg.dt > 0.1) {
    throw Error(ErrorCode::InvalidInput, "dt must lie in (0, 0.1]");
  }
  if (cfg.stop_tol < 0.0) {
    throw Error(ErrorCode::InvalidInput, "stop_tol must be nonnegative");
  }
  if (!(cfg.t_max > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "t_max must be positive");
  }
  if (cfg.record_every < 1) {
    throw Error(ErrorCode::InvalidInput, "record_every must be >= 1");
  }
}

Eigen::VectorXd project_velocity(const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& raw) {
  Eigen::VectorXd out = raw;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) <= 0.0) out(i) = std::max(0.0, raw(i));
  }
  return out;
}

}  // namespace

Eigen::VectorXd nominal_flow(const StandardFormLP& lp,
                             const PrimalDualState& s) {
  const detail::Pattern pat = detail::Pattern::build(lp.A);
  Eigen::VectorXd xdot, zdot;
  detail::eval_raw_flow(lp, pat, s.x, s.z, nullptr, nullptr, xdot, zdot);
  return xdot;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> projected_velocity(
    const StandardFormLP& lp, const PrimalDualState& s,
    const PerturbationVector& w) {
  check_primal_nonnegative(s.x);
  const detail::Pattern pat = detail::Pattern::build(lp.A);
  Eigen::VectorXd xdot, zdot;
  detail::eval_raw_flow(lp, pat, s.x, s.z, &w, nullptr, xdot, zdot);
  return {project_velocity(s.x, xdot), std::move(zdot)};
}

std::vector<Interval> saddle_velocity_interval(const StandardFormLP& lp,
                                               double K,
                                               const PrimalDualState& s) {
  if (K < 0.0) {
    throw Error(ErrorCode::InvalidInput, "K must be nonnegative");
  }
  const detail::Pattern pat = detail::Pattern::build(lp.A);
  Eigen::VectorXd xdot, zdot;
  detail::eval_raw_flow(lp, pat, s.x, s.z, nullptr, nullptr, xdot, zdot);

  std::vector<Interval> out;
  out.reserve(static_cast<size_t>(s.x.size() + s.z.size()));
  for (Eigen::Index i = 0; i < s.x.size(); ++i) {
    if (s.x(i) > 0.0) {
      out.push_back({xdot(i), xdot(i)});
    } else if (s.x(i) == 0.0) {
      out.push_back({xdot(i), xdot(i) + K});
    } else {
      out.push_back({xdot(i) + K, xdot(i) + K});
    }
  }
  for (Eigen::Index l = 0; l < s.z.size(); ++l) {
    out.push_back({zdot(l), zdot(l)});
  }
  return out;
}

double compute_K1(const StandardFormLP& lp, const PrimalDualState& center,
                  double rho) {
  if (rho < 0.0) {
    throw Error(ErrorCode::InvalidInput, "rho must be nonnegative");
  }
  const Eigen::VectorXd f = nominal_flow(lp, center);
  const Eigen::MatrixXd gram = lp.A.transpose() * lp.A;  // rows of -A'A
  const double radius = std::sqrt(2.0 * rho);
  double k1 = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double row_norm = std::sqrt(gram.row(i).squaredNorm() +
                                      lp.A.col(i).squaredNorm());
    k1 = std::max(k1, std::abs(f(i)) + row_norm * radius);
  }
  return k1;
}

double lyapunov_value(const PrimalDualState& s, const PrimalDualState& star) {
  if (s.x.size() != star.x.size() || s.z.size() != star.z.size()) {
    throw Error(ErrorCode::InvalidInput, "state dimensions do not match");
  }
  return 0.5 * (s.x - star.x).squaredNorm() +
         0.5 * (s.z - star.z).squaredNorm();
}

PrimalDualState step(const StandardFormLP& lp, const PrimalDualState& s,
                     double dt, const PerturbationVector& w) {
  check_primal_nonnegative(s.x);
  const detail::Pattern pat = detail::Pattern::build(lp.A);
  Eigen::VectorXd xdot, zdot;
  detail::eval_raw_flow(lp, pat, s.x, s.z, &w, nullptr, xdot, zdot);
  PrimalDualState next;
  next.x = (s.x + dt * xdot).cwiseMax(0.0);
  next.z = s.z + dt * zdot;
  return next;
}

Trajectory integrate(const StandardFormLP& lp, const PrimalDualState& s0,
                     const IntegratorConfig& cfg, const DisturbanceSignal& dist,
                     const std::optional<PrimalDualState>& star) {
  check_config(cfg);
  check_primal_nonnegative(s0.x);
  if (dist.n != lp.A.cols() || dist.m != lp.A.rows()) {
    throw Error(ErrorCode::InvalidInput,
                "disturbance dimensions do not match the problem");
  }

  const detail::Pattern pat = detail::Pattern::build(lp.A);
  const bool disturbed = dist.kind != DisturbanceKind::Zero;
  const auto k_max = static_cast<long>(std::ceil(cfg.t_max / cfg.dt - 1e-9));

  Trajectory traj;
  PrimalDualState s{s0.x.cwiseMax(0.0), s0.z};

  auto record = [&](double t, double residual) {
    if (!traj.times.empty() && traj.times.back() >= t) return;
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.lyapunov.push_back(
        star ? lyapunov_value(s, *star)
             : std::numeric_limits<double>::quiet_NaN());
    traj.residuals.push_back(residual);
    traj.disturbance_log.push_back(
        disturbed ? sample(dist, t)
                  : PerturbationVector::zero(dist.n, dist.m));
  };

  long k = 0;
  double t = 0.0;
  double residual = kkt_residual(lp, s);
  if (residual <= cfg.stop_tol) traj.time_to_tol = 0.0;
  record(t, residual);

  Eigen::VectorXd xdot, zdot;
  PerturbationVector w = PerturbationVector::zero(dist.n, dist.m);
  while (residual > cfg.stop_tol && k < k_max) {
    if (disturbed) w = sample(dist, t);
    detail::eval_raw_flow(lp, pat, s.x, s.z, disturbed ? &w : nullptr,
                          nullptr, xdot, zdot);
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
    if (k % cfg.record_every == 0 || residual <= cfg.stop_tol || k == k_max) {
      record(t, residual);
    }
  }
  record(t, residual);
  traj.steps = k;
  return traj;
}

}  // namespace saddleflow
