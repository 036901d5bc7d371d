#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "saddleflow/disturbances.hpp"
#include "saddleflow/lp.hpp"

namespace saddleflow {

/// Penalty parameter diagnostics. The discontinuous dynamics never needs K
/// to run; these values only feed the trajectory-inclusion checks and the
/// modified Lagrangian.
struct KParameters {
  double K1 = 0.0;      // sublevel-set bound on |f_nom|_inf
  double K_star = 0.0;  // dual-vertex bound max |A'z + c|_inf
  double K = 0.0;       // max of both

  static KParameters from(double k1, double k_star) {
    return {k1, k_star, std::max(k1, k_star)};
  }
};

struct IntegratorConfig {
  double dt = 0.01;        // Euler step (s); must lie in (0, 0.1]
  double t_max = 100.0;    // simulated horizon (s)
  double stop_tol = 1e-6;  // stop once the KKT residual falls below this
  int record_every = 1;    // thinning factor for recorded samples
};

/// Recorded run. Samples are taken every `record_every` steps plus the
/// final state (and, for link-failure runs, every schedule breakpoint), so
/// recorded times are strictly increasing on the uniform dt grid.
struct Trajectory {
  std::vector<double> times;
  std::vector<PrimalDualState> states;
  std::vector<double> lyapunov;  // V against the reference; NaN without one
  std::vector<double> residuals;
  std::vector<PerturbationVector> disturbance_log;
  long steps = 0;
  double time_to_tol = -1.0;  // first time the residual met stop_tol; -1 if never

  const PrimalDualState& terminal() const { return states.back(); }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v, double tol = 0.0) const {
    return v >= lo - tol && v <= hi + tol;
  }
};

/// Nominal flow f_nom(x, z) = -c - A'(z + Ax - b).
Eigen::VectorXd nominal_flow(const StandardFormLP& lp,
                             const PrimalDualState& s);

/// Disturbed discontinuous saddle-point field:
///   xdot_i = f_nom_i + w_x_i            if x_i > 0
///            max{0, f_nom_i + w_x_i}    if x_i = 0
///   zdot   = Ax - b + w_z.
/// Throws NegativePrimal if any x_i < -1e-12.
std::pair<Eigen::VectorXd, Eigen::VectorXd> projected_velocity(
    const StandardFormLP& lp, const PrimalDualState& s,
    const PerturbationVector& w);

/// Component ranges of the K-penalty saddle-point inclusion at s: singleton
/// {f_nom_i} where x_i > 0, [f_nom_i, f_nom_i + K] where x_i = 0 (collapsing
/// to {f_nom_i + K} where x_i < 0), and singleton {(Ax-b)_l} for the dual
/// components. Length n + m.
std::vector<Interval> saddle_velocity_interval(const StandardFormLP& lp,
                                               double K,
                                               const PrimalDualState& s);

/// Exact maximum of |f_nom_i| over the Lyapunov ball V <= rho centered at
/// `center`: max_i |f_nom_i(center)| + |J_i| sqrt(2 rho), with J the
/// Jacobian [-A'A, -A'].
double compute_K1(const StandardFormLP& lp, const PrimalDualState& center,
                  double rho);

/// V(s) = 1/2 |x - x*|^2 + 1/2 |z - z*|^2.
double lyapunov_value(const PrimalDualState& s, const PrimalDualState& star);

/// One explicit Euler step with projection clamp:
///   x' = max{0, x + dt (f_nom + w_x)},  z' = z + dt (Ax - b + w_z).
PrimalDualState step(const StandardFormLP& lp, const PrimalDualState& s,
                     double dt, const PerturbationVector& w);

/// Fixed-step integration of the disturbed dynamics until the KKT residual
/// reaches cfg.stop_tol or t reaches cfg.t_max. Deterministic given inputs.
/// `star` (typically the oracle solution) enables the recorded Lyapunov
/// values. Throws NonFinite if a state stops being finite (dt too large).
Trajectory integrate(const StandardFormLP& lp, const PrimalDualState& s0,
                     const IntegratorConfig& cfg, const DisturbanceSignal& dist,
                     const std::optional<PrimalDualState>& star = std::nullopt);

}  // namespace saddleflow
