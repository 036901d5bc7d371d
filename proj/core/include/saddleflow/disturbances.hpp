#pragma once

#include <cstdint>

#include "saddleflow/lp.hpp"

namespace saddleflow {

enum class DisturbanceKind { Zero, Constant, FiniteEnergy, FiniteVariation, SeededNoise };

/// Time-parameterized disturbance w(t) = (w_x(t), w_z(t)). Immutable once
/// built; sampling is pure and bit-reproducible, including the seeded kind.
///
/// FiniteEnergy and the decaying part of FiniteVariation share the envelope
///   amplitude * exp(-decay * (t - onset)) * (omega > 0 ? sin(omega*(t-onset)) : 1)
/// gated to t >= onset and applied to `component` (an index into the stacked
/// (w_x, w_z) vector) or to every component when component < 0. SeededNoise
/// is piecewise constant on intervals of length hold_dt, driven by a counter
/// hash of (seed, interval, component).
struct DisturbanceSignal {
  DisturbanceKind kind = DisturbanceKind::Zero;
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  Eigen::VectorXd wbar_x;  // Constant / FiniteVariation offset
  Eigen::VectorXd wbar_z;
  double amplitude = 1.0;
  double onset = 0.0;
  double decay = 1.0;  // > 0 for the finite-energy/-variation kinds
  double omega = 0.0;  // 0 selects the pure exponential pulse
  int component = -1;
  std::uint64_t seed = 0;
  double hold_dt = 0.01;

  static DisturbanceSignal zero(Eigen::Index n, Eigen::Index m);
  static DisturbanceSignal constant(Eigen::VectorXd wx, Eigen::VectorXd wz);
  static DisturbanceSignal finite_energy(Eigen::Index n, Eigen::Index m,
                                         double amplitude, double onset,
                                         double decay, double omega = 0.0,
                                         int component = -1);
  static DisturbanceSignal finite_variation(Eigen::VectorXd wx,
                                            Eigen::VectorXd wz,
                                            double amplitude, double onset,
                                            double decay, int component = -1);
  static DisturbanceSignal seeded_noise(Eigen::Index n, Eigen::Index m,
                                        double amplitude, std::uint64_t seed,
                                        double hold_dt = 0.01);

  /// The constant part the signal settles around: wbar for Constant and
  /// FiniteVariation, zero otherwise.
  PerturbationVector settle_point() const;
};

PerturbationVector sample(const DisturbanceSignal& sig, double t);

/// Left Riemann sum of |w(t) - wbar| (2-norm) over [0, horizon).
double variation_integral(const DisturbanceSignal& sig,
                          const PerturbationVector& wbar, double horizon,
                          double dt);

}  // namespace saddleflow
