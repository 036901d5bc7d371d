#include "saddleflow/disturbances.hpp"

#include <cmath>

#include "saddleflow/errors.hpp"

namespace saddleflow {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d649bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform value in [-1, 1), a pure function of (seed, interval, component).
double hash_uniform(std::uint64_t seed, std::uint64_t interval,
                    std::uint64_t component) {
  const std::uint64_t h =
      splitmix64(splitmix64(splitmix64(seed) ^ interval) ^ component);
  return 2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0;
}

double envelope(const DisturbanceSignal& sig, double t) {
  if (t < sig.onset) return 0.0;
  const double tau = t - sig.onset;
  double v = sig.amplitude * std::exp(-sig.decay * tau);
  if (sig.omega > 0.0) v *= std::sin(sig.omega * tau);
  return v;
}

void add_component(PerturbationVector& w, const DisturbanceSignal& sig,
                   double value) {
  if (sig.component < 0) {
    w.w_x.array() += value;
    w.w_z.array() += value;
  } else if (sig.component < sig.n) {
    w.w_x(sig.component) += value;
  } else {
    w.w_z(sig.component - sig.n) += value;
  }
}

}  // namespace

DisturbanceSignal DisturbanceSignal::zero(Eigen::Index n, Eigen::Index m) {
  DisturbanceSignal sig;
  sig.kind = DisturbanceKind::Zero;
  sig.n = n;
  sig.m = m;
  return sig;
}

DisturbanceSignal DisturbanceSignal::constant(Eigen::VectorXd wx,
                                              Eigen::VectorXd wz) {
  DisturbanceSignal sig;
  sig.kind = DisturbanceKind::Constant;
  sig.n = wx.size();
  sig.m = wz.size();
  sig.wbar_x = std::move(wx);
  sig.wbar_z = std::move(wz);
  return sig;
}

DisturbanceSignal DisturbanceSignal::finite_energy(Eigen::Index n,
                                                   Eigen::Index m,
                                                   double amplitude,
                                                   double onset, double decay,
                                                   double omega,
                                                   int component) {
  if (!(decay > 0.0)) {
    throw Error(ErrorCode::InvalidInput,
                "finite-energy disturbance needs decay > 0");
  }
  DisturbanceSignal sig;
  sig.kind = DisturbanceKind::FiniteEnergy;
  sig.n = n;
  sig.m = m;
  sig.amplitude = amplitude;
  sig.onset = onset;
  sig.decay = decay;
  sig.omega = omega;
  sig.component = component;
  return sig;
}

DisturbanceSignal DisturbanceSignal::finite_variation(Eigen::VectorXd wx,
                                                      Eigen::VectorXd wz,
                                                      double amplitude,
                                                      double onset,
                                                      double decay,
                                                      int component) {
  if (!(decay > 0.0)) {
    throw Error(ErrorCode::InvalidInput,
                "finite-variation disturbance needs decay > 0");
  }
  DisturbanceSignal sig;
  sig.kind = DisturbanceKind::FiniteVariation;
  sig.n = wx.size();
  sig.m = wz.size();
  sig.wbar_x = std::move(wx);
  sig.wbar_z = std::move(wz);
  sig.amplitude = amplitude;
  sig.onset = onset;
  sig.decay = decay;
  sig.component = component;
  return sig;
}

DisturbanceSignal DisturbanceSignal::seeded_noise(Eigen::Index n,
                                                  Eigen::Index m,
                                                  double amplitude,
                                                  std::uint64_t seed,
                                                  double hold_dt) {
  if (!(hold_dt > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "hold_dt must be positive");
  }
  DisturbanceSignal sig;
  sig.kind = DisturbanceKind::SeededNoise;
  sig.n = n;
  sig.m = m;
  sig.amplitude = amplitude;
  sig.seed = seed;
  sig.hold_dt = hold_dt;
  return sig;
}

PerturbationVector DisturbanceSignal::settle_point() const {
  if (kind == DisturbanceKind::Constant ||
      kind == DisturbanceKind::FiniteVariation) {
    return {wbar_x, wbar_z};
  }
  return PerturbationVector::zero(n, m);
}

PerturbationVector sample(const DisturbanceSignal& sig, double t) {
  PerturbationVector w = PerturbationVector::zero(sig.n, sig.m);
  switch (sig.kind) {
    case DisturbanceKind::Zero:
      break;
    case DisturbanceKind::Constant:
      w.w_x = sig.wbar_x;
      w.w_z = sig.wbar_z;
      break;
    case DisturbanceKind::FiniteEnergy:
      add_component(w, sig, envelope(sig, t));
      break;
    case DisturbanceKind::FiniteVariation:
      w.w_x = sig.wbar_x;
      w.w_z = sig.wbar_z;
      add_component(w, sig, envelope(sig, t));
      break;
    case DisturbanceKind::SeededNoise: {
      const auto interval =
          static_cast<std::uint64_t>(std::floor(t / sig.hold_dt));
      for (Eigen::Index i = 0; i < sig.n + sig.m; ++i) {
        const double v = sig.amplitude *
                         hash_uniform(sig.seed, interval,
                                      static_cast<std::uint64_t>(i));
        if (i < sig.n) {
          w.w_x(i) = v;
        } else {
          w.w_z(i - sig.n) = v;
        }
      }
      break;
    }
  }
  return w;
}

double variation_integral(const DisturbanceSignal& sig,
                          const PerturbationVector& wbar, double horizon,
                          double dt) {
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "dt must be positive");
  }
  double sum = 0.0;
  const auto steps = static_cast<long>(std::floor(horizon / dt + 1e-12));
  for (long k = 0; k < steps; ++k) {
    const PerturbationVector w = sample(sig, static_cast<double>(k) * dt);
    const double dx = (w.w_x - wbar.w_x).squaredNorm();
    const double dz = (w.w_z - wbar.w_z).squaredNorm();
    sum += std::sqrt(dx + dz) * dt;
  }
  return sum;
}

}  // namespace saddleflow
