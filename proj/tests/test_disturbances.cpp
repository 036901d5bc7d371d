#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "saddleflow/disturbances.hpp"
#include "saddleflow/errors.hpp"

using namespace saddleflow;

namespace {

double norm_of(const PerturbationVector& w) {
  return std::sqrt(w.w_x.squaredNorm() + w.w_z.squaredNorm());
}

}  // namespace

TEST_CASE("zero signal samples to zero") {
  const DisturbanceSignal sig = DisturbanceSignal::zero(3, 2);
  for (double t : {0.0, 0.5, 17.0}) {
    const PerturbationVector w = sample(sig, t);
    CHECK(w.w_x.isZero(0.0));
    CHECK(w.w_z.isZero(0.0));
  }
}

TEST_CASE("constant signal is time invariant") {
  Eigen::VectorXd wx(2);
  wx << 0.1, -0.2;
  Eigen::VectorXd wz(1);
  wz << 0.3;
  const DisturbanceSignal sig = DisturbanceSignal::constant(wx, wz);
  for (double t : {0.0, 1.0, 123.0}) {
    const PerturbationVector w = sample(sig, t);
    CHECK(w.w_x == wx);
    CHECK(w.w_z == wz);
  }
}

TEST_CASE("unit pulse decays as exp(-t) on one component") {
  const DisturbanceSignal sig =
      DisturbanceSignal::finite_energy(2, 1, 1.0, 0.0, 1.0, 0.0, 0);
  for (double t : {0.0, 0.25, 1.0, 4.0}) {
    CHECK(norm_of(sample(sig, t)) ==
          doctest::Approx(std::exp(-t)).epsilon(1e-14));
  }
  CHECK(sample(sig, 3.0).w_x(1) == 0.0);
  CHECK(sample(sig, 3.0).w_z(0) == 0.0);
}

TEST_CASE("onset gates the envelope") {
  const DisturbanceSignal sig =
      DisturbanceSignal::finite_energy(1, 1, 2.0, 5.0, 0.5, 0.0, 0);
  CHECK(norm_of(sample(sig, 4.999)) == 0.0);
  CHECK(norm_of(sample(sig, 5.0)) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("variation integral of matching signals vanishes") {
  const DisturbanceSignal zero = DisturbanceSignal::zero(2, 1);
  CHECK(variation_integral(zero, PerturbationVector::zero(2, 1), 10.0,
                           1e-2) == 0.0);

  Eigen::VectorXd wx(2);
  wx << 0.4, -0.1;
  Eigen::VectorXd wz(1);
  wz << 0.2;
  const DisturbanceSignal sig = DisturbanceSignal::constant(wx, wz);
  CHECK(variation_integral(sig, {wx, wz}, 10.0, 1e-2) == 0.0);
}

TEST_CASE("variation integral of the unit pulse approaches one") {
  const DisturbanceSignal sig =
      DisturbanceSignal::finite_energy(2, 1, 1.0, 0.0, 1.0, 0.0, 0);
  const double value =
      variation_integral(sig, PerturbationVector::zero(2, 1), 20.0, 1e-3);
  CHECK(std::abs(value - 1.0) <= 2e-3);
}

TEST_CASE("variation integral converges as the horizon grows") {
  const DisturbanceSignal sig =
      DisturbanceSignal::finite_energy(1, 1, 1.0, 0.0, 1.0, 0.0, 0);
  const PerturbationVector none = PerturbationVector::zero(1, 1);
  const double dt = 1e-3;
  double prev = 0.0;
  for (double horizon : {5.0, 10.0, 20.0, 40.0}) {
    const double value = variation_integral(sig, none, horizon, dt);
    CHECK(value >= prev);
    CHECK(value <= 1.0 + dt * 1.0);  // analytic integral plus one-cell slack
    prev = value;
  }
}

TEST_CASE("finite variation combines offset and decay") {
  Eigen::VectorXd wx(1);
  wx << 0.2;
  Eigen::VectorXd wz(1);
  wz << -0.1;
  const DisturbanceSignal sig =
      DisturbanceSignal::finite_variation(wx, wz, 1.0, 0.0, 1.0, 0);
  const PerturbationVector at1 = sample(sig, 1.0);
  CHECK(at1.w_x(0) == doctest::Approx(0.2 + std::exp(-1.0)).epsilon(1e-14));
  CHECK(at1.w_z(0) == doctest::Approx(-0.1).epsilon(1e-14));
  const double tail =
      variation_integral(sig, sig.settle_point(), 30.0, 1e-3);
  CHECK(std::abs(tail - 1.0) <= 2e-3);
}

TEST_CASE("sampling is bit reproducible") {
  const DisturbanceSignal noise =
      DisturbanceSignal::seeded_noise(3, 2, 0.5, 42, 0.01);
  for (double t : {0.0, 0.005, 1.23, 77.7}) {
    const PerturbationVector a = sample(noise, t);
    const PerturbationVector b = sample(noise, t);
    CHECK(a.w_x == b.w_x);
    CHECK(a.w_z == b.w_z);
    CHECK(a.w_x.lpNorm<Eigen::Infinity>() <= 0.5);
  }
  // Piecewise constant within one hold interval.
  CHECK(sample(noise, 0.031).w_x == sample(noise, 0.0399).w_x);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(DisturbanceSignal::finite_energy(1, 1, 1.0, 0.0, 0.0),
                  Error);
  CHECK_THROWS_AS(DisturbanceSignal::seeded_noise(1, 1, 1.0, 7, 0.0), Error);
  const DisturbanceSignal sig = DisturbanceSignal::zero(1, 1);
  CHECK_THROWS_AS(
      variation_integral(sig, PerturbationVector::zero(1, 1), 1.0, 0.0),
      Error);
}
