#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "gmesp/spectral.hpp"

using namespace gmesp;

TEST_SUITE("spectral") {

TEST_CASE("spectral_bound") {
  CHECK(spectral_bound(Mat::Identity(4, 4), 2) == doctest::Approx(0.0));
  Mat D = Mat::Zero(3, 3);
  D.diagonal() << std::exp(2.0), std::exp(1.0), 1.0;
  CHECK(std::abs(spectral_bound(D, 2) - 3.0) <= 1e-12);
  CHECK(spectral_bound(fixtures::rational_C(), 3) >= brute_force(fixtures::rational_instance()).value);
  Mat R = Mat::Zero(3, 3);
  R(0, 0) = 1;
  CHECK_THROWS_AS(spectral_bound(R, 2), Error);
}

TEST_CASE("lagrangian spectral without side constraints") {
  const Instance inst = fixtures::rational_instance();
  CHECK(lagrangian_spectral_bound(inst).value == doctest::Approx(spectral_bound(inst.C, inst.t)));
}

TEST_CASE("lagrangian spectral at zero multipliers") {
  const Instance inst = random_instance(8, 4, 2, 2, 3);
  const SpectralBoundResult r = lagrangian_spectral_value(inst, Vec::Zero(2));
  CHECK(std::abs(r.value - spectral_bound(inst.C, inst.t)) <= 1e-12);
  CHECK(static_cast<int>(r.K.size()) == inst.s - inst.t);
}

TEST_CASE("lagrangian spectral improves on binding constraints") {
  int improved = 0;
  for (unsigned seed = 0; seed < 20; ++seed) {
    Instance inst = random_instance(8, 4, 2, 2, seed);
    const double v0 = lagrangian_spectral_value(inst, Vec::Zero(2)).value;
    const SpectralBoundResult r = lagrangian_spectral_bound(inst);
    CHECK(r.value <= v0 + 1e-12);
    CHECK((r.pi.array() >= 0.0).all());
    if (r.value < v0 - 1e-6) ++improved;
  }
  CHECK(improved > 0);
}

TEST_CASE("lagrangian spectral values are valid for every multiplier") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unif(0.0, 3.0);
  for (unsigned seed = 0; seed < 20; ++seed) {
    const Instance inst = random_instance(7, 4, 2, 2, seed);
    const double opt = brute_force(inst).value;
    for (int k = 0; k < 10; ++k) {
      Vec pi(2);
      pi << unif(rng), unif(rng);
      REQUIRE(lagrangian_spectral_value(inst, pi).value >= opt - 1e-9);
    }
  }
}

}
