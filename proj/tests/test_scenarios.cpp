#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "steer/extremality.hpp"
#include "steer/scenarios.hpp"

using namespace steer;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

// Direct formula for steering a maximally entangled pair: the block for
// effect E is E^T / d.
MatrixXcd steered_block(const HermitianOperator& effect) {
  return effect.mat().transpose() / double(effect.dim());
}

}  // namespace

TEST_SUITE_BEGIN("scenarios");

TEST_CASE("pentagon carries five equatorial fifth-weight states") {
  const Assemblage sigma = pentagon();
  CHECK(sigma.dim() == 2);
  CHECK(sigma.n_outcomes() == 5);
  CHECK(sigma.n_inputs() == 1);
  CHECK(validate(sigma).pass);
  CHECK((marginal(sigma).mat() - 0.5 * MatrixXcd::Identity(2, 2)).norm() <=
        1e-15);

  for (int a = 0; a < 5; ++a) {
    const double angle = 2.0 * std::numbers::pi * a / 5.0;
    const MatrixXcd expected =
        0.2 * (0.5 * (MatrixXcd::Identity(2, 2) +
                      std::cos(angle) * pauli_x().mat() +
                      std::sin(angle) * pauli_y().mat()));
    CHECK((sigma.block(a, 0).mat() - expected).norm() <= 1e-15);
  }
}

TEST_CASE("pentagon realization measures a two-fifths-weight POVM") {
  const Assemblage sigma = pentagon();
  const Realization real = canonical_realization(sigma);
  REQUIRE(real.measurements.size() == 1);
  for (const auto& effect : real.measurements[0]) {
    CHECK(effect.trace() == doctest::Approx(0.4).epsilon(1e-12));
    // Rank one: the smaller eigenvalue vanishes.
    CHECK(std::abs(min_eigenvalue(effect)) <= 1e-12);
  }
  const Assemblage rebuilt = from_state_and_measurements(
      HermitianOperator::from_matrix(real.state_vector *
                                     real.state_vector.adjoint()),
      real.measurements);
  for (int a = 0; a < 5; ++a)
    CHECK((rebuilt.block(a, 0).mat() - sigma.block(a, 0).mat()).norm() <=
          1e-12);
}

TEST_CASE("xtetra blocks follow the transposed-effect formula") {
  const Assemblage sigma = xtetra();
  CHECK(sigma.dim() == 2);
  CHECK(sigma.n_outcomes() == 4);
  CHECK(sigma.n_inputs() == 2);
  CHECK(validate(sigma).pass);

  // Input 0: Pauli-X projectors, then padding.
  const auto plus = 0.5 * (HermitianOperator::identity(2) + pauli_x());
  const auto minus = 0.5 * (HermitianOperator::identity(2) - pauli_x());
  CHECK((sigma.block(0, 0).mat() - steered_block(plus)).norm() <= 1e-14);
  CHECK((sigma.block(1, 0).mat() - steered_block(minus)).norm() <= 1e-14);
  CHECK(sigma.block(2, 0).frobenius_norm() <= 1e-15);
  CHECK(sigma.block(3, 0).frobenius_norm() <= 1e-15);

  // Input 1: half-strength tetrahedron states, trace 1/4 apiece.
  const double r8 = std::sqrt(8.0 / 9.0);
  const double r2 = std::sqrt(2.0 / 9.0);
  const double r6 = std::sqrt(2.0 / 3.0);
  const std::array<std::array<double, 3>, 4> vs = {
      {{0.0, 0.0, 1.0}, {r8, 0.0, -1.0 / 3.0}, {-r2, r6, -1.0 / 3.0},
       {-r2, -r6, -1.0 / 3.0}}};
  for (int a = 0; a < 4; ++a) {
    CHECK(sigma.block(a, 1).trace() == doctest::Approx(0.25).epsilon(1e-12));
    const auto effect = 0.5 * bloch_state(vs[a][0], vs[a][1], vs[a][2]);
    CHECK((sigma.block(a, 1).mat() - steered_block(effect)).norm() <= 1e-14);
  }
}

TEST_CASE("mub3 mixes two unbiased bases with white noise") {
  const Assemblage pure = mub3(0.0);
  CHECK(pure.dim() == 3);
  CHECK(pure.n_outcomes() == 3);
  CHECK(pure.n_inputs() == 2);
  CHECK(validate(pure).pass);
  CHECK((marginal(pure).mat() - MatrixXcd::Identity(3, 3) / 3.0).norm() <=
        1e-14);

  // Computational input: diagonal rank-one blocks.
  for (int k = 0; k < 3; ++k) {
    MatrixXcd expected = MatrixXcd::Zero(3, 3);
    expected(k, k) = 1.0 / 3.0;
    CHECK((pure.block(k, 0).mat() - expected).norm() <= 1e-14);
  }
  // Fourier input: transposed projectors onto (1, w^k, w^2k)/sqrt(3).
  const std::complex<double> w = std::exp(
      std::complex<double>(0.0, 2.0 * std::numbers::pi / 3.0));
  for (int k = 0; k < 3; ++k) {
    VectorXcd f(3);
    for (int j = 0; j < 3; ++j) f[j] = std::pow(w, j * k) / std::sqrt(3.0);
    const MatrixXcd expected = (f * f.adjoint()).transpose() / 3.0;
    CHECK((pure.block(k, 1).mat() - expected).norm() <= 1e-13);
  }

  // The two bases are mutually unbiased: every overlap has weight 1/3.
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) {
      const double overlap =
          (pure.block(k, 0).mat() * pure.block(j, 1).mat()).trace().real() *
          9.0;
      CHECK(overlap == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    }

  const Assemblage noisy = mub3(0.2);
  CHECK(validate(noisy).pass);
  CHECK((marginal(noisy).mat() - MatrixXcd::Identity(3, 3) / 3.0).norm() <=
        1e-14);
  for (int r = 0; r < 2; ++r)
    for (int n = 0; n < 3; ++n) {
      const MatrixXcd expected = 0.8 * pure.block(n, r).mat() +
                                 0.2 * MatrixXcd::Identity(3, 3) / 9.0;
      CHECK((noisy.block(n, r).mat() - expected).norm() <= 1e-15);
    }

  const Assemblage all_noise = mub3(1.0);
  for (int r = 0; r < 2; ++r)
    for (int n = 0; n < 3; ++n)
      CHECK((all_noise.block(n, r).mat() -
             MatrixXcd::Identity(3, 3) / 9.0).norm() <= 1e-15);

  CHECK_THROWS_AS(mub3(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(mub3(1.1), std::invalid_argument);
}

TEST_CASE("noise-free mub3 admits no decomposition") {
  const ExtremalityReport staged = is_extremal(mub3(0.0));
  CHECK(staged.extremal);
  CHECK(is_extremal_direct(mub3(0.0)).extremal);
}

TEST_CASE("the projector pair scenario is decomposable") {
  const Assemblage sigma = povm_counterexample();
  CHECK(sigma.dim() == 2);
  CHECK(sigma.n_outcomes() == 2);
  CHECK(sigma.n_inputs() == 1);
  CHECK(validate(sigma).pass);
  CHECK(sigma.block(0, 0).mat()(0, 0).real() == doctest::Approx(0.5));
  CHECK(sigma.block(1, 0).mat()(1, 1).real() == doctest::Approx(0.5));
  CHECK_FALSE(is_extremal(sigma).extremal);
}

TEST_CASE("scenario_by_name dispatches and rejects misuse") {
  for (const auto& name : scenario_names()) {
    const Assemblage sigma = scenario_by_name(name);
    CHECK(validate(sigma).pass);
  }

  // Default noise is one fifth.
  const Assemblage by_name = scenario_by_name("mub3");
  const Assemblage direct = mub3(0.2);
  for (int r = 0; r < 2; ++r)
    for (int n = 0; n < 3; ++n)
      CHECK((by_name.block(n, r).mat() - direct.block(n, r).mat()).norm() ==
            0.0);

  CHECK_THROWS_AS(scenario_by_name("hexagon"), std::invalid_argument);
  CHECK_THROWS_AS(scenario_by_name("pentagon", 0.1), std::invalid_argument);
  CHECK(validate(scenario_by_name("mub3", 0.5)).pass);
}

TEST_SUITE_END();
