#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "steer/assemblage.hpp"
#include "steer/errors.hpp"
#include "steer/perturbation.hpp"
#include "support/oracles.hpp"
#include "support/random_instances.hpp"

using namespace steer;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

VectorXcd basis_vector(int dim, int index) {
  VectorXcd v = VectorXcd::Zero(dim);
  v[index] = 1.0;
  return v;
}

// 0.5|0><0|, 0.5|1><1| on a single input. Non-extremal despite coming
// from a projective measurement, and small enough to check by hand.
Assemblage diagonal_pair() {
  std::vector<HermitianOperator> blocks;
  blocks.push_back(HermitianOperator::from_matrix(
      0.5 * basis_vector(2, 0) * basis_vector(2, 0).adjoint()));
  blocks.push_back(HermitianOperator::from_matrix(
      0.5 * basis_vector(2, 1) * basis_vector(2, 1).adjoint()));
  return Assemblage(2, 2, 1, std::move(blocks));
}

}  // namespace

TEST_SUITE_BEGIN("assemblage");

TEST_CASE("construction checks shapes and indexes input-major") {
  const HermitianOperator h(2);
  CHECK_THROWS_AS(Assemblage(2, 2, 1, {h}), ShapeError);
  CHECK_THROWS_AS(Assemblage(2, 0, 1, {}), ShapeError);
  CHECK_THROWS_AS(Assemblage(3, 1, 2, {h, h}), ShapeError);

  // Distinct traces reveal the layout.
  std::vector<HermitianOperator> blocks;
  for (int i = 0; i < 6; ++i)
    blocks.push_back(HermitianOperator::from_matrix(
        double(i) * MatrixXcd::Identity(2, 2)));
  const Assemblage sigma(2, 3, 2, blocks);
  CHECK(sigma.block(0, 0).trace() == doctest::Approx(0.0));
  CHECK(sigma.block(2, 0).trace() == doctest::Approx(4.0));
  CHECK(sigma.block(0, 1).trace() == doctest::Approx(6.0));
  CHECK(sigma.block(2, 1).trace() == doctest::Approx(10.0));
  CHECK_THROWS_AS(sigma.block(3, 0), ShapeError);
  CHECK_THROWS_AS(sigma.block(0, 2), ShapeError);

  const Assemblage viaGrid = Assemblage::from_grid(
      {{blocks[0], blocks[1], blocks[2]}, {blocks[3], blocks[4], blocks[5]}});
  CHECK(viaGrid.block(1, 1).trace() == doctest::Approx(8.0));
  CHECK_THROWS_AS(Assemblage::from_grid({{blocks[0]}, {}}), ShapeError);
}

TEST_CASE("validation accepts a uniform grid and reports violations") {
  const auto quarter = HermitianOperator::from_matrix(
      0.25 * MatrixXcd::Identity(2, 2));
  const Assemblage good = Assemblage::from_grid(
      {{quarter, quarter}, {quarter, quarter}});
  const ValidationReport ok = validate(good);
  CHECK(ok.pass);
  CHECK(ok.min_block_eigenvalue == doctest::Approx(0.25));
  CHECK(ok.max_marginal_gap == doctest::Approx(0.0));
  CHECK(ok.marginal_trace_error == doctest::Approx(0.0));
  CHECK_NOTHROW(require_valid(good));

  SUBCASE("negative block") {
    MatrixXcd dip = 0.25 * MatrixXcd::Identity(2, 2);
    dip(1, 1) = -0.1;
    const Assemblage bad = Assemblage::from_grid(
        {{quarter, quarter},
         {HermitianOperator::from_matrix(dip), quarter}});
    const ValidationReport report = validate(bad);
    CHECK_FALSE(report.pass);
    CHECK(report.min_block_eigenvalue == doctest::Approx(-0.1));
    CHECK(report.min_block_outcome == 0);
    CHECK(report.min_block_input == 1);
    CHECK_THROWS_AS(require_valid(bad), ValidationError);
  }

  SUBCASE("signalling marginals") {
    const auto third = HermitianOperator::from_matrix(
        (1.0 / 6.0) * MatrixXcd::Identity(2, 2));
    const Assemblage bad = Assemblage::from_grid(
        {{quarter, quarter}, {third, third}});
    const ValidationReport report = validate(bad);
    CHECK_FALSE(report.pass);
    // ||I/2 - I/3|| over two inputs.
    CHECK(report.max_marginal_gap ==
          doctest::Approx((1.0 / 6.0) * std::sqrt(2.0)));
  }

  SUBCASE("marginal trace off by a scale") {
    const auto fifth = HermitianOperator::from_matrix(
        0.2 * MatrixXcd::Identity(2, 2));
    const Assemblage bad = Assemblage::from_grid({{fifth, fifth}});
    const ValidationReport report = validate(bad);
    CHECK_FALSE(report.pass);
    CHECK(report.marginal_trace_error == doctest::Approx(0.2));
  }
}

TEST_CASE("marginal is the first input's block sum") {
  const Assemblage sigma = diagonal_pair();
  const MatrixXcd rho = marginal(sigma).mat();
  CHECK((rho - 0.5 * MatrixXcd::Identity(2, 2)).norm() ==
        doctest::Approx(0.0));
}

TEST_CASE("from_state_and_measurements matches the index-sum partial trace") {
  std::mt19937 rng(811);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + (trial % 2);
    const HermitianOperator rho = testsupport::random_density(rng, d * d, d * d);
    std::vector<std::vector<HermitianOperator>> povms;
    povms.push_back(testsupport::random_povm(rng, d, 3));
    povms.push_back(testsupport::random_povm(rng, d, 3));
    const Assemblage sigma = from_state_and_measurements(rho, povms);

    CHECK(sigma.dim() == d);
    CHECK(sigma.n_outcomes() == 3);
    CHECK(sigma.n_inputs() == 2);
    CHECK(validate(sigma).pass);

    for (int r = 0; r < 2; ++r) {
      for (int n = 0; n < 3; ++n) {
        const MatrixXcd expected = testsupport::partial_trace_after_measurement(
            povms[r][n].mat(), rho.mat(), d, d);
        CHECK((sigma.block(n, r).mat() - expected).norm() <= 1e-12);
      }
    }
  }
}

TEST_CASE("maximally entangled state turns effects into transposes") {
  VectorXcd phi = VectorXcd::Zero(4);
  phi[0] = phi[3] = 1.0 / std::sqrt(2.0);
  const auto rho = HermitianOperator::projector(phi);

  std::mt19937 rng(417);
  const auto povm = testsupport::random_povm(rng, 2, 2);
  const Assemblage sigma = from_state_and_measurements(rho, {povm});
  for (int n = 0; n < 2; ++n) {
    const MatrixXcd expected = 0.5 * povm[n].mat().transpose();
    CHECK((sigma.block(n, 0).mat() - expected).norm() <= 1e-12);
  }
}

TEST_CASE("from_state_and_measurements rejects bad states and measurements") {
  const auto rho = HermitianOperator::from_matrix(
      0.25 * MatrixXcd::Identity(4, 4));
  const auto half = HermitianOperator::from_matrix(
      0.5 * MatrixXcd::Identity(2, 2));

  // Trace 2 state.
  const auto doubled = HermitianOperator::from_matrix(
      0.5 * MatrixXcd::Identity(4, 4));
  CHECK_THROWS_AS(from_state_and_measurements(doubled, {{half, half}}),
                  ValidationError);

  // Effects summing to I/2.
  const auto tiny = HermitianOperator::from_matrix(
      0.25 * MatrixXcd::Identity(2, 2));
  CHECK_THROWS_AS(from_state_and_measurements(rho, {{tiny, tiny}}),
                  ValidationError);

  // Negative effect balanced by one above identity.
  MatrixXcd neg = -0.2 * MatrixXcd::Identity(2, 2);
  MatrixXcd pos = 1.2 * MatrixXcd::Identity(2, 2);
  CHECK_THROWS_AS(
      from_state_and_measurements(
          rho, {{HermitianOperator::from_matrix(neg),
                 HermitianOperator::from_matrix(pos)}}),
      ValidationError);

  // Non-state dimension.
  const auto odd = HermitianOperator::from_matrix(
      (1.0 / 3.0) * MatrixXcd::Identity(3, 3));
  CHECK_THROWS_AS(from_state_and_measurements(odd, {{half, half}}),
                  ShapeError);
}

TEST_CASE("canonical realization reproduces the assemblage it came from") {
  std::mt19937 rng(2121);
  for (int trial = 0; trial < 10; ++trial) {
    const Assemblage sigma = testsupport::random_assemblage(rng, 2, 3, 2);
    const Realization real = canonical_realization(sigma);

    CHECK(real.state_vector.norm() == doctest::Approx(1.0));
    for (const auto& input : real.measurements) {
      HermitianOperator sum(sigma.dim());
      for (const auto& effect : input) {
        CHECK(min_eigenvalue(effect) >= -1e-9);
        sum = sum + effect;
      }
      CHECK((sum - HermitianOperator::identity(sigma.dim())).frobenius_norm()
            <= 1e-9);
    }

    const Assemblage back = from_state_and_measurements(
        HermitianOperator::projector(real.state_vector), real.measurements);
    for (int r = 0; r < sigma.n_inputs(); ++r)
      for (int n = 0; n < sigma.n_outcomes(); ++n)
        CHECK((back.block(n, r).mat() - sigma.block(n, r).mat()).norm() <=
              1e-8);
  }
}

TEST_CASE("canonical realization handles a rank-deficient marginal") {
  std::mt19937 rng(909);
  const Assemblage small = testsupport::random_assemblage(rng, 2, 2, 2);
  const Assemblage sigma = embed(small, 3, 2, 4);
  const Realization real = canonical_realization(sigma);

  // Off the marginal's support each input still sums to the identity.
  for (const auto& input : real.measurements) {
    HermitianOperator sum(4);
    for (const auto& effect : input) sum = sum + effect;
    CHECK((sum - HermitianOperator::identity(4)).frobenius_norm() <= 1e-9);
  }

  const Assemblage back = from_state_and_measurements(
      HermitianOperator::projector(real.state_vector), real.measurements);
  for (int r = 0; r < sigma.n_inputs(); ++r)
    for (int n = 0; n < sigma.n_outcomes(); ++n)
      CHECK((back.block(n, r).mat() - sigma.block(n, r).mat()).norm() <=
            1e-8);
}

TEST_CASE("canonical realization refuses blocks leaking off the support") {
  // PSD blocks whose off-diagonal mass sticks out of the numerical support
  // of the marginal: the diagonal corner 4e-9 falls under eps = 1e-8, but
  // the coupling 1.5e-5 is far above the 10 * eps leak budget.
  const double c = 1.5e-5;
  MatrixXcd b0(2, 2), b1(2, 2);
  b0 << 0.9, c, c, 4e-9;
  b1 << 0.1 - 8e-9, -c, -c, 4e-9;
  const Assemblage sigma = Assemblage::from_grid(
      {{HermitianOperator::from_matrix(b0),
        HermitianOperator::from_matrix(b1)}});
  CHECK(validate(sigma).pass);
  CHECK_THROWS_AS(canonical_realization(sigma), ValidationError);
}

TEST_CASE("embedding pads outcomes, inputs and dimension") {
  const Assemblage sigma = diagonal_pair();
  const Assemblage big = embed(sigma, 4, 3, 3);
  CHECK(big.dim() == 3);
  CHECK(big.n_outcomes() == 4);
  CHECK(big.n_inputs() == 3);
  CHECK(validate(big).pass);

  for (int r = 0; r < 3; ++r) {
    // Every input repeats the single original one.
    for (int n = 0; n < 2; ++n) {
      CHECK((big.block(n, r).mat().topLeftCorner(2, 2) -
             sigma.block(n, 0).mat()).norm() <= 1e-15);
      CHECK(big.block(n, r).mat().col(2).norm() == doctest::Approx(0.0));
      CHECK(big.block(n, r).mat().row(2).norm() == doctest::Approx(0.0));
    }
    for (int n = 2; n < 4; ++n)
      CHECK(big.block(n, r).frobenius_norm() == doctest::Approx(0.0));
  }

  CHECK_THROWS_AS(embed(sigma, 1, 1, 2), ShapeError);
}

TEST_CASE("perturbation construction normalizes the largest block") {
  const VectorXcd e0 = basis_vector(2, 0), e1 = basis_vector(2, 1);
  const auto p0 = HermitianOperator::projector(e0);
  const auto p1 = HermitianOperator::projector(e1);

  const Perturbation d = Perturbation::from_grid({{2.0 * p0, -4.0 * p1}});
  CHECK(d.block(0, 0).frobenius_norm() == doctest::Approx(0.5));
  CHECK(d.block(1, 0).frobenius_norm() == doctest::Approx(1.0));

  CHECK_THROWS_AS(
      Perturbation::from_grid({{HermitianOperator(2), HermitianOperator(2)}}),
      ShapeError);
  CHECK_THROWS_AS(Perturbation::from_blocks(2, 2, 1, {p0}), ShapeError);
}

TEST_CASE("perturbation residuals flag each constraint separately") {
  const Assemblage sigma = diagonal_pair();
  const VectorXcd e0 = basis_vector(2, 0), e1 = basis_vector(2, 1);
  const auto p0 = HermitianOperator::projector(e0);
  const auto p1 = HermitianOperator::projector(e1);

  const Perturbation good = Perturbation::from_grid({{p0, -1.0 * p1}});
  const PerturbationResiduals res = perturbation_residuals(good, sigma);
  CHECK(res.no_signalling_gap == doctest::Approx(0.0));
  CHECK(res.marginal_trace == doctest::Approx(0.0));
  CHECK(res.kernel_leak == doctest::Approx(0.0));
  CHECK(res.max_block_norm == doctest::Approx(1.0));
  CHECK(is_valid_perturbation(good, sigma));
  CHECK((good.shared_marginal().mat() -
         (p0.mat() - p1.mat())).norm() <= 1e-15);

  // Leaks into the kernel of the second block.
  const Perturbation leaky = Perturbation::from_grid({{p0, -1.0 * p0}});
  CHECK(perturbation_residuals(leaky, sigma).kernel_leak ==
        doctest::Approx(1.0));
  CHECK_FALSE(is_valid_perturbation(leaky, sigma));

  // Shared sum with trace two.
  const Perturbation traced = Perturbation::from_grid({{p0, p1}});
  CHECK(perturbation_residuals(traced, sigma).marginal_trace ==
        doctest::Approx(2.0));
  CHECK_FALSE(is_valid_perturbation(traced, sigma));

  // Two inputs with opposite sums signal.
  const Assemblage two = Assemblage::from_grid(
      {{0.5 * p0, 0.5 * p1}, {0.5 * p0, 0.5 * p1}});
  const Perturbation signalling = Perturbation::from_grid(
      {{p0, -1.0 * p1}, {-1.0 * p0, p1}});
  CHECK(perturbation_residuals(signalling, two).no_signalling_gap ==
        doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK_FALSE(is_valid_perturbation(signalling, two));

  const Perturbation wrongShape = Perturbation::from_grid({{p0, -1.0 * p1}});
  CHECK_THROWS_AS(perturbation_residuals(wrongShape, two), ShapeError);
}

TEST_CASE("apply_perturbation walks to the boundary of positivity") {
  const Assemblage sigma = diagonal_pair();
  const VectorXcd e0 = basis_vector(2, 0), e1 = basis_vector(2, 1);
  const Perturbation d = Perturbation::from_grid(
      {{HermitianOperator::projector(e0),
        -1.0 * HermitianOperator::projector(e1)}});

  const Assemblage plus = apply_perturbation(sigma, d, 0.5);
  CHECK((plus.block(0, 0).mat() -
         e0 * e0.adjoint()).norm() <= 1e-15);
  CHECK(plus.block(1, 0).frobenius_norm() <= 1e-15);

  const Assemblage minus = apply_perturbation(sigma, d, -0.5);
  CHECK(minus.block(0, 0).frobenius_norm() <= 1e-15);
  CHECK((minus.block(1, 0).mat() - e1 * e1.adjoint()).norm() <= 1e-15);

  try {
    apply_perturbation(sigma, d, 0.5 + 1e-3);
    FAIL("expected InfeasibleWeightError");
  } catch (const InfeasibleWeightError& e) {
    CHECK(e.outcome == 1);
    CHECK(e.input == 0);
    CHECK(e.min_eigenvalue == doctest::Approx(-1e-3));
  }
}

TEST_SUITE_END();
