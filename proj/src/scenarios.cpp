#include "steer/scenarios.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace steer {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

Eigen::VectorXcd maximally_entangled(int d) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d * d);
  for (int i = 0; i < d; ++i) psi[i * d + i] = 1.0 / std::sqrt(double(d));
  return psi;
}

HermitianOperator state_projector(const Eigen::VectorXcd& psi) {
  return HermitianOperator::from_matrix(psi * psi.adjoint());
}

}  // namespace

HermitianOperator pauli_x() {
  Eigen::MatrixXcd m(2, 2);
  m << 0, 1, 1, 0;
  return HermitianOperator::from_matrix(m);
}

HermitianOperator pauli_y() {
  Eigen::MatrixXcd m(2, 2);
  m << 0, -kI, kI, 0;
  return HermitianOperator::from_matrix(m);
}

HermitianOperator pauli_z() {
  Eigen::MatrixXcd m(2, 2);
  m << 1, 0, 0, -1;
  return HermitianOperator::from_matrix(m);
}

HermitianOperator bloch_state(double rx, double ry, double rz) {
  return 0.5 * (HermitianOperator::identity(2) + rx * pauli_x() +
                ry * pauli_y() + rz * pauli_z());
}

Assemblage pentagon() {
  std::vector<HermitianOperator> blocks;
  blocks.reserve(5);
  for (int a = 0; a < 5; ++a) {
    const double angle = 2.0 * std::numbers::pi * a / 5.0;
    blocks.push_back(0.2 * bloch_state(std::cos(angle), std::sin(angle), 0.0));
  }
  return Assemblage::from_grid({blocks});
}

Assemblage xtetra() {
  const HermitianOperator zero(2);
  const std::vector<HermitianOperator> x_projectors = {
      0.5 * (HermitianOperator::identity(2) + pauli_x()),
      0.5 * (HermitianOperator::identity(2) - pauli_x()), zero, zero};

  // Unit Bloch vectors of a regular tetrahedron, first one at the pole.
  const double r8 = std::sqrt(8.0 / 9.0);
  const double r2 = std::sqrt(2.0 / 9.0);
  const double r6 = std::sqrt(2.0 / 3.0);
  std::vector<HermitianOperator> tetra;
  tetra.reserve(4);
  for (const auto& v : {std::array<double, 3>{0.0, 0.0, 1.0},
                        std::array<double, 3>{r8, 0.0, -1.0 / 3.0},
                        std::array<double, 3>{-r2, r6, -1.0 / 3.0},
                        std::array<double, 3>{-r2, -r6, -1.0 / 3.0}})
    tetra.push_back(0.5 * bloch_state(v[0], v[1], v[2]));

  return from_state_and_measurements(state_projector(maximally_entangled(2)),
                                     {x_projectors, tetra});
}

Assemblage mub3(double noise) {
  if (noise < 0.0 || noise > 1.0)
    throw std::invalid_argument("mub3 noise must lie in [0, 1]");

  std::vector<HermitianOperator> computational, fourier;
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(3);
    e[k] = 1.0;
    computational.push_back(HermitianOperator::projector(e));

    Eigen::VectorXcd f(3);
    for (int j = 0; j < 3; ++j)
      f[j] = std::exp(kI * (2.0 * std::numbers::pi * j * k / 3.0)) /
             std::sqrt(3.0);
    fourier.push_back(HermitianOperator::projector(f));
  }

  const Assemblage pure =
      from_state_and_measurements(state_projector(maximally_entangled(3)),
                                  {computational, fourier});
  if (noise == 0.0) return pure;

  const HermitianOperator white =
      (noise / 9.0) * HermitianOperator::identity(3);
  std::vector<std::vector<HermitianOperator>> mixed(2);
  for (int r = 0; r < 2; ++r)
    for (int n = 0; n < 3; ++n)
      mixed[r].push_back((1.0 - noise) * pure.block(n, r) + white);
  return Assemblage::from_grid(mixed);
}

Assemblage povm_counterexample() {
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(2), e1 = Eigen::VectorXcd::Zero(2);
  e0[0] = 1.0;
  e1[1] = 1.0;
  return Assemblage::from_grid({{0.5 * HermitianOperator::projector(e0),
                                 0.5 * HermitianOperator::projector(e1)}});
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"pentagon", "xtetra", "mub3",
                                                 "povm-counterexample"};
  return names;
}

Assemblage scenario_by_name(const std::string& name,
                            std::optional<double> noise) {
  if (noise && name != "mub3")
    throw std::invalid_argument("noise only applies to the mub3 scenario");
  if (name == "pentagon") return pentagon();
  if (name == "xtetra") return xtetra();
  if (name == "mub3") return mub3(noise.value_or(0.2));
  if (name == "povm-counterexample") return povm_counterexample();
  throw std::invalid_argument("unknown scenario name: " + name);
}

}  // namespace steer
