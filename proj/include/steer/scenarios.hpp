#pragma once

#include <optional>
#include <string>
#include <vector>

#include "steer/assemblage.hpp"

namespace steer {

// Pauli matrices and the Bloch parametrization rho = (I + r . pauli) / 2.
HermitianOperator pauli_x();
HermitianOperator pauli_y();
HermitianOperator pauli_z();
HermitianOperator bloch_state(double rx, double ry, double rz);

// Five equatorial qubit states at the corners of a regular pentagon, each
// carrying weight 1/5. Single input, five outcomes, marginal I/2.
Assemblage pentagon();

// Maximally entangled qubit pair steered by Pauli-X projectors (input 0)
// and a half-strength tetrahedron POVM (input 1). The first input has two
// real outcomes; the grid is padded to four with zero blocks.
Assemblage xtetra();

// Maximally entangled qutrit pair measured in the computational and
// Fourier bases, then mixed with white noise: every block moves toward
// identity/9 with the given weight.
Assemblage mub3(double noise = 0.2);

// Two half-weight orthogonal projectors on a single input. Decomposable
// even though the POVM behind it is extremal.
Assemblage povm_counterexample();

// Names accepted by scenario_by_name, in display order.
const std::vector<std::string>& scenario_names();

// Factory used by the command line. A noise override is only meaningful
// for mub3; passing one with any other name throws std::invalid_argument,
// as does an unknown name or a noise outside [0, 1].
Assemblage scenario_by_name(const std::string& name,
                            std::optional<double> noise = std::nullopt);

}  // namespace steer
