#pragma once

#include <optional>
#include <string>
#include <vector>

#include "steer/perturbation.hpp"

namespace steer {

enum class BasisKind { kDiagonal, kSymmetric, kAntisymmetric };

// One Hermitian operator attached to a block of the grid, built from the
// block's support eigenvectors. A rank-k block gets k^2 of these, which
// span exactly the Hermitian operators confined to its support.
struct OperatorBasisElement {
  int outcome;
  int input;
  BasisKind kind;
  int eig_a;  // primary eigenvector index within the block's support
  int eig_b;  // partner index for off-diagonal kinds, -1 for diagonal
  HermitianOperator op;
};

// Support basis of every block of one input, outcome-major. Within a
// block, eigenvector index a runs over the support in eigenvalue order;
// each a contributes its projector, then for every b < a the normalized
// symmetric and antisymmetric combinations with eigenvector b.
std::vector<OperatorBasisElement> hermitian_basis_for_input(
    const Assemblage& sigma, int input, double eps = kDefaultEpsilon);

// Columns are hermitian_to_real_vec of each element's operator.
Eigen::MatrixXd stack_elements(
    const std::vector<OperatorBasisElement>& elements, int dim);

// Direction supported on a single input whose blocks sum to zero. Such a
// direction is automatically a valid perturbation once padded with zero
// blocks on the other inputs, which is what the returned value holds.
std::optional<Perturbation> zero_marginal_witness(
    const Assemblage& sigma, int input, double eps = kDefaultEpsilon);

// Linear system cutting out the valid perturbations supported on a chosen
// set of inputs: equal block sums across those inputs plus a traceless
// shared sum, written in the coordinates of the per-input support bases.
// Inputs are kept in ascending order; a single input degenerates to the
// lone trace row.
struct ConstraintSystem {
  std::vector<int> inputs;
  std::vector<OperatorBasisElement> elements;  // concatenated by input
  Eigen::MatrixXd matrix;
};

ConstraintSystem cross_input_system(const Assemblage& sigma,
                                    std::vector<int> inputs,
                                    double eps = kDefaultEpsilon);

Eigen::MatrixXd pairwise_constraint_matrix(const Assemblage& sigma,
                                           int input_a, int input_b,
                                           double eps = kDefaultEpsilon);

// Solution coordinates of a ConstraintSystem back into a direction grid,
// with zero blocks on every input the system did not cover.
Perturbation perturbation_from_coefficients(
    const Assemblage& sigma,
    const std::vector<OperatorBasisElement>& elements,
    const Eigen::VectorXd& coeffs);

struct ExtremalityReport {
  bool extremal = false;
  // Which stage settled the question: "single_input", "zero_marginal",
  // "cross_input_pair", "pairs_exhausted" or "direct".
  std::string stage;
  // A valid perturbation proving decomposability; set iff not extremal.
  std::optional<Perturbation> witness;
};

// An assemblage is extremal when it admits no valid perturbation at all.
// Stages, cheapest first: the single-input rank rule, per-input zero-sum
// directions, pair systems (a pair with only the trivial solution forces
// every direction to vanish once stage two has passed), and finally the
// system over all inputs at once. Expects a valid assemblage.
ExtremalityReport is_extremal(const Assemblage& sigma,
                              double eps = kDefaultEpsilon);

// Same decision from one dense system over the full Hermitian space of
// every block, with kernel containment imposed row by row instead of by a
// choice of basis. Slower, but shares no code path with is_extremal, so
// the two cross-check each other.
ExtremalityReport is_extremal_direct(const Assemblage& sigma,
                                     double eps = kDefaultEpsilon);

}  // namespace steer
