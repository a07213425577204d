#pragma once

#include <vector>

#include "steer/numerics.hpp"

namespace steer {

// Grid of sub-normalized PSD operators sigma(n|r), one per outcome n and
// measurement input r, all of the same dimension. Values are immutable;
// every transformation builds a new grid.
class Assemblage {
 public:
  // Blocks indexed input-major: blocks[r * n_outcomes + n].
  Assemblage(int dim, int n_outcomes, int n_inputs,
             std::vector<HermitianOperator> blocks);

  // Convenience: by_input[r][n].
  static Assemblage from_grid(
      const std::vector<std::vector<HermitianOperator>>& by_input);

  int dim() const { return dim_; }
  int n_outcomes() const { return n_outcomes_; }
  int n_inputs() const { return n_inputs_; }

  const HermitianOperator& block(int outcome, int input) const;

 private:
  int dim_, n_outcomes_, n_inputs_;
  std::vector<HermitianOperator> blocks_;
};

struct ValidationReport {
  double min_block_eigenvalue = 0.0;
  int min_block_outcome = -1;
  int min_block_input = -1;
  // Largest Frobenius distance between per-input marginals.
  double max_marginal_gap = 0.0;
  // |Tr(marginal) - 1|.
  double marginal_trace_error = 0.0;
  double epsilon = kDefaultEpsilon;
  bool pass = false;
};

// Checks positivity of every block, agreement of the per-input marginals
// and unit trace of the marginal, all against eps.
ValidationReport validate(const Assemblage& sigma,
                          double eps = kDefaultEpsilon);

// validate(), throwing ValidationError with the offending numbers on fail.
void require_valid(const Assemblage& sigma, double eps = kDefaultEpsilon);

// Sum of the blocks of the first input. Valid assemblages have the same
// sum for every input, so this is "the" marginal state.
HermitianOperator marginal(const Assemblage& sigma);

// sigma(n|r) = Tr_A[(M(n|r) x I) rho_ab], with subsystem A holding the
// measurements. measurements[r][n] act on dimension dA; rho_ab lives on
// dA * dB with A-major index ordering. Checks that rho_ab is a state and
// that each input forms a measurement (PSD effects summing to identity).
Assemblage from_state_and_measurements(
    const HermitianOperator& rho_ab,
    const std::vector<std::vector<HermitianOperator>>& measurements,
    double eps = kDefaultEpsilon);

// Bipartite realization producing a given assemblage: a pure state on
// d * d (A-major ordering) plus one measurement grid on the A side.
struct Realization {
  Eigen::VectorXcd state_vector;
  std::vector<std::vector<HermitianOperator>> measurements;  // [input][outcome]
};

// Standard construction from the assemblage itself: the state purifies
// the marginal and the measurements are the marginal-whitened transposed
// blocks, taken in the marginal's eigenbasis. Off the marginal's support
// the effects are padded evenly so each input sums to the full identity.
Realization canonical_realization(const Assemblage& sigma,
                                  double eps = kDefaultEpsilon);

// Larger scenario holding the same physics: extra outcomes are zero
// blocks, extra inputs copy the last original input, extra dimensions
// zero-pad each block in the final coordinates.
Assemblage embed(const Assemblage& sigma, int n_outcomes, int n_inputs,
                 int dim);

}  // namespace steer
