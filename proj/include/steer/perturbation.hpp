#pragma once

#include <vector>

#include "steer/assemblage.hpp"

namespace steer {

// Hermitian direction grid D(n|r) matching an assemblage's shape. A valid
// perturbation of sigma keeps every no-signalling constraint first order:
// identical per-input sums, traceless shared sum, and each block confined
// to the support of the matching sigma block. Construction rescales so
// the largest block has Frobenius norm one.
class Perturbation {
 public:
  // Blocks indexed input-major, like Assemblage. Throws if all blocks are
  // negligibly small, since the zero direction is not a perturbation.
  static Perturbation from_blocks(int dim, int n_outcomes, int n_inputs,
                                  std::vector<HermitianOperator> blocks);

  static Perturbation from_grid(
      const std::vector<std::vector<HermitianOperator>>& by_input);

  int dim() const { return dim_; }
  int n_outcomes() const { return n_outcomes_; }
  int n_inputs() const { return n_inputs_; }

  const HermitianOperator& block(int outcome, int input) const;

  // Shared per-input sum, taken from the first input.
  HermitianOperator shared_marginal() const;

 private:
  Perturbation(int dim, int n_outcomes, int n_inputs,
               std::vector<HermitianOperator> blocks);

  int dim_, n_outcomes_, n_inputs_;
  std::vector<HermitianOperator> blocks_;
};

// How far a direction is from being a valid perturbation of sigma. All
// four numbers should sit at numerical noise for directions produced by
// this library; callers gate them against 10 * eps.
struct PerturbationResiduals {
  double no_signalling_gap = 0.0;   // max Frobenius gap between input sums
  double marginal_trace = 0.0;      // |Tr of the shared sum|
  double kernel_leak = 0.0;         // max |D_block * kernel vector|
  double max_block_norm = 0.0;      // largest block Frobenius norm
};

PerturbationResiduals perturbation_residuals(const Perturbation& d,
                                             const Assemblage& sigma,
                                             double eps = kDefaultEpsilon);

// True when every residual is within 10 * eps (and the direction is
// properly normalized).
bool is_valid_perturbation(const Perturbation& d, const Assemblage& sigma,
                           double eps = kDefaultEpsilon);

// Blockwise sigma + w * D. Throws InfeasibleWeightError naming the first
// block whose minimum eigenvalue drops below -10 * eps.
Assemblage apply_perturbation(const Assemblage& sigma, const Perturbation& d,
                              double w, double eps = kDefaultEpsilon);

}  // namespace steer
