#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "steer/extremality.hpp"

namespace steer {

// Largest weights w keeping sigma + wD respectively sigma - wD positive
// semidefinite. Solved exactly, block by block: on the support of a block
// with frame (V, L), the constraint is I + w L^-1/2 V* D V L^-1/2 >= 0,
// an eigenvalue pencil. Blocks that never bind contribute infinity; the
// minimum over blocks is finite in both directions for any valid
// perturbation, since its traceless shared sum forces some block of D
// below zero on each side.
struct WeightPair {
  double plus;
  double minus;
};

WeightPair max_weights(const Assemblage& sigma, const Perturbation& d,
                       double eps = kDefaultEpsilon);

// Convex children sigma +/- w± D with relative weights p± proportional to
// the opposite walk length. Children are cleaned up before returning:
// eigenvalues in [-10 eps, 0) clipped to zero and the per-input marginals
// averaged back into agreement, so tolerance dirt cannot pile up along a
// deep recursion.
struct Split {
  Assemblage plus;
  Assemblage minus;
  double p_plus;
  double p_minus;
  double w_plus;
  double w_minus;
};

Split split(const Assemblage& sigma, const Perturbation& d,
            double eps = kDefaultEpsilon);

struct Leaf {
  double weight;
  Assemblage assemblage;
};

// Root split of a decomposition: relative weights, the total leaf weight
// that ended up under each side, and the children's marginal states.
struct FirstSplitInfo {
  double p_plus = 0.0;
  double p_minus = 0.0;
  double branch_weight_plus = 0.0;
  double branch_weight_minus = 0.0;
  Eigen::MatrixXcd marginal_plus;
  Eigen::MatrixXcd marginal_minus;
};

struct DecompositionStats {
  long long node_count = 0;
  int max_depth = 0;
  long long dedup_merges = 0;
  std::optional<FirstSplitInfo> first_split;
};

// Called once per interior split with the node, the direction and both
// maximal weights, before the children are processed.
using SplitObserver = std::function<void(
    const Assemblage&, const Perturbation&, double w_plus, double w_minus)>;

struct DecompositionOptions {
  double epsilon = kDefaultEpsilon;
  // Unique leaves after merging; once reached, pending nodes are emitted
  // as leaves unchanged and the result is flagged truncated (the final
  // count can overshoot while the recursion unwinds). 0 removes the cap.
  std::size_t max_leaves = 100000;
  // 0 picks 4 * outcomes * inputs * dim, far above what the rank-counting
  // argument allows a clean run to reach.
  int max_depth = 0;
  double dedup_tol = 1e-6;
  SplitObserver on_split;
};

struct DecompositionResult {
  std::vector<Leaf> leaves;
  DecompositionStats stats;
  bool truncated = false;
  // Largest blockwise Frobenius gap between the input and the weighted
  // sum of the leaves.
  double reconstruction_residual = 0.0;
};

// Recursive convex decomposition into extremal assemblages. Works through
// the inputs from the last to the first looking for directions whose
// blocks sum to zero on that input, then switches to marginal-changing
// directions from the all-input constraint system; every split recurses
// into both children at the same stage. Leaves are deduplicated as they
// arrive and returned in a canonical order, so equal inputs produce equal
// results byte for byte. Unless the result says truncated, every leaf is
// extremal and the weighted sum of leaves reproduces the input.
DecompositionResult decompose(const Assemblage& sigma,
                              const DecompositionOptions& options = {});

// Merges leaves whose assemblages agree on every block within tol
// (Frobenius), summing their weights. Output sorted by the leaves' raw
// byte representation; total weight is preserved exactly.
std::vector<Leaf> merge_equivalent(const std::vector<Leaf>& leaves,
                                   double tol = 1e-6);

// Largest blockwise Frobenius distance between sigma and the weighted sum
// of the leaves.
double reconstruction_residual(const Assemblage& sigma,
                               const std::vector<Leaf>& leaves);

}  // namespace steer
