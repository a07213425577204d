#include "steer/perturbation.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace steer {

namespace {

constexpr double kZeroDirectionFloor = 1e-12;

}  // namespace

Perturbation::Perturbation(int dim, int n_outcomes, int n_inputs,
                           std::vector<HermitianOperator> blocks)
    : dim_(dim),
      n_outcomes_(n_outcomes),
      n_inputs_(n_inputs),
      blocks_(std::move(blocks)) {}

Perturbation Perturbation::from_blocks(int dim, int n_outcomes, int n_inputs,
                                       std::vector<HermitianOperator> blocks) {
  if (dim < 1 || n_outcomes < 1 || n_inputs < 1)
    throw ShapeError("perturbation needs dim, outcomes and inputs all >= 1");
  if (blocks.size() != static_cast<std::size_t>(n_outcomes) * n_inputs)
    throw ShapeError("perturbation block count does not match the grid shape");
  double max_norm = 0.0;
  for (const auto& b : blocks) {
    if (b.dim() != dim)
      throw ShapeError("perturbation blocks must share one dimension");
    max_norm = std::max(max_norm, b.frobenius_norm());
  }
  if (max_norm < kZeroDirectionFloor)
    throw ShapeError("perturbation direction is numerically zero");
  const double scale = 1.0 / max_norm;
  for (auto& b : blocks) b = scale * b;
  return Perturbation(dim, n_outcomes, n_inputs, std::move(blocks));
}

Perturbation Perturbation::from_grid(
    const std::vector<std::vector<HermitianOperator>>& by_input) {
  if (by_input.empty() || by_input[0].empty())
    throw ShapeError("perturbation grid must be non-empty");
  std::vector<HermitianOperator> blocks;
  for (const auto& input : by_input) {
    if (input.size() != by_input[0].size())
      throw ShapeError("every input must list the same number of outcomes");
    for (const auto& b : input) blocks.push_back(b);
  }
  return from_blocks(by_input[0][0].dim(),
                     static_cast<int>(by_input[0].size()),
                     static_cast<int>(by_input.size()), std::move(blocks));
}

const HermitianOperator& Perturbation::block(int outcome, int input) const {
  if (outcome < 0 || outcome >= n_outcomes_ || input < 0 ||
      input >= n_inputs_)
    throw ShapeError("perturbation block index out of range");
  return blocks_[static_cast<std::size_t>(input) * n_outcomes_ + outcome];
}

HermitianOperator Perturbation::shared_marginal() const {
  HermitianOperator sum(dim_);
  for (int n = 0; n < n_outcomes_; ++n) sum = sum + block(n, 0);
  return sum;
}

PerturbationResiduals perturbation_residuals(const Perturbation& d,
                                             const Assemblage& sigma,
                                             double eps) {
  if (d.dim() != sigma.dim() || d.n_outcomes() != sigma.n_outcomes() ||
      d.n_inputs() != sigma.n_inputs())
    throw ShapeError("perturbation shape does not match the assemblage");

  PerturbationResiduals res;

  std::vector<HermitianOperator> sums;
  for (int r = 0; r < d.n_inputs(); ++r) {
    HermitianOperator sum(d.dim());
    for (int n = 0; n < d.n_outcomes(); ++n) sum = sum + d.block(n, r);
    sums.push_back(sum);
  }
  for (std::size_t i = 0; i < sums.size(); ++i)
    for (std::size_t j = i + 1; j < sums.size(); ++j)
      res.no_signalling_gap = std::max(
          res.no_signalling_gap, (sums[i] - sums[j]).frobenius_norm());
  res.marginal_trace = std::abs(sums[0].trace());

  for (int r = 0; r < d.n_inputs(); ++r) {
    for (int n = 0; n < d.n_outcomes(); ++n) {
      res.max_block_norm =
          std::max(res.max_block_norm, d.block(n, r).frobenius_norm());
      // Kernel vectors of the sigma block must be annihilated.
      const EigenFrame frame = hermitian_eig(sigma.block(n, r));
      for (int i = 0; i < frame.size(); ++i) {
        if (frame.eigenvalues[i] > eps) continue;
        const double leak =
            (d.block(n, r).mat() * frame.eigenvectors.col(i)).norm();
        res.kernel_leak = std::max(res.kernel_leak, leak);
      }
    }
  }
  return res;
}

bool is_valid_perturbation(const Perturbation& d, const Assemblage& sigma,
                           double eps) {
  const PerturbationResiduals res = perturbation_residuals(d, sigma, eps);
  return res.no_signalling_gap <= 10.0 * eps &&
         res.marginal_trace <= 10.0 * eps && res.kernel_leak <= 10.0 * eps &&
         std::abs(res.max_block_norm - 1.0) <= 10.0 * eps;
}

Assemblage apply_perturbation(const Assemblage& sigma, const Perturbation& d,
                              double w, double eps) {
  if (d.dim() != sigma.dim() || d.n_outcomes() != sigma.n_outcomes() ||
      d.n_inputs() != sigma.n_inputs())
    throw ShapeError("perturbation shape does not match the assemblage");

  std::vector<HermitianOperator> blocks;
  blocks.reserve(static_cast<std::size_t>(sigma.n_outcomes()) *
                 sigma.n_inputs());
  for (int r = 0; r < sigma.n_inputs(); ++r) {
    for (int n = 0; n < sigma.n_outcomes(); ++n) {
      HermitianOperator moved = sigma.block(n, r) + w * d.block(n, r);
      const double ev = min_eigenvalue(moved);
      if (ev < -10.0 * eps) {
        std::ostringstream msg;
        msg << "weight " << w << " drives block (" << n << "|" << r
            << ") to minimum eigenvalue " << ev;
        throw InfeasibleWeightError(msg.str(), n, r, ev);
      }
      blocks.push_back(std::move(moved));
    }
  }
  return Assemblage(sigma.dim(), sigma.n_outcomes(), sigma.n_inputs(),
                    std::move(blocks));
}

}  // namespace steer
