#include "steer/assemblage.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace steer {

Assemblage::Assemblage(int dim, int n_outcomes, int n_inputs,
                       std::vector<HermitianOperator> blocks)
    : dim_(dim),
      n_outcomes_(n_outcomes),
      n_inputs_(n_inputs),
      blocks_(std::move(blocks)) {
  if (dim < 1 || n_outcomes < 1 || n_inputs < 1)
    throw ShapeError("assemblage needs dim, outcomes and inputs all >= 1");
  if (blocks_.size() != static_cast<std::size_t>(n_outcomes) * n_inputs)
    throw ShapeError("assemblage block count does not match the grid shape");
  for (const auto& b : blocks_) {
    if (b.dim() != dim)
      throw ShapeError("assemblage blocks must share one dimension");
  }
}

Assemblage Assemblage::from_grid(
    const std::vector<std::vector<HermitianOperator>>& by_input) {
  if (by_input.empty() || by_input[0].empty())
    throw ShapeError("assemblage grid must be non-empty");
  const int n_inputs = static_cast<int>(by_input.size());
  const int n_outcomes = static_cast<int>(by_input[0].size());
  std::vector<HermitianOperator> blocks;
  blocks.reserve(static_cast<std::size_t>(n_inputs) * n_outcomes);
  for (const auto& input : by_input) {
    if (static_cast<int>(input.size()) != n_outcomes)
      throw ShapeError("every input must list the same number of outcomes");
    for (const auto& b : input) blocks.push_back(b);
  }
  return Assemblage(by_input[0][0].dim(), n_outcomes, n_inputs,
                    std::move(blocks));
}

const HermitianOperator& Assemblage::block(int outcome, int input) const {
  if (outcome < 0 || outcome >= n_outcomes_ || input < 0 ||
      input >= n_inputs_)
    throw ShapeError("assemblage block index out of range");
  return blocks_[static_cast<std::size_t>(input) * n_outcomes_ + outcome];
}

namespace {

HermitianOperator input_marginal(const Assemblage& sigma, int input) {
  HermitianOperator sum(sigma.dim());
  for (int n = 0; n < sigma.n_outcomes(); ++n)
    sum = sum + sigma.block(n, input);
  return sum;
}

}  // namespace

ValidationReport validate(const Assemblage& sigma, double eps) {
  ValidationReport report;
  report.epsilon = eps;

  report.min_block_eigenvalue = std::numeric_limits<double>::infinity();
  for (int r = 0; r < sigma.n_inputs(); ++r) {
    for (int n = 0; n < sigma.n_outcomes(); ++n) {
      const double ev = min_eigenvalue(sigma.block(n, r));
      if (ev < report.min_block_eigenvalue) {
        report.min_block_eigenvalue = ev;
        report.min_block_outcome = n;
        report.min_block_input = r;
      }
    }
  }

  std::vector<HermitianOperator> marginals;
  for (int r = 0; r < sigma.n_inputs(); ++r)
    marginals.push_back(input_marginal(sigma, r));
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    for (std::size_t j = i + 1; j < marginals.size(); ++j) {
      report.max_marginal_gap = std::max(
          report.max_marginal_gap, (marginals[i] - marginals[j]).frobenius_norm());
    }
  }

  report.marginal_trace_error = std::abs(marginals[0].trace() - 1.0);

  report.pass = report.min_block_eigenvalue >= -eps &&
                report.max_marginal_gap <= eps &&
                report.marginal_trace_error <= eps;
  return report;
}

void require_valid(const Assemblage& sigma, double eps) {
  const ValidationReport report = validate(sigma, eps);
  if (report.pass) return;
  std::ostringstream msg;
  msg << "assemblage fails validation at eps=" << eps
      << ": min block eigenvalue " << report.min_block_eigenvalue
      << " (outcome " << report.min_block_outcome << ", input "
      << report.min_block_input << "), marginal gap "
      << report.max_marginal_gap << ", marginal trace error "
      << report.marginal_trace_error;
  throw ValidationError(msg.str());
}

HermitianOperator marginal(const Assemblage& sigma) {
  return input_marginal(sigma, 0);
}

Assemblage from_state_and_measurements(
    const HermitianOperator& rho_ab,
    const std::vector<std::vector<HermitianOperator>>& measurements,
    double eps) {
  if (measurements.empty() || measurements[0].empty())
    throw ShapeError("measurement grid must be non-empty");
  const int dA = measurements[0][0].dim();
  if (rho_ab.dim() % dA != 0)
    throw ShapeError("state dimension is not a multiple of the measurement "
                     "dimension");
  const int dB = rho_ab.dim() / dA;
  const int n_outcomes = static_cast<int>(measurements[0].size());

  if (min_eigenvalue(rho_ab) < -eps)
    throw ValidationError("shared state is not PSD");
  if (std::abs(rho_ab.trace() - 1.0) > eps)
    throw ValidationError("shared state does not have unit trace");
  for (const auto& input : measurements) {
    if (static_cast<int>(input.size()) != n_outcomes)
      throw ShapeError("every measurement input must list the same number "
                       "of outcomes");
    HermitianOperator sum(dA);
    for (const auto& effect : input) {
      if (effect.dim() != dA)
        throw ShapeError("measurement effects must share one dimension");
      if (min_eigenvalue(effect) < -eps)
        throw ValidationError("measurement effect is not PSD");
      sum = sum + effect;
    }
    if ((sum - HermitianOperator::identity(dA)).frobenius_norm() > eps)
      throw ValidationError("measurement effects do not sum to identity");
  }

  std::vector<std::vector<HermitianOperator>> by_input;
  by_input.reserve(measurements.size());
  for (const auto& input : measurements) {
    std::vector<HermitianOperator> row;
    row.reserve(input.size());
    for (const auto& effect : input) {
      Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dB, dB);
      for (int b = 0; b < dB; ++b) {
        for (int b2 = 0; b2 < dB; ++b2) {
          Complex sum = 0.0;
          for (int a = 0; a < dA; ++a) {
            for (int a2 = 0; a2 < dA; ++a2) {
              sum += effect.mat()(a, a2) * rho_ab.mat()(a2 * dB + b, a * dB + b2);
            }
          }
          out(b, b2) = sum;
        }
      }
      row.push_back(HermitianOperator::from_matrix(out, 10.0 * eps));
    }
    by_input.push_back(std::move(row));
  }
  return Assemblage::from_grid(by_input);
}

Realization canonical_realization(const Assemblage& sigma, double eps) {
  const int d = sigma.dim();
  const HermitianOperator rho = marginal(sigma);
  const EigenFrame frame = support_frame(rho, eps);
  const int k = frame.size();
  if (k == 0) throw ValidationError("marginal has empty support");

  // Blocks that stick out of the marginal's support cannot come from any
  // measurement on a purification, so refuse early.
  Eigen::MatrixXcd proj =
      frame.eigenvectors * frame.eigenvectors.adjoint();
  for (int r = 0; r < sigma.n_inputs(); ++r) {
    for (int n = 0; n < sigma.n_outcomes(); ++n) {
      const Eigen::MatrixXcd& b = sigma.block(n, r).mat();
      if ((b - proj * b * proj).norm() > 10.0 * eps) {
        std::ostringstream msg;
        msg << "block (" << n << "|" << r
            << ") leaks outside the marginal support";
        throw ValidationError(msg.str());
      }
    }
  }

  Realization out;
  out.state_vector = Eigen::VectorXcd::Zero(d * d);
  for (int i = 0; i < k; ++i) {
    const Eigen::VectorXcd v = frame.eigenvectors.col(i);
    const double amp = std::sqrt(frame.eigenvalues[i]);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        out.state_vector[a * d + b] += amp * v[a] * v[b];
  }

  // Whiten in the marginal's eigenbasis: M = rho^-1/2 sigma^T rho^-1/2
  // with the transpose taken in that basis and inverses on the support.
  Eigen::VectorXd inv_sqrt(k);
  for (int i = 0; i < k; ++i) inv_sqrt[i] = 1.0 / std::sqrt(frame.eigenvalues[i]);
  const Eigen::MatrixXcd v = frame.eigenvectors;
  const Eigen::MatrixXcd off_support =
      (Eigen::MatrixXcd::Identity(d, d) - proj) /
      static_cast<double>(sigma.n_outcomes());

  out.measurements.resize(sigma.n_inputs());
  for (int r = 0; r < sigma.n_inputs(); ++r) {
    for (int n = 0; n < sigma.n_outcomes(); ++n) {
      Eigen::MatrixXcd restricted =
          v.adjoint() * sigma.block(n, r).mat() * v;
      Eigen::MatrixXcd whitened =
          inv_sqrt.asDiagonal() * restricted.transpose() *
          inv_sqrt.asDiagonal();
      Eigen::MatrixXcd effect = v * whitened * v.adjoint() + off_support;
      out.measurements[r].push_back(
          HermitianOperator::from_matrix(effect, 10.0 * eps));
    }
  }
  return out;
}

Assemblage embed(const Assemblage& sigma, int n_outcomes, int n_inputs,
                 int dim) {
  if (n_outcomes < sigma.n_outcomes() || n_inputs < sigma.n_inputs() ||
      dim < sigma.dim())
    throw ShapeError("embed target shape must not shrink any axis");

  std::vector<std::vector<HermitianOperator>> by_input;
  by_input.reserve(n_inputs);
  for (int r = 0; r < n_inputs; ++r) {
    const int src = std::min(r, sigma.n_inputs() - 1);
    std::vector<HermitianOperator> row;
    row.reserve(n_outcomes);
    for (int n = 0; n < n_outcomes; ++n) {
      if (n < sigma.n_outcomes())
        row.push_back(sigma.block(n, src).padded(dim));
      else
        row.push_back(HermitianOperator(dim));
    }
    by_input.push_back(std::move(row));
  }
  return Assemblage::from_grid(by_input);
}

}  // namespace steer
