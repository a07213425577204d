#include "steer/extremality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace steer {

namespace {

const Complex kImag(0.0, 1.0);

std::size_t grid_index(const Assemblage& sigma, int outcome, int input) {
  return static_cast<std::size_t>(input) * sigma.n_outcomes() + outcome;
}

std::vector<HermitianOperator> zero_grid(const Assemblage& sigma) {
  return std::vector<HermitianOperator>(
      static_cast<std::size_t>(sigma.n_outcomes()) * sigma.n_inputs(),
      HermitianOperator(sigma.dim()));
}

// Accumulates coefficient * element into a block grid.
void add_elements(const Assemblage& sigma,
                  const std::vector<OperatorBasisElement>& elements,
                  const Eigen::VectorXd& coeffs,
                  std::vector<HermitianOperator>& blocks) {
  for (std::size_t j = 0; j < elements.size(); ++j) {
    const auto& e = elements[j];
    auto& slot = blocks[grid_index(sigma, e.outcome, e.input)];
    slot = slot + coeffs[static_cast<int>(j)] * e.op;
  }
}

// Tries to grow a solution living on a subset of inputs into a direction
// on the whole grid: every remaining input must reproduce the shared sum
// from inside its own support basis.
std::optional<Perturbation> extend_to_all_inputs(
    const Assemblage& sigma, const ConstraintSystem& sys,
    const Eigen::VectorXd& coeffs, double eps) {
  std::vector<HermitianOperator> blocks = zero_grid(sigma);
  add_elements(sigma, sys.elements, coeffs, blocks);

  HermitianOperator shared(sigma.dim());
  for (int n = 0; n < sigma.n_outcomes(); ++n)
    shared = shared + blocks[grid_index(sigma, n, sys.inputs.front())];
  const Eigen::VectorXd target = hermitian_to_real_vec(shared);
  const double scale = std::max(1.0, target.norm());

  for (int r = 0; r < sigma.n_inputs(); ++r) {
    if (std::find(sys.inputs.begin(), sys.inputs.end(), r) !=
        sys.inputs.end())
      continue;
    const auto elements = hermitian_basis_for_input(sigma, r, eps);
    const Eigen::MatrixXd a = stack_elements(elements, sigma.dim());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(eps);
    const Eigen::VectorXd c = svd.solve(target);
    if ((a * c - target).norm() > 10.0 * eps * scale) return std::nullopt;
    add_elements(sigma, elements, c, blocks);
  }
  return Perturbation::from_blocks(sigma.dim(), sigma.n_outcomes(),
                                   sigma.n_inputs(), std::move(blocks));
}

}  // namespace

std::vector<OperatorBasisElement> hermitian_basis_for_input(
    const Assemblage& sigma, int input, double eps) {
  std::vector<OperatorBasisElement> elements;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int n = 0; n < sigma.n_outcomes(); ++n) {
    const EigenFrame frame = support_frame(sigma.block(n, input), eps);
    for (int a = 0; a < frame.size(); ++a) {
      const Eigen::VectorXcd va = frame.eigenvectors.col(a);
      elements.push_back(
          {n, input, BasisKind::kDiagonal, a, -1,
           HermitianOperator::from_matrix(va * va.adjoint())});
      for (int b = 0; b < a; ++b) {
        const Eigen::VectorXcd vb = frame.eigenvectors.col(b);
        const Eigen::MatrixXcd cross = va * vb.adjoint();
        elements.push_back(
            {n, input, BasisKind::kSymmetric, a, b,
             HermitianOperator::from_matrix(inv_sqrt2 *
                                            (cross + cross.adjoint()))});
        elements.push_back(
            {n, input, BasisKind::kAntisymmetric, a, b,
             HermitianOperator::from_matrix(
                 kImag * inv_sqrt2 * (cross - cross.adjoint()))});
      }
    }
  }
  return elements;
}

Eigen::MatrixXd stack_elements(
    const std::vector<OperatorBasisElement>& elements, int dim) {
  Eigen::MatrixXd m(dim * dim, static_cast<int>(elements.size()));
  for (std::size_t j = 0; j < elements.size(); ++j)
    m.col(static_cast<int>(j)) = hermitian_to_real_vec(elements[j].op);
  return m;
}

std::optional<Perturbation> zero_marginal_witness(const Assemblage& sigma,
                                                  int input, double eps) {
  const auto elements = hermitian_basis_for_input(sigma, input, eps);
  if (elements.empty()) return std::nullopt;
  const Eigen::MatrixXd a = stack_elements(elements, sigma.dim());
  const auto ns = real_nullspace(a, eps);
  if (ns.empty()) return std::nullopt;
  return perturbation_from_coefficients(sigma, elements, ns.front());
}

ConstraintSystem cross_input_system(const Assemblage& sigma,
                                    std::vector<int> inputs, double eps) {
  if (inputs.empty())
    throw ShapeError("constraint system needs at least one input");
  std::sort(inputs.begin(), inputs.end());
  inputs.erase(std::unique(inputs.begin(), inputs.end()), inputs.end());
  for (int r : inputs)
    if (r < 0 || r >= sigma.n_inputs())
      throw ShapeError("constraint system input out of range");

  ConstraintSystem sys;
  sys.inputs = inputs;
  std::vector<std::pair<int, int>> spans;
  for (int r : inputs) {
    const auto elems = hermitian_basis_for_input(sigma, r, eps);
    const int begin = static_cast<int>(sys.elements.size());
    sys.elements.insert(sys.elements.end(), elems.begin(), elems.end());
    spans.emplace_back(begin, static_cast<int>(sys.elements.size()));
  }

  const int d2 = sigma.dim() * sigma.dim();
  const int cols = static_cast<int>(sys.elements.size());
  const int rows = static_cast<int>(inputs.size() - 1) * d2 + 1;
  sys.matrix = Eigen::MatrixXd::Zero(rows, cols);

  for (std::size_t j = 1; j < inputs.size(); ++j) {
    const int row0 = static_cast<int>(j - 1) * d2;
    for (int c = spans[0].first; c < spans[0].second; ++c)
      sys.matrix.block(row0, c, d2, 1) =
          hermitian_to_real_vec(sys.elements[c].op);
    for (int c = spans[j].first; c < spans[j].second; ++c)
      sys.matrix.block(row0, c, d2, 1) =
          -hermitian_to_real_vec(sys.elements[c].op);
  }
  const int trace_row = rows - 1;
  for (int c = spans[0].first; c < spans[0].second; ++c)
    sys.matrix(trace_row, c) = sys.elements[c].op.trace();
  return sys;
}

Eigen::MatrixXd pairwise_constraint_matrix(const Assemblage& sigma,
                                           int input_a, int input_b,
                                           double eps) {
  return cross_input_system(sigma, {input_a, input_b}, eps).matrix;
}

Perturbation perturbation_from_coefficients(
    const Assemblage& sigma,
    const std::vector<OperatorBasisElement>& elements,
    const Eigen::VectorXd& coeffs) {
  if (static_cast<std::size_t>(coeffs.size()) != elements.size())
    throw ShapeError("coefficient count does not match the element list");
  std::vector<HermitianOperator> blocks = zero_grid(sigma);
  add_elements(sigma, elements, coeffs, blocks);
  return Perturbation::from_blocks(sigma.dim(), sigma.n_outcomes(),
                                   sigma.n_inputs(), std::move(blocks));
}

ExtremalityReport is_extremal(const Assemblage& sigma, double eps) {
  const int n_inputs = sigma.n_inputs();
  ExtremalityReport report;

  if (n_inputs == 1) {
    report.stage = "single_input";
    int nonzero = 0;
    int last_rank = 0;
    for (int n = 0; n < sigma.n_outcomes(); ++n) {
      const int rank = support_frame(sigma.block(n, 0), eps).size();
      if (rank > 0) {
        ++nonzero;
        last_rank = rank;
      }
    }
    if (nonzero == 1 && last_rank == 1) {
      report.extremal = true;
      return report;
    }
    const ConstraintSystem sys = cross_input_system(sigma, {0}, eps);
    const auto ns = real_nullspace(sys.matrix, eps);
    if (ns.empty())
      throw NumericalError(
          "single-input grid admits no direction yet is not rank one");
    report.witness =
        perturbation_from_coefficients(sigma, sys.elements, ns.front());
    return report;
  }

  for (int r = 0; r < n_inputs; ++r) {
    if (auto witness = zero_marginal_witness(sigma, r, eps)) {
      report.stage = "zero_marginal";
      report.witness = std::move(witness);
      return report;
    }
  }

  std::optional<ConstraintSystem> dependent;
  std::vector<Eigen::VectorXd> dependent_ns;
  for (int r1 = 0; r1 < n_inputs; ++r1) {
    for (int r2 = r1 + 1; r2 < n_inputs; ++r2) {
      ConstraintSystem sys = cross_input_system(sigma, {r1, r2}, eps);
      auto ns = real_nullspace(sys.matrix, eps);
      if (ns.empty()) {
        // Any valid direction solves this pair's system, so it vanishes
        // here; its shared sum is then zero on every remaining input, and
        // those directions were ruled out above.
        report.extremal = true;
        report.stage = "cross_input_pair";
        return report;
      }
      if (!dependent) {
        dependent = std::move(sys);
        dependent_ns = std::move(ns);
      }
    }
  }

  for (const auto& v : dependent_ns) {
    auto candidate = extend_to_all_inputs(sigma, *dependent, v, eps);
    if (candidate && is_valid_perturbation(*candidate, sigma, eps)) {
      report.stage = "cross_input_pair";
      report.witness = std::move(candidate);
      return report;
    }
  }

  // Pair extensions are a shortcut, not a decision: a decomposable grid
  // can defeat every candidate. The system over all inputs settles it.
  std::vector<int> all_inputs(n_inputs);
  std::iota(all_inputs.begin(), all_inputs.end(), 0);
  const ConstraintSystem full = cross_input_system(sigma, all_inputs, eps);
  const auto ns = real_nullspace(full.matrix, eps);
  report.stage = "pairs_exhausted";
  if (ns.empty()) {
    report.extremal = true;
  } else {
    report.witness =
        perturbation_from_coefficients(sigma, full.elements, ns.front());
  }
  return report;
}

ExtremalityReport is_extremal_direct(const Assemblage& sigma, double eps) {
  const int d = sigma.dim();
  const int d2 = d * d;
  const int n_outcomes = sigma.n_outcomes();
  const int n_inputs = sigma.n_inputs();
  const int cols = n_inputs * n_outcomes * d2;

  // Orthonormal Hermitian basis matching hermitian_to_real_vec coords.
  std::vector<Eigen::MatrixXcd> basis;
  basis.reserve(d2);
  for (int q = 0; q < d2; ++q) {
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(d2);
    unit[q] = 1.0;
    basis.push_back(hermitian_from_real_vec(unit, d).mat());
  }

  const auto offset = [&](int outcome, int input) {
    return (input * n_outcomes + outcome) * d2;
  };

  struct KernelEntry {
    int outcome;
    int input;
    Eigen::MatrixXcd vectors;
  };
  std::vector<KernelEntry> kernels;
  int kernel_rows = 0;
  for (int r = 0; r < n_inputs; ++r) {
    for (int n = 0; n < n_outcomes; ++n) {
      const EigenFrame frame = hermitian_eig(sigma.block(n, r));
      std::vector<int> null_idx;
      for (int i = 0; i < frame.size(); ++i)
        if (frame.eigenvalues[i] <= eps) null_idx.push_back(i);
      if (null_idx.empty()) continue;
      Eigen::MatrixXcd k(d, static_cast<int>(null_idx.size()));
      for (std::size_t i = 0; i < null_idx.size(); ++i)
        k.col(static_cast<int>(i)) = frame.eigenvectors.col(null_idx[i]);
      kernel_rows += 2 * d * static_cast<int>(null_idx.size());
      kernels.push_back({n, r, std::move(k)});
    }
  }

  const int rows = (n_inputs - 1) * d2 + 1 + kernel_rows;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);

  for (int r = 1; r < n_inputs; ++r) {
    const int row0 = (r - 1) * d2;
    for (int i = 0; i < d2; ++i) {
      for (int n = 0; n < n_outcomes; ++n) {
        m(row0 + i, offset(n, 0) + i) += 1.0;
        m(row0 + i, offset(n, r) + i) -= 1.0;
      }
    }
  }

  // The first d real coordinates of a block are its diagonal entries, so
  // this row is the trace of the first input's sum.
  const int trace_row = (n_inputs - 1) * d2;
  for (int n = 0; n < n_outcomes; ++n)
    for (int j = 0; j < d; ++j) m(trace_row, offset(n, 0) + j) = 1.0;

  int row = trace_row + 1;
  for (const auto& entry : kernels) {
    const int off = offset(entry.outcome, entry.input);
    for (int i = 0; i < entry.vectors.cols(); ++i) {
      for (int q = 0; q < d2; ++q) {
        const Eigen::VectorXcd image = basis[q] * entry.vectors.col(i);
        for (int p = 0; p < d; ++p) {
          m(row + 2 * p, off + q) = image[p].real();
          m(row + 2 * p + 1, off + q) = image[p].imag();
        }
      }
      row += 2 * d;
    }
  }

  const auto ns = real_nullspace(m, eps);
  ExtremalityReport report;
  report.stage = "direct";
  report.extremal = ns.empty();
  if (!ns.empty()) {
    std::vector<HermitianOperator> blocks;
    blocks.reserve(static_cast<std::size_t>(n_inputs) * n_outcomes);
    for (int r = 0; r < n_inputs; ++r)
      for (int n = 0; n < n_outcomes; ++n)
        blocks.push_back(
            hermitian_from_real_vec(ns.front().segment(offset(n, r), d2), d));
    report.witness = Perturbation::from_blocks(d, n_outcomes, n_inputs,
                                               std::move(blocks));
  }
  return report;
}

}  // namespace steer
