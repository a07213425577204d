#include "steer/numerics.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace steer {

namespace {

constexpr double kSignFixFloor = 1e-9;

}  // namespace

Eigen::MatrixXcd symmetrized(const Eigen::MatrixXcd& m) {
  return 0.5 * (m + m.adjoint());
}

HermitianOperator::HermitianOperator(int dim)
    : mat_(Eigen::MatrixXcd::Zero(dim, dim)) {
  if (dim < 1) throw ShapeError("operator dimension must be >= 1");
}

HermitianOperator HermitianOperator::from_matrix(const Eigen::MatrixXcd& m,
                                                 double tol) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw ShapeError("operator matrix must be square and non-empty");
  const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 2.0 * tol) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian: max |a(i,j) - conj(a(j,i))| = " << dev;
    throw ValidationError(msg.str());
  }
  return HermitianOperator(symmetrized(m), Unchecked{});
}

HermitianOperator HermitianOperator::projector(const Eigen::VectorXcd& v) {
  if (v.size() < 1) throw ShapeError("projector vector must be non-empty");
  return HermitianOperator(symmetrized(v * v.adjoint()), Unchecked{});
}

HermitianOperator HermitianOperator::identity(int dim) {
  if (dim < 1) throw ShapeError("operator dimension must be >= 1");
  return HermitianOperator(Eigen::MatrixXcd::Identity(dim, dim), Unchecked{});
}

HermitianOperator HermitianOperator::padded(int new_dim) const {
  if (new_dim < dim()) throw ShapeError("padded dimension must not shrink");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(new_dim, new_dim);
  out.topLeftCorner(dim(), dim()) = mat_;
  return HermitianOperator(std::move(out), Unchecked{});
}

HermitianOperator operator+(const HermitianOperator& a,
                            const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw ShapeError("operator dimensions differ");
  return HermitianOperator(symmetrized(a.mat_ + b.mat_),
                           HermitianOperator::Unchecked{});
}

HermitianOperator operator-(const HermitianOperator& a,
                            const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw ShapeError("operator dimensions differ");
  return HermitianOperator(symmetrized(a.mat_ - b.mat_),
                           HermitianOperator::Unchecked{});
}

HermitianOperator operator*(double s, const HermitianOperator& a) {
  return HermitianOperator(s * a.mat_, HermitianOperator::Unchecked{});
}

HermitianOperator operator-(const HermitianOperator& a) {
  return HermitianOperator(-a.mat_, HermitianOperator::Unchecked{});
}

HermitianOperator EigenFrame::reconstruct(int dim) const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < size(); ++i) {
    out += eigenvalues[i] * (eigenvectors.col(i) * eigenvectors.col(i).adjoint());
  }
  return HermitianOperator::from_matrix(out, 1.0);
}

EigenFrame hermitian_eig(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.mat());
  if (solver.info() != Eigen::Success)
    throw NumericalError("eigendecomposition did not converge");
  const int d = h.dim();
  EigenFrame frame;
  frame.eigenvalues.resize(d);
  frame.eigenvectors.resize(d, d);
  // Eigen sorts ascending; flip to descending.
  for (int i = 0; i < d; ++i) {
    frame.eigenvalues[i] = solver.eigenvalues()[d - 1 - i];
    frame.eigenvectors.col(i) = solver.eigenvectors().col(d - 1 - i);
  }
  return frame;
}

EigenFrame support_frame(const HermitianOperator& h, double eps) {
  EigenFrame full = hermitian_eig(h);
  const int d = full.size();
  if (d > 0 && full.eigenvalues[d - 1] < -eps) {
    std::ostringstream msg;
    msg << "operator is not PSD: min eigenvalue " << full.eigenvalues[d - 1]
        << " below -" << eps;
    throw ValidationError(msg.str());
  }
  int keep = 0;
  while (keep < d && full.eigenvalues[keep] > eps) ++keep;
  EigenFrame out;
  out.eigenvalues = full.eigenvalues.head(keep);
  out.eigenvectors = full.eigenvectors.leftCols(keep);
  return out;
}

Eigen::VectorXd hermitian_to_real_vec(const HermitianOperator& h) {
  const int d = h.dim();
  const double root2 = std::sqrt(2.0);
  Eigen::VectorXd v(d * d);
  int k = 0;
  for (int i = 0; i < d; ++i) v[k++] = h.mat()(i, i).real();
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      v[k++] = root2 * h.mat()(i, j).real();
      v[k++] = root2 * h.mat()(i, j).imag();
    }
  }
  return v;
}

HermitianOperator hermitian_from_real_vec(const Eigen::VectorXd& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim)
    throw ShapeError("coordinate vector length must be dim^2");
  const double inv_root2 = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd m(dim, dim);
  int k = 0;
  for (int i = 0; i < dim; ++i) m(i, i) = Complex(v[k++], 0.0);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const double re = v[k++] * inv_root2;
      const double im = v[k++] * inv_root2;
      m(i, j) = Complex(re, im);
      m(j, i) = Complex(re, -im);
    }
  }
  return HermitianOperator::from_matrix(m, 1.0);
}

std::vector<Eigen::VectorXd> real_nullspace(const Eigen::MatrixXd& m,
                                            double eps) {
  const Eigen::Index cols = m.cols();
  std::vector<Eigen::VectorXd> out;
  if (cols == 0) return out;
  if (m.rows() == 0) {
    // No constraints at all: the whole space is null.
    for (Eigen::Index j = 0; j < cols; ++j)
      out.push_back(Eigen::VectorXd::Unit(cols, j));
    return out;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  const double threshold = eps * (smax > 0.0 ? smax : 1.0);

  // Walk V columns from the back so singular values come out ascending.
  for (Eigen::Index j = cols - 1; j >= 0; --j) {
    const double s = j < sv.size() ? sv[j] : 0.0;
    if (s > threshold) break;
    Eigen::VectorXd v = svd.matrixV().col(j);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (std::abs(v[i]) > kSignFixFloor) {
        if (v[i] < 0.0) v = -v;
        break;
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

double min_eigenvalue(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      h.mat(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eigendecomposition did not converge");
  return solver.eigenvalues()[0];
}

}  // namespace steer
