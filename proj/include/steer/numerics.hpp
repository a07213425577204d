#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "steer/errors.hpp"

namespace steer {

using Complex = std::complex<double>;

// Tolerance used throughout for rank decisions, positivity slack and
// no-signalling gaps unless the caller overrides it.
inline constexpr double kDefaultEpsilon = 1e-8;

// Returns (m + m^dagger) / 2.
Eigen::MatrixXcd symmetrized(const Eigen::MatrixXcd& m);

// Square complex matrix that is Hermitian by construction. Every factory
// symmetrizes, so entries always satisfy a(i,j) == conj(a(j,i)) exactly;
// arithmetic between operators preserves that.
class HermitianOperator {
 public:
  // Zero operator of the given dimension.
  explicit HermitianOperator(int dim);

  // Checked entry point: rejects matrices whose anti-Hermitian part has
  // max entry magnitude above `tol`, then symmetrizes the rest away.
  static HermitianOperator from_matrix(const Eigen::MatrixXcd& m,
                                       double tol = kDefaultEpsilon);

  // v v^dagger. Not normalized; pass a unit vector to get a projector.
  static HermitianOperator projector(const Eigen::VectorXcd& v);

  static HermitianOperator identity(int dim);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Eigen::MatrixXcd& mat() const { return mat_; }

  double trace() const { return mat_.trace().real(); }
  double frobenius_norm() const { return mat_.norm(); }

  // Copies this operator into the top-left corner of a new_dim x new_dim
  // zero matrix.
  HermitianOperator padded(int new_dim) const;

  friend HermitianOperator operator+(const HermitianOperator& a,
                                     const HermitianOperator& b);
  friend HermitianOperator operator-(const HermitianOperator& a,
                                     const HermitianOperator& b);
  friend HermitianOperator operator*(double s, const HermitianOperator& a);
  friend HermitianOperator operator-(const HermitianOperator& a);

 private:
  struct Unchecked {};
  HermitianOperator(Eigen::MatrixXcd m, Unchecked) : mat_(std::move(m)) {}

  Eigen::MatrixXcd mat_;
};

// Eigenvalues in descending order with matching orthonormal eigenvector
// columns. A support frame keeps only the part above the rank cutoff.
struct EigenFrame {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;

  int size() const { return static_cast<int>(eigenvalues.size()); }

  // Sum of eigenvalue * |v><v| over the frame.
  HermitianOperator reconstruct(int dim) const;
};

// Full spectral decomposition, eigenvalues descending.
EigenFrame hermitian_eig(const HermitianOperator& h);

// Eigenpairs with eigenvalue > eps. Throws ValidationError if any
// eigenvalue is below -eps, since the input is then not PSD.
EigenFrame support_frame(const HermitianOperator& h, double eps);

// Isometry from Hermitian d x d operators onto R^(d^2): diagonal entries
// first, then for each i < j (row major) sqrt(2) * Re a(i,j) and
// sqrt(2) * Im a(i,j). Euclidean norm of the image equals the Frobenius
// norm, and dot products of images equal Re tr(A B).
Eigen::VectorXd hermitian_to_real_vec(const HermitianOperator& h);

// Inverse of hermitian_to_real_vec.
HermitianOperator hermitian_from_real_vec(const Eigen::VectorXd& v, int dim);

// Orthonormal basis of the right nullspace of m, via SVD. A direction
// counts as null when its singular value is <= eps * (largest singular
// value, or 1 for a zero matrix). Vectors come back ordered by ascending
// singular value, each sign-fixed so its first non-negligible component
// is positive, which makes the result reproducible run to run.
std::vector<Eigen::VectorXd> real_nullspace(const Eigen::MatrixXd& m,
                                            double eps);

double min_eigenvalue(const HermitianOperator& h);

}  // namespace steer
