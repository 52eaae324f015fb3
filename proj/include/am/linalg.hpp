#ifndef AMTK_LINALG_HPP
#define AMTK_LINALG_HPP

#include <Eigen/Dense>

#include "am/errors.hpp"
#include "am/rng.hpp"

namespace am {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Plain lower-triangular Cholesky. Throws NotPositiveDefinite on a pivot <= 0.
Matrix cholesky_lower(const Matrix& m);

double frobenius_norm(const Matrix& m);

// Symmetric positive-definite matrix with a certified eigenvalue floor.
//
// `certified_floor` is a lower bound on the minimum eigenvalue that the
// *producer* of the matrix can prove (e.g. kappa for the regularized
// adaptation covariance, which is a convex combination of matrices >= kappa*I).
// Floors propagate by exact-arithmetic reasoning; every place a floor is
// checked numerically allows a 1e-12 slack for floating-point rounding.
//
// Construction symmetrizes the input as (m + m^T)/2 and factors it eagerly,
// so a successfully constructed SpdMatrix always has a valid Cholesky factor.
// Instances are immutable and safe to share across threads.
class SpdMatrix {
 public:
  SpdMatrix(Matrix m, double certified_floor);

  static SpdMatrix identity(int d, double scale = 1.0);

  // Floor derived from an eigen-decomposition (for user-supplied matrices).
  static SpdMatrix from_matrix(const Matrix& m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double certified_floor() const { return certified_floor_; }
  const Matrix& cholesky() const { return chol_; }

  double log_det() const;
  double frobenius_norm() const { return am::frobenius_norm(m_); }
  double min_eigenvalue() const;  // recomputed, for verification only

  SpdMatrix scaled(double a) const;

 private:
  Matrix m_;
  Matrix chol_;
  double certified_floor_;
};

// mean + L z with z drawn from rng; deterministic given the stream state.
Vector sample_gaussian(const Vector& mean, const SpdMatrix& cov, RngStream& rng);

// log N(x; mean, cov) including the normalizing constant.
double log_gaussian_density(const Vector& x, const Vector& mean, const SpdMatrix& cov);

}  // namespace am

#endif  // AMTK_LINALG_HPP
