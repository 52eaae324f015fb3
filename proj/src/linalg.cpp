#include "am/linalg.hpp"

#include <cmath>
#include <string>

namespace am {

Matrix cholesky_lower(const Matrix& m) {
  const Eigen::Index d = m.rows();
  if (m.cols() != d) throw DimensionMismatch("cholesky: matrix is not square");
  Matrix L = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double sum = m(i, j);
      for (Eigen::Index k = 0; k < j; ++k) sum -= L(i, k) * L(j, k);
      if (i == j) {
        if (!(sum > 0.0)) {
          throw NotPositiveDefinite("cholesky: pivot " + std::to_string(i) +
                                    " is " + std::to_string(sum));
        }
        L(i, i) = std::sqrt(sum);
      } else {
        L(i, j) = sum / L(j, j);
      }
    }
  }
  return L;
}

double frobenius_norm(const Matrix& m) { return std::sqrt(m.squaredNorm()); }

SpdMatrix::SpdMatrix(Matrix m, double certified_floor)
    : certified_floor_(certified_floor) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw DimensionMismatch("SpdMatrix: matrix must be square, d >= 1");
  if (!(certified_floor >= 0.0))
    throw std::invalid_argument("SpdMatrix: certified_floor must be >= 0");
  if (!m.allFinite()) throw std::invalid_argument("SpdMatrix: non-finite entries");
  // Symmetrization absorbs floating-point drift from long recursions, not
  // structurally asymmetric input.
  const double asym = am::frobenius_norm(m - m.transpose());
  if (asym > 1e-8 * std::max(1.0, am::frobenius_norm(m)))
    throw std::invalid_argument("SpdMatrix: input is not symmetric (relative asymmetry " +
                                std::to_string(asym) + ")");
  m_ = 0.5 * (m + m.transpose());
  chol_ = cholesky_lower(m_);
}

SpdMatrix SpdMatrix::identity(int d, double scale) {
  return SpdMatrix(scale * Matrix::Identity(d, d), scale);
}

SpdMatrix SpdMatrix::from_matrix(const Matrix& m) {
  Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double slack = 1e-12 * std::max(1.0, am::frobenius_norm(sym));
  const double floor = lo - slack;
  if (!(floor > 0.0))
    throw NotPositiveDefinite("SpdMatrix::from_matrix: min eigenvalue " +
                              std::to_string(lo) + " is not positive");
  return SpdMatrix(std::move(sym), floor);
}

double SpdMatrix::log_det() const {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < chol_.rows(); ++i) sum += std::log(chol_(i, i));
  return 2.0 * sum;
}

double SpdMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

SpdMatrix SpdMatrix::scaled(double a) const {
  if (!(a > 0.0)) throw std::invalid_argument("SpdMatrix::scaled: factor must be > 0");
  return SpdMatrix(a * m_, a * certified_floor_);
}

Vector sample_gaussian(const Vector& mean, const SpdMatrix& cov, RngStream& rng) {
  if (mean.size() != cov.dim())
    throw DimensionMismatch("sample_gaussian: mean/cov dimension mismatch");
  return mean + cov.cholesky() * rng.gaussian_vector(cov.dim());
}

double log_gaussian_density(const Vector& x, const Vector& mean, const SpdMatrix& cov) {
  if (x.size() != mean.size() || x.size() != cov.dim())
    throw DimensionMismatch("log_gaussian_density: dimension mismatch");
  const Vector y = cov.cholesky().triangularView<Eigen::Lower>().solve(x - mean);
  const double d = static_cast<double>(x.size());
  return -0.5 * (d * std::log(2.0 * M_PI) + cov.log_det() + y.squaredNorm());
}

}  // namespace am
