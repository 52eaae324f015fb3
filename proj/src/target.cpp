#include "am/target.hpp"

#include <algorithm>
#include <cmath>

namespace am {

Vector finite_difference_gradient(const TargetDensity& t, const Vector& x, double h) {
  Vector g(x.size());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    xp[i] = xi + h;
    const double up = t.log_density(xp);
    xp[i] = xi - h;
    const double dn = t.log_density(xp);
    xp[i] = xi;
    g[i] = (up - dn) / (2.0 * h);
  }
  return g;
}

Vector TargetDensity::grad_log_density(const Vector& x) const {
  return finite_difference_gradient(*this, x, kFdStep);
}

std::vector<Vector> TargetDensity::mode_search_starts() const {
  return {Vector::Zero(dim())};
}

double numeric_mode_search(const TargetDensity& t, const std::vector<Vector>& starts) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Vector& s : starts) {
    Vector x = s;
    double fx = t.log_density(x);
    for (int iter = 0; iter < 500; ++iter) {
      const Vector g = t.grad_log_density(x);
      const double gn = g.norm();
      if (!(gn > 1e-12)) break;
      // Backtracking ascent along the gradient.
      double step = 1.0 / std::max(1.0, gn);
      bool moved = false;
      for (int bt = 0; bt < 40; ++bt) {
        const Vector cand = x + step * g;
        const double fc = t.log_density(cand);
        if (fc > fx) {
          x = cand;
          fx = fc;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    best = std::max(best, fx);
  }
  return best;
}

double TargetDensity::sup_log_density() const {
  return numeric_mode_search(*this, mode_search_starts());
}

GaussianTarget::GaussianTarget(Vector mean, SpdMatrix cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (mean_.size() != cov_.dim())
    throw DimensionMismatch("GaussianTarget: mean/cov dimension mismatch");
  const Matrix& L = cov_.cholesky();
  precision_ = L.transpose().triangularView<Eigen::Upper>().solve(
      Matrix(L.triangularView<Eigen::Lower>().solve(Matrix::Identity(dim(), dim()))));
}

double GaussianTarget::log_density(const Vector& x) const {
  const Vector y = cov_.cholesky().triangularView<Eigen::Lower>().solve(x - mean_);
  return -0.5 * y.squaredNorm();
}

Vector GaussianTarget::grad_log_density(const Vector& x) const {
  return -(precision_ * (x - mean_));
}

PowerExponentialTarget::PowerExponentialTarget(int dim, double p) : dim_(dim), p_(p) {
  if (dim < 1) throw std::invalid_argument("PowerExponentialTarget: dim >= 1 required");
  if (!(p > 1.0)) throw std::invalid_argument("PowerExponentialTarget: p > 1 required");
}

Vector PowerExponentialTarget::grad_log_density(const Vector& x) const {
  const double r = x.norm();
  if (r == 0.0) return Vector::Zero(dim_);
  return (-p_ * std::pow(r, p_ - 2.0)) * x;
}

GaussianMixtureTarget::GaussianMixtureTarget(std::vector<double> weights,
                                             std::vector<Vector> means,
                                             std::vector<SpdMatrix> covs)
    : means_(std::move(means)), covs_(std::move(covs)) {
  if (weights.empty() || weights.size() != means_.size() || weights.size() != covs_.size())
    throw std::invalid_argument("GaussianMixtureTarget: component count mismatch");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("GaussianMixtureTarget: weights must be > 0");
    total += w;
  }
  for (std::size_t k = 0; k < means_.size(); ++k) {
    if (means_[k].size() != means_[0].size() || covs_[k].dim() != means_[0].size())
      throw DimensionMismatch("GaussianMixtureTarget: component dimension mismatch");
    log_weights_.push_back(std::log(weights[k] / total));
  }
}

double GaussianMixtureTarget::log_density(const Vector& x) const {
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(means_.size());
  for (std::size_t k = 0; k < means_.size(); ++k) {
    terms[k] = log_weights_[k] + log_gaussian_density(x, means_[k], covs_[k]);
    max_term = std::max(max_term, terms[k]);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - max_term);
  return max_term + std::log(sum);
}

Vector GaussianMixtureTarget::grad_log_density(const Vector& x) const {
  const double lp = log_density(x);
  Vector g = Vector::Zero(x.size());
  for (std::size_t k = 0; k < means_.size(); ++k) {
    const double lk = log_weights_[k] + log_gaussian_density(x, means_[k], covs_[k]);
    const double resp = std::exp(lk - lp);  // component responsibility
    const Matrix& L = covs_[k].cholesky();
    const Vector y = L.triangularView<Eigen::Lower>().solve(x - means_[k]);
    const Vector prec_diff = L.transpose().triangularView<Eigen::Upper>().solve(y);
    g -= resp * prec_diff;
  }
  return g;
}

std::vector<Vector> GaussianMixtureTarget::mode_search_starts() const {
  std::vector<Vector> starts = means_;
  starts.push_back(Vector::Zero(dim()));
  return starts;
}

CauchyLikeTarget::CauchyLikeTarget(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("CauchyLikeTarget: dim >= 1 required");
}

double CauchyLikeTarget::log_density(const Vector& x) const {
  return -0.5 * (dim_ + 1) * std::log1p(x.squaredNorm());
}

Vector CauchyLikeTarget::grad_log_density(const Vector& x) const {
  return (-(dim_ + 1) / (1.0 + x.squaredNorm())) * x;
}

FunctionTarget::FunctionTarget(int dim, std::function<double(const Vector&)> log_density,
                               std::function<Vector(const Vector&)> gradient)
    : dim_(dim), log_density_(std::move(log_density)), gradient_(std::move(gradient)) {
  if (dim < 1) throw std::invalid_argument("FunctionTarget: dim >= 1 required");
  if (!log_density_) throw std::invalid_argument("FunctionTarget: log_density required");
}

Vector FunctionTarget::grad_log_density(const Vector& x) const {
  if (gradient_) return gradient_(x);
  return finite_difference_gradient(*this, x, kFdStep);
}

}  // namespace am
