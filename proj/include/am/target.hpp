#ifndef AMTK_TARGET_HPP
#define AMTK_TARGET_HPP

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "am/linalg.hpp"

namespace am {

// Unnormalized target density on R^d. Evaluation is pure and thread-safe.
//
// Built-ins provide analytic gradients and an analytic supremum of the
// log-density; the base class falls back to central finite differences and a
// multi-start ascent mode search.
class TargetDensity {
 public:
  virtual ~TargetDensity() = default;

  virtual int dim() const = 0;
  virtual double log_density(const Vector& x) const = 0;

  virtual Vector grad_log_density(const Vector& x) const;
  virtual bool has_analytic_gradient() const { return false; }

  // sup_x log pi(x). Built-ins declare it; otherwise a numeric mode search
  // (multi-start gradient ascent from `mode_search_starts`).
  virtual double sup_log_density() const;

  // Starting points for the numeric mode search; default is the origin.
  virtual std::vector<Vector> mode_search_starts() const;

  // Finite-difference step for the default gradient.
  static constexpr double kFdStep = 1e-5;
};

Vector finite_difference_gradient(const TargetDensity& t, const Vector& x, double h);

// Multi-start local ascent on log pi; returns the best log-density found.
double numeric_mode_search(const TargetDensity& t, const std::vector<Vector>& starts);

class GaussianTarget : public TargetDensity {
 public:
  GaussianTarget(Vector mean, SpdMatrix cov);

  int dim() const override { return static_cast<int>(mean_.size()); }
  double log_density(const Vector& x) const override;
  Vector grad_log_density(const Vector& x) const override;
  bool has_analytic_gradient() const override { return true; }
  double sup_log_density() const override { return 0.0; }  // value at the mean
  std::vector<Vector> mode_search_starts() const override { return {mean_}; }

  const Vector& mean() const { return mean_; }
  const SpdMatrix& cov() const { return cov_; }

 private:
  Vector mean_;
  SpdMatrix cov_;
  Matrix precision_;
};

// pi(x) proportional to exp(-||x||^p), p > 1.
class PowerExponentialTarget : public TargetDensity {
 public:
  PowerExponentialTarget(int dim, double p);

  int dim() const override { return dim_; }
  double log_density(const Vector& x) const override { return -std::pow(x.norm(), p_); }
  Vector grad_log_density(const Vector& x) const override;
  bool has_analytic_gradient() const override { return true; }
  double sup_log_density() const override { return 0.0; }

  double p() const { return p_; }

 private:
  int dim_;
  double p_;
};

class GaussianMixtureTarget : public TargetDensity {
 public:
  GaussianMixtureTarget(std::vector<double> weights, std::vector<Vector> means,
                        std::vector<SpdMatrix> covs);

  int dim() const override { return static_cast<int>(means_[0].size()); }
  double log_density(const Vector& x) const override;
  Vector grad_log_density(const Vector& x) const override;
  bool has_analytic_gradient() const override { return true; }
  std::vector<Vector> mode_search_starts() const override;

 private:
  std::vector<double> log_weights_;
  std::vector<Vector> means_;
  std::vector<SpdMatrix> covs_;
};

// pi(x) proportional to (1 + ||x||^2)^{-(d+1)/2}. Heavy-tailed negative
// control: fails the super-exponential tail check for every rho > 1 and
// admits no geometric drift certificate under random-walk Metropolis.
class CauchyLikeTarget : public TargetDensity {
 public:
  explicit CauchyLikeTarget(int dim);

  int dim() const override { return dim_; }
  double log_density(const Vector& x) const override;
  Vector grad_log_density(const Vector& x) const override;
  bool has_analytic_gradient() const override { return true; }
  double sup_log_density() const override { return 0.0; }

 private:
  int dim_;
};

// Adapter for ad-hoc densities (tests, experiments). Gradient falls back to
// finite differences unless one is supplied.
class FunctionTarget : public TargetDensity {
 public:
  FunctionTarget(int dim, std::function<double(const Vector&)> log_density,
                 std::function<Vector(const Vector&)> gradient = {});

  int dim() const override { return dim_; }
  double log_density(const Vector& x) const override { return log_density_(x); }
  Vector grad_log_density(const Vector& x) const override;
  bool has_analytic_gradient() const override { return static_cast<bool>(gradient_); }

 private:
  int dim_;
  std::function<double(const Vector&)> log_density_;
  std::function<Vector(const Vector&)> gradient_;
};

// Drift function V(x) = c_V pi^{-1/2}(x) with c_V = (sup pi)^{1/2}, so that
// V >= 1 everywhere and V = 1 at the mode. Evaluation is done in log space;
// values beyond the representable range surface as the +infinity sentinel,
// which callers must treat as a drift violation.
class DriftFunction {
 public:
  explicit DriftFunction(const TargetDensity& t)
      : target_(&t), log_c_v_(0.5 * t.sup_log_density()) {}

  const TargetDensity& target() const { return *target_; }
  double log_c_v() const { return log_c_v_; }

  double log_drift(const Vector& x) const {
    return log_c_v_ - 0.5 * target_->log_density(x);
  }

  double drift_V(const Vector& x) const {
    const double lv = log_drift(x);
    if (lv > kLogOverflow) return std::numeric_limits<double>::infinity();
    return std::exp(lv);
  }

  // log(DBL_MAX) rounded down.
  static constexpr double kLogOverflow = 709.0;

 private:
  const TargetDensity* target_;
  double log_c_v_;
};

}  // namespace am

#endif  // AMTK_TARGET_HPP
