#ifndef AMTK_DIAGNOSTICS_HPP
#define AMTK_DIAGNOSTICS_HPP

#include <functional>
#include <optional>
#include <vector>

#include "am/adapt.hpp"

namespace am {

// Ergodic averages I_n = (1/n) sum_{k=1}^n f(X_k) recorded at checkpoints.
struct EstimatorSeries {
  std::vector<long> checkpoints;
  std::vector<double> values;
  std::optional<double> reference;  // pi(f) when known
};

// Single pass with compensated (Kahan) summation.
EstimatorSeries running_average(const ChainTrace& trace,
                                const std::function<double(const Vector&)>& f,
                                const std::vector<long>& checkpoints,
                                std::optional<double> reference = std::nullopt);

// Running max and mean of V^r(X_k). `slope` is the log-log least-squares
// slope of the running max over the last decade of steps; values above
// `flag_threshold` flag super-polynomial growth, which a drift-stable chain
// must not show.
struct VMomentReport {
  std::vector<long> checkpoints;
  std::vector<double> running_max;
  std::vector<double> running_mean;
  double slope = 0.0;
  bool flagged = false;
};

VMomentReport v_moment_track(const ChainTrace& trace, const DriftFunction& df, double r,
                             double flag_threshold = 1.0);

// Non-overlapping batch means on the post-burn segment. sigma2_hat is the
// usual batch-means long-run variance estimate (batch size times the sample
// variance of the batch means); skewness and excess kurtosis summarize the
// standardized batch means.
struct BatchMeansReport {
  int n_batches = 0;
  long batch_size = 0;
  std::vector<double> batch_means;
  double sigma2_hat = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

BatchMeansReport clt_batch_means(const ChainTrace& trace,
                                 const std::function<double(const Vector&)>& f,
                                 int n_batches, double burn_frac = 0.1);

// Distance of the adaptation snapshots from the expected limit
// (m_pi, v_pi + kappa I), in the norm max(||mean||_2, ||cov||_F).
struct AdaptationDistanceSeries {
  std::vector<long> steps;
  std::vector<double> distances;
};

AdaptationDistanceSeries adaptation_limit(const ChainTrace& trace, const Vector& ref_mean,
                                          const SpdMatrix& ref_cov, double kappa);

}  // namespace am

#endif  // AMTK_DIAGNOSTICS_HPP
