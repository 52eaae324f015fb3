#include "am/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace am {

EstimatorSeries running_average(const ChainTrace& trace,
                                const std::function<double(const Vector&)>& f,
                                const std::vector<long>& checkpoints,
                                std::optional<double> reference) {
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > trace.n_steps)
      throw std::invalid_argument("running_average: checkpoint outside the trace");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      throw std::invalid_argument("running_average: checkpoints must be increasing");
  }

  EstimatorSeries series;
  series.checkpoints = checkpoints;
  series.reference = reference;
  series.values.reserve(checkpoints.size());

  double sum = 0.0, comp = 0.0;  // Kahan accumulator
  std::size_t next = 0;
  for (long k = 1; k <= trace.n_steps && next < checkpoints.size(); ++k) {
    const double y = f(trace.state_at(k)) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (k == checkpoints[next]) {
      series.values.push_back(sum / static_cast<double>(k));
      ++next;
    }
  }
  return series;
}

VMomentReport v_moment_track(const ChainTrace& trace, const DriftFunction& df, double r,
                             double flag_threshold) {
  if (!(r > 0.0 && r <= 1.0))
    throw std::invalid_argument("v_moment_track: r must be in (0,1]");

  VMomentReport report;
  double log_max = -std::numeric_limits<double>::infinity();
  double mean = 0.0;
  std::vector<double> log_max_series(trace.n_steps + 1, 0.0);
  for (long k = 1; k <= trace.n_steps; ++k) {
    const double log_vr = r * df.log_drift(trace.state_at(k));
    log_max = std::max(log_max, log_vr);
    log_max_series[k] = log_max;
    const double vr = log_vr > DriftFunction::kLogOverflow
                          ? std::numeric_limits<double>::infinity()
                          : std::exp(log_vr);
    mean += (vr - mean) / static_cast<double>(k);
    report.checkpoints.push_back(k);
    report.running_max.push_back(std::exp(std::min(log_max, 709.0)));
    report.running_mean.push_back(mean);
  }

  // Least-squares slope of log(running max) against log k over the last
  // decade of steps.
  const long hi = trace.n_steps;
  const long lo = std::max<long>(1, hi / 10);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long m = 0;
  for (long k = lo; k <= hi; ++k) {
    const double lx = std::log(static_cast<double>(k));
    const double ly = log_max_series[k];
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  const double denom = m * sxx - sx * sx;
  report.slope = denom > 0.0 ? (m * sxy - sx * sy) / denom : 0.0;
  report.flagged = report.slope > flag_threshold;
  return report;
}

BatchMeansReport clt_batch_means(const ChainTrace& trace,
                                 const std::function<double(const Vector&)>& f,
                                 int n_batches, double burn_frac) {
  if (n_batches < 20) throw std::invalid_argument("clt_batch_means: n_batches >= 20 required");
  if (!(burn_frac >= 0.0 && burn_frac < 1.0))
    throw std::invalid_argument("clt_batch_means: burn_frac must be in [0,1)");

  const long burn = static_cast<long>(burn_frac * static_cast<double>(trace.n_steps));
  const long usable = trace.n_steps - burn;
  const long batch_size = usable / n_batches;
  if (batch_size < 50)
    throw TooShort("clt_batch_means: fewer than 50 samples per batch after burn discard");

  BatchMeansReport report;
  report.n_batches = n_batches;
  report.batch_size = batch_size;
  report.batch_means.reserve(n_batches);
  for (int b = 0; b < n_batches; ++b) {
    double sum = 0.0;
    const long start = burn + static_cast<long>(b) * batch_size;
    for (long k = start + 1; k <= start + batch_size; ++k) sum += f(trace.state_at(k));
    report.batch_means.push_back(sum / static_cast<double>(batch_size));
  }

  double mean = 0.0;
  for (double v : report.batch_means) mean += v;
  mean /= n_batches;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : report.batch_means) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n_batches;
  m3 /= n_batches;
  m4 /= n_batches;
  // Degenerate case (constant f up to rounding): report an exact zero
  // rather than noise ratios.
  if (std::sqrt(m2) <= 1e-13 * std::max(1.0, std::abs(mean))) return report;
  const double sample_var = m2 * n_batches / (n_batches - 1.0);
  report.sigma2_hat = static_cast<double>(batch_size) * sample_var;
  report.skewness = m3 / std::pow(m2, 1.5);
  report.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  return report;
}

AdaptationDistanceSeries adaptation_limit(const ChainTrace& trace, const Vector& ref_mean,
                                          const SpdMatrix& ref_cov, double kappa) {
  if (ref_mean.size() != trace.dim || ref_cov.dim() != trace.dim)
    throw DimensionMismatch("adaptation_limit: reference dimension mismatch");
  const Matrix limit =
      ref_cov.matrix() + kappa * Matrix::Identity(trace.dim, trace.dim);
  AdaptationDistanceSeries series;
  for (const auto& snap : trace.snapshots) {
    const double d_mean = (snap.mean - ref_mean).norm();
    const double d_cov = frobenius_norm(snap.cov - limit);
    series.steps.push_back(snap.step);
    series.distances.push_back(std::max(d_mean, d_cov));
  }
  return series;
}

}  // namespace am
