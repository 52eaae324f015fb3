#include "am/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace am {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Integrand of the drift fraction in log space:
//   lr >= 0 (acceptance region):  1 - e^{-lr/2}
//   lr <  0 (rejection region):   e^{lr} - e^{lr/2}   (= -sqrt(r)(1-sqrt(r)))
double tau_integrand(double lr) {
  if (std::isnan(lr)) throw QuadratureOverflow("drift fraction: NaN log ratio");
  if (lr >= 0.0) return 1.0 - std::exp(-0.5 * lr);
  return std::exp(lr) - std::exp(0.5 * lr);
}

double log_gauss_1d(double z, double var) {
  return -0.5 * std::log(2.0 * M_PI * var) - 0.5 * z * z / var;
}

TauResult tau_quadrature_1d(const TargetDensity& t, double var, const Vector& x,
                            const QuadratureOptions& opts) {
  const double sigma = std::sqrt(var);
  const double lo = x[0] - opts.range_sigmas * sigma;
  const double hi = x[0] + opts.range_sigmas * sigma;
  const double lpx = t.log_density(x);
  if (!(lpx > -kInf)) throw InvalidState("drift fraction: pi(x) = 0");

  auto trapezoid = [&](int n) {
    const double h = (hi - lo) / (n - 1);
    double sum = 0.0;
    Vector y(1);
    for (int i = 0; i < n; ++i) {
      y[0] = lo + i * h;
      const double f =
          tau_integrand(t.log_density(y) - lpx) * std::exp(log_gauss_1d(y[0] - x[0], var));
      sum += (i == 0 || i == n - 1) ? 0.5 * f : f;
    }
    return sum * h;
  };

  const double coarse = trapezoid(opts.points_1d);
  const double fine = trapezoid(2 * opts.points_1d - 1);
  return {fine, std::abs(fine - coarse)};
}

TauResult tau_quadrature_2d(const TargetDensity& t, const SpdMatrix& v, const Vector& x,
                            const QuadratureOptions& opts) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(v.matrix());
  const Vector evals = es.eigenvalues();
  const Matrix q = es.eigenvectors();
  const double lpx = t.log_density(x);
  if (!(lpx > -kInf)) throw InvalidState("drift fraction: pi(x) = 0");

  auto tensor = [&](int m) {
    const double r1 = opts.range_sigmas * std::sqrt(evals[0]);
    const double r2 = opts.range_sigmas * std::sqrt(evals[1]);
    const double h1 = 2.0 * r1 / (m - 1);
    const double h2 = 2.0 * r2 / (m - 1);
    double sum = 0.0;
    Vector z(2), y(2);
    for (int i = 0; i < m; ++i) {
      z[0] = -r1 + i * h1;
      const double w1 = (i == 0 || i == m - 1) ? 0.5 : 1.0;
      const double lq1 = log_gauss_1d(z[0], evals[0]);
      for (int j = 0; j < m; ++j) {
        z[1] = -r2 + j * h2;
        const double w2 = (j == 0 || j == m - 1) ? 0.5 : 1.0;
        y = x + q * z;
        sum += w1 * w2 * tau_integrand(t.log_density(y) - lpx) *
               std::exp(lq1 + log_gauss_1d(z[1], evals[1]));
      }
    }
    return sum * h1 * h2;
  };

  const int m = opts.points_2d | 1;  // odd so the coarse grid nests
  const double coarse = tensor((m + 1) / 2);
  const double fine = tensor(m);
  return {fine, std::abs(fine - coarse)};
}

}  // namespace

TauResult drift_ratio_tau_quadrature(const TargetDensity& t, const SpdMatrix& v,
                                     const Vector& x, const QuadratureOptions& opts) {
  if (x.size() != v.dim()) throw DimensionMismatch("drift fraction: x/v dimension mismatch");
  if (t.dim() == 1) return tau_quadrature_1d(t, v.matrix()(0, 0), x, opts);
  if (t.dim() == 2) return tau_quadrature_2d(t, v, x, opts);
  throw std::invalid_argument("drift fraction quadrature: only d <= 2; use Monte Carlo");
}

TauResult drift_ratio_tau_monte_carlo(const TargetDensity& t, const SpdMatrix& v,
                                      const Vector& x, long n, RngStream& rng) {
  if (x.size() != v.dim()) throw DimensionMismatch("drift fraction: x/v dimension mismatch");
  if (n < 2) throw std::invalid_argument("drift fraction Monte Carlo: n >= 2 required");
  const double lpx = t.log_density(x);
  if (!(lpx > -kInf)) throw InvalidState("drift fraction: pi(x) = 0");
  const Matrix& L = v.cholesky();
  double sum = 0.0, sumsq = 0.0;
  for (long i = 0; i < n; ++i) {
    const Vector y = x + L * rng.gaussian_vector(v.dim());
    const double g = tau_integrand(t.log_density(y) - lpx);
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / n;
  const double var = std::max(0.0, sumsq / n - mean * mean) * n / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

// ---------------------------------------------------------------------------
// Certificate fitting
// ---------------------------------------------------------------------------

namespace {

struct TauEvaluator {
  const TargetDensity& t;
  const SpdMatrix& v;
  const CertifyOptions& opts;
  RngStream mc_rng;

  TauEvaluator(const TargetDensity& t_, const SpdMatrix& v_, const CertifyOptions& o)
      : t(t_), v(v_), opts(o), mc_rng(derive_stream_seed(o.seed, 17)) {}

  TauResult operator()(const Vector& x) {
    if (t.dim() <= 2) return drift_ratio_tau_quadrature(t, v, x, opts.quad);
    return drift_ratio_tau_monte_carlo(t, v, x, opts.mc_n, mc_rng);
  }
};

std::vector<Vector> probe_directions(int d, int count, RngStream& rng) {
  std::vector<Vector> dirs;
  if (d == 1) {
    dirs.push_back(Vector::Constant(1, 1.0));
    dirs.push_back(Vector::Constant(1, -1.0));
    return dirs;
  }
  dirs.reserve(count);
  for (int i = 0; i < count; ++i) {
    Vector z = rng.gaussian_vector(d);
    while (z.norm() < 1e-12) z = rng.gaussian_vector(d);
    dirs.push_back(z / z.norm());
  }
  return dirs;
}

}  // namespace

DriftCertificate fit_drift_certificate(const TargetDensity& t, const SpdMatrix& v,
                                       const std::vector<double>& search_radii,
                                       double margin, const CertifyOptions& opts) {
  if (!(margin > 0.0 && margin < 1.0))
    throw std::invalid_argument("fit_drift_certificate: margin must be in (0,1)");
  if (search_radii.empty())
    throw std::invalid_argument("fit_drift_certificate: empty radius search grid");

  const DriftFunction df(t);
  TauEvaluator tau(t, v, opts);
  const int d = t.dim();

  RngStream dir_rng(derive_stream_seed(opts.seed, 1));
  const auto tail_dirs = probe_directions(d, opts.tail_dirs, dir_rng);
  RngStream ball_rng(derive_stream_seed(opts.seed, 2));
  const auto ball_dirs = probe_directions(d, opts.tail_dirs, ball_rng);
  RngStream hold_rng(derive_stream_seed(opts.seed, 3));
  const auto hold_dirs = probe_directions(d, std::max(opts.tail_dirs, 8), hold_rng);

  std::string failure = "no candidate radius validated";
  for (double R : search_radii) {
    if (!(R > 0.0)) throw std::invalid_argument("fit_drift_certificate: radii must be > 0");

    // Tail probes: tau-hat - err must clear the margin on every shell.
    double min_tau = kInf;
    double max_err = 0.0;
    bool ok = true;
    for (double f : opts.tail_shell_factors) {
      for (const Vector& u : tail_dirs) {
        const TauResult res = tau(Vector(R * f * u));
        min_tau = std::min(min_tau, res.tau);
        max_err = std::max(max_err, res.err);
        if (res.tau - res.err < margin) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (!ok) {
      failure = "drift margin not met outside R = " + std::to_string(R);
      continue;
    }

    const double lambda = 1.0 - margin;

    // b: supremum of P_v V and of V over a grid on the ball C.
    double b_raw = 1.0;
    double sup_v = 1.0;
    for (int j = 0; j < opts.ball_grid; ++j) {
      const double r = R * static_cast<double>(j) / (opts.ball_grid - 1);
      for (const Vector& u : ball_dirs) {
        const Vector x = r * u;
        const double log_v = df.log_drift(x);
        const TauResult res = tau(x);
        const double log_pv = log_v + std::log1p(-std::min(res.tau - res.err, 1.0 - 1e-15));
        if (log_pv > DriftFunction::kLogOverflow)
          throw QuadratureOverflow("fit_drift_certificate: P_v V overflow on C");
        b_raw = std::max(b_raw, std::exp(log_pv));
        sup_v = std::max(sup_v, std::exp(std::min(log_v, DriftFunction::kLogOverflow)));
        max_err = std::max(max_err, res.err);
        if (j == 0) break;  // the origin needs a single direction
      }
    }
    const double b = std::max(b_raw, sup_v) * opts.b_safety;

    // Holdout validation on fresh points: P_v V <= lambda V + b 1_C within
    // quadrature error.
    bool holdout_ok = true;
    const int m_out = opts.holdout_points / 2;
    const int m_in = opts.holdout_points - m_out;
    for (int j = 0; j < m_out && holdout_ok; ++j) {
      const double r = R * (1.02 + 4.48 * static_cast<double>(j) / std::max(1, m_out - 1));
      const Vector& u = hold_dirs[j % hold_dirs.size()];
      const TauResult res = tau(Vector(r * u));
      if (res.tau < margin - res.err - 1e-9) holdout_ok = false;
    }
    for (int j = 0; j < m_in && holdout_ok; ++j) {
      const double r = R * (static_cast<double>(j) + 0.5) / m_in;
      const Vector& u = hold_dirs[(m_out + j) % hold_dirs.size()];
      const Vector x = r * u;
      const TauResult res = tau(x);
      const double log_v = df.log_drift(x);
      const double log_pv = log_v + std::log1p(-std::min(res.tau - res.err, 1.0 - 1e-15));
      const double rhs = lambda * std::exp(log_v) + b;
      if (std::exp(log_pv) > rhs * (1.0 + 1e-9)) holdout_ok = false;
    }
    if (!holdout_ok) {
      failure = "holdout validation failed at R = " + std::to_string(R);
      continue;
    }

    DriftCertificate cert{lambda, b, R, estimate_minorization(t, v, R), v, "", min_tau,
                          max_err};
    std::ostringstream budget;
    if (d <= 2) {
      budget << "quadrature: " << (d == 1 ? "1-d trapezoid, " : "2-d tensor trapezoid, ")
             << (d == 1 ? opts.quad.points_1d : opts.quad.points_2d)
             << " pts (+refined), range +/-" << opts.quad.range_sigmas << " sigma";
    } else {
      budget << "monte carlo: " << opts.mc_n << " samples/point";
    }
    budget << "; tail probes " << opts.tail_shell_factors.size() << " shells x "
           << tail_dirs.size() << " dirs; holdout " << opts.holdout_points
           << " pts; max est err " << max_err;
    cert.quadrature_budget = budget.str();
    return cert;
  }
  throw NoDriftFound("fit_drift_certificate: " + failure);
}

double estimate_minorization(const TargetDensity& t, const SpdMatrix& v, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("estimate_minorization: R > 0 required");
  const double kappa_floor = v.certified_floor();
  if (!(kappa_floor > 0.0))
    throw std::invalid_argument("estimate_minorization: v needs a positive certified floor");
  const int d = t.dim();

  // inf of pi over the ball C by grid minimization.
  double inf_log_pi = t.log_density(Vector::Zero(d));
  if (d == 1) {
    Vector x(1);
    for (int i = 0; i <= 4000; ++i) {
      x[0] = -R + 2.0 * R * i / 4000.0;
      inf_log_pi = std::min(inf_log_pi, t.log_density(x));
    }
  } else {
    RngStream rng(derive_stream_seed(5150, static_cast<std::uint64_t>(d)));
    const auto dirs = probe_directions(d, 128, rng);
    for (int i = 1; i <= 32; ++i) {
      const double r = R * i / 32.0;
      for (const Vector& u : dirs) inf_log_pi = std::min(inf_log_pi, t.log_density(r * u));
    }
  }

  const double log_ball_volume =
      0.5 * d * std::log(M_PI) - std::lgamma(0.5 * d + 1.0) + d * std::log(R);
  const double diam = 2.0 * R;
  const double log_delta = log_ball_volume - 0.5 * d * std::log(2.0 * M_PI) -
                           0.5 * v.log_det() - diam * diam / (2.0 * kappa_floor) +
                           inf_log_pi - t.sup_log_density();
  if (log_delta >= 0.0) return 1.0;
  const double delta = std::exp(log_delta);
  return std::max(delta, std::numeric_limits<double>::min());  // clamp into (0, 1]
}

ScalingAudit det_scaling_audit(const TargetDensity& t, const std::vector<SpdMatrix>& vs,
                               double kappa, const std::vector<double>& search_radii,
                               double margin, const CertifyOptions& opts) {
  if (vs.empty()) throw std::invalid_argument("det_scaling_audit: empty family");
  for (const auto& v : vs) {
    if (v.certified_floor() < kappa)
      throw std::invalid_argument(
          "det_scaling_audit: family member with eigenvalue floor below kappa");
  }
  ScalingAudit audit;
  audit.min_ratio = kInf;
  for (const auto& v : vs) {
    const DriftCertificate cert = fit_drift_certificate(t, v, search_radii, margin, opts);
    ScalingAuditRow row;
    row.det_v = std::exp(v.log_det());
    row.lambda = cert.lambda;
    row.delta = cert.delta;
    row.ratio = std::max(1.0 / (1.0 - cert.lambda), 1.0 / cert.delta) / std::sqrt(row.det_v);
    audit.max_ratio = std::max(audit.max_ratio, row.ratio);
    audit.min_ratio = std::min(audit.min_ratio, row.ratio);
    audit.rows.push_back(row);
  }
  return audit;
}

// ---------------------------------------------------------------------------
// Convergence bound formulas
// ---------------------------------------------------------------------------

ConvergenceBound mt_bound(double lambda, double b, double delta,
                          std::optional<double> rho_override) {
  if (!(lambda >= 0.0 && lambda < 1.0))
    throw std::invalid_argument("mt_bound: lambda must be in [0,1)");
  if (!(b > 0.0)) throw std::invalid_argument("mt_bound: b must be > 0");
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("mt_bound: delta must be in (0,1]");

  ConvergenceBound out;
  out.gamma = (4.0 * b + 2.0 * delta * lambda * b) / (delta * delta);
  out.lambda_check = (lambda + out.gamma) / (1.0 + out.gamma);
  const double one_minus_lc = (1.0 - lambda) / (1.0 + out.gamma);
  out.b_check = b + out.gamma;
  out.zeta_bar = ((4.0 - delta * delta) / std::pow(delta, 5)) *
                 (b / (1.0 - lambda)) * (b / (1.0 - lambda));
  const double bc = out.b_check;
  const double numerator =
      one_minus_lc + bc + bc * bc + out.zeta_bar * (bc * one_minus_lc + bc * bc);
  out.M_tilde = numerator / (one_minus_lc * one_minus_lc);
  if (!std::isfinite(out.M_tilde))
    throw std::invalid_argument("mt_bound: constants overflow double precision");

  out.one_minus_vartheta = 1.0 / out.M_tilde;
  out.vartheta = 1.0 - out.one_minus_vartheta;
  if (rho_override) {
    const double rho = *rho_override;
    if (!(rho < 1.0) || !(1.0 - rho < out.one_minus_vartheta))
      throw std::invalid_argument("mt_bound: rho override must lie in (vartheta, 1)");
    out.one_minus_rho = 1.0 - rho;
  } else {
    out.one_minus_rho = 0.5 * out.one_minus_vartheta;
  }
  out.rho = 1.0 - out.one_minus_rho;
  const double rho_minus_vartheta = out.one_minus_vartheta - out.one_minus_rho;
  out.L = (1.0 + out.gamma) * out.rho / rho_minus_vartheta;
  out.log_L = std::log1p(out.gamma) + std::log1p(-out.one_minus_rho) -
              std::log(rho_minus_vartheta);
  return out;
}

double ConvergenceBound::log_bound(long k, double log_v_x0) const {
  return log_L + static_cast<double>(k) * std::log1p(-one_minus_rho) + log_v_x0;
}

PolyRateChain polynomial_rate_chain(double c, double eps, double r, long n) {
  if (!(c >= 1.0)) throw std::invalid_argument("polynomial_rate_chain: c >= 1 required");
  if (!(eps >= 0.0)) throw std::invalid_argument("polynomial_rate_chain: eps >= 0 required");
  if (!(r > 0.0 && r <= 1.0))
    throw std::invalid_argument("polynomial_rate_chain: r must be in (0,1]");
  if (n < 1) throw std::invalid_argument("polynomial_rate_chain: n >= 1 required");

  PolyRateChain out;
  const double n_eps = std::pow(static_cast<double>(n), eps);
  const double one_minus_lambda = r / (c * n_eps);
  out.lambda_tilde = 1.0 - one_minus_lambda;
  out.b_tilde = std::pow(2.0 * c * n_eps, r);
  out.delta_n = 1.0 / (c * n_eps);
  out.bound = mt_bound(out.lambda_tilde, out.b_tilde, out.delta_n);
  out.rho_n = out.bound.rho;
  out.L_n = out.bound.L;

  // Constant chain assembled from (c, r) exactly as the envelope derivation
  // requires; each a_k majorizes the corresponding exact quantity for all n.
  const double c_t = std::max(c / r, std::pow(2.0 * c, r));
  out.a[0] = 6.0 * c * c * c_t;              // a1 >= gamma_n / n^{3 eps}
  out.a[1] = c_t + out.a[0];                 // a2 >= b_check_n / n^{3 eps}
  out.a[2] = c_t * (1.0 + out.a[0]);         // a3 >= (1-lambda_check_n)^-1 / n^{4 eps}
  out.a[3] = 4.0 * std::pow(c, 5) * std::pow(c_t, 4);  // a4 >= zeta_bar_n / n^{9 eps}
  out.a[4] = 5.0 * out.a[2] * out.a[2] * out.a[3] * out.a[1] * out.a[1];  // a5
  out.a[5] = 2.0 * out.a[4];                 // a6
  out.a[6] = (1.0 + out.a[0]) * out.a[5];    // a7

  out.rate_envelope = out.a[5] * std::pow(static_cast<double>(n), 23.0 * eps);
  out.l_envelope = out.a[6] * std::pow(static_cast<double>(n), 26.0 * eps);
  const double inv_one_minus_rho = 1.0 / out.bound.one_minus_rho;  // = 2 M_tilde
  out.audit_ok = inv_one_minus_rho <= out.rate_envelope * (1.0 + 1e-12) &&
                 out.L_n <= out.l_envelope * (1.0 + 1e-12);
  return out;
}

RayleighShiftReport rayleigh_shift_checks(double eps) {
  if (!(eps > 0.0 && eps < 0.125))
    throw std::invalid_argument("rayleigh_shift_checks: eps must be in (0, 1/8)");
  auto f = [](double x) { return x * std::exp(-0.5 * x * x); };
  auto gap = [&](double x) { return 2.0 * f(x + eps) - f(x); };

  RayleighShiftReport report;
  report.min_pointwise_slack = kInf;
  const double step = 1e-4;
  for (long i = 1; i <= 5000; ++i) {
    const double x = i * step;  // grid over (0, 1/2]
    report.min_pointwise_slack = std::min(report.min_pointwise_slack, gap(x) - x / 8.0);
  }
  report.pointwise_ok = report.min_pointwise_slack >= -1e-15;

  // Negative part of the gap, composite Simpson out to where f is dead.
  const double hi = std::max(50.0, std::log(1.5) / eps + 20.0);
  const long m = 2 * static_cast<long>(hi / step / 2) + 2;  // even interval count
  const double h = hi / m;
  double integral = 0.0;
  for (long i = 0; i <= m; ++i) {
    const double x = i * h;
    const double g = std::min(gap(x), 0.0);
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    integral += w * g;
  }
  integral *= h / 3.0;
  report.negative_part_integral = integral;
  report.integral_bound = -std::exp(-1.0 / (32.0 * eps * eps));
  report.integral_ok = integral >= report.integral_bound;
  return report;
}

// ---------------------------------------------------------------------------
// Discretized chain
// ---------------------------------------------------------------------------

DiscreteChain discretize_rwm_1d(const TargetDensity& t, const SpdMatrix& v, double lo,
                                double hi, int n) {
  if (t.dim() != 1 || v.dim() != 1)
    throw DimensionMismatch("discretize_rwm_1d: one-dimensional targets only");
  if (n < 3 || !(hi > lo)) throw std::invalid_argument("discretize_rwm_1d: bad grid");

  DiscreteChain chain;
  chain.h = (hi - lo) / (n - 1);
  chain.grid.resize(n);
  std::vector<double> log_pi(n);
  Vector x(1);
  for (int i = 0; i < n; ++i) {
    chain.grid[i] = lo + i * chain.h;
    x[0] = chain.grid[i];
    log_pi[i] = t.log_density(x);
  }

  const double var = v.matrix()(0, 0);
  chain.P = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double off_diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double la = std::min(0.0, log_pi[j] - log_pi[i]);
      const double p = std::exp(la + log_gauss_1d(chain.grid[j] - chain.grid[i], var)) * chain.h;
      chain.P(i, j) = p;
      off_diag += p;
    }
    chain.P(i, i) = std::max(0.0, 1.0 - off_diag);
  }

  chain.pi.resize(n);
  const double max_lp = *std::max_element(log_pi.begin(), log_pi.end());
  for (int i = 0; i < n; ++i) chain.pi[i] = std::exp(log_pi[i] - max_lp);
  chain.pi /= chain.pi.sum();
  return chain;
}

int DiscreteChain::index_of(double x) const {
  const double pos = (x - grid.front()) / h;
  const int i = static_cast<int>(std::lround(pos));
  return std::clamp(i, 0, static_cast<int>(grid.size()) - 1);
}

Eigen::VectorXd stationary_distribution(const Matrix& P, double tol, long max_iter) {
  const Eigen::Index n = P.rows();
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (long it = 0; it < max_iter; ++it) {
    Eigen::VectorXd next = P.transpose() * v;
    next /= next.sum();
    const double diff = (next - v).cwiseAbs().sum();
    v = std::move(next);
    if (diff < tol) break;
  }
  return v;
}

double reversibility_residual(const DiscreteChain& chain) {
  const Eigen::Index n = chain.P.rows();
  double residual = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      residual = std::max(residual, std::abs(chain.pi[i] * chain.P(i, j) -
                                             chain.pi[j] * chain.P(j, i)));
  return residual;
}

Eigen::VectorXd kstep_row(const Matrix& P, int i0, long k) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(P.rows());
  row[i0] = 1.0;
  for (long step = 0; step < k; ++step) row = P.transpose() * row;
  return row;
}

double vnorm_distance(const DiscreteChain& chain, const DriftFunction& df,
                      const Eigen::VectorXd& row) {
  double dist = 0.0;
  Vector x(1);
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    x[0] = chain.grid[i];
    dist += std::exp(df.log_drift(x)) * std::abs(row[i] - chain.pi[i]);
  }
  return dist;
}

double vnorm_distance_discretized(const TargetDensity& t, const SpdMatrix& v, double x0,
                                  long k, double lo, double hi, int n) {
  const DiscreteChain chain = discretize_rwm_1d(t, v, lo, hi, n);
  if (chain.boundary_mass() > 1e-10)
    throw GridCoverageError("vnorm_distance_discretized: grid does not cover the target "
                            "(boundary mass " + std::to_string(chain.boundary_mass()) + ")");
  const DriftFunction df(t);
  return vnorm_distance(chain, df, kstep_row(chain.P, chain.index_of(x0), k));
}

DiscreteCertificate fit_discrete_certificate(const DiscreteChain& chain,
                                             const DriftFunction& df, double R) {
  const Eigen::Index n = chain.P.rows();
  Eigen::VectorXd big_v(n);
  Vector x(1);
  for (Eigen::Index i = 0; i < n; ++i) {
    x[0] = chain.grid[i];
    big_v[i] = std::exp(df.log_drift(x));
  }
  const Eigen::VectorXd pv = chain.P * big_v;

  DiscreteCertificate cert;
  cert.R = R;
  double lambda = 0.0;
  double b = 1.0;
  double min_pc = kInf;
  std::vector<Eigen::Index> ball;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(chain.grid[i]) <= R) {
      ball.push_back(i);
      b = std::max({b, pv[i], big_v[i]});
    } else {
      lambda = std::max(lambda, pv[i] / big_v[i]);
    }
  }
  if (ball.empty()) throw std::invalid_argument("fit_discrete_certificate: empty ball");
  if (!(lambda < 1.0))
    throw NoDriftFound("fit_discrete_certificate: no contraction outside the ball");
  for (Eigen::Index i : ball)
    for (Eigen::Index j : ball) min_pc = std::min(min_pc, chain.P(i, j));

  cert.lambda = lambda;
  cert.b = b;
  cert.n_C = static_cast<long>(ball.size());
  cert.delta = std::min(1.0, static_cast<double>(cert.n_C) * min_pc);
  if (!(cert.delta > 0.0))
    throw NoDriftFound("fit_discrete_certificate: minorization vanished on the ball");
  return cert;
}

}  // namespace am
