// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Each block pins its tolerances in code; soft criteria say so explicitly.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "am/harness.hpp"

using namespace am;
namespace fs = std::filesystem;

namespace {

struct Runner {
  int failures = 0;

  void criterion(int id, const std::string& name, const std::function<bool(std::string&)>& body) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %2d: %s (%.2fs%s%s)\n", ok ? "PASS" : "FAIL", id,
                name.c_str(), secs, detail.empty() ? "" : "; ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

Matrix correlated_cov() {
  Matrix c(2, 2);
  c << 1.0, 0.9, 0.9, 1.0;
  return c;
}

Matrix batch_covariance(const std::vector<Vector>& xs) {
  const int d = static_cast<int>(xs[0].size());
  Vector mean = Vector::Zero(d);
  for (const auto& x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  Matrix cov = Matrix::Zero(d, d);
  for (const auto& x : xs) cov += (x - mean) * (x - mean).transpose();
  return cov / static_cast<double>(xs.size() - 1);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

}  // namespace

int main() {
  Runner runner;
  const fs::path out_root = fs::temp_directory_path() / "amtk_acceptance";
  fs::remove_all(out_root);
  fs::create_directories(out_root);

  // Shared artifacts across criteria.
  std::vector<ChainTrace> slln_traces;      // criterion 5/6/3
  std::string slln_summary, clt_summary, constrained_summary;
  ChainTrace clt_trace;

  // ------------------------------------------------------------------ 1
  runner.criterion(1, "recursion-oracle equivalence", [&](std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    RngStream rng(101);
    double worst_batch = 0.0, worst_h = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      // Unbiased-form recursion against the batch covariance (kappa = 0:
      // the displayed recursion preserves the batch identity exactly only
      // with no regularization term; the kappa ridge enters as +kappa*I on
      // both sides of the comparison).
      AmConfig orig;
      orig.kappa = 0.0;
      orig.variant = RecursionVariant::original;
      std::vector<Vector> xs;
      for (int i = 0; i < 4; ++i) xs.push_back(rng.gaussian_vector(3));
      Vector mean = Vector::Zero(3);
      for (const auto& x : xs) mean += x;
      mean /= 4.0;
      AdaptationState state{mean, SpdMatrix(batch_covariance(xs), 0.0), 3};
      for (int k = 4; k < 200; ++k) {
        xs.push_back(rng.gaussian_vector(3));
        state = am_update(state, xs.back(), orig);
      }
      worst_batch = std::max(
          worst_batch, frobenius_norm(state.cov.matrix() - batch_covariance(xs)));

      // Robbins-Monro form against the averaged recursion, kappa > 0.
      AmConfig mod;
      mod.kappa = 0.01;
      AdaptationState display{rng.gaussian_vector(3), SpdMatrix::identity(3), 0};
      AdaptationState h_form = display;
      for (int k = 0; k < 200; ++k) {
        const Vector x = rng.gaussian_vector(3);
        display = am_update(display, x, mod);
        const double eta = 1.0 / static_cast<double>(h_form.n + 2);
        const Increment inc = adaptation_H(h_form, x, mod.kappa);
        h_form = AdaptationState{h_form.mean + eta * inc.mean_delta,
                                 SpdMatrix(h_form.cov.matrix() + eta * inc.cov_delta, 0.0),
                                 h_form.n + 1};
        worst_h = std::max(
            worst_h, std::max((display.mean - h_form.mean).norm(),
                              frobenius_norm(display.cov.matrix() - h_form.cov.matrix())));
      }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    detail = "batch gap " + fmt(worst_batch) + ", H gap " + fmt(worst_h);
    return worst_batch < 1e-9 && worst_h < 1e-12 && secs < 1.0;
  });

  // ------------------------------------------------------------------ 2
  runner.criterion(2, "one-step variant gap identity", [&](std::string& detail) {
    RngStream rng(102);
    double worst = 0.0;
    for (long n : {2L, 5L, 17L, 100L}) {
      for (int trial = 0; trial < 5; ++trial) {
        Matrix b(3, 3);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) b(i, j) = rng.gaussian();
        const Matrix sigma = b * b.transpose() + 0.3 * Matrix::Identity(3, 3);
        const AdaptationState s{rng.gaussian_vector(3), SpdMatrix::from_matrix(sigma),
                                n - 1};
        const Vector x = rng.gaussian_vector(3);
        AmConfig cfg;
        cfg.kappa = 0.01;
        cfg.variant = RecursionVariant::modified;
        const AdaptationState mod = am_update(s, x, cfg);
        cfg.variant = RecursionVariant::original;
        const AdaptationState orig = am_update(s, x, cfg);
        const double gap = frobenius_norm(mod.cov.matrix() - orig.cov.matrix());
        const double expected = frobenius_norm(sigma) /
                                (static_cast<double>(n) * static_cast<double>(n + 1));
        worst = std::max(worst, std::abs(gap - expected));
      }
    }
    detail = "max |gap - Sigma/(n(n+1))| = " + fmt(worst);
    return worst <= 1e-12;
  });

  // ------------------------------------------------------------------ 5 (runs shared with 6, 3, 14)
  runner.criterion(5, "SLLN for ||x||^2 on the correlated gaussian", [&](std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    json j{{"target",
            {{"name", "gaussian"},
             {"dim", 2},
             {"cov", {{1.0, 0.9}, {0.9, 1.0}}}}},
           {"run",
            {{"n_steps", 200000L},
             {"n_chains", 10},
             {"root_seed", 20240501ULL},
             {"workers", 2},
             {"out_dir", (out_root / "slln").string()},
             {"checkpoint_stride", 200000L}}}};
    const RunConfig cfg = parse_config_json(j);
    const OutputRecord record = run_experiment(cfg);
    slln_summary = record.summary_path;

    const auto target = make_target(cfg.target);
    double err_sum = 0.0, err_worst = 0.0;
    for (int i = 0; i < cfg.n_chains; ++i) {
      ChainTrace trace = run_am_chain(cfg.am, cfg.constraint, *target, cfg.x0,
                                      SpdMatrix::from_matrix(cfg.sigma0), cfg.n_steps,
                                      derive_stream_seed(cfg.root_seed, i));
      if (fnv1a64_hex(trace_to_csv(trace)) != record.chains[i].trace_hash) {
        detail = "in-memory rerun diverged from the recorded trace";
        return false;
      }
      const auto series = running_average(
          trace, [](const Vector& x) { return x.squaredNorm(); }, {cfg.n_steps});
      const double rel = std::abs(series.values[0] - 2.0) / 2.0;
      err_sum += rel;
      err_worst = std::max(err_worst, rel);
      slln_traces.push_back(std::move(trace));
    }
    const double mean_rel = err_sum / cfg.n_chains;
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    detail = "mean rel err " + fmt(mean_rel) + ", worst " + fmt(err_worst) + ", " +
             fmt(secs) + "s";
    return mean_rel < 0.05 && err_worst < 0.10 && secs < 60.0;
  });

  // ------------------------------------------------------------------ 6
  runner.criterion(6, "adaptation limit S_n -> (m_pi, v_pi + kappa I)", [&](std::string& detail) {
    if (slln_traces.size() != 10) {
      detail = "no SLLN traces";
      return false;
    }
    const Matrix limit = correlated_cov() + 0.01 * Matrix::Identity(2, 2);
    const double denom = frobenius_norm(limit);
    int good = 0;
    double worst = 0.0;
    for (const auto& trace : slln_traces) {
      const auto& snap = trace.snapshots.back();
      const double rel = frobenius_norm(snap.cov - limit) / denom;
      worst = std::max(worst, rel);
      if (rel < 0.10) ++good;
    }
    detail = std::to_string(good) + "/10 under 10%, worst " + fmt(worst);
    return good >= 9;
  });

  // ------------------------------------------------------------------ 3
  runner.criterion(3, "kappa eigenvalue floor on every snapshot", [&](std::string& detail) {
    double min_eig = 1e300;
    long count = 0;
    for (const auto& trace : slln_traces) {
      for (const auto& snap : trace.snapshots) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(snap.cov, Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
        ++count;
      }
    }
    detail = std::to_string(count) + " snapshots, min eig " + fmt(min_eig);
    return count > 0 && min_eig >= 0.01 - 1e-12;
  });

  // ------------------------------------------------------------------ 4
  runner.criterion(4, "discretized kernel invariance and reversibility", [&](std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const GaussianTarget t(Vector::Zero(1), SpdMatrix::identity(1));
    const DiscreteChain chain =
        discretize_rwm_1d(t, SpdMatrix::identity(1), -8.0, 8.0, 321);
    const Eigen::VectorXd stat = stationary_distribution(chain.P);
    const double stat_err = (stat - chain.pi).cwiseAbs().maxCoeff();
    const double rev = reversibility_residual(chain);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    detail = "stationary err " + fmt(stat_err) + ", reversibility " + fmt(rev);
    return stat_err < 1e-8 && rev < 1e-8 && secs < 5.0;
  });

  // ------------------------------------------------------------------ 7
  runner.criterion(7, "drift certificate: gaussian yes, cauchy no", [&](std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const GaussianTarget gauss(Vector::Zero(1), SpdMatrix::identity(1));
    const SpdMatrix v = SpdMatrix::identity(1);
    const DriftCertificate cert =
        fit_drift_certificate(gauss, v, {1.0, 1.5, 2.0, 3.0}, 0.05);
    if (!(cert.lambda < 1.0)) {
      detail = "lambda >= 1";
      return false;
    }
    const DriftFunction df(gauss);
    double worst_slack = 1e300;
    Vector x(1);
    for (int i = 0; i < 200; ++i) {
      const double r = (i % 2 == 0) ? cert.R * (i + 1.0) / 201.0
                                    : cert.R * (1.0 + 7.0 * (i + 1.0) / 201.0);
      x[0] = (i % 4 < 2) ? r : -r;
      const TauResult res = drift_ratio_tau_quadrature(gauss, v, x);
      const double V = std::exp(df.log_drift(x));
      const double pv = V * (1.0 - res.tau);
      const double rhs = cert.lambda * V + (std::abs(x[0]) <= cert.R ? cert.b : 0.0);
      worst_slack = std::min(worst_slack, rhs + 3.0 * res.err * V + 1e-9 - pv);
    }
    bool cauchy_rejected = false;
    try {
      fit_drift_certificate(CauchyLikeTarget(1), v, {1.0, 2.0, 4.0, 8.0}, 0.05);
    } catch (const NoDriftFound&) {
      cauchy_rejected = true;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    detail = "lambda " + fmt(cert.lambda) + ", b " + fmt(cert.b) + ", R " + fmt(cert.R) +
             ", holdout slack " + fmt(worst_slack) + ", cauchy " +
             (cauchy_rejected ? "NoDriftFound" : "unexpectedly certified");
    return cert.lambda < 1.0 && worst_slack >= 0.0 && cauchy_rejected && secs < 30.0;
  });

  // ------------------------------------------------------------------ 8
  runner.criterion(8, "computable bound formulas and k-step audit", [&](std::string& detail) {
    const ConvergenceBound hand = mt_bound(0.5, 2.0, 0.5);
    if (hand.gamma != 36.0 || hand.lambda_check != 36.5 / 37.0 || hand.b_check != 38.0 ||
        hand.zeta_bar != 1920.0) {
      detail = "hand-derived constants mismatch";
      return false;
    }
    const GaussianTarget t(Vector::Zero(1), SpdMatrix::identity(1));
    const DriftFunction df(t);
    const DiscreteChain chain =
        discretize_rwm_1d(t, SpdMatrix::identity(1), -8.0, 8.0, 321);
    const DiscreteCertificate cert = fit_discrete_certificate(chain, df, 2.5);
    const ConvergenceBound bound = mt_bound(cert.lambda, cert.b, cert.delta);

    const int i0 = chain.index_of(3.0);
    Vector x0(1);
    x0 << chain.grid[i0];
    const double log_v0 = df.log_drift(x0);
    Eigen::VectorXd row = kstep_row(chain.P, i0, 0);
    double worst_margin = 1e300;
    for (long k = 0; k <= 200; ++k) {
      if (k > 0) row = chain.P.transpose() * row;
      const double dist = vnorm_distance(chain, df, row);
      const double log_bound = bound.log_bound(k, log_v0);
      worst_margin = std::min(worst_margin, log_bound - std::log(dist));
      if (std::log(dist) > log_bound + 1e-9) {
        detail = "bound violated at k = " + std::to_string(k);
        return false;
      }
    }
    detail = "lambda " + fmt(cert.lambda) + ", delta " + fmt(cert.delta) +
             ", min log-margin " + fmt(worst_margin);
    return true;
  });

  // ------------------------------------------------------------------ 9
  runner.criterion(9, "polynomial rate-chain envelopes", [&](std::string& detail) {
    int checked = 0;
    for (double c : {1.0, 2.0, 5.0})
      for (double eps : {0.0, 0.05, 0.1})
        for (long n : {1L, 10L, 1000L}) {
          const PolyRateChain chain = polynomial_rate_chain(c, eps, 1.0, n);
          ++checked;
          if (!chain.audit_ok) {
            detail = "audit failed at c=" + fmt(c) + " eps=" + fmt(eps) +
                     " n=" + std::to_string(n);
            return false;
          }
        }
    detail = std::to_string(checked) + " parameter triples audited";
    return true;
  });

  // ------------------------------------------------------------------ 10
  runner.criterion(10, "shift inequalities and ellipse contour ratio", [&](std::string& detail) {
    for (double eps : {0.01, 0.05, 0.1}) {
      const RayleighShiftReport report = rayleigh_shift_checks(eps);
      if (!report.pointwise_ok || !report.integral_ok) {
        detail = "shift inequality failed at eps = " + fmt(eps);
        return false;
      }
    }
    Matrix c(2, 2);
    c << 4.0, 0.0, 0.0, 1.0;
    const GaussianTarget ellipse(Vector::Zero(2), SpdMatrix::from_matrix(c));
    const ContourRatio ratio = contour_ratio_check(ellipse, std::exp(-1.0), 720);
    detail = "m_hat " + fmt(ratio.m_hat) + " <= bound " + fmt(ratio.m_bound);
    return std::abs(ratio.m_hat - 2.0) < 1e-6 && ratio.m_hat <= ratio.m_bound;
  });

  // ------------------------------------------------------------------ 11
  runner.criterion(11, "constraint schedule feasibility and coincidence", [&](std::string& detail) {
    const GaussianTarget t(Vector::Zero(1), SpdMatrix::identity(1));
    AmConfig cfg;
    ConstraintSchedule off;
    ConstraintSchedule on;
    on.enabled = true;
    on.t = 1e6;
    on.eps_prime = 0.05;
    const ChainTrace base =
        run_am_chain(cfg, off, t, Vector::Zero(1), SpdMatrix::identity(1), 10000, 424242);
    const ChainTrace constrained =
        run_am_chain(cfg, on, t, Vector::Zero(1), SpdMatrix::identity(1), 10000, 424242);
    if (!constrained.constraint_hits.empty()) {
      detail = "unexpected constraint hits";
      return false;
    }
    for (long n = 1; n <= constrained.n_steps; ++n) {
      if (!(constrained.s_norm(n) <= on.bound(n))) {
        detail = "|S_n| left K_n at n = " + std::to_string(n);
        return false;
      }
    }
    const bool identical = base.states == constrained.states &&
                           base.accepted == constrained.accepted &&
                           base.mean_norms == constrained.mean_norms &&
                           base.cov_norms == constrained.cov_norms;
    if (!identical) {
      detail = "constrained trace differs bitwise";
      return false;
    }

    // Keep one constrained harness run for the replay criterion.
    json j{{"target", {{"name", "gaussian"}, {"dim", 1}}},
           {"constraint", {{"enabled", true}, {"t", 1e6}, {"eps_prime", 0.05}}},
           {"run",
            {{"n_steps", 10000L},
             {"root_seed", 424242ULL},
             {"out_dir", (out_root / "constrained").string()}}}};
    constrained_summary = run_experiment(parse_config_json(j)).summary_path;
    detail = "traces coincide bitwise, K_n never violated";
    return true;
  });

  // ------------------------------------------------------------------ 12 (soft between 4 and 8)
  runner.criterion(12, "growth-certificate stability across seeds", [&](std::string& detail) {
    const GaussianTarget t(Vector::Zero(1), SpdMatrix::identity(1));
    AmConfig cfg;
    ConstraintSchedule off;
    double a_min = 1e300, a_max = 0.0;
    for (int seed = 0; seed < 10; ++seed) {
      const ChainTrace trace =
          run_am_chain(cfg, off, t, Vector::Zero(1), SpdMatrix::identity(1), 50000,
                       derive_stream_seed(555, seed));
      const GrowthReport report = growth_monitor(trace, 0.25);
      if (!std::isfinite(report.a_state)) {
        detail = "A_state not finite";
        return false;
      }
      a_min = std::min(a_min, report.a_state);
      a_max = std::max(a_max, report.a_state);
    }
    const double ratio = a_max / a_min;
    detail = "A_state in [" + fmt(a_min) + ", " + fmt(a_max) + "], ratio " + fmt(ratio);
    if (ratio < 4.0) return true;
    if (ratio < 8.0) {
      detail += " (soft zone [4,8): logged, not gating)";
      return true;
    }
    return false;
  });

  // ------------------------------------------------------------------ 13
  runner.criterion(13, "batch-means CLT shape check", [&](std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    json j{{"target", {{"name", "gaussian"}, {"dim", 1}}},
           {"run",
            {{"n_steps", 500000L},
             {"root_seed", 777001ULL},
             {"out_dir", (out_root / "clt").string()},
             {"checkpoint_stride", 500000L}}}};
    const RunConfig cfg = parse_config_json(j);
    const OutputRecord record = run_experiment(cfg);
    clt_summary = record.summary_path;
    const auto target = make_target(cfg.target);
    clt_trace = run_am_chain(cfg.am, cfg.constraint, *target, cfg.x0,
                             SpdMatrix::from_matrix(cfg.sigma0), cfg.n_steps,
                             derive_stream_seed(cfg.root_seed, 0));
    const BatchMeansReport report =
        clt_batch_means(clt_trace, [](const Vector& x) { return x[0]; }, 50, 0.1);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    detail = "sigma2 " + fmt(report.sigma2_hat) + ", skew " + fmt(report.skewness) +
             ", exkurt " + fmt(report.excess_kurtosis) + ", " + fmt(secs) + "s";
    return report.sigma2_hat > 0.0 && std::abs(report.skewness) < 0.5 &&
           std::abs(report.excess_kurtosis) < 1.0 && secs < 30.0;
  });

  // ------------------------------------------------------------------ 14
  runner.criterion(14, "replay reproduces every recorded trace", [&](std::string& detail) {
    int replayed = 0;
    for (const std::string& summary : {slln_summary, clt_summary, constrained_summary}) {
      if (summary.empty()) {
        detail = "missing recorded run";
        return false;
      }
      const ReplayReport report = replay(summary);
      if (!report.ok) {
        detail = "mismatch replaying " + summary;
        return false;
      }
      ++replayed;
    }
    // Spot byte-for-byte identity, not just hash equality.
    const json summary = json::parse(read_file(clt_summary));
    const RunConfig cfg = parse_config_json(summary.at("config"));
    const std::string disk =
        read_file(summary.at("chains").at(0).at("trace_csv").get<std::string>());
    if (disk != trace_to_csv(clt_trace)) {
      detail = "regenerated CSV differs from disk bytes";
      return false;
    }
    detail = std::to_string(replayed) + " runs replayed byte-identically";
    return true;
  });

  if (runner.failures == 0) {
    std::printf("acceptance: all criteria passed\n");
  } else {
    std::printf("acceptance: %d criterion(s) FAILED\n", runner.failures);
  }
  return runner.failures;
}
