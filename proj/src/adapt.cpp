#include "am/adapt.hpp"

#include <cmath>
#include <string>

namespace am {

Increment adaptation_H(const AdaptationState& s, const Vector& x, double kappa) {
  if (x.size() != s.mean.size())
    throw DimensionMismatch("adaptation_H: state/sample dimension mismatch");
  const Vector centered = x - s.mean;
  Increment inc;
  inc.mean_delta = centered;
  inc.cov_delta = centered * centered.transpose() - s.cov.matrix() +
                  kappa * Matrix::Identity(x.size(), x.size());
  return inc;
}

AdaptationState am_update(const AdaptationState& s, const Vector& x_new,
                          const AmConfig& cfg) {
  if (x_new.size() != s.mean.size())
    throw DimensionMismatch("am_update: state/sample dimension mismatch");
  const long next = s.n + 1;
  const double inv = 1.0 / static_cast<double>(next + 1);

  double w_old;
  double floor;
  if (cfg.variant == RecursionVariant::modified) {
    w_old = static_cast<double>(next) * inv;
    floor = w_old * s.cov.certified_floor() + inv * cfg.kappa;
  } else {
    if (s.n < 1)
      throw std::invalid_argument("am_update: original variant requires state.n >= 1");
    w_old = static_cast<double>(next - 1) / static_cast<double>(next);
    floor = w_old * s.cov.certified_floor() + inv * cfg.kappa;
  }

  const Vector centered = x_new - s.mean;
  const int d = static_cast<int>(x_new.size());
  Matrix cov = w_old * s.cov.matrix() +
               inv * (centered * centered.transpose() + cfg.kappa * Matrix::Identity(d, d));

  AdaptationState out{s.mean + inv * centered, SpdMatrix(std::move(cov), floor), next};
  return out;
}

std::pair<AdaptationState, bool> constrain_step(const AdaptationState& s,
                                                const Increment& increment, long n,
                                                const ConstraintSchedule& sched) {
  const Vector mean = s.mean + increment.mean_delta;
  Matrix cov = s.cov.matrix() + increment.cov_delta;
  const double norm = std::max(mean.norm(), frobenius_norm(cov));
  if (!sched.enabled || norm <= sched.bound(n)) {
    // Floors are unknown for a raw increment; derive one from the spectrum.
    AdaptationState out{mean, SpdMatrix::from_matrix(cov), n};
    return {std::move(out), true};
  }
  AdaptationState unchanged{s.mean, s.cov, n};
  return {std::move(unchanged), false};
}

Vector ChainTrace::state_at(long k) const {
  Vector x(dim);
  for (int j = 0; j < dim; ++j) x[j] = states[static_cast<std::size_t>(k) * dim + j];
  return x;
}

bool ChainTrace::constraint_hit_at(long k) const {
  for (long h : constraint_hits)
    if (h == k) return true;
  return false;
}

double ChainTrace::acceptance_rate() const {
  if (accepted.empty()) return 0.0;
  double sum = 0.0;
  for (auto a : accepted) sum += a;
  return sum / static_cast<double>(accepted.size());
}

namespace {

// H-form update S + eta H(S, x) for general weights eta_n = (n+1)^-gamma.
// Still a convex combination on the covariance side, so the kappa floor
// propagates the same way.
AdaptationState h_form_update(const AdaptationState& s, const Vector& x,
                              double kappa, double eta) {
  const Vector centered = x - s.mean;
  const int d = static_cast<int>(x.size());
  Matrix cov = s.cov.matrix() +
               eta * (centered * centered.transpose() - s.cov.matrix() +
                      kappa * Matrix::Identity(d, d));
  const double floor = (1.0 - eta) * s.cov.certified_floor() + eta * kappa;
  return AdaptationState{s.mean + eta * centered, SpdMatrix(std::move(cov), floor),
                         s.n + 1};
}

}  // namespace

ChainTrace run_am_chain(const AmConfig& cfg, const ConstraintSchedule& sched,
                        const TargetDensity& t, const Vector& x0,
                        const SpdMatrix& sigma0, long n_steps, std::uint64_t seed) {
  const int d = t.dim();
  if (x0.size() != d || sigma0.dim() != d)
    throw DimensionMismatch("run_am_chain: x0/sigma0/target dimension mismatch");
  if (!(cfg.kappa > 0.0)) throw std::invalid_argument("run_am_chain: kappa must be > 0");
  if (!(cfg.weight_exponent > 0.0))
    throw std::invalid_argument("run_am_chain: weight_exponent must be > 0");
  if (cfg.variant == RecursionVariant::original && cfg.weight_exponent != 1.0)
    throw std::invalid_argument(
        "run_am_chain: the original recursion is only defined for weight_exponent 1");

  const double sigma0_min_eig = sigma0.min_eigenvalue();
  if (sigma0_min_eig < cfg.kappa - 1e-12)
    throw InvalidState("run_am_chain: sigma0 must dominate kappa*I (min eigenvalue " +
                       std::to_string(sigma0_min_eig) + " < kappa)");

  double log_pi_x = t.log_density(x0);
  if (!(log_pi_x > -std::numeric_limits<double>::infinity()))
    throw InvalidState("run_am_chain: pi(x0) = 0");

  const double log_c_v = 0.5 * t.sup_log_density();
  const double theta = cfg.effective_theta(d);
  const bool plain_recursion = cfg.weight_exponent == 1.0;

  RngStream rng(seed);

  const double floor0 =
      std::max(sigma0.certified_floor(), std::min(sigma0_min_eig, cfg.kappa));
  AdaptationState state{x0, SpdMatrix(sigma0.matrix(), floor0), 0};
  if (sched.enabled && state.state_norm() > sched.bound(0))
    throw InvalidState("run_am_chain: initial adaptation state lies outside K_0");

  ChainTrace trace;
  trace.dim = d;
  trace.n_steps = n_steps;
  trace.seed = seed;
  trace.states.reserve(static_cast<std::size_t>(n_steps + 1) * d);
  trace.accepted.reserve(n_steps);
  trace.mean_norms.reserve(n_steps + 1);
  trace.cov_norms.reserve(n_steps + 1);

  auto record_state = [&trace, d](const Vector& x, const AdaptationState& s) {
    for (int j = 0; j < d; ++j) trace.states.push_back(x[j]);
    trace.mean_norms.push_back(s.mean.norm());
    trace.cov_norms.push_back(s.cov.frobenius_norm());
  };
  auto snapshot = [&trace](long step, const AdaptationState& s) {
    trace.snapshots.push_back({step, s.mean, s.cov.matrix(), s.cov.certified_floor()});
  };

  Vector x = x0;
  record_state(x, state);
  if (cfg.snapshot_stride > 0) snapshot(0, state);

  for (long n = 1; n <= n_steps; ++n) {
    const SpdMatrix proposal_cov =
        (n <= cfg.burn_in) ? sigma0 : state.cov.scaled(theta);
    const KernelStep step = rwm_step_cached(x, log_pi_x, t, proposal_cov, rng);
    x = step.next_state;
    if (step.accepted) log_pi_x += step.log_ratio;
    trace.accepted.push_back(step.accepted ? 1 : 0);

    if (log_c_v - 0.5 * log_pi_x > DriftFunction::kLogOverflow)
      throw OverflowHalt("run_am_chain: drift function overflowed at step " +
                         std::to_string(n));

    AdaptationState candidate =
        plain_recursion
            ? ((cfg.variant == RecursionVariant::original && state.n == 0)
                   // The original recursion starts one step late; seed it with
                   // the convex-combination update so the floor never dips.
                   ? am_update(state, x, AmConfig{cfg.theta, cfg.kappa, 1.0,
                                                  RecursionVariant::modified,
                                                  cfg.burn_in, cfg.snapshot_stride})
                   : am_update(state, x, cfg))
            : h_form_update(state, x, cfg.kappa,
                            std::pow(static_cast<double>(n + 1), -cfg.weight_exponent));

    if (sched.enabled && candidate.state_norm() > sched.bound(n)) {
      state = AdaptationState{state.mean, state.cov, n};
      trace.constraint_hits.push_back(n);
    } else {
      state = std::move(candidate);
    }

    record_state(x, state);
    if (cfg.snapshot_stride > 0 && (n % cfg.snapshot_stride == 0 || n == n_steps))
      snapshot(n, state);
  }
  return trace;
}

GrowthReport growth_monitor(const ChainTrace& trace, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("growth_monitor: eps must be > 0");
  GrowthReport report;
  for (long n = 1; n <= trace.n_steps; ++n) {
    const double scale = std::pow(static_cast<double>(n), -eps);
    report.a_state = std::max(report.a_state, trace.state_at(n).norm() * scale);
    report.a_mean = std::max(report.a_mean, trace.mean_norms[n] * scale);
    report.a_cov = std::max(report.a_cov, trace.cov_norms[n] * scale);
  }
  return report;
}

}  // namespace am
