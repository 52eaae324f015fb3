#include "am/kernel.hpp"

#include <cmath>

namespace am {

double acceptance_probability(const Vector& x, const Vector& y, const TargetDensity& t) {
  const double lx = t.log_density(x);
  if (!(lx > -std::numeric_limits<double>::infinity()))
    throw InvalidState("acceptance_probability: pi(x) = 0 at the current state");
  const double lr = t.log_density(y) - lx;
  return lr >= 0.0 ? 1.0 : std::exp(lr);
}

KernelStep rwm_step_cached(const Vector& x, double log_pi_x, const TargetDensity& t,
                           const SpdMatrix& cov, RngStream& rng) {
  if (x.size() != cov.dim())
    throw DimensionMismatch("rwm_step: state/proposal-covariance dimension mismatch");
  if (!(log_pi_x > -std::numeric_limits<double>::infinity()))
    throw InvalidState("rwm_step: pi(x) = 0 at the current state");

  const double u = rng.uniform();
  const Vector increment = cov.cholesky() * rng.gaussian_vector(cov.dim());

  KernelStep step;
  step.proposal = x + increment;
  step.log_ratio = t.log_density(step.proposal) - log_pi_x;
  step.accepted = std::log(u) < step.log_ratio;  // handles log_ratio >= 0 too
  step.next_state = step.accepted ? step.proposal : x;
  return step;
}

KernelStep rwm_step(const Vector& x, const TargetDensity& t, const SpdMatrix& cov,
                    RngStream& rng) {
  return rwm_step_cached(x, t.log_density(x), t, cov, rng);
}

}  // namespace am
