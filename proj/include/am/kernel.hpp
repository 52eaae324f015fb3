#ifndef AMTK_KERNEL_HPP
#define AMTK_KERNEL_HPP

#include "am/target.hpp"

namespace am {

// One symmetric random-walk Metropolis transition.
// accepted => next_state == proposal; otherwise next_state is the old state.
struct KernelStep {
  Vector next_state;
  bool accepted = false;
  double log_ratio = 0.0;  // log pi(proposal) - log pi(current)
  Vector proposal;
};

// min(1, pi(y)/pi(x)). Throws InvalidState when pi(x) = 0.
double acceptance_probability(const Vector& x, const Vector& y, const TargetDensity& t);

// Gaussian-proposal Metropolis step. Consumes exactly one uniform (the
// accept draw) followed by one Gaussian vector (the proposal increment), in
// that order; the accept test compares log(u) against the log ratio so
// super-exponential tails cannot underflow the comparison.
KernelStep rwm_step(const Vector& x, const TargetDensity& t, const SpdMatrix& cov,
                    RngStream& rng);

// Same step with the current log-density passed in, so chain drivers can
// avoid re-evaluating the target at the current state.
KernelStep rwm_step_cached(const Vector& x, double log_pi_x, const TargetDensity& t,
                           const SpdMatrix& cov, RngStream& rng);

}  // namespace am

#endif  // AMTK_KERNEL_HPP
