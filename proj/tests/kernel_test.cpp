#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "am/certify.hpp"
#include "am/kernel.hpp"

using namespace am;

namespace {

GaussianTarget standard_gaussian(int d) {
  return GaussianTarget(Vector::Zero(d), SpdMatrix::identity(d));
}

}  // namespace

TEST_CASE("uphill proposals are always accepted") {
  const auto t = standard_gaussian(1);
  Vector x(1), y(1);
  x << 2.0;
  y << 0.5;
  CHECK(acceptance_probability(x, y, t) == 1.0);
  CHECK(acceptance_probability(x, x, t) == 1.0);
}

TEST_CASE("downhill acceptance is the density ratio") {
  const auto t = standard_gaussian(1);
  Vector x(1), y(1);
  x << 0.0;
  y << 2.0;
  CHECK(acceptance_probability(x, y, t) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("zero-density current state is invalid") {
  const FunctionTarget t(1, [](const Vector& x) {
    return x[0] > 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  });
  Vector x(1), y(1);
  x << -1.0;
  y << 1.0;
  CHECK_THROWS_AS(acceptance_probability(x, y, t), InvalidState);
  const SpdMatrix cov = SpdMatrix::identity(1);
  RngStream rng(3);
  CHECK_THROWS_AS(rwm_step(x, t, cov, rng), InvalidState);
}

TEST_CASE("rwm_step is deterministic given the stream") {
  const auto t = standard_gaussian(3);
  const SpdMatrix cov = SpdMatrix::identity(3, 0.7);
  Vector x(3);
  x << 0.3, -1.0, 0.2;
  RngStream a(55), b(55);
  const KernelStep sa = rwm_step(x, t, cov, a);
  const KernelStep sb = rwm_step(x, t, cov, b);
  CHECK(sa.accepted == sb.accepted);
  CHECK((sa.proposal - sb.proposal).norm() == 0.0);
  CHECK((sa.next_state - sb.next_state).norm() == 0.0);
  if (sa.accepted) {
    CHECK((sa.next_state - sa.proposal).norm() == 0.0);
  } else {
    CHECK((sa.next_state - x).norm() == 0.0);
  }
}

TEST_CASE("each step consumes one uniform then one gaussian vector") {
  for (int d : {1, 2, 3, 5}) {
    const GaussianTarget t(Vector::Zero(d), SpdMatrix::identity(d));
    const SpdMatrix cov = SpdMatrix::identity(d);
    const Vector x = Vector::Zero(d);
    RngStream used(808), manual(808);
    rwm_step(x, t, cov, used);
    manual.uniform();
    manual.gaussian_vector(d);
    // Both streams must now be in the same position.
    CHECK(used.next_u64() == manual.next_u64());
  }
}

TEST_CASE("long-run acceptance rate matches the double-quadrature oracle") {
  const auto t = standard_gaussian(1);
  const SpdMatrix cov = SpdMatrix::identity(1);

  // Oracle: E_pi E_q min(1, pi(y)/pi(x)) by tensor trapezoid over [-8,8]^2.
  const int m = 801;
  const double lo = -8.0, hi = 8.0, h = (hi - lo) / (m - 1);
  double oracle = 0.0;
  for (int i = 0; i < m; ++i) {
    const double x = lo + i * h;
    const double wx = (i == 0 || i == m - 1) ? 0.5 : 1.0;
    const double px = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    double inner = 0.0;
    for (int j = 0; j < m; ++j) {
      const double y = lo + j * h;
      const double wy = (j == 0 || j == m - 1) ? 0.5 : 1.0;
      const double q = std::exp(-0.5 * (y - x) * (y - x)) / std::sqrt(2.0 * M_PI);
      inner += wy * std::min(1.0, std::exp(-0.5 * (y * y - x * x))) * q;
    }
    oracle += wx * px * inner;
  }
  oracle *= h * h;

  RngStream rng(99);
  Vector x = Vector::Zero(1);
  long accepted = 0;
  const long n = 200000;
  for (long k = 0; k < n; ++k) {
    const KernelStep step = rwm_step(x, t, cov, rng);
    x = step.next_state;
    accepted += step.accepted;
  }
  CHECK(std::abs(static_cast<double>(accepted) / n - oracle) < 0.01);
}

TEST_CASE("discretized kernel leaves the discretized target invariant") {
  const auto t = standard_gaussian(1);
  const DiscreteChain chain = discretize_rwm_1d(t, SpdMatrix::identity(1), -8.0, 8.0, 161);

  // Row-stochastic within rounding.
  for (Eigen::Index i = 0; i < chain.P.rows(); ++i)
    CHECK(std::abs(chain.P.row(i).sum() - 1.0) < 1e-12);

  const Eigen::VectorXd stat = stationary_distribution(chain.P);
  CHECK((stat - chain.pi).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(reversibility_residual(chain) < 1e-8);
}

TEST_CASE("sharpening the target never raises acceptance on shared proposals") {
  const auto t = standard_gaussian(1);
  // pi^2 has log-density 2 log pi.
  const FunctionTarget t_sq(1, [](const Vector& x) { return -x.squaredNorm(); });

  // Pointwise: acceptance under pi^2 is never larger.
  RngStream cloud(7);
  for (int i = 0; i < 200; ++i) {
    Vector x = cloud.gaussian_vector(1);
    Vector y = cloud.gaussian_vector(1);
    CHECK(acceptance_probability(x, y, t_sq) <= acceptance_probability(x, y, t) + 1e-15);
  }

  // Empirically: identical streams, averaged over the run.
  for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
    RngStream ra(seed), rb(seed);
    const SpdMatrix cov = SpdMatrix::identity(1);
    Vector xa = Vector::Zero(1), xb = Vector::Zero(1);
    long acc_a = 0, acc_b = 0;
    for (long k = 0; k < 20000; ++k) {
      const KernelStep sa = rwm_step(xa, t, cov, ra);
      xa = sa.next_state;
      acc_a += sa.accepted;
      const KernelStep sb = rwm_step(xb, t_sq, cov, rb);
      xb = sb.next_state;
      acc_b += sb.accepted;
    }
    CHECK(acc_b <= acc_a);
  }
}
