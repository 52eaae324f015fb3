#ifndef AMTK_CERTIFY_HPP
#define AMTK_CERTIFY_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "am/target.hpp"

namespace am {

// ---------------------------------------------------------------------------
// Drift fraction tau_v(x) = 1 - P_v V(x) / V(x) for the random-walk
// Metropolis kernel with Gaussian proposal covariance v and drift function
// V = c_V pi^{-1/2}. Expanding the kernel integral,
//
//   tau = int (1 ^ r) (1 - r^{-1/2}) q_v(y - x) dy,   r = pi(y)/pi(x),
//
// which splits into an acceptance-region term and a (negative) rejection
// term. Everything is evaluated in log space, so tau always lies in
// [-1/4, 1] regardless of how deep x sits in the tail.
// ---------------------------------------------------------------------------

struct TauResult {
  double tau = 0.0;
  double err = 0.0;  // estimated integration error / Monte Carlo s.e.
};

struct QuadratureOptions {
  double range_sigmas = 12.0;  // integration range in proposal stdevs
  int points_1d = 16001;
  int points_2d = 401;  // per axis, tensor grid
};

// Deterministic quadrature; d <= 2 only.
TauResult drift_ratio_tau_quadrature(const TargetDensity& t, const SpdMatrix& v,
                                     const Vector& x, const QuadratureOptions& opts = {});

// Monte Carlo estimate with reported standard error; any dimension.
TauResult drift_ratio_tau_monte_carlo(const TargetDensity& t, const SpdMatrix& v,
                                      const Vector& x, long n, RngStream& rng);

// ---------------------------------------------------------------------------
// Geometric drift certificate P_v V <= lambda V + b 1_C, C = ball(0, R),
// plus the minorization constant delta for the uniform measure on C.
// The fit is empirical: tau is probed on shells outside candidate radii and
// the certificate must validate on a fresh holdout set. Heavy-tailed targets
// are expected to end in NoDriftFound.
// ---------------------------------------------------------------------------

struct DriftCertificate {
  double lambda = 0.0;  // in (0,1)
  double b = 0.0;       // >= sup_C V
  double R = 0.0;       // C = closed ball(0, R)
  double delta = 0.0;   // minorization constant in (0,1]
  SpdMatrix v;          // the certified proposal covariance
  std::string quadrature_budget;
  double observed_min_tau = 0.0;  // worst tau-hat seen on the tail probes
  double max_quadrature_err = 0.0;
};

struct CertifyOptions {
  int tail_dirs = 16;  // directions per probe shell (d = 1 uses both signs)
  std::vector<double> tail_shell_factors = {1.0, 1.25, 1.5, 2.0, 3.0, 5.0};
  int ball_grid = 9;        // radii used for the b estimate on C
  int holdout_points = 200;
  double b_safety = 1.02;
  std::uint64_t seed = 99991;
  QuadratureOptions quad;
  long mc_n = 200000;  // sample count when d >= 3 forces Monte Carlo
};

DriftCertificate fit_drift_certificate(const TargetDensity& t, const SpdMatrix& v,
                                       const std::vector<double>& search_radii,
                                       double margin, const CertifyOptions& opts = {});

// delta = |C| (2 pi)^{-d/2} det(v)^{-1/2} e^{-diam(C)^2 / (2 kappa')}
//         * (inf_C pi) / (sup pi),  clamped into (0, 1],
// where kappa' is the certified eigenvalue floor of v. inf_C pi comes from a
// grid minimization over the ball.
double estimate_minorization(const TargetDensity& t, const SpdMatrix& v, double R);

// Scaling audit across a family of proposal covariances: reports
// ((1 - lambda_v)^{-1} v delta_v^{-1}) / det(v)^{1/2} per member. The family
// passes when every ratio is finite; max/min quantifies the spread.
struct ScalingAuditRow {
  double det_v = 0.0;
  double lambda = 0.0;
  double delta = 0.0;
  double ratio = 0.0;
};

struct ScalingAudit {
  std::vector<ScalingAuditRow> rows;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
};

ScalingAudit det_scaling_audit(const TargetDensity& t, const std::vector<SpdMatrix>& vs,
                               double kappa, const std::vector<double>& search_radii,
                               double margin, const CertifyOptions& opts = {});

// ---------------------------------------------------------------------------
// Computable geometric convergence bound from drift/minorization constants
// (Meyn & Tweedie 1994, "Computable bounds for geometric convergence rates
// of Markov chains"):
//
//   gamma        = delta^-2 (4 b + 2 delta lambda b)
//   lambda_check = (lambda + gamma) / (1 + gamma)
//   b_check      = b + gamma
//   zeta_bar     = ((4 - delta^2) / delta^5) (b / (1 - lambda))^2   [upper bound]
//   M_tilde      = (1-lambda_check)^-2 [ 1 - lambda_check + b_check + b_check^2
//                  + zeta_bar (b_check (1 - lambda_check) + b_check^2) ]
//   vartheta     = 1 - 1/M_tilde,  rho = (1 + vartheta)/2  (overridable),
//   L            = (1 + gamma) rho / (rho - vartheta),
//
// giving ||P^k(x,.) - pi||_V <= L rho^k V(x).
//
// M_tilde can be so large that vartheta rounds to 1 in double precision, so
// the complements one_minus_vartheta = 1/M_tilde and one_minus_rho are kept
// as first-class fields and log_L is provided for bound evaluation.
// ---------------------------------------------------------------------------

struct ConvergenceBound {
  double gamma = 0.0;
  double lambda_check = 0.0;
  double b_check = 0.0;
  double zeta_bar = 0.0;
  double M_tilde = 0.0;
  double vartheta = 0.0;
  double rho = 0.0;
  double L = 0.0;
  double one_minus_vartheta = 0.0;
  double one_minus_rho = 0.0;
  double log_L = 0.0;

  // log of the k-step bound L rho^k V(x0), safe for astronomically large L.
  double log_bound(long k, double log_v_x0) const;
};

ConvergenceBound mt_bound(double lambda, double b, double delta,
                          std::optional<double> rho_override = std::nullopt);

// ---------------------------------------------------------------------------
// Explicit rate chain under polynomially growing drift constants:
//   lambda_n = 1 - r c^-1 n^-eps,  b_n = (2 c n^eps)^r,  delta_n = c^-1 n^-eps,
// pushed through the convergence-bound formulas with rho_n = (1+vartheta_n)/2.
// The audit re-derives the polynomial envelopes
//   (1 - rho_n)^-1 <= a6 n^{23 eps},   L_n <= a7 n^{26 eps}
// with the constants a1..a7 assembled from (c, r), not assumed.
// ---------------------------------------------------------------------------

struct PolyRateChain {
  double lambda_tilde = 0.0;
  double b_tilde = 0.0;
  double delta_n = 0.0;
  ConvergenceBound bound;
  double rho_n = 0.0;
  double L_n = 0.0;
  std::array<double, 7> a{};  // a1..a7
  double rate_envelope = 0.0;  // a6 n^{23 eps}
  double l_envelope = 0.0;     // a7 n^{26 eps}
  bool audit_ok = false;
};

PolyRateChain polynomial_rate_chain(double c, double eps, double r, long n);

// ---------------------------------------------------------------------------
// Analytic inequalities for the shifted Rayleigh-type function
// f(x) = x e^{-x^2/2}, used by the drift estimates:
//   2 f(x + eps) - f(x) >= x/8          on (0, 1/2],
//   int_0^inf [2 f(x+eps) - f(x)]^- dx >= -e^{-eps^-2 / 32}.
// Checked on a fine grid / by composite quadrature for 0 < eps < 1/8.
// ---------------------------------------------------------------------------

struct RayleighShiftReport {
  bool pointwise_ok = false;
  double min_pointwise_slack = 0.0;
  double negative_part_integral = 0.0;
  double integral_bound = 0.0;  // -e^{-eps^-2/32}
  bool integral_ok = false;
};

RayleighShiftReport rayleigh_shift_checks(double eps);

// ---------------------------------------------------------------------------
// Discretized one-dimensional RWM chain on a uniform grid. The transition
// matrix satisfies detailed balance with respect to the discretized target
// by construction, so the normalized grid density is its exact stationary
// vector; that makes the matrix an independent oracle for kernel invariance
// and for end-to-end convergence-bound audits.
// ---------------------------------------------------------------------------

struct DiscreteChain {
  std::vector<double> grid;
  double h = 0.0;
  Matrix P;
  Eigen::VectorXd pi;  // normalized cell probabilities

  int index_of(double x) const;  // nearest grid point
  double boundary_mass() const { return pi[0] + pi[pi.size() - 1]; }
};

DiscreteChain discretize_rwm_1d(const TargetDensity& t, const SpdMatrix& v, double lo,
                                double hi, int n);

Eigen::VectorXd stationary_distribution(const Matrix& P, double tol = 1e-13,
                                        long max_iter = 200000);

double reversibility_residual(const DiscreteChain& chain);

// Row of P^k starting from grid index i0.
Eigen::VectorXd kstep_row(const Matrix& P, int i0, long k);

// V-weighted total-variation distance of the k-step law from stationarity.
double vnorm_distance(const DiscreteChain& chain, const DriftFunction& df,
                      const Eigen::VectorXd& row);

// Convenience wrapper building the chain, checking grid coverage
// (boundary mass must be <= 1e-10) and returning the k-step distance from
// the grid point nearest x0.
double vnorm_distance_discretized(const TargetDensity& t, const SpdMatrix& v, double x0,
                                  long k, double lo, double hi, int n);

// Drift/minorization constants computed exactly on the discrete chain:
// lambda from PV/V outside C, b from PV and V on C, delta from the worst
// within-C transition against the uniform measure on the C grid points.
struct DiscreteCertificate {
  double lambda = 0.0;
  double b = 0.0;
  double delta = 0.0;
  double R = 0.0;
  long n_C = 0;
};

DiscreteCertificate fit_discrete_certificate(const DiscreteChain& chain,
                                             const DriftFunction& df, double R);

}  // namespace am

#endif  // AMTK_CERTIFY_HPP
