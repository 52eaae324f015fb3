#ifndef AMTK_VERIFY_HPP
#define AMTK_VERIFY_HPP

#include <string>
#include <vector>

#include "am/target.hpp"

namespace am {

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);

// Shell sweep of the radial log-density decay statistic
//   sup over unit directions u of  r^{1-rho} * (u . grad log pi(r u)).
// A super-exponential tail drives the suprema to -infinity; verdict rules:
//   pass          strictly decreasing over the last three shells AND the
//                 outermost supremum <= -threshold
//   fail          not strictly decreasing over the last three shells
//   inconclusive  anything else (too few shells, not yet past the threshold,
//                 or a failed gradient evaluation)
struct TailReport {
  double rho = 0.0;
  std::vector<double> shell_radii;
  std::vector<double> shell_suprema;
  Verdict verdict = Verdict::inconclusive;
};

TailReport verify_super_exponential(const TargetDensity& t, double rho,
                                    const std::vector<double>& radii,
                                    int dirs_per_shell, RngStream& rng,
                                    double threshold = 10.0);

// Shell sweep of the contour statistic
//   sup over unit directions u of  u . (grad pi / ||grad pi||)  at r u.
// Regular contours keep this bounded away from zero from below; verdict is
// pass iff every supremum over the last three shells is < -margin.
struct ContourReport {
  std::vector<double> shell_radii;
  std::vector<double> shell_suprema;
  Verdict verdict = Verdict::inconclusive;
};

ContourReport verify_contour_regularity(const TargetDensity& t,
                                        const std::vector<double>& radii,
                                        int dirs_per_shell, RngStream& rng,
                                        double margin = 0.1);

// Exponential lower bound V(y) >= c e^{gamma ||y||} for the drift function.
// gamma comes from the worst directional derivative of log pi on the sphere
// ||x|| = R (gamma = gamma_dir / (4R)); c from the infimum of V e^{-gamma r}
// over the ball ||y|| <= 2R, capped by the tail constant. The fitted bound is
// validated pointwise on probe_radii; throws FitFailed if no positive gamma
// validates.
struct RadialGrowthFit {
  double gamma = 0.0;
  double c = 0.0;
};

RadialGrowthFit radial_growth_estimate(const DriftFunction& df, double R,
                                       const std::vector<double>& probe_radii,
                                       int dirs = 128, std::uint64_t seed = 20240);

// Traces the level set {pi = level} by radial bisection and reports
//   m_hat   = (max contour radius) / (min contour radius)
//   m_bound = e^{2 pi tan(alpha_0)},  alpha_0 = arccos(-sup contour statistic),
// the ratio bound implied by the contour regularity angle. m_bound is +inf
// when the contour condition fails on the traced points. Requires d >= 2; in
// one dimension the two contour points are handled separately elsewhere.
struct ContourRatio {
  double m_hat = 0.0;
  double m_bound = 0.0;
  double alpha0 = 0.0;
};

ContourRatio contour_ratio_check(const TargetDensity& t, double level, int n_points);

// Uniform direction on the unit sphere via a normalized Gaussian draw.
Vector random_unit_vector(int d, RngStream& rng);

}  // namespace am

#endif  // AMTK_VERIFY_HPP
