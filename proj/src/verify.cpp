#include "am/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace am {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "inconclusive";
  }
}

Vector random_unit_vector(int d, RngStream& rng) {
  for (;;) {
    Vector z = rng.gaussian_vector(d);
    const double n = z.norm();
    if (n > 1e-12) return z / n;
  }
}

namespace {

// Unit directions for a shell sweep. d = 1 degenerates to the two signs.
std::vector<Vector> shell_directions(int d, int count, RngStream& rng) {
  std::vector<Vector> dirs;
  if (d == 1) {
    dirs.push_back(Vector::Constant(1, 1.0));
    dirs.push_back(Vector::Constant(1, -1.0));
    return dirs;
  }
  dirs.reserve(count);
  for (int i = 0; i < count; ++i) dirs.push_back(random_unit_vector(d, rng));
  return dirs;
}

bool strictly_decreasing_tail(const std::vector<double>& s) {
  const std::size_t n = s.size();
  if (n < 3) return false;
  return s[n - 1] < s[n - 2] && s[n - 2] < s[n - 3];
}

void validate_radii(const std::vector<double>& radii, double min_radius) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] >= min_radius))
      throw std::invalid_argument("shell radii must be >= " + std::to_string(min_radius));
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw std::invalid_argument("shell radii must be strictly increasing");
  }
}

}  // namespace

TailReport verify_super_exponential(const TargetDensity& t, double rho,
                                    const std::vector<double>& radii,
                                    int dirs_per_shell, RngStream& rng,
                                    double threshold) {
  if (!(rho > 1.0)) throw std::invalid_argument("verify_super_exponential: rho > 1 required");
  validate_radii(radii, 1.0);

  TailReport report;
  report.rho = rho;
  report.shell_radii = radii;
  bool eval_failed = false;
  const auto dirs = shell_directions(t.dim(), dirs_per_shell, rng);
  for (double r : radii) {
    double sup = -std::numeric_limits<double>::infinity();
    const double scale = std::pow(r, 1.0 - rho);
    for (const Vector& u : dirs) {
      const Vector g = t.grad_log_density(r * u);
      if (!g.allFinite()) {
        eval_failed = true;
        continue;
      }
      sup = std::max(sup, scale * u.dot(g));
    }
    report.shell_suprema.push_back(sup);
  }

  if (eval_failed || radii.empty()) {
    report.verdict = Verdict::inconclusive;
  } else if (strictly_decreasing_tail(report.shell_suprema)) {
    report.verdict = report.shell_suprema.back() <= -threshold ? Verdict::pass
                                                               : Verdict::inconclusive;
  } else {
    report.verdict = radii.size() >= 3 ? Verdict::fail : Verdict::inconclusive;
  }
  return report;
}

ContourReport verify_contour_regularity(const TargetDensity& t,
                                        const std::vector<double>& radii,
                                        int dirs_per_shell, RngStream& rng,
                                        double margin) {
  if (!(margin > 0.0)) throw std::invalid_argument("verify_contour_regularity: margin > 0 required");
  validate_radii(radii, 0.0);

  ContourReport report;
  report.shell_radii = radii;
  if (radii.empty()) return report;  // inconclusive

  bool eval_failed = false;
  const auto dirs = shell_directions(t.dim(), dirs_per_shell, rng);
  for (double r : radii) {
    double sup = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (const Vector& u : dirs) {
      // grad pi / ||grad pi|| equals grad log pi / ||grad log pi|| since pi > 0.
      const Vector g = t.grad_log_density(r * u);
      if (!g.allFinite()) {
        eval_failed = true;
        continue;
      }
      const double gn = g.norm();
      if (gn <= 1e-300) continue;  // stationary point; no contour direction
      sup = std::max(sup, u.dot(g) / gn);
      any = true;
    }
    if (!any) eval_failed = true;
    report.shell_suprema.push_back(sup);
  }

  if (eval_failed) {
    report.verdict = Verdict::inconclusive;
    return report;
  }
  const std::size_t n = report.shell_suprema.size();
  const std::size_t from = n >= 3 ? n - 3 : 0;
  bool ok = true;
  for (std::size_t i = from; i < n; ++i) ok = ok && report.shell_suprema[i] < -margin;
  report.verdict = ok ? Verdict::pass : Verdict::fail;
  return report;
}

RadialGrowthFit radial_growth_estimate(const DriftFunction& df, double R,
                                       const std::vector<double>& probe_radii,
                                       int dirs, std::uint64_t seed) {
  if (!(R > 0.0)) throw std::invalid_argument("radial_growth_estimate: R > 0 required");
  const TargetDensity& t = df.target();
  RngStream rng(seed);
  const auto sphere = shell_directions(t.dim(), dirs, rng);

  // Worst directional derivative of log pi on the sphere of radius R.
  double worst = -std::numeric_limits<double>::infinity();
  double max_log_pi_on_sphere = -std::numeric_limits<double>::infinity();
  for (const Vector& u : sphere) {
    const Vector x = R * u;
    worst = std::max(worst, u.dot(t.grad_log_density(x)));
    max_log_pi_on_sphere = std::max(max_log_pi_on_sphere, t.log_density(x));
  }
  const double gamma_dir = -worst;
  if (!(gamma_dir > 0.0))
    throw FitFailed("radial_growth_estimate: no radial decay on the sphere ||x|| = R");

  const double gamma = gamma_dir / (4.0 * R);

  // Tail constant c_V (sup_{||x||=R} pi)^{-1/2}, then cap by the infimum of
  // V(y) e^{-gamma ||y||} over ||y|| <= 2R so the bound extends inward.
  double log_c = df.log_c_v() - 0.5 * max_log_pi_on_sphere;
  const int n_radial = 64;
  for (int i = 0; i <= n_radial; ++i) {
    const double r = 2.0 * R * static_cast<double>(i) / n_radial;
    if (r == 0.0) {
      log_c = std::min(log_c, df.log_drift(Vector::Zero(t.dim())));
      continue;
    }
    for (const Vector& u : sphere)
      log_c = std::min(log_c, df.log_drift(r * u) - gamma * r);
  }

  // Validate pointwise on the probe set.
  for (double r : probe_radii) {
    for (const Vector& u : sphere) {
      const Vector y = (t.dim() == 1) ? Vector::Constant(1, r * u[0]) : Vector(r * u);
      if (df.log_drift(y) < log_c + gamma * r - 1e-9)
        throw FitFailed("radial_growth_estimate: bound fails at radius " + std::to_string(r));
    }
  }

  return {gamma, std::exp(log_c)};
}

ContourRatio contour_ratio_check(const TargetDensity& t, double level, int n_points) {
  const int d = t.dim();
  if (d < 2) throw std::invalid_argument("contour_ratio_check: requires d >= 2");
  if (n_points < 2) throw std::invalid_argument("contour_ratio_check: n_points >= 2 required");
  if (!(level > 0.0)) throw std::invalid_argument("contour_ratio_check: level must be > 0");
  const double log_level = std::log(level);
  if (!(t.log_density(Vector::Zero(d)) >= log_level))
    throw ContourNotFound("contour_ratio_check: level above the density at the origin");

  std::vector<Vector> dirs;
  if (d == 2) {
    dirs.reserve(n_points);
    for (int i = 0; i < n_points; ++i) {
      const double a = 2.0 * M_PI * i / n_points;
      Vector u(2);
      u << std::cos(a), std::sin(a);
      dirs.push_back(u);
    }
  } else {
    RngStream rng(7771);  // fixed stream: the check must be deterministic
    for (int i = 0; i < n_points; ++i) dirs.push_back(random_unit_vector(d, rng));
  }

  double r_min = std::numeric_limits<double>::infinity();
  double r_max = 0.0;
  double sup_stat = -std::numeric_limits<double>::infinity();
  for (const Vector& u : dirs) {
    // Bracket the crossing log pi(r u) = log level, then bisect.
    double lo = 0.0, hi = 1.0;
    int expand = 0;
    while (t.log_density(hi * u) >= log_level) {
      lo = hi;
      hi *= 2.0;
      if (++expand > 60) throw ContourNotFound("contour_ratio_check: no crossing found");
    }
    for (int i = 0; i < 200 && (hi - lo) > 1e-13 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (t.log_density(mid * u) >= log_level ? lo : hi) = mid;
    }
    const double r = 0.5 * (lo + hi);
    r_min = std::min(r_min, r);
    r_max = std::max(r_max, r);
    const Vector g = t.grad_log_density(r * u);
    const double gn = g.norm();
    if (gn > 1e-300) sup_stat = std::max(sup_stat, u.dot(g) / gn);
  }

  ContourRatio out;
  out.m_hat = r_max / r_min;
  const double beta = -sup_stat;  // cos of the worst radius/normal angle
  if (beta <= 0.0) {
    out.alpha0 = 0.5 * M_PI;
    out.m_bound = std::numeric_limits<double>::infinity();
  } else {
    out.alpha0 = std::acos(std::min(1.0, beta));
    out.m_bound = std::exp(2.0 * M_PI * std::tan(out.alpha0));
  }
  return out;
}

}  // namespace am
