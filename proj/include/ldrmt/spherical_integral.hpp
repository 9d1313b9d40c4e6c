#ifndef LDRMT_SPHERICAL_INTEGRAL_HPP
#define LDRMT_SPHERICAL_INTEGRAL_HPP

#include <cmath>
#include <stdexcept>

#include "ldrmt/spectral_measure.hpp"

namespace ldrmt {

enum class Branch { subcritical, supercritical };

/// Limiting spherical integral J(mu, theta, lambda) together with the
/// maximizer v and the branch it came from.
struct SphericalLimit {
  double theta = 0.0;
  double lambda_max = 0.0;
  double v_star = 0.0;
  double value = 0.0;
  Branch branch = Branch::subcritical;
};

/// Maximizer v(theta, mu, lambda): R_mu(2 theta) while 2 theta stays below
/// G_mu(lambda), else lambda - 1/(2 theta). Continuous at the threshold.
inline double v_star(const SpectralMeasure& mu, double theta, double lam,
                     const QuadratureSpec& spec = {}) {
  if (!(theta >= 0.0)) throw std::domain_error("v_star: theta must be >= 0");
  if (!(lam >= support_right(mu))) throw std::domain_error("v_star: lambda must be >= r(mu)");
  if (theta == 0.0) return measure_mean(mu, spec);  // right limit R_mu(0+)
  const double g = lam > support_right(mu) ? stieltjes(mu, lam, spec) : stieltjes_edge(mu, spec);
  if (2.0 * theta <= g) return r_transform(mu, 2.0 * theta, spec);
  return lam - 0.5 / theta;
}

/// J(mu, theta, lambda) = theta v - (1/2) int log(1 + 2 theta v - 2 theta y) dmu(y).
inline SphericalLimit j_limit(const SpectralMeasure& mu, double theta, double lam,
                              const QuadratureSpec& spec = {}) {
  if (!(theta >= 0.0)) throw std::domain_error("j_limit: theta must be >= 0");
  if (!(lam >= support_right(mu))) throw std::domain_error("j_limit: lambda must be >= r(mu)");
  SphericalLimit out;
  out.theta = theta;
  out.lambda_max = lam;
  if (theta == 0.0) {
    out.v_star = measure_mean(mu, spec);
    out.value = 0.0;
    out.branch = Branch::subcritical;
    return out;
  }
  const double g = lam > support_right(mu) ? stieltjes(mu, lam, spec) : stieltjes_edge(mu, spec);
  out.branch = (2.0 * theta <= g) ? Branch::subcritical : Branch::supercritical;
  const double v = v_star(mu, theta, lam, spec);
  out.v_star = v;
  // Argument of the log must stay non-negative over the support; it may
  // vanish exactly at the right edge (integrable log singularity).
  const double worst = 1.0 + 2.0 * theta * v - 2.0 * theta * support_right(mu);
  if (worst < -1e-12)
    throw std::logic_error("j_limit: negative log argument (transform inconsistency)");
  const double integral = integrate_cos_substitution(
      [&](double y) {
        const double arg = 1.0 + 2.0 * theta * (v - y);
        if (!(arg > 0.0)) return 0.0;  // roundoff neighborhood of the edge
        return std::log(arg) * mu.density(y);
      },
      mu.support_left(), mu.support_right(), spec);
  out.value = theta * v - 0.5 * integral;
  return out;
}

/// Semicircle closed form: theta^2 below the threshold theta = G_sigma(x)/2,
/// and theta x - 1/2 + (1/2) log(1/(2 theta)) - (1/2) int log|x-y| dsigma(y)
/// above it.
inline double j_semicircle(double theta, double x) {
  if (!(theta >= 0.0)) throw std::domain_error("j_semicircle: theta must be >= 0");
  if (!(x >= 2.0)) throw std::domain_error("j_semicircle: x must be >= 2");
  const double g = x > 2.0 ? 0.5 * (x - std::sqrt(x * x - 4.0)) : 1.0;
  if (2.0 * theta <= g) return theta * theta;
  static const SpectralMeasure sigma = SpectralMeasure::semicircle();
  return theta * x - 0.5 + 0.5 * std::log(0.5 / theta) - 0.5 * log_potential(sigma, x);
}

}  // namespace ldrmt

#endif  // LDRMT_SPHERICAL_INTEGRAL_HPP
