#ifndef LDRMT_SPECTRAL_MEASURE_HPP
#define LDRMT_SPECTRAL_MEASURE_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "ldrmt/numerics.hpp"

namespace ldrmt {

enum class MeasureKind { semicircle, marchenko_pastur, generic };

/// A compactly supported spectral law on [a,b]. The semicircle and
/// Marchenko-Pastur cases carry closed forms for their transforms; generic
/// densities fall back to singularity-aware quadrature everywhere.
class SpectralMeasure {
 public:
  static SpectralMeasure semicircle() {
    SpectralMeasure mu;
    mu.kind_ = MeasureKind::semicircle;
    mu.a_ = -2.0;
    mu.b_ = 2.0;
    return mu;
  }

  /// Standard Marchenko-Pastur law for ratio alpha in (0,1]:
  /// support [(1-sqrt(a))^2, (1+sqrt(a))^2], density
  /// sqrt((b-t)(t-a)) / (2 pi alpha t).
  static SpectralMeasure marchenko_pastur(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::invalid_argument("marchenko_pastur: alpha must be in (0,1]");
    SpectralMeasure mu;
    mu.kind_ = MeasureKind::marchenko_pastur;
    mu.alpha_ = alpha;
    const double s = std::sqrt(alpha);
    mu.a_ = (1.0 - s) * (1.0 - s);
    mu.b_ = (1.0 + s) * (1.0 + s);
    return mu;
  }

  static SpectralMeasure generic(std::function<double(double)> density, double a, double b) {
    if (!(a < b)) throw std::invalid_argument("generic measure: requires a < b");
    SpectralMeasure mu;
    mu.kind_ = MeasureKind::generic;
    mu.density_ = std::move(density);
    mu.a_ = a;
    mu.b_ = b;
    return mu;
  }

  MeasureKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double support_left() const { return a_; }
  double support_right() const { return b_; }

  double density(double t) const {
    if (t < a_ || t > b_) return 0.0;
    switch (kind_) {
      case MeasureKind::semicircle: {
        const double d = 4.0 - t * t;
        return d > 0 ? std::sqrt(d) / (2.0 * std::acos(-1.0)) : 0.0;
      }
      case MeasureKind::marchenko_pastur: {
        const double d = (b_ - t) * (t - a_);
        if (d <= 0 || t <= 0) return 0.0;
        return std::sqrt(d) / (2.0 * std::acos(-1.0) * alpha_ * t);
      }
      case MeasureKind::generic:
        return density_(t);
    }
    return 0.0;
  }

 private:
  MeasureKind kind_ = MeasureKind::semicircle;
  double alpha_ = 1.0;
  std::function<double(double)> density_;
  double a_ = -2.0, b_ = 2.0;
};

inline double support_right(const SpectralMeasure& mu) { return mu.support_right(); }

/// Total mass of the density by edge-aware quadrature.
inline double total_mass(const SpectralMeasure& mu, const QuadratureSpec& spec = {}) {
  return integrate_cos_substitution([&](double t) { return mu.density(t); }, mu.support_left(),
                                    mu.support_right(), spec);
}

/// Mean of mu; the theta -> 0 limit of the R-transform.
inline double measure_mean(const SpectralMeasure& mu, const QuadratureSpec& spec = {}) {
  switch (mu.kind()) {
    case MeasureKind::semicircle:
      return 0.0;
    case MeasureKind::marchenko_pastur:
      return 1.0;
    case MeasureKind::generic:
      return integrate_cos_substitution([&](double t) { return t * mu.density(t); },
                                        mu.support_left(), mu.support_right(), spec);
  }
  return 0.0;
}

/// Cauchy/Stieltjes transform G_mu(z) for z strictly right of the support.
inline double stieltjes(const SpectralMeasure& mu, double z, const QuadratureSpec& spec = {}) {
  if (!(z > mu.support_right()))
    throw std::domain_error("stieltjes: z must lie strictly right of the support");
  switch (mu.kind()) {
    case MeasureKind::semicircle:
      return 0.5 * (z - std::sqrt(z * z - 4.0));
    case MeasureKind::marchenko_pastur: {
      const double a = mu.alpha();
      const double d = (z - 1.0 - a) * (z - 1.0 - a) - 4.0 * a;
      return (z - (1.0 - a) - std::sqrt(d)) / (2.0 * a * z);
    }
    case MeasureKind::generic:
      return integrate_cos_substitution([&](double t) { return mu.density(t) / (z - t); },
                                        mu.support_left(), mu.support_right(), spec);
  }
  return 0.0;
}

/// Edge limit G_mu(r(mu)). Returns +infinity when the limit diverges
/// (generic densities that stay positive at the right edge).
inline double stieltjes_edge(const SpectralMeasure& mu, const QuadratureSpec& spec = {}) {
  const double b = mu.support_right();
  switch (mu.kind()) {
    case MeasureKind::semicircle:
      return 1.0;
    case MeasureKind::marchenko_pastur: {
      const double s = std::sqrt(mu.alpha());
      return 1.0 / (s * (1.0 + s));
    }
    case MeasureKind::generic: {
      // If the density does not vanish at the edge the integral has a
      // non-integrable 1/(b-t) singularity.
      const double eps = 1e-7 * (b - mu.support_left());
      if (mu.density(b - eps) > 1e3 * eps) return kInfiniteRate;
      const double v = integrate_cos_substitution(
          [&](double t) { return t < b ? mu.density(t) / (b - t) : 0.0; }, mu.support_left(), b,
          spec);
      return std::isfinite(v) ? v : kInfiniteRate;
    }
  }
  return kInfiniteRate;
}

/// Functional inverse K_mu of the Stieltjes transform on (0, G_mu(r(mu))).
inline double k_inverse(const SpectralMeasure& mu, double m, const QuadratureSpec& spec = {}) {
  const double edge = stieltjes_edge(mu, spec);
  if (!(m > 0.0) || !(m <= edge))
    throw std::domain_error("k_inverse: m must lie in (0, G_mu(r(mu))]");
  const double b = mu.support_right();
  if (m == edge) return b;  // K extends continuously to the endpoint
  const double diam = b - mu.support_left();
  double hi = b + 1.0 / m + diam;  // G(b + 1/m) < m, so the root is bracketed
  double lo = b;
  // Open left endpoint: step in until G(lo) > m.
  double step = 1e-12 * std::max(1.0, std::abs(b));
  while (stieltjes(mu, lo + step, spec) <= m) {
    step *= 2.0;
    if (step > diam + 1.0 / m) throw std::domain_error("k_inverse: failed to bracket");
  }
  lo += step;
  return solve_monotone([&](double z) { return stieltjes(mu, z, spec) - m; }, lo, hi);
}

/// R-transform R_mu(m) = K_mu(m) - 1/m on (0, G_mu(r(mu))).
inline double r_transform(const SpectralMeasure& mu, double m, const QuadratureSpec& spec = {}) {
  return k_inverse(mu, m, spec) - 1.0 / m;
}

/// Logarithmic potential int log|x-t| dmu(t) for x >= r(mu). The x = r(mu)
/// case has an integrable singularity handled by the cosine substitution.
inline double log_potential(const SpectralMeasure& mu, double x, const QuadratureSpec& spec = {}) {
  const double b = mu.support_right();
  if (!(x >= b)) throw std::domain_error("log_potential: x must satisfy x >= r(mu)");
  if (mu.kind() == MeasureKind::semicircle) {
    const double s = std::sqrt(std::max(x * x - 4.0, 0.0));
    return x * x / 4.0 - x * s / 4.0 + std::log((x + s) / 2.0) - 0.5;
  }
  return integrate_cos_substitution(
      [&](double t) { return t < x ? std::log(x - t) * mu.density(t) : 0.0; }, mu.support_left(),
      b, spec);
}

inline std::string kind_name(MeasureKind k) {
  switch (k) {
    case MeasureKind::semicircle:
      return "semicircle";
    case MeasureKind::marchenko_pastur:
      return "marchenko_pastur";
    case MeasureKind::generic:
      return "generic";
  }
  return "?";
}

}  // namespace ldrmt

#endif  // LDRMT_SPECTRAL_MEASURE_HPP
