// Test-only oracles, deliberately independent of the library's quadrature
// and transform code paths: composite adaptive Simpson integration, direct
// bisection inversion, and dense-grid suprema.
#ifndef LDRMT_TESTS_ORACLES_HPP
#define LDRMT_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double tol = 1e-12) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

inline double pi() { return std::acos(-1.0); }

/// Semicircle density.
inline double semicircle_density(double t) {
  const double d = 4.0 - t * t;
  return d > 0 ? std::sqrt(d) / (2.0 * pi()) : 0.0;
}

/// Integral of g against the semicircle law via t = 2 cos(phi).
inline double semicircle_integral(const std::function<double(double)>& g) {
  return simpson(
      [&](double phi) {
        const double s = std::sin(phi);
        const double v = g(2.0 * std::cos(phi)) * 2.0 * s * s / pi();
        // the sin^2 weight vanishes at the endpoints faster than any
        // integrable singularity of g diverges
        return std::isfinite(v) ? v : 0.0;
      },
      0.0, pi());
}

/// Marchenko-Pastur density for ratio alpha.
struct MpLaw {
  double alpha;
  double lo, hi;
  explicit MpLaw(double a)
      : alpha(a),
        lo((1.0 - std::sqrt(a)) * (1.0 - std::sqrt(a))),
        hi((1.0 + std::sqrt(a)) * (1.0 + std::sqrt(a))) {}
  double density(double t) const {
    const double d = (hi - t) * (t - lo);
    return d > 0 && t > 0 ? std::sqrt(d) / (2.0 * pi() * alpha * t) : 0.0;
  }
  double integral(const std::function<double(double)>& g) const {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    return simpson(
        [&](double phi) {
          const double t = c + h * std::cos(phi);
          const double v = g(t) * density(t) * h * std::sin(phi);
          return std::isfinite(v) ? v : 0.0;
        },
        0.0, pi());
  }
};

inline double semicircle_stieltjes(double z) {
  return semicircle_integral([&](double t) { return 1.0 / (z - t); });
}

inline double semicircle_log_potential(double x) {
  return semicircle_integral([&](double t) { return std::log(std::abs(x - t)); });
}

/// Inverts a decreasing transform g on (right_edge, +inf) by pure bisection.
inline double invert_decreasing(const std::function<double(double)>& g, double m,
                                double right_edge, double hi) {
  double lo = right_edge + 1e-12;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > m)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Dense-grid supremum of f on [a,b]: returns (argmax, max).
inline std::pair<double, double> grid_sup(const std::function<double(double)>& f, double a,
                                          double b, int points = 4001) {
  double bx = a, bf = f(a);
  for (int i = 1; i < points; ++i) {
    const double x = a + (b - a) * i / (points - 1.0);
    const double v = f(x);
    if (v > bf) {
      bf = v;
      bx = x;
    }
  }
  // parabolic polish around the best grid point
  const double h = (b - a) / (points - 1.0);
  if (bx > a && bx < b) {
    const double f0 = f(bx - h), f1 = bf, f2 = f(bx + h);
    const double denom = f0 - 2 * f1 + f2;
    if (denom < 0) {
      const double dx = 0.5 * h * (f0 - f2) / denom;
      const double xx = bx + dx;
      const double v = f(xx);
      if (v > bf) return {xx, v};
    }
  }
  return {bx, bf};
}

/// Spherical integral J(sigma, theta, lambda) straight from the defining
/// formula, with the transform pieces built on the oracle quadrature.
inline double semicircle_j(double theta, double lam) {
  if (theta == 0.0) return 0.0;
  const double g = semicircle_stieltjes(lam);
  double v;
  if (2.0 * theta <= g) {
    // v = R(2 theta): invert G by bisection, subtract 1/(2 theta)
    const double k = invert_decreasing([](double z) { return semicircle_stieltjes(z); },
                                       2.0 * theta, 2.0, 2.0 + 1.0 / (2.0 * theta) + 10.0);
    v = k - 1.0 / (2.0 * theta);
  } else {
    v = lam - 1.0 / (2.0 * theta);
  }
  return theta * v -
         0.5 * semicircle_integral(
                   [&](double y) { return std::log(1.0 + 2.0 * theta * (v - y)); });
}

/// Un-normalized GOE rate by the direct formula: oracle quadrature for every
/// integral and a dense-grid sup for the inner variational problem.
inline double goe_raw_rate(double x, double u, double theta) {
  const double tau = theta * (1.0 - u);
  auto inner = [&](double y) {
    return semicircle_j(0.5 * tau, y) - y * y / 4.0 + semicircle_log_potential(y);
  };
  const double h = x > 2.0 ? grid_sup(inner, 2.0, x, 801).second : inner(2.0);
  return x * x / 4.0 - 0.5 * theta * x * u - semicircle_log_potential(x) -
         0.5 * std::log(1.0 - u) - h;
}

}  // namespace oracle

#endif  // LDRMT_TESTS_ORACLES_HPP
