#ifndef LDRMT_NUMERICS_HPP
#define LDRMT_NUMERICS_HPP

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ldrmt {

inline constexpr double kInfiniteRate = std::numeric_limits<double>::infinity();

/// Adaptive quadrature settings. Defaults dominate the 1e-8 contracts of
/// the transform layer.
struct QuadratureSpec {
  double tolerance = 1e-10;
  int max_panels = 4096;
  bool edge_substitution = true;

  void validate() const {
    if (!(tolerance > 0)) throw std::invalid_argument("quadrature tolerance must be > 0");
    if (max_panels < 16) throw std::invalid_argument("quadrature panel count must be >= 16");
  }
};

namespace detail {

// 12-point Gauss-Legendre nodes/weights on [-1,1].
inline constexpr std::array<double, 6> kGL12Nodes = {
    0.1252334085114689, 0.3678314989981802, 0.5873179542866175,
    0.7699026741943047, 0.9041172563704749, 0.9815606342467192};
inline constexpr std::array<double, 6> kGL12Weights = {
    0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
    0.1600783285433462, 0.1069393259953184, 0.0471753363865118};

template <class F>
double gl12(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double dx = h * kGL12Nodes[i];
    s += kGL12Weights[i] * (f(c + dx) + f(c - dx));
  }
  return s * h;
}

}  // namespace detail

/// Adaptive Gauss-Legendre integration of f on [a,b]. Panels are bisected
/// until the two-half estimate agrees with the whole-panel one.
template <class F>
double integrate(const F& f, double a, double b, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (a == b) return 0.0;
  struct Panel {
    double a, b, whole;
  };
  std::vector<Panel> stack;
  stack.push_back({a, b, detail::gl12(f, a, b)});
  double total = 0.0;
  int panels = 0;
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const double left = detail::gl12(f, p.a, m);
    const double right = detail::gl12(f, m, p.b);
    const double err = std::abs(left + right - p.whole);
    const double local_tol = spec.tolerance * std::max(1.0, (p.b - p.a) / (b - a));
    if (err < local_tol || ++panels >= spec.max_panels || (p.b - p.a) < 1e-15 * (std::abs(b - a))) {
      total += left + right;
    } else {
      stack.push_back({p.a, m, left});
      stack.push_back({m, p.b, right});
    }
  }
  return total;
}

/// Integrates f(t) w(t) dt over [a,b] through the substitution
/// t = c + h cos(phi), which regularizes square-root edge behavior of w.
/// The caller passes the full integrand (weight included).
template <class F>
double integrate_cos_substitution(const F& integrand, double a, double b,
                                  const QuadratureSpec& spec = {}) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  auto g = [&](double phi) {
    const double t = c + h * std::cos(phi);
    return integrand(t) * h * std::sin(phi);
  };
  const double pi = std::acos(-1.0);
  return integrate(g, 0.0, pi, spec);
}

/// Golden-section maximization of f on [lo, hi]. Returns (argmax, max).
template <class F>
std::pair<double, double> golden_max(const F& f, double lo, double hi, double xtol = 1e-12,
                                     int max_iter = 200) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

/// Monotone scalar root find: solves f(x) = 0 on [lo, hi] by Newton steps
/// (secant-estimated derivative) guarded by bisection.
template <class F>
double solve_monotone(const F& f, double lo, double hi, double tol = 1e-13, int max_iter = 200) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if (flo * fhi > 0) throw std::domain_error("solve_monotone: root not bracketed");
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < max_iter; ++i) {
    double fx = f(x);
    if (std::abs(fx) < tol || (hi - lo) < tol * std::max(1.0, std::abs(x))) return x;
    if (flo * fx < 0) {
      hi = x;
      fhi = fx;
    } else {
      lo = x;
      flo = fx;
    }
    // secant proposal, fall back to bisection when it leaves the bracket
    double step = fx * (hi - lo) / (fhi - flo);
    double cand = x - step;
    x = (cand > lo && cand < hi) ? cand : 0.5 * (lo + hi);
  }
  return x;
}

/// Nelder-Mead minimization in n dimensions, used for the normalization
/// infima. Bounds are enforced by the caller through the objective
/// (out-of-domain points must return +infinity).
inline std::pair<std::vector<double>, double> nelder_mead(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> start,
    double scale = 0.05, double ftol = 1e-12, int max_iter = 2000) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> simplex(n + 1, start);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += scale;
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

  auto order = [&]() {
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = i + 1; j <= n; ++j)
        if (fv[j] < fv[i]) {
          std::swap(fv[i], fv[j]);
          std::swap(simplex[i], simplex[j]);
        }
  };
  order();
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(fv[n] - fv[0]) < ftol * (1.0 + std::abs(fv[0]))) break;
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / double(n);
    auto point = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (simplex[n][j] - centroid[j]);
      return p;
    };
    auto refl = point(-1.0);
    double fr = f(refl);
    if (fr < fv[0]) {
      auto exp_ = point(-2.0);
      double fe = f(exp_);
      if (fe < fr) {
        simplex[n] = exp_;
        fv[n] = fe;
      } else {
        simplex[n] = refl;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      simplex[n] = refl;
      fv[n] = fr;
    } else {
      auto con = point(0.5);
      double fc = f(con);
      if (fc < fv[n]) {
        simplex[n] = con;
        fv[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j)
            simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
          fv[i] = f(simplex[i]);
        }
      }
    }
    order();
  }
  return {simplex[0], fv[0]};
}

}  // namespace ldrmt

#endif  // LDRMT_NUMERICS_HPP
