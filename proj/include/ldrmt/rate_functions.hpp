#ifndef LDRMT_RATE_FUNCTIONS_HPP
#define LDRMT_RATE_FUNCTIONS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ldrmt/numerics.hpp"
#include "ldrmt/spectral_measure.hpp"
#include "ldrmt/spherical_integral.hpp"

namespace ldrmt {

enum class Regime { sticking, popped, blocked };

inline std::string regime_name(Regime r) {
  switch (r) {
    case Regime::sticking:
      return "sticking";
    case Regime::popped:
      return "popped";
    case Regime::blocked:
      return "blocked";
  }
  return "?";
}

struct GoeRateQuery {
  double x = 2.0;
  double u = 0.0;
  double theta = 0.0;
  int beta = 1;
};

struct RatePoint {
  double value = 0.0;  // normalized rate, in [0, +inf]
  double raw = 0.0;    // un-normalized I
  double y_star = 2.0; // inner maximizer (predicted next eigenvalue)
  Regime regime = Regime::sticking;
};

struct MultiRateQuery {
  std::vector<double> xs;  // non-increasing, each >= 2
  std::vector<double> us;  // each >= 0, sum <= 1
  double theta = 0.0;
  int beta = 1;
};

struct WishartRateQuery {
  double x = 0.0;
  double u = 0.0;
  double gamma = 0.0;  // covariance spike, > -1
  double alpha = 0.5;  // ratio M/N in (0,1]
  int beta = 1;
};

inline const SpectralMeasure& semicircle_measure() {
  static const SpectralMeasure sigma = SpectralMeasure::semicircle();
  return sigma;
}

/// C = inf_{x>=2} { x^2/4 - int log|x-t| dsigma(t) } and
/// C' = -1 + int log|2-t| dsigma(t), computed once.
struct Constants {
  double C;
  double Cprime;
};

inline const Constants& goe_constants() {
  static const Constants k = [] {
    const auto& sigma = semicircle_measure();
    auto potential = [&](double x) { return x * x / 4.0 - log_potential(sigma, x); };
    auto [xmin, neg] = golden_max([&](double x) { return -potential(x); }, 2.0, 12.0);
    double c = -neg;
    c = std::min(c, potential(2.0));
    Constants out{c, -1.0 + log_potential(sigma, 2.0)};
    if (std::abs(out.Cprime - (-1.0 + log_potential(sigma, 2.0))) >= 1e-10)
      throw std::logic_error("goe_constants: C' self-check failed");
    return out;
  }();
  return k;
}

/// Inner objective of the variational problem at tilt tau = theta(1-u):
/// J(sigma, tau/2, y) - y^2/4 + int log|y-t| dsigma(t).
inline double inner_objective(double tau, double y) {
  if (!(y >= 2.0)) throw std::domain_error("inner_objective: y must be >= 2");
  if (!(tau >= 0.0)) throw std::domain_error("inner_objective: tau must be >= 0");
  return j_semicircle(0.5 * tau, y) - y * y / 4.0 + log_potential(semicircle_measure(), y);
}

struct InnerMax {
  double y_star;
  double h;
};

/// sup over y in [2,x] of the inner objective. Candidates are the two
/// endpoints and the stationary point tau + 1/tau when it applies; a
/// golden-section pass backs them up. Ties go to the smallest y.
inline InnerMax maximize_inner(double tau, double x) {
  if (!(x >= 2.0)) throw std::domain_error("maximize_inner: x must be >= 2");
  if (!(tau >= 0.0)) throw std::domain_error("maximize_inner: tau must be >= 0");
  auto f = [&](double y) { return inner_objective(tau, y); };
  std::vector<double> cands = {2.0, x};
  if (tau >= 1.0) {
    const double yc = tau + 1.0 / tau;
    if (yc <= x) cands.push_back(yc);
  }
  if (x > 2.0) {
    auto [yg, fg] = golden_max(f, 2.0, x);
    cands.push_back(yg);
  }
  std::sort(cands.begin(), cands.end());
  InnerMax best{cands[0], f(cands[0])};
  for (std::size_t i = 1; i < cands.size(); ++i) {
    const double v = f(cands[i]);
    if (v > best.h + 1e-13 * (1.0 + std::abs(best.h))) best = {cands[i], v};
  }
  if (tau >= 1.0) {
    // snap a golden-section maximizer onto the analytic stationary point
    const double yc = tau + 1.0 / tau;
    if (yc <= x && std::abs(best.y_star - yc) < 1e-6) best = {yc, f(yc)};
  }
  return best;
}

/// Closed-form H(x, tau): tau^2/4 + C' in the sticking regime, else the
/// inner objective at min(tau + 1/tau, x).
inline double h_closed(double tau, double x) {
  if (!(x >= 2.0)) throw std::domain_error("h_closed: x must be >= 2");
  if (!(tau >= 0.0)) throw std::domain_error("h_closed: tau must be >= 0");
  if (tau <= 1.0) return tau * tau / 4.0 + goe_constants().Cprime;
  return inner_objective(tau, std::min(tau + 1.0 / tau, x));
}

inline Regime classify_goe_regime(double theta, double u, double x) {
  const double tau = theta * (1.0 - u);
  if (tau <= 1.0) return Regime::sticking;
  return (tau + 1.0 / tau < x) ? Regime::popped : Regime::blocked;
}

namespace detail {

/// Un-normalized multi-eigenvalue rate. n = 1 reproduces the single
/// eigenvalue formula term for term.
inline double raw_multi(const std::vector<double>& xs, const std::vector<double>& us, double theta,
                        InnerMax* inner_out = nullptr) {
  const std::size_t n = xs.size();
  if (n == 0 || us.size() != n) throw std::invalid_argument("raw_multi: size mismatch");
  double usum = 0.0;
  for (double u : us) usum += u;
  for (std::size_t i = 0; i < n; ++i) {
    if (xs[i] < 2.0 || us[i] < 0.0) return kInfiniteRate;
    if (i + 1 < n && xs[i + 1] > xs[i]) return kInfiniteRate;
  }
  if (usum >= 1.0 || usum < 0.0) return kInfiniteRate;
  double sum = 0.0;
  const auto& sigma = semicircle_measure();
  for (std::size_t i = 0; i < n; ++i)
    sum += xs[i] * xs[i] / 4.0 - 0.5 * theta * xs[i] * us[i] - log_potential(sigma, xs[i]);
  const InnerMax im = maximize_inner(theta * (1.0 - usum), xs[n - 1]);
  if (inner_out) *inner_out = im;
  return sum - im.h - 0.5 * std::log(1.0 - usum);
}

inline double raw_goe(double x, double u, double theta, InnerMax* inner_out = nullptr) {
  if (x < 2.0 || u < 0.0 || u >= 1.0) return kInfiniteRate;
  return raw_multi({x}, {u}, theta, inner_out);
}

}  // namespace detail

struct GlobalMin {
  double x_min;
  double u_min;
  double raw_inf;
};

/// Location and value of inf_S I for the single-eigenvalue GOE/GUE rate,
/// by coarse grid plus Nelder-Mead refinement. Cached per theta.
inline GlobalMin global_min(double theta, int /*beta*/ = 1) {
  if (!(theta >= 0.0)) throw std::domain_error("global_min: theta must be >= 0");
  static std::map<double, GlobalMin> cache;
  static std::mutex mtx;
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(theta);
    if (it != cache.end()) return it->second;
  }
  auto clampd = [](double x, double u) {
    return std::pair<double, double>{std::max(x, 2.0), std::clamp(u, 0.0, 1.0 - 1e-12)};
  };
  auto obj = [&](const std::vector<double>& p) {
    auto [x, u] = std::pair<double, double>{std::max(p[0], 2.0),
                                            std::clamp(p[1], 0.0, 1.0 - 1e-12)};
    return detail::raw_goe(x, u, theta);
  };
  // coarse grid, resolution 0.01
  const double xmax = std::max(6.0, theta + 1.0 / std::max(theta, 0.2) + 2.0);
  double bx = 2.0, bu = 0.0, bf = detail::raw_goe(2.0, 0.0, theta);
  for (double x = 2.0; x <= xmax; x += 0.01) {
    for (double u = 0.0; u < 1.0; u += 0.01) {
      const double f = detail::raw_goe(x, u, theta);
      if (f < bf) {
        bf = f;
        bx = x;
        bu = u;
      }
    }
  }
  // analytic candidate for the supercritical spike
  if (theta > 1.0) {
    const double xa = theta + 1.0 / theta, ua = 1.0 - 1.0 / (theta * theta);
    const double fa = detail::raw_goe(xa, ua, theta);
    if (fa < bf) {
      bf = fa;
      bx = xa;
      bu = ua;
    }
  }
  auto [p, f] = nelder_mead(obj, {bx, bu}, 0.02, 1e-14, 4000);
  auto [cx, cu] = clampd(p[0], p[1]);
  GlobalMin out{cx, cu, std::min(f, bf)};
  std::lock_guard<std::mutex> lock(mtx);
  cache.emplace(theta, out);
  return out;
}

/// Normalized rate I_beta(x,u) = beta (I(x,u) - inf_S I). Total on the
/// plane; +infinity outside S and on u = 1.
inline RatePoint rate_goe(const GoeRateQuery& q) {
  RatePoint out;
  InnerMax im{2.0, 0.0};
  const double raw = detail::raw_goe(q.x, q.u, q.theta, &im);
  out.raw = raw;
  if (!std::isfinite(raw)) {
    out.value = kInfiniteRate;
    out.y_star = 2.0;
    out.regime = Regime::sticking;
    return out;
  }
  out.y_star = im.y_star;
  out.regime = classify_goe_regime(q.theta, q.u, q.x);
  const double inf = global_min(q.theta, q.beta).raw_inf;
  double v = q.beta * (raw - inf);
  if (v < 0.0 && v > -1e-9) v = 0.0;  // normalization roundoff
  out.value = v;
  return out;
}

/// Predicted almost-sure location of the second eigenvalue conditioned on
/// (lambda_max, overlap) = (x, u).
inline double second_eig(const GoeRateQuery& q) {
  if (!(q.x >= 2.0) || !(q.u >= 0.0) || !(q.u < 1.0))
    throw std::domain_error("second_eig: (x,u) outside [2,inf) x [0,1)");
  return maximize_inner(q.theta * (1.0 - q.u), q.x).y_star;
}

/// Stationary overlap u_theta: 1 - u = (theta x - sqrt((theta x)^2 - 4 theta^2)) / (2 theta^2).
/// Empty when the formula gives a negative overlap.
inline std::optional<double> u_star(double theta, double x) {
  if (!(theta > 0.0)) throw std::domain_error("u_star: theta must be > 0");
  if (!(x >= 2.0)) throw std::domain_error("u_star: x must be >= 2");
  const double tx = theta * x;
  const double one_minus = (tx - std::sqrt(tx * tx - 4.0 * theta * theta)) / (2.0 * theta * theta);
  const double u = 1.0 - one_minus;
  if (u < 0.0) return std::nullopt;
  return u;
}

/// Minimizer of u -> I_beta(x, u) at fixed x, with its rate value.
inline std::pair<double, double> argmin_u(double theta, double x, int beta) {
  if (!(x >= 2.0)) throw std::domain_error("argmin_u: x must be >= 2");
  double umin = 0.0;
  if (theta > 0.0) {
    if (auto u = u_star(theta, x)) umin = *u;
  }
  return {umin, rate_goe({x, umin, theta, beta}).value};
}

namespace detail {

/// inf of the n-eigenvalue rate over Delta_n x simplex, cached per (n, theta).
inline double multi_inf(std::size_t n, double theta) {
  static std::map<std::pair<std::size_t, double>, double> cache;
  static std::mutex mtx;
  const auto key = std::make_pair(n, theta);
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  double result;
  if (n == 1) {
    result = global_min(theta).raw_inf;
  } else {
    auto clamp_point = [&](const std::vector<double>& p, std::vector<double>& xs,
                           std::vector<double>& us) {
      xs.resize(n);
      us.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        xs[i] = std::max(p[i], 2.0);
        us[i] = std::max(p[n + i], 0.0);
      }
      std::sort(xs.begin(), xs.end(), std::greater<double>());
      double s = 0.0;
      for (double u : us) s += u;
      if (s >= 1.0)
        for (double& u : us) u *= (1.0 - 1e-10) / s;
    };
    auto obj = [&](const std::vector<double>& p) {
      std::vector<double> xs, us;
      clamp_point(p, xs, us);
      return raw_multi(xs, us, theta);
    };
    // seed: single-spike optimum plus edge eigenvalues with zero overlap
    GlobalMin g1 = global_min(theta);
    std::vector<double> seed(2 * n, 2.0);
    seed[0] = g1.x_min;
    for (std::size_t i = 0; i < n; ++i) seed[n + i] = 0.0;
    seed[n] = g1.u_min;
    auto [p, f] = nelder_mead(obj, seed, 0.05, 1e-14, 6000);
    result = f;
    if (n == 2) {  // coarse grid backup in the only case used downstream
      for (double x0 = 2.0; x0 <= 6.0; x0 += 0.1)
        for (double x1 = 2.0; x1 <= x0; x1 += 0.1)
          for (double u0 = 0.0; u0 < 1.0; u0 += 0.05)
            for (double u1 = 0.0; u0 + u1 < 1.0; u1 += 0.05) {
              const double v = raw_multi({x0, x1}, {u0, u1}, theta);
              if (v < result) {
                auto [pp, ff] = nelder_mead(obj, {x0, x1, u0, u1}, 0.02, 1e-14, 4000);
                result = std::min(result, ff);
              }
            }
    }
  }
  std::lock_guard<std::mutex> lock(mtx);
  cache.emplace(key, result);
  return result;
}

}  // namespace detail

/// Joint rate for the n largest eigenvalues and overlaps. Reduces to
/// rate_goe when n = 1; the reported y_star predicts the (n+1)-th
/// eigenvalue.
inline RatePoint rate_multi(const MultiRateQuery& q) {
  if (q.xs.empty() || q.xs.size() != q.us.size())
    throw std::invalid_argument("rate_multi: xs and us must be non-empty and equal length");
  RatePoint out;
  InnerMax im{2.0, 0.0};
  const double raw = detail::raw_multi(q.xs, q.us, q.theta, &im);
  out.raw = raw;
  if (!std::isfinite(raw)) {
    out.value = kInfiniteRate;
    return out;
  }
  double usum = 0.0;
  for (double u : q.us) usum += u;
  out.y_star = im.y_star;
  out.regime = classify_goe_regime(q.theta, usum, q.xs.back());
  out.value = q.beta * (raw - detail::multi_inf(q.xs.size(), q.theta));
  return out;
}

// ---------------------------------------------------------------------------
// Wishart
// ---------------------------------------------------------------------------

inline const SpectralMeasure& mp_measure(double alpha) {
  static std::map<double, SpectralMeasure> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(alpha);
  if (it == cache.end())
    it = cache.emplace(alpha, SpectralMeasure::marchenko_pastur(alpha)).first;
  return it->second;
}

/// Rate for the largest eigenvalue of a null Wishart matrix:
/// I(y) = y - (1-alpha) log y - 2 alpha int log|y-t| dpi_alpha(t).
inline double wishart_single_rate(double y, double alpha) {
  const auto& mp = mp_measure(alpha);
  if (!(y >= support_right(mp))) throw std::domain_error("wishart_single_rate: y below the edge");
  return y - (1.0 - alpha) * std::log(y) - 2.0 * alpha * log_potential(mp, y);
}

namespace detail {

inline double raw_wishart(double x, double u, double gamma, double alpha,
                          InnerMax* inner_out = nullptr) {
  const auto& mp = mp_measure(alpha);
  const double edge = support_right(mp);
  if (x < edge || u < 0.0 || u >= 1.0) return kInfiniteRate;
  const double tilt = gamma * (1.0 - u) / (2.0 * alpha * (1.0 + gamma));
  auto g = [&](double y) {
    return 2.0 * alpha * j_limit(mp, tilt, y).value - wishart_single_rate(y, alpha);
  };
  InnerMax best{edge, g(edge)};
  if (x > edge) {
    const double gx = g(x);
    if (gx > best.h + 1e-13 * (1.0 + std::abs(best.h))) best = {x, gx};
    auto [yg, fg] = golden_max(g, edge, x, 1e-10);
    if (fg > best.h + 1e-13 * (1.0 + std::abs(best.h))) best = {yg, fg};
  }
  if (inner_out) *inner_out = best;
  return wishart_single_rate(x, alpha) - gamma / (1.0 + gamma) * x * u -
         alpha * std::log(1.0 - u) - best.h;
}

}  // namespace detail

/// Location and value of inf I^W, cached per (gamma, alpha).
inline GlobalMin wishart_global_min(double gamma, double alpha) {
  static std::map<std::pair<double, double>, GlobalMin> cache;
  static std::mutex mtx;
  const auto key = std::make_pair(gamma, alpha);
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const double edge = support_right(mp_measure(alpha));
  auto obj = [&](const std::vector<double>& p) {
    return detail::raw_wishart(std::max(p[0], edge), std::clamp(p[1], 0.0, 1.0 - 1e-12), gamma,
                               alpha);
  };
  double bx = edge, bu = 0.0, bf = detail::raw_wishart(edge, 0.0, gamma, alpha);
  for (double x = edge; x <= edge + 4.0; x += 0.05) {
    for (double u = 0.0; u < 1.0; u += 0.05) {
      const double f = detail::raw_wishart(x, u, gamma, alpha);
      if (f < bf) {
        bf = f;
        bx = x;
        bu = u;
      }
    }
  }
  // spiked-covariance analytic candidate (BBP typical point), when it pops
  if (gamma > 0.0) {
    const double ell = 1.0 + gamma;
    if (ell > 1.0 + std::sqrt(alpha)) {
      const double xa = ell * (1.0 + alpha / (ell - 1.0));
      const double ua = (1.0 - alpha / ((ell - 1.0) * (ell - 1.0))) / (1.0 + alpha / (ell - 1.0));
      const double fa = detail::raw_wishart(xa, ua, gamma, alpha);
      if (fa < bf) {
        bf = fa;
        bx = xa;
        bu = ua;
      }
    }
  }
  auto [p, f] = nelder_mead(obj, {bx, bu}, 0.02, 1e-14, 4000);
  GlobalMin out{std::max(p[0], edge), std::clamp(p[1], 0.0, 1.0 - 1e-12), std::min(f, bf)};
  std::lock_guard<std::mutex> lock(mtx);
  cache.emplace(key, out);
  return out;
}

/// Normalized Wishart rate I^W_beta(x,u) = (beta/2)(I^W - inf I^W).
inline RatePoint rate_wishart(const WishartRateQuery& q) {
  if (!(q.gamma > -1.0)) throw std::domain_error("rate_wishart: gamma must be > -1");
  if (!(q.alpha > 0.0 && q.alpha <= 1.0))
    throw std::domain_error("rate_wishart: alpha must be in (0,1]");
  RatePoint out;
  InnerMax im{0.0, 0.0};
  const double raw = detail::raw_wishart(q.x, q.u, q.gamma, q.alpha, &im);
  out.raw = raw;
  if (!std::isfinite(raw)) {
    out.value = kInfiniteRate;
    return out;
  }
  const double edge = support_right(mp_measure(q.alpha));
  out.y_star = im.y_star;
  if (im.y_star <= edge + 1e-9)
    out.regime = Regime::sticking;
  else if (im.y_star >= q.x - 1e-9)
    out.regime = Regime::blocked;
  else
    out.regime = Regime::popped;
  out.value = 0.5 * q.beta * (raw - wishart_global_min(q.gamma, q.alpha).raw_inf);
  return out;
}

}  // namespace ldrmt

#endif  // LDRMT_RATE_FUNCTIONS_HPP
