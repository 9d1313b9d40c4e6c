// Acceptance gate: one line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "ldrmt/ensembles.hpp"
#include "ldrmt/rate_functions.hpp"

using namespace ldrmt;

namespace {

int g_failures = 0;

void report(int num, const char* what, bool ok) {
  std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", num, what);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

// independent quadrature oracle for semicircle integrals (Simpson on the
// cosine substitution, no shared code with the library quadrature)
double sc_integral(const std::function<double(double)>& g) {
  const double pi = std::acos(-1.0);
  const int m = 20000;
  double s = 0.0;
  auto f = [&](double phi) {
    const double si = std::sin(phi);
    return g(2.0 * std::cos(phi)) * 2.0 * si * si / pi;
  };
  for (int i = 0; i < m; ++i) {
    const double a = pi * i / m, b = pi * (i + 1) / m;
    s += (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
  }
  return s;
}

double sc_stieltjes(double z) {
  return sc_integral([&](double t) { return 1.0 / (z - t); });
}

bool criterion1() {
  const auto& sigma = semicircle_measure();
  bool ok = std::abs(stieltjes(sigma, 3.0) - (3.0 - std::sqrt(5.0)) / 2.0) < 1e-9;
  ok = ok && std::abs(stieltjes(sigma, 3.0) - sc_stieltjes(3.0)) < 1e-9;
  for (int i = 1; i <= 9; ++i) {
    const double m = 0.1 * i;
    // K(m) by bisection on the oracle transform, then R = K - 1/m
    double lo = 2.0 + 1e-13, hi = 2.0 + 1.0 / m + 10.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (sc_stieltjes(mid) > m ? lo : hi) = mid;
    }
    const double r_oracle = 0.5 * (lo + hi) - 1.0 / m;
    ok = ok && std::abs(r_transform(sigma, m) - m) < 1e-9;
    ok = ok && std::abs(r_transform(sigma, m) - r_oracle) < 1e-9;
  }
  return ok;
}

bool criterion2() {
  const auto& sigma = semicircle_measure();
  bool ok = true;
  for (int i = 1; i <= 20 && ok; ++i)
    for (int j = 0; j <= 20 && ok; ++j) {
      const double theta = 2.0 * i / 20.0;
      const double x = 2.0 + 3.0 * j / 20.0;
      ok = std::abs(j_semicircle(theta, x) - j_limit(sigma, theta, x).value) < 1e-8;
    }
  // threshold points theta = G(x)/2
  for (double x : {2.5, 3.0, 4.0}) {
    const double th = 0.5 * stieltjes(sigma, x);
    ok = ok && std::abs(j_semicircle(th, x) - j_limit(sigma, th, x).value) < 1e-8;
  }
  return ok;
}

bool criterion3() {
  const double theta = 3.0;
  const int steps = 150;
  double bx = 0, bu = 0, bf = kInfiniteRate;
  for (int i = 0; i < steps; ++i) {
    const double x = 2.0 + 3.0 * (i + 0.5) / steps;
    for (int j = 0; j < steps; ++j) {
      const double u = (j + 0.5) / steps;
      const double v = rate_goe({x, u, theta, 1}).value;
      if (v < bf) {
        bf = v;
        bx = x;
        bu = u;
      }
    }
  }
  const double x_typ = theta + 1.0 / theta, u_typ = 1.0 - 1.0 / (theta * theta);
  bool ok = std::abs(bx - x_typ) < 3.0 / steps + 1e-12;
  ok = ok && std::abs(bu - u_typ) < 1.0 / steps + 1e-12;
  auto gm = global_min(theta);
  ok = ok && std::abs(gm.x_min - x_typ) < 1e-3 && std::abs(gm.u_min - u_typ) < 1e-3;
  ok = ok && rate_goe({gm.x_min, gm.u_min, theta, 1}).value < 1e-8;
  return ok;
}

bool criterion4() {
  bool ok = true;
  for (int i = 0; i < 40 && ok; ++i)
    for (int j = 0; j < 40 && ok; ++j) {
      const double tau = 0.05 + 3.5 * i / 39.0;
      const double x = 2.0 + 3.0 * j / 39.0;
      ok = std::abs(h_closed(tau, x) - maximize_inner(tau, x).h) < 1e-6;
    }
  for (double theta : {0.8, 1.6, 3.0})
    for (double u : {0.0, 0.3, 0.7})
      for (double x : {2.2, 3.0, 4.5}) {
        const double tau = theta * (1.0 - u);
        const double expect = tau > 1.0 ? std::min(tau + 1.0 / tau, x) : 2.0;
        ok = ok && std::abs(second_eig({x, u, theta, 1}) - expect) < 1e-9;
      }
  return ok;
}

bool criterion5() {
  bool ok = true;
  {
    const double theta = 3.0, x = 3.0;
    const double tau_star = 0.5 * (x + std::sqrt(x * x - 4.0));
    const double ustar = 1.0 - tau_star / theta;
    const double ref = rate_goe({x, 0.0, theta, 1}).value;
    for (int i = 0; i <= 20; ++i)
      ok = ok && std::abs(rate_goe({x, ustar * i / 20.0, theta, 1}).value - ref) < 1e-8;
  }
  for (auto [th, x] : {std::pair{3.0, 4.0}, {3.0, 5.0}, {1.5, 3.0}}) {
    const double u = *u_star(th, x);
    const double h = 1e-5;
    const double d =
        (rate_goe({x, u + h, th, 1}).value - rate_goe({x, u - h, th, 1}).value) / (2 * h);
    ok = ok && std::abs(d) < 1e-5;
  }
  {
    const double theta = 0.5, x = 2.05;
    double bu = 0.0, bf = kInfiniteRate;
    for (int i = 0; i <= 990; ++i) {
      const double u = i / 1000.0;
      const double v = rate_goe({x, u, theta, 1}).value;
      if (v < bf) {
        bf = v;
        bu = u;
      }
    }
    ok = ok && bu == 0.0;
  }
  return ok;
}

bool criterion6() {
  bool ok = true;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ux(2.0, 6.0), uu(0.0, 0.99);
  for (int i = 0; i < 100; ++i) {
    const double x = ux(rng), u = uu(rng);
    ok = ok && rate_multi({{x}, {u}, 3.0, 1}).raw == rate_goe({x, u, 3.0, 1}).raw;
  }
  // n=2 at theta=3: minimizing second overlap is 0 iff the second
  // eigenvalue sits at the bulk edge
  const double x1 = 4.0, u1 = 0.1;
  for (double x2 : {2.0, 2.6, 3.2}) {
    double bu = 0.0, bf = kInfiniteRate;
    for (int i = 0; i <= 2000; ++i) {
      const double u2 = (1.0 - u1 - 1e-6) * i / 2000.0;
      const double v = detail::raw_multi({x1, x2}, {u1, u2}, 3.0);
      if (v < bf - 1e-12) {
        bf = v;
        bu = u2;
      }
    }
    ok = ok && ((bu == 0.0) == (x2 == 2.0));
  }
  return ok;
}

bool criterion7() {
  EnsembleSpec spec;
  spec.n = 1000;
  spec.theta = 3.0;
  spec.seed = 8;
  spec.samples = 200;
  auto s = mc_stats(spec, 1);
  bool ok = s.lambda_max_mean >= 3.30 && s.lambda_max_mean <= 3.37;
  ok = ok && s.overlap_mean >= 0.86 && s.overlap_mean <= 0.91;
  ok = ok && s.lambda_second_mean >= 1.95 && s.lambda_second_mean <= 2.02;
  spec.theta = 0.5;
  auto sub = mc_stats(spec, 1);
  ok = ok && sub.lambda_max_mean >= 1.95 && sub.lambda_max_mean <= 2.06;
  return ok;
}

bool criterion8() {
  EnsembleSpec spec;
  spec.n = 50;
  spec.theta = 0.0;
  spec.seed = 13;
  const int reps = 5000;
  std::vector<double> us(reps);
  for (int i = 0; i < reps; ++i) us[i] = sample_spiked_wigner(spec, i).overlap_top();
  std::sort(us.begin(), us.end());
  // CDF on a grid of the sorted sample, interpolation-free: direct calls
  double ks = 0.0;
  for (int i = 0; i < reps; ++i) {
    const double f = overlap_prior_cdf(us[i], spec.n, 1);
    ks = std::max(ks, std::abs(f - (i + 1.0) / reps));
    ks = std::max(ks, std::abs(f - double(i) / reps));
  }
  return ks < 0.05;
}

bool criterion9() {
  const double theta = 3.0;
  bool ok = true;
  for (double tp : {1.5, 2.0, 2.5}) {
    const double got =
        rate_goe({tp + 1.0 / tp, 1.0 - 1.0 / (tp * tp), theta, 1}).value;
    const double closed = (theta - tp) * (theta - tp) / 4.0;
    if (std::abs(got - closed) >= 1e-6) {
      std::printf("    note: theta'=%.1f rate %.9f vs closed form %.9f "
                  "(ratio %.6f = 1 - theta'^-4)\n",
                  tp, got, closed, got / closed);
      ok = false;
    }
  }
  EnsembleSpec spec;
  spec.n = 200;
  spec.samples = 10000;
  spec.seed = 1234;
  auto te = tilted_estimate(theta, 2.0, spec, 0.1);
  const double target = rate_goe({2.5, 0.75, theta, 1}).value;
  const bool mc_ok = !te.degenerate && std::abs(te.value - target) <= 3.0 * te.std_error;
  double window_inf = kInfiniteRate;
  for (double x = 2.4; x <= 2.6 + 1e-9; x += 0.005)
    for (double u = 0.65; u <= 0.85 + 1e-9; u += 0.005)
      window_inf = std::min(window_inf, rate_goe({x, u, theta, 1}).value);
  std::printf("    note: tilted estimate %.6f +- %.6f (ess %.0f) vs rate %.6f at the window "
              "center (infimum over the window: %.6f)\n",
              te.value, te.std_error, te.ess, target, window_inf);
  return ok && mc_ok;
}

bool criterion10() {
  auto gm = wishart_global_min(2.0, 0.5);
  bool ok = std::abs(rate_wishart({gm.x_min, gm.u_min, 2.0, 0.5, 1}).value) < 1e-9;
  EnsembleSpec spec;
  spec.kind = EnsembleKind::wishart;
  spec.n = 2000;
  spec.m = 1000;
  spec.gamma = 2.0;
  spec.seed = 4;
  spec.samples = 100;
  auto s = mc_stats(spec, 1);
  ok = ok && std::abs(s.lambda_max_mean - gm.x_min) < 0.03;
  ok = ok && std::abs(s.overlap_mean - gm.u_min) < 0.03;
  return ok;
}

}  // namespace

int main() {
  report(1, "transform closed forms vs quadrature oracles (1e-9)", criterion1());
  report(2, "spherical integral closed form vs general formula, 20x20 + threshold (1e-8)",
         criterion2());
  report(3, "rate surface theta=3: global minimum at (3.3333, 0.8889), rate < 1e-8",
         criterion3());
  report(4, "h_closed vs variational sup 40x40 (1e-6); second-eigenvalue law", criterion4());
  report(5, "case structure: flat region, stationarity at u_theta, subcritical minimum",
         criterion5());
  report(6, "multi-eigenvalue: n=1 reduction exact; u2 = 0 iff x2 = 2", criterion6());
  report(7, "Monte Carlo BBP means at N=1000 (theta = 3 and 0.5)", criterion7());
  report(8, "overlap prior KS distance < 0.05 at N=50, 5000 samples", criterion8());
  report(9, "tilting identity and importance-sampling cross-check", criterion9());
  report(10, "Wishart minimizer vs Monte Carlo typical point (0.03)", criterion10());
  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", g_failures);
  return 1;
}
