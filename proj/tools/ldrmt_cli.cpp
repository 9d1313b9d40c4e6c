// Command-line front end: spectral transforms, rate-function grids and
// minimizers, and Monte Carlo runs over the spiked ensembles.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ldrmt/ensembles.hpp"
#include "ldrmt/io.hpp"
#include "ldrmt/rate_functions.hpp"

using namespace ldrmt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitIoFail = 3;

json g_config;

/// Pre-scan for --config so config values can seed option defaults.
void load_config(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      std::ifstream in(argv[i + 1]);
      if (!in) throw std::ios_base::failure(std::string("cannot open config ") + argv[i + 1]);
      in >> g_config;
    }
  }
}

template <class T>
T cfg(const std::string& key, T fallback) {
  if (g_config.contains(key)) return g_config.at(key).get<T>();
  return fallback;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    write_atomic(out_path, content);
}

SpectralMeasure measure_from(const std::string& name, double alpha,
                             const std::string& density_file) {
  if (name == "semicircle") return SpectralMeasure::semicircle();
  if (name == "marchenko_pastur" || name == "mp") return SpectralMeasure::marchenko_pastur(alpha);
  if (name == "generic") {
    if (density_file.empty())
      throw std::invalid_argument("generic measure needs --density-file (CSV: t,density)");
    auto d = load_density_csv(density_file);
    const double a = d.t.front(), b = d.t.back();
    return SpectralMeasure::generic([d = std::move(d)](double t) { return d(t); }, a, b);
  }
  throw std::invalid_argument("unknown measure: " + name);
}

EnsembleKind kind_from(const std::string& name) {
  if (name == "goe") return EnsembleKind::goe;
  if (name == "gue") return EnsembleKind::gue;
  if (name == "wishart") return EnsembleKind::wishart;
  throw std::invalid_argument("unknown ensemble kind: " + name);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

std::string rate_row(double x, double u, const RatePoint& rp) {
  return csv_num(x) + "," + csv_num(u) + "," + csv_num(rp.value) + "," + csv_num(rp.y_star) +
         "," + regime_name(rp.regime) + "\n";
}

std::string summary_path_for(const std::string& out) {
  if (out.size() > 4 && out.substr(out.size() - 4) == ".csv")
    return out.substr(0, out.size() - 4) + ".summary.json";
  return out + ".summary.json";
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyReport {
  int failures = 0;
  void check(const std::string& name, bool ok) {
    std::printf("%-58s %s\n", name.c_str(), ok ? "PASS" : "FAIL");
    if (!ok) ++failures;
  }
};

int run_verify(bool fast, bool inject_fault) {
  VerifyReport rep;
  const auto& sigma = semicircle_measure();
  const auto mp = SpectralMeasure::marchenko_pastur(0.25);

  rep.check("spectral: semicircle mass == 1 (1e-9)", std::abs(total_mass(sigma) - 1.0) < 1e-9);
  rep.check("spectral: marchenko_pastur mass == 1 (1e-9)", std::abs(total_mass(mp) - 1.0) < 1e-9);

  {
    bool ok = true;
    for (const auto& mu : {sigma, mp}) {
      const double b = support_right(mu);
      double prev = kInfiniteRate;
      for (int i = 1; i <= (fast ? 25 : 100); ++i) {
        const double z = b + 10.0 * i / 100.0;
        const double g = stieltjes(mu, z);
        ok = ok && g > 0.0 && g < prev;
        prev = g;
      }
    }
    rep.check("spectral: stieltjes positive and strictly decreasing", ok);
  }
  {
    bool ok = true;
    for (const auto& mu : {sigma, mp}) {
      const double edge = stieltjes_edge(mu);
      for (int i = 1; i <= (fast ? 10 : 50); ++i) {
        const double m = edge * i / 51.0;
        ok = ok && std::abs(stieltjes(mu, k_inverse(mu, m)) - m) < 1e-9;
      }
    }
    rep.check("spectral: stieltjes/k_inverse round trip (1e-9)", ok);
  }
  {
    bool ok = true;
    for (int i = 1; i <= 9; ++i) {
      const double m = 0.1 * i;
      ok = ok && std::abs(r_transform(sigma, m) - m) < 1e-9;
    }
    rep.check("spectral: semicircle R-transform identity (1e-9)", ok);
  }
  {
    bool ok = true;
    const double x = 3.0, h = 1e-5;
    const double fd = (log_potential(sigma, x + h) - log_potential(sigma, x - h)) / (2 * h);
    ok = std::abs(fd - stieltjes(sigma, x)) < 1e-6;
    rep.check("spectral: d/dx log_potential == stieltjes", ok);
  }
  {
    const double cprime = goe_constants().Cprime;
    const double expected = -1.0 + log_potential(sigma, 2.0);
    const double used = inject_fault ? -cprime : cprime;
    rep.check("rate: C' == -1 + log_potential(sigma, 2) (1e-10)",
              std::abs(used - expected) < 1e-10);
  }
  {
    bool ok = true;
    const int steps = fast ? 8 : 20;
    for (int i = 1; i <= steps && ok; ++i)
      for (int j = 0; j <= steps && ok; ++j) {
        const double th = 2.0 * i / steps;
        const double x = 2.0 + 4.0 * j / steps;
        ok = std::abs(j_semicircle(th, x) - j_limit(sigma, th, x).value) < 1e-8;
      }
    rep.check("spherical: closed form vs quadrature (1e-8)", ok);
  }
  {
    const double x = 3.0;
    const double th = 0.5 * stieltjes(sigma, x);
    rep.check("spherical: branch continuity at theta = G(x)/2 (1e-9)",
              std::abs(j_semicircle(th * (1 - 1e-12), x) - j_semicircle(th * (1 + 1e-12), x)) <
                  1e-9);
  }
  {
    bool ok = true;
    const int steps = fast ? 10 : 40;
    for (int i = 0; i <= steps && ok; ++i)
      for (int j = 0; j <= steps && ok; ++j) {
        const double tau = 4.0 * i / steps;
        const double x = 2.0 + 4.0 * j / steps;
        ok = std::abs(h_closed(tau, x) - maximize_inner(tau, x).h) < 1e-6;
      }
    rep.check("rate: h_closed vs variational sup (1e-6)", ok);
  }
  {
    // flat region theta=3, x=3 on [0, u*] with y(u*) = x
    const double theta = 3.0, x = 3.0;
    const double tau_star = 0.5 * (x + std::sqrt(x * x - 4.0));
    const double ustar = 1.0 - tau_star / theta;
    const double ref = rate_goe({x, 0.0, theta, 1}).value;
    bool ok = true;
    for (int i = 0; i <= 10; ++i) {
      const double u = ustar * i / 10.0;
      ok = ok && std::abs(rate_goe({x, u, theta, 1}).value - ref) < 1e-8;
    }
    rep.check("rate: flat-in-u region for theta=3, x=3 (1e-8)", ok);
  }
  {
    bool ok = true;
    for (auto [th, x] : {std::pair{3.0, 4.0}, {3.0, 5.0}, {1.5, 3.0}}) {
      const double u = *u_star(th, x);
      const double h = 1e-5;
      const double d = (rate_goe({x, u + h, th, 1}).value - rate_goe({x, u - h, th, 1}).value) /
                       (2 * h);
      ok = ok && std::abs(d) < 1e-5;
    }
    rep.check("rate: stationarity of u -> I at u_theta (1e-5)", ok);
  }
  {
    bool ok = true;
    auto gm = global_min(3.0);
    ok = rate_goe({gm.x_min, gm.u_min, 3.0, 1}).value < 1e-9;
    for (double x : {2.0, 2.5, 4.0, 6.0})
      for (double u : {0.0, 0.3, 0.9}) ok = ok && rate_goe({x, u, 3.0, 1}).value >= 0.0;
    rep.check("rate: non-negative, zero at the global minimizer", ok);
  }
  {
    bool ok = true;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(2.0, 6.0), uu(0.0, 0.99);
    for (int i = 0; i < (fast ? 20 : 100); ++i) {
      const double x = ux(rng), u = uu(rng);
      ok = ok && rate_multi({{x}, {u}, 3.0, 1}).value == rate_goe({x, u, 3.0, 1}).value;
    }
    rep.check("rate: n=1 multi rate reduces to rate_goe exactly", ok);
  }
  {
    EnsembleSpec s{EnsembleKind::goe, 50, 0, 2.0, 0.0, 1, 123, fast ? 8 : 32};
    auto a = mc_stats(s, 1);
    auto b = mc_stats(s, 4);
    rep.check("ensembles: mc_stats deterministic across thread counts",
              a.lambda_max_mean == b.lambda_max_mean && a.overlap_mean == b.overlap_mean);
  }
  {
    auto f = [&](double u) { return std::exp(overlap_prior_logdensity(u, 50, 1)); };
    const double mass = integrate_cos_substitution(f, 0.0, 1.0);
    rep.check("ensembles: overlap prior integrates to 1 (1e-8)", std::abs(mass - 1.0) < 1e-8);
  }
  if (!fast) {
    EnsembleSpec s{EnsembleKind::goe, 400, 0, 0.0, 0.0, 1, 3, 1};
    auto ed = sample_spiked_wigner(s);
    double sum = 0;
    for (double u : ed.overlaps) sum += u;
    rep.check("ensembles: eigenvector overlaps sum to 1 (1e-8)", std::abs(sum - 1.0) < 1e-8);
  }
  std::printf("%d invariant(s) failed\n", rep.failures);
  return rep.failures == 0 ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    load_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoFail;
  }

  CLI::App app{"large-deviation rate functions and Monte Carlo for spiked random matrices"};
  app.require_subcommand(1);
  std::string config_path, out_path = cfg<std::string>("out", "");
  std::uint64_t seed = cfg<std::uint64_t>("seed", 0);
  int threads = cfg<int>("threads", 1);
  bool fast = false;
  app.add_option("--config", config_path, "JSON config file (flags override it)");
  app.add_option("--out", out_path, "output path (default: stdout)");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--threads", threads, "worker threads for Monte Carlo");
  app.add_flag("--fast", fast, "reduced grids / sample counts");

  // transforms -------------------------------------------------------------
  auto* t = app.add_subcommand("transforms", "evaluate G, K, R, log-potential, J");
  std::string t_measure = cfg<std::string>("measure", "semicircle");
  double t_alpha = cfg<double>("alpha", 0.5);
  std::string t_density;
  std::vector<double> t_stieltjes, t_rtrans, t_logpot, t_kinv;
  std::vector<double> t_j;  // flattened (theta, lambda) pairs
  bool t_edge = false, t_support = false;
  t->add_option("--measure", t_measure, "semicircle | marchenko_pastur | generic");
  t->add_option("--alpha", t_alpha, "Marchenko-Pastur ratio in (0,1]");
  t->add_option("--density-file", t_density, "two-column CSV t,density for generic");
  t->add_option("--stieltjes", t_stieltjes, "evaluation points z > r(mu)");
  t->add_option("--r-transform", t_rtrans, "points m in (0, G(r))");
  t->add_option("--k-inverse", t_kinv, "points m in (0, G(r))");
  t->add_option("--log-potential", t_logpot, "points x >= r(mu)");
  t->add_option("--j", t_j, "theta lambda pairs for the spherical integral")
      ->check(CLI::Number);
  t->add_flag("--edge", t_edge, "emit G at the right edge");
  t->add_flag("--support", t_support, "emit the right support edge");

  // rate-point / rate-grid / rate-surface ----------------------------------
  double theta = cfg<double>("theta", 3.0), x = 3.0, u = 0.5;
  int beta = cfg<int>("beta", 1);
  auto* rp = app.add_subcommand("rate-point", "single GOE/GUE rate evaluation");
  rp->add_option("--theta", theta)->capture_default_str();
  rp->add_option("--beta", beta)->check(CLI::IsMember({1, 2}));
  rp->add_option("--x", x)->required();
  rp->add_option("--u", u)->required();

  double gx0 = cfg<double>("x_min", 2.0), gx1 = cfg<double>("x_max", 5.0);
  double gu0 = cfg<double>("u_min", 0.0), gu1 = cfg<double>("u_max", 1.0);
  int gxs = cfg<int>("x_steps", 150), gus = cfg<int>("u_steps", 150);
  auto* rg = app.add_subcommand("rate-grid", "rate values on an inclusive grid");
  rg->add_option("--theta", theta)->capture_default_str();
  rg->add_option("--beta", beta)->check(CLI::IsMember({1, 2}));
  rg->add_option("--x-min", gx0)->capture_default_str();
  rg->add_option("--x-max", gx1)->capture_default_str();
  rg->add_option("--x-steps", gxs)->capture_default_str();
  rg->add_option("--u-min", gu0)->capture_default_str();
  rg->add_option("--u-max", gu1)->capture_default_str();
  rg->add_option("--u-steps", gus)->capture_default_str();

  auto* rs = app.add_subcommand("rate-surface",
                                "rate surface over open (x_min,x_max)x(u_min,u_max) cells "
                                "plus a JSON summary with the global minimum");
  rs->add_option("--theta", theta)->capture_default_str();
  rs->add_option("--beta", beta)->check(CLI::IsMember({1, 2}));
  rs->add_option("--x-min", gx0)->capture_default_str();
  rs->add_option("--x-max", gx1)->capture_default_str();
  rs->add_option("--x-steps", gxs)->capture_default_str();
  rs->add_option("--u-min", gu0)->capture_default_str();
  rs->add_option("--u-max", gu1)->capture_default_str();
  rs->add_option("--u-steps", gus)->capture_default_str();

  // rate-multi -------------------------------------------------------------
  std::string xs_str, us_str;
  auto* rm = app.add_subcommand("rate-multi", "joint rate for the n largest eigenvalues");
  rm->add_option("--theta", theta)->capture_default_str();
  rm->add_option("--beta", beta)->check(CLI::IsMember({1, 2}));
  rm->add_option("--xs", xs_str, "comma list, non-increasing, each >= 2")->required();
  rm->add_option("--us", us_str, "comma list of overlaps, sum <= 1")->required();

  // rate-wishart -----------------------------------------------------------
  double gamma = cfg<double>("gamma", 2.0), walpha = cfg<double>("alpha", 0.5);
  auto* rw = app.add_subcommand("rate-wishart", "spiked Wishart rate evaluation");
  rw->add_option("--gamma", gamma)->capture_default_str();
  rw->add_option("--alpha", walpha)->capture_default_str();
  rw->add_option("--beta", beta)->check(CLI::IsMember({1, 2}));
  rw->add_option("--x", x)->required();
  rw->add_option("--u", u)->required();

  // minimize ---------------------------------------------------------------
  std::string min_ensemble = "goe";
  auto* mn = app.add_subcommand("minimize", "locate the rate-function global minimum");
  mn->add_option("--ensemble", min_ensemble, "goe | wishart");
  mn->add_option("--theta", theta)->capture_default_str();
  mn->add_option("--beta", beta)->check(CLI::IsMember({1, 2}));
  mn->add_option("--gamma", gamma)->capture_default_str();
  mn->add_option("--alpha", walpha)->capture_default_str();

  // simulate ---------------------------------------------------------------
  std::string sim_kind = cfg<std::string>("kind", "goe");
  int sim_n = cfg<int>("n", 200), sim_m = cfg<int>("m", 0),
      sim_samples = cfg<int>("samples", 100);
  double tilt = -1.0, window = cfg<double>("window", 0.1);
  auto* sim = app.add_subcommand("simulate", "Monte Carlo summary of a spiked ensemble");
  sim->add_option("--kind", sim_kind, "goe | gue | wishart");
  sim->add_option("--theta", theta)->capture_default_str();
  sim->add_option("--gamma", gamma)->capture_default_str();
  sim->add_option("--alpha", walpha, "wishart ratio; sets m = alpha * n unless --m given");
  sim->add_option("--n", sim_n)->capture_default_str();
  sim->add_option("--m", sim_m, "wishart row count");
  sim->add_option("--beta", beta)->check(CLI::IsMember({1, 2}));
  sim->add_option("--samples", sim_samples)->capture_default_str();
  sim->add_option("--tilt", tilt, "importance-sampling reference spike theta'");
  sim->add_option("--window", window, "acceptance window for the tilted estimate");

  // verify -----------------------------------------------------------------
  bool inject_fault = false;
  auto* ver = app.add_subcommand("verify", "run the invariant suite");
  ver->add_flag("--inject-fault", inject_fault)->group("");  // test hook

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  try {
    if (t->parsed()) {
      auto mu = measure_from(t_measure, t_alpha, t_density);
      std::string csv = "point,quantity,value\n";
      if (t_support) csv += "-,support_right," + csv_num(support_right(mu)) + "\n";
      if (t_edge) csv += "-,stieltjes_edge," + csv_num(stieltjes_edge(mu)) + "\n";
      for (double z : t_stieltjes)
        csv += csv_num(z) + ",stieltjes," + csv_num(stieltjes(mu, z)) + "\n";
      for (double m : t_kinv) csv += csv_num(m) + ",k_inverse," + csv_num(k_inverse(mu, m)) + "\n";
      for (double m : t_rtrans)
        csv += csv_num(m) + ",r_transform," + csv_num(r_transform(mu, m)) + "\n";
      for (double xx : t_logpot)
        csv += csv_num(xx) + ",log_potential," + csv_num(log_potential(mu, xx)) + "\n";
      if (t_j.size() % 2 != 0) throw std::invalid_argument("--j expects theta lambda pairs");
      for (std::size_t i = 0; i + 1 < t_j.size(); i += 2)
        csv += csv_num(t_j[i]) + "|" + csv_num(t_j[i + 1]) + ",j," +
               csv_num(j_limit(mu, t_j[i], t_j[i + 1]).value) + "\n";
      emit(out_path, csv);
      return kExitOk;
    }
    if (rp->parsed()) {
      auto r = rate_goe({x, u, theta, beta});
      emit(out_path, "x,u,rate,y_star,regime\n" + rate_row(x, u, r));
      return kExitOk;
    }
    if (rg->parsed() || rs->parsed()) {
      if (gxs < 2 || gus < 2) throw std::invalid_argument("grid steps must be >= 2");
      if (!(gx0 >= 2.0) && !rs->parsed())
        throw std::invalid_argument("x_min must be >= 2 for GOE grids");
      std::string csv = "x,u,rate,y_star,regime\n";
      const bool centers = rs->parsed();
      for (int i = 0; i < gxs; ++i) {
        const double xx = centers ? gx0 + (gx1 - gx0) * (i + 0.5) / gxs
                                  : gx0 + (gx1 - gx0) * i / (gxs - 1);
        for (int j = 0; j < gus; ++j) {
          const double uu = centers ? gu0 + (gu1 - gu0) * (j + 0.5) / gus
                                    : gu0 + (gu1 - gu0) * j / (gus - 1);
          csv += rate_row(xx, uu, rate_goe({xx, uu, theta, beta}));
        }
      }
      if (rs->parsed()) {
        auto gm = global_min(theta, beta);
        json summary{{"theta", theta},
                     {"beta", beta},
                     {"x_min", gm.x_min},
                     {"u_min", gm.u_min},
                     {"rate_at_min", rate_goe({gm.x_min, gm.u_min, theta, beta}).value}};
        if (out_path.empty()) {
          std::cout << csv;
          std::cerr << summary.dump(2) << "\n";
        } else {
          write_atomic(out_path, csv);
          write_atomic(summary_path_for(out_path), summary.dump(2) + "\n");
        }
      } else {
        emit(out_path, csv);
      }
      return kExitOk;
    }
    if (rm->parsed()) {
      MultiRateQuery q{parse_list(xs_str), parse_list(us_str), theta, beta};
      auto r = rate_multi(q);
      std::string csv = "rate,y_star,regime\n";
      csv += csv_num(r.value) + "," + csv_num(r.y_star) + "," + regime_name(r.regime) + "\n";
      emit(out_path, csv);
      return kExitOk;
    }
    if (rw->parsed()) {
      auto r = rate_wishart({x, u, gamma, walpha, beta});
      emit(out_path, "x,u,rate,y_star,regime\n" + rate_row(x, u, r));
      return kExitOk;
    }
    if (mn->parsed()) {
      GlobalMin gm = min_ensemble == "wishart" ? wishart_global_min(gamma, walpha)
                                               : global_min(theta, beta);
      json j{{"ensemble", min_ensemble},
             {"x_min", gm.x_min},
             {"u_min", gm.u_min},
             {"raw_inf", gm.raw_inf}};
      if (min_ensemble == "wishart") {
        j["gamma"] = gamma;
        j["alpha"] = walpha;
      } else {
        j["theta"] = theta;
      }
      emit(out_path, j.dump(2) + "\n");
      return kExitOk;
    }
    if (sim->parsed()) {
      EnsembleSpec spec;
      spec.kind = kind_from(sim_kind);
      spec.n = sim_n;
      spec.m = spec.kind == EnsembleKind::wishart
                   ? (sim_m > 0 ? sim_m : int(std::lround(walpha * sim_n)))
                   : 0;
      spec.theta = theta;
      spec.gamma = gamma;
      spec.beta = beta;
      spec.seed = seed;
      spec.samples = fast ? std::max(1, sim_samples / 10) : sim_samples;
      if (spec.n > 4000 || spec.samples > 100000)
        std::cerr << "warning: request above desk scale (n <= 4000, samples <= 1e5)\n";
      auto summary = mc_stats(spec, threads);
      json j = to_json(summary);
      if (tilt >= 0.0) {
        auto te = tilted_estimate(theta, tilt, spec, window, threads);
        const double xref = tilt > 1 ? tilt + 1.0 / tilt : 2.0;
        const double uref = tilt > 1 ? 1.0 - 1.0 / (tilt * tilt) : 0.0;
        j["tilt"] = json{{"theta_prime", tilt},
                         {"window", window},
                         {"estimate", te.value},
                         {"std_error", te.std_error},
                         {"ess", te.ess},
                         {"rate_reference", rate_goe({xref, uref, theta, beta}).value}};
        if (te.degenerate) std::cerr << "warning: degenerate importance weights (ess < 10)\n";
      }
      emit(out_path, j.dump(2) + "\n");
      return kExitOk;
    }
    if (ver->parsed()) return run_verify(fast, inject_fault);
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIoFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitOk;
}
