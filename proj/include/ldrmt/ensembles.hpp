#ifndef LDRMT_ENSEMBLES_HPP
#define LDRMT_ENSEMBLES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ldrmt/numerics.hpp"

namespace ldrmt {

enum class EnsembleKind { goe, gue, wishart };

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::goe;
  int n = 2;              // matrix dimension N (wishart: number of columns)
  int m = 0;              // wishart rows M, 1 <= m <= n
  double theta = 0.0;     // additive spike strength (wigner kinds)
  double gamma = 0.0;     // covariance spike (wishart)
  int beta = 1;           // Dyson index, 1 or 2 (gue forces 2)
  std::uint64_t seed = 0;
  int samples = 1;

  void validate() const {
    if (n < 2) throw std::invalid_argument("EnsembleSpec: n must be >= 2");
    if (samples < 1) throw std::invalid_argument("EnsembleSpec: samples must be >= 1");
    if (kind == EnsembleKind::wishart && (m < 1 || m > n))
      throw std::invalid_argument("EnsembleSpec: wishart requires 1 <= m <= n");
    if (beta != 1 && beta != 2) throw std::invalid_argument("EnsembleSpec: beta must be 1 or 2");
  }

  int dyson() const { return kind == EnsembleKind::gue ? 2 : beta; }
  double alpha() const { return double(m) / double(n); }
};

/// Full spectrum of one sampled matrix: eigenvalues ascending, squared
/// first components of the matching eigenvectors.
struct EigenData {
  std::vector<double> values;
  std::vector<double> overlaps;

  double lambda_max() const { return values.back(); }
  double lambda_second() const { return values[values.size() - 2]; }
  double overlap_top() const { return overlaps.back(); }

  /// <e1, A e1> reconstructed from the spectral data: sum lambda_i |v_i(1)|^2.
  double spike_component() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * overlaps[i];
    return s;
  }
};

struct Histogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
};

struct McSummary {
  double lambda_max_mean = 0, lambda_max_std = 0;
  double overlap_mean = 0, overlap_std = 0;
  double lambda_second_mean = 0;
  int n = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  Histogram hist_lambda_max;
  Histogram hist_overlap;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-sample generator: sample index mixed into the seed so that serial
/// and parallel runs draw identical streams.
inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t sample_index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(sample_index + 0x51ed2701)));
}

template <class Matrix>
void check_residuals(const Matrix& a, const Eigen::SelfAdjointEigenSolver<Matrix>& es) {
  const int n = int(a.rows());
  const double norm = std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(n - 1)));
  const double tol = 1e-10 * std::max(norm, 1.0) * std::sqrt(double(n));
  const int stride = n <= 256 ? 1 : n / 8;
  for (int i = 0; i < n; i += stride) {
    const double res = (a * es.eigenvectors().col(i) -
                        es.eigenvalues()(i) * es.eigenvectors().col(i))
                           .norm();
    if (!(res <= tol))
      throw std::runtime_error("eigen_full: residual " + std::to_string(res) +
                               " exceeds tolerance");
  }
}

}  // namespace detail

/// Full eigendecomposition of a dense symmetric/Hermitian matrix with
/// residual verification.
template <class Matrix>
EigenData eigen_full(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigen_full: failed to converge");
  detail::check_residuals(a, es);
  const int n = int(a.rows());
  EigenData out;
  out.values.resize(n);
  out.overlaps.resize(n);
  for (int i = 0; i < n; ++i) {
    out.values[i] = es.eigenvalues()(i);
    out.overlaps[i] = std::norm(typename Matrix::Scalar(es.eigenvectors()(0, i)));
  }
  return out;
}

/// Draws X from the beta = 1 or 2 Gaussian ensemble with density
/// exp(-beta N Tr X^2 / 4), adds theta to the (1,1) entry (spike direction
/// e1), and diagonalizes.
inline EigenData sample_spiked_wigner(const EnsembleSpec& spec, std::uint64_t sample_index = 0) {
  spec.validate();
  if (spec.kind == EnsembleKind::wishart)
    throw std::invalid_argument("sample_spiked_wigner: kind must be goe or gue");
  auto rng = detail::sample_rng(spec.seed, sample_index);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = spec.n;
  if (spec.dyson() == 1) {
    const double off = 1.0 / std::sqrt(double(n));
    const double diag = std::sqrt(2.0 / double(n));
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
      a(i, i) = diag * gauss(rng);
      for (int j = i + 1; j < n; ++j) {
        const double v = off * gauss(rng);
        a(i, j) = v;
        a(j, i) = v;
      }
    }
    a(0, 0) += spec.theta;
    return eigen_full(a);
  }
  const double diag = 1.0 / std::sqrt(double(n));
  const double off = 1.0 / std::sqrt(2.0 * double(n));
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = diag * gauss(rng);
    for (int j = i + 1; j < n; ++j) {
      const std::complex<double> v(off * gauss(rng), off * gauss(rng));
      a(i, j) = v;
      a(j, i) = std::conj(v);
    }
  }
  a(0, 0) += spec.theta;
  return eigen_full(a);
}

/// Draws Y (M x N, entry variance 1/N) and diagonalizes
/// W = Sigma^(1/2) Y Y* Sigma^(1/2) with Sigma = I + gamma e1 e1*.
inline EigenData sample_spiked_wishart(const EnsembleSpec& spec, std::uint64_t sample_index = 0) {
  spec.validate();
  if (spec.kind != EnsembleKind::wishart)
    throw std::invalid_argument("sample_spiked_wishart: kind must be wishart");
  auto rng = detail::sample_rng(spec.seed, sample_index);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int m = spec.m, n = spec.n;
  const double srow = std::sqrt(1.0 + spec.gamma);
  if (spec.beta == 1) {
    const double sd = 1.0 / std::sqrt(double(n));
    Eigen::MatrixXd y(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) y(i, j) = sd * gauss(rng);
    y.row(0) *= srow;  // Sigma^(1/2) Y, Sigma^(1/2) = I + (sqrt(1+gamma)-1) e1 e1^T
    Eigen::MatrixXd w = y * y.transpose();
    return eigen_full(w);
  }
  const double sd = 1.0 / std::sqrt(2.0 * double(n));
  Eigen::MatrixXcd y(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) y(i, j) = std::complex<double>(sd * gauss(rng), sd * gauss(rng));
  y.row(0) *= srow;
  Eigen::MatrixXcd w = y * y.adjoint();
  return eigen_full(w);
}

inline EigenData sample_ensemble(const EnsembleSpec& spec, std::uint64_t sample_index = 0) {
  return spec.kind == EnsembleKind::wishart ? sample_spiked_wishart(spec, sample_index)
                                            : sample_spiked_wigner(spec, sample_index);
}

namespace detail {

inline Histogram make_histogram(const std::vector<double>& data, int bins) {
  Histogram h;
  double lo = data[0], hi = data[0];
  for (double v : data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) hi = lo + 1e-12;
  h.edges.resize(bins + 1);
  h.counts.assign(bins, 0);
  for (int i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * i / double(bins);
  for (double v : data) {
    int b = int((v - lo) / (hi - lo) * bins);
    if (b == bins) b = bins - 1;
    ++h.counts[b];
  }
  return h;
}

}  // namespace detail

/// Monte Carlo aggregate over spec.samples independent draws. Per-sample
/// sub-seeds make the result identical for any thread count.
inline McSummary mc_stats(const EnsembleSpec& spec, int threads = 1, int bins = 40) {
  spec.validate();
  const int s = spec.samples;
  std::vector<double> lmax(s), utop(s), lsec(s);
  auto worker = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      EigenData ed = sample_ensemble(spec, std::uint64_t(i));
      lmax[i] = ed.lambda_max();
      utop[i] = ed.overlap_top();
      lsec[i] = ed.lambda_second();
    }
  };
  threads = std::max(1, threads);
  if (threads == 1 || s == 1) {
    worker(0, s);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (s + threads - 1) / threads;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back(worker, std::min(t * chunk, s), std::min((t + 1) * chunk, s));
    for (auto& th : pool) th.join();
  }
  McSummary out;
  out.n = spec.n;
  out.samples = s;
  out.seed = spec.seed;
  auto mean_std = [&](const std::vector<double>& v, double& mean, double& sd) {
    double m = 0;
    for (double x : v) m += x;
    m /= v.size();
    double var = 0;
    for (double x : v) var += (x - m) * (x - m);
    sd = v.size() > 1 ? std::sqrt(var / (v.size() - 1)) : 0.0;
    mean = m;
  };
  mean_std(lmax, out.lambda_max_mean, out.lambda_max_std);
  mean_std(utop, out.overlap_mean, out.overlap_std);
  double dummy;
  mean_std(lsec, out.lambda_second_mean, dummy);
  out.hist_lambda_max = detail::make_histogram(lmax, bins);
  out.hist_overlap = detail::make_histogram(utop, bins);
  return out;
}

/// Log density of the overlap of one fixed eigenvector with e1 at theta = 0:
/// the Beta(beta/2, (N-1) beta/2) law. The normalizer is fixed by quadrature
/// once per (n, beta).
inline double overlap_prior_logdensity(double u, int n, int beta) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("overlap_prior_logdensity: u must be in (0,1)");
  if (n < 2 || (beta != 1 && beta != 2))
    throw std::domain_error("overlap_prior_logdensity: bad (n, beta)");
  const double pa = 0.5 * beta;
  const double pb = 0.5 * beta * (n - 1);
  static std::map<std::pair<int, int>, double> norm_cache;
  static std::mutex mtx;
  double log_norm;
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = norm_cache.find({n, beta});
    if (it == norm_cache.end()) {
      // substitution u = sin^2(phi) removes both endpoint singularities
      auto f = [&](double phi) {
        const double si = std::sin(phi), co = std::cos(phi);
        return 2.0 * std::pow(si, 2.0 * pa - 1.0) * std::pow(co, 2.0 * pb - 1.0);
      };
      const double mass = integrate(f, 0.0, 0.5 * std::acos(-1.0));
      it = norm_cache.emplace(std::make_pair(n, beta), std::log(mass)).first;
    }
    log_norm = it->second;
  }
  return (pa - 1.0) * std::log(u) + (pb - 1.0) * std::log(1.0 - u) - log_norm;
}

/// CDF of the same law, for distribution tests.
inline double overlap_prior_cdf(double u, int n, int beta) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  auto f = [&](double phi) { return std::exp(overlap_prior_logdensity(
                                 std::sin(phi) * std::sin(phi), n, beta)) *
                             2.0 * std::sin(phi) * std::cos(phi); };
  return integrate(f, 0.0, std::asin(std::sqrt(u)), QuadratureSpec{1e-12, 4096, true});
}

/// Log likelihood ratio between the theta and theta_prime spiked laws,
/// an affine function of the (1,1) matrix entry alone.
inline double tilt_log_weight(double theta, double theta_prime, int n, int beta, double y11) {
  return 0.5 * n * beta * (theta - theta_prime) * y11 -
         0.25 * n * beta * (theta * theta - theta_prime * theta_prime);
}

struct TiltedEstimate {
  double value = 0.0;      // -(1/N) log P_theta[window around theta'-typical point]
  double std_error = 0.0;  // delta-method error on value
  double ess = 0.0;        // effective sample size of the importance weights
  bool degenerate = false; // ess < 10
};

/// Importance-sampling estimate of the theta-probability that
/// (lambda_max, overlap) falls in a window around the theta'-typical point,
/// sampling under theta_prime and reweighting by the exact density ratio.
inline TiltedEstimate tilted_estimate(double theta, double theta_prime, const EnsembleSpec& spec,
                                      double window = 0.1, int threads = 1) {
  if (!(theta >= 0.0) || !(theta_prime >= 0.0))
    throw std::domain_error("tilted_estimate: spike strengths must be >= 0");
  EnsembleSpec s = spec;
  s.theta = theta_prime;
  s.validate();
  const double x_typ = theta_prime > 1.0 ? theta_prime + 1.0 / theta_prime : 2.0;
  const double u_typ = theta_prime > 1.0 ? 1.0 - 1.0 / (theta_prime * theta_prime) : 0.0;
  const int count = s.samples;
  std::vector<double> logw(count, -kInfiniteRate);
  auto worker = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      EigenData ed = sample_spiked_wigner(s, std::uint64_t(i));
      if (std::abs(ed.lambda_max() - x_typ) <= window &&
          std::abs(ed.overlap_top() - u_typ) <= window)
        logw[i] = tilt_log_weight(theta, theta_prime, s.n, s.dyson(), ed.spike_component());
    }
  };
  threads = std::max(1, threads);
  if (threads == 1) {
    worker(0, count);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back(worker, std::min(t * chunk, count), std::min((t + 1) * chunk, count));
    for (auto& th : pool) th.join();
  }
  double lmaxw = -kInfiniteRate;
  for (double l : logw) lmaxw = std::max(lmaxw, l);
  TiltedEstimate out;
  if (!std::isfinite(lmaxw)) {
    out.value = kInfiniteRate;
    out.degenerate = true;
    return out;
  }
  double sum = 0.0, sumsq = 0.0;
  for (double l : logw) {
    if (!std::isfinite(l)) continue;
    const double w = std::exp(l - lmaxw);
    sum += w;
    sumsq += w * w;
  }
  const double mean = sum / count;
  out.ess = sum * sum / sumsq;
  out.degenerate = out.ess < 10.0;
  out.value = -(lmaxw + std::log(mean)) / double(s.n);
  // delta method: sd(log mean) = sd(w) / (mean sqrt(S))
  double var = 0.0;
  for (double l : logw) {
    const double w = std::isfinite(l) ? std::exp(l - lmaxw) : 0.0;
    var += (w - mean) * (w - mean);
  }
  var /= double(count - 1);
  out.std_error = std::sqrt(var / count) / mean / double(s.n);
  return out;
}

inline std::string kind_name(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::goe:
      return "goe";
    case EnsembleKind::gue:
      return "gue";
    case EnsembleKind::wishart:
      return "wishart";
  }
  return "?";
}

}  // namespace ldrmt

#endif  // LDRMT_ENSEMBLES_HPP
