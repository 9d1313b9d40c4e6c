#ifndef LDRMT_IO_HPP
#define LDRMT_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ldrmt/ensembles.hpp"

namespace ldrmt {

using json = nlohmann::json;

inline json to_json(const Histogram& h) {
  return json{{"edges", h.edges}, {"counts", h.counts}};
}

inline json to_json(const McSummary& s) {
  return json{{"lambda_max_mean", s.lambda_max_mean},
              {"lambda_max_std", s.lambda_max_std},
              {"overlap_mean", s.overlap_mean},
              {"overlap_std", s.overlap_std},
              {"lambda_second_mean", s.lambda_second_mean},
              {"n", s.n},
              {"samples", s.samples},
              {"seed", s.seed},
              {"histograms",
               json{{"lambda_max", to_json(s.hist_lambda_max)},
                    {"overlap", to_json(s.hist_overlap)}}}};
}

inline McSummary mc_summary_from_json(const json& j) {
  McSummary s;
  s.lambda_max_mean = j.at("lambda_max_mean");
  s.lambda_max_std = j.at("lambda_max_std");
  s.overlap_mean = j.at("overlap_mean");
  s.overlap_std = j.at("overlap_std");
  s.lambda_second_mean = j.at("lambda_second_mean");
  s.n = j.at("n");
  s.samples = j.at("samples");
  s.seed = j.at("seed");
  const auto& h = j.at("histograms");
  s.hist_lambda_max.edges = h.at("lambda_max").at("edges").get<std::vector<double>>();
  s.hist_lambda_max.counts = h.at("lambda_max").at("counts").get<std::vector<std::uint64_t>>();
  s.hist_overlap.edges = h.at("overlap").at("edges").get<std::vector<double>>();
  s.hist_overlap.counts = h.at("overlap").at("counts").get<std::vector<std::uint64_t>>();
  return s;
}

/// Writes content to path via a temp file + rename, so readers never see a
/// partial file.
inline void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot open " + tmp + " for writing");
    out << content;
    if (!out) throw std::ios_base::failure("write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::ios_base::failure("rename failed for " + path + ": " + ec.message());
}

/// CSV numeric formatting: 9 significant digits.
inline std::string csv_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

/// Loads a two-column CSV (t, density) as a generic measure density via
/// linear interpolation. Lines starting with '#' and a leading header are
/// skipped.
struct SampledDensity {
  std::vector<double> t;
  std::vector<double> d;

  double operator()(double x) const {
    if (x <= t.front()) return d.front();
    if (x >= t.back()) return d.back();
    auto it = std::lower_bound(t.begin(), t.end(), x);
    const std::size_t i = std::size_t(it - t.begin());
    const double w = (x - t[i - 1]) / (t[i] - t[i - 1]);
    return d[i - 1] * (1.0 - w) + d[i] * w;
  }
};

inline SampledDensity load_density_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  SampledDensity out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) continue;
    try {
      const double tv = std::stod(a);
      const double dv = std::stod(b);
      out.t.push_back(tv);
      out.d.push_back(dv);
    } catch (const std::exception&) {
      continue;  // header row
    }
  }
  if (out.t.size() < 2) throw std::invalid_argument(path + ": need at least two density rows");
  return out;
}

}  // namespace ldrmt

#endif  // LDRMT_IO_HPP
