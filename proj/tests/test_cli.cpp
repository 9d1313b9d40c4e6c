#include <catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ldrmt/io.hpp"

namespace {

std::string bin() {
  const char* b = std::getenv("LDRMT_BIN");
  REQUIRE(b != nullptr);
  return b;
}

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args) {
  static int counter = 0;
  const std::string capture = "/tmp/ldrmt_cli_test_" + std::to_string(counter++) + ".out";
  const std::string cmd = bin() + " " + args + " > " + capture + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  std::ifstream in(capture);
  std::stringstream ss;
  ss << in.rdbuf();
  std::remove(capture.c_str());
  return {WEXITSTATUS(rc), ss.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string l;
  while (std::getline(ss, l))
    if (!l.empty()) out.push_back(l);
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("transforms evaluates the stieltjes transform", "[cli]") {
  auto r = run("transforms --measure semicircle --stieltjes 3");
  REQUIRE(r.exit_code == 0);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == "point,quantity,value");
  CHECK(ls[1].rfind("3,stieltjes,0.381966", 0) == 0);
}

TEST_CASE("transforms rejects points inside the support", "[cli]") {
  CHECK(run("transforms --measure semicircle --stieltjes 1.5").exit_code == 2);
  CHECK(run("transforms --measure nosuch --stieltjes 3").exit_code == 2);
  CHECK(run("bogus-subcommand").exit_code == 2);
}

TEST_CASE("rate-grid emits the documented CSV shape", "[cli]") {
  auto r = run("rate-grid --theta 3 --x-min 2 --x-max 3 --x-steps 2 "
               "--u-min 0 --u-max 0.5 --u-steps 2");
  REQUIRE(r.exit_code == 0);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 5);
  CHECK(ls[0] == "x,u,rate,y_star,regime");
  int commas = 0;
  for (char c : ls[1])
    if (c == ',') ++commas;
  CHECK(commas == 4);
  CHECK(ls[1].rfind("2,0,", 0) == 0);
  CHECK(ls[4].rfind("3,0.5,", 0) == 0);
}

TEST_CASE("rate-point value matches rate-grid corner", "[cli]") {
  auto p = run("rate-point --theta 3 --x 3 --u 0.5");
  REQUIRE(p.exit_code == 0);
  auto g = run("rate-grid --theta 3 --x-min 3 --x-max 4 --x-steps 2 "
               "--u-min 0.5 --u-max 0.6 --u-steps 2");
  REQUIRE(g.exit_code == 0);
  CHECK(lines(p.out)[1] == lines(g.out)[1]);
}

TEST_CASE("rate-multi runs a two-eigenvalue query", "[cli]") {
  auto r = run("rate-multi --theta 3 --xs 3.333333333,2 --us 0.888888889,0");
  REQUIRE(r.exit_code == 0);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == "rate,y_star,regime");
}

TEST_CASE("rate-wishart emits a rate row", "[cli]") {
  auto r = run("rate-wishart --gamma 2 --alpha 0.5 --x 3.75 --u 0.7");
  REQUIRE(r.exit_code == 0);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == "x,u,rate,y_star,regime");
  CHECK(ls[1].rfind("3.75,0.7,0,", 0) == 0);
}

TEST_CASE("minimize reports the supercritical minimizer", "[cli]") {
  auto r = run("minimize --ensemble goe --theta 3");
  REQUIRE(r.exit_code == 0);
  auto j = ldrmt::json::parse(r.out);
  CHECK(j.at("x_min").get<double>() == Catch::Approx(3.0 + 1.0 / 3.0).margin(1e-5));
  CHECK(j.at("u_min").get<double>() == Catch::Approx(8.0 / 9.0).margin(1e-5));
  CHECK(j.at("raw_inf").get<double>() == Catch::Approx(-1.25).margin(1e-8));

  auto w = run("minimize --ensemble wishart --gamma 2 --alpha 0.5");
  REQUIRE(w.exit_code == 0);
  auto jw = ldrmt::json::parse(w.out);
  CHECK(jw.at("x_min").get<double>() == Catch::Approx(3.75).margin(1e-5));
  CHECK(jw.at("u_min").get<double>() == Catch::Approx(0.7).margin(1e-5));
}

TEST_CASE("simulate output is deterministic and well formed", "[cli]") {
  const std::string args = "--seed 42 simulate --kind goe --theta 2 --n 60 --samples 20";
  auto a = run(args);
  auto b = run(args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  auto j = ldrmt::json::parse(a.out);
  CHECK(j.at("n").get<int>() == 60);
  CHECK(j.at("samples").get<int>() == 20);
  CHECK(j.at("seed").get<std::uint64_t>() == 42);
  CHECK(j.at("lambda_max_mean").get<double>() > 2.0);
  CHECK(j.at("overlap_std").get<double>() >= 0.0);
  REQUIRE(j.contains("histograms"));
  auto summary = ldrmt::mc_summary_from_json(j);
  CHECK(summary.lambda_max_mean == j.at("lambda_max_mean").get<double>());
  CHECK(summary.hist_lambda_max.counts.size() + 1 == summary.hist_lambda_max.edges.size());
}

TEST_CASE("simulate honors --out and fails cleanly on bad paths", "[cli]") {
  const std::string path = "/tmp/ldrmt_cli_sim.json";
  auto r = run("--seed 7 --out " + path + " simulate --kind gue --theta 1.5 --n 40 --samples 10");
  REQUIRE(r.exit_code == 0);
  auto j = ldrmt::json::parse(slurp(path));
  CHECK(j.at("n").get<int>() == 40);
  std::remove(path.c_str());
  CHECK(run("--out /nonexistent-dir/x.json rate-point --theta 3 --x 3 --u 0.5").exit_code == 3);
  CHECK(run("--config /nonexistent-dir/c.json rate-point --theta 3 --x 3 --u 0.5").exit_code == 3);
}

TEST_CASE("config file seeds defaults and flags override", "[cli]") {
  const std::string cfg = "/tmp/ldrmt_cli_cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({"theta": 2.0, "seed": 5})";
  }
  auto a = run("--config " + cfg + " rate-point --x 3 --u 0.5");
  auto b = run("rate-point --theta 2 --x 3 --u 0.5");
  auto c = run("--config " + cfg + " rate-point --theta 3 --x 3 --u 0.5");
  auto d = run("rate-point --theta 3 --x 3 --u 0.5");
  std::remove(cfg.c_str());
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(c.out == d.out);
  CHECK(a.out != c.out);
}

TEST_CASE("rate-surface writes csv plus summary json", "[cli]") {
  const std::string path = "/tmp/ldrmt_cli_surface.csv";
  auto r = run("--out " + path + " rate-surface --theta 3 --x-min 2 --x-max 4 --x-steps 4 "
               "--u-min 0 --u-max 1 --u-steps 4");
  REQUIRE(r.exit_code == 0);
  auto ls = lines(slurp(path));
  REQUIRE(ls.size() == 17);
  CHECK(ls[0] == "x,u,rate,y_star,regime");
  auto j = ldrmt::json::parse(slurp("/tmp/ldrmt_cli_surface.summary.json"));
  CHECK(j.at("rate_at_min").get<double>() == Catch::Approx(0.0).margin(1e-8));
  std::remove(path.c_str());
  std::remove("/tmp/ldrmt_cli_surface.summary.json");
}

TEST_CASE("verify passes and the fault hook trips it", "[cli]") {
  auto ok = run("--fast verify");
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  auto bad = run("--fast verify --inject-fault");
  CHECK(bad.exit_code == 1);
  CHECK(bad.out.find("FAIL") != std::string::npos);
}
