#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "exitwise/cli.hpp"

using namespace exitwise;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("brownian-exit rows and summary") {
  const Result r = call({"brownian-exit", "--n", "2000", "--seed", "3"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 2001);
  CHECK(rows[0] == std::vector<std::string>{"sample_index", "time", "location", "n_as"});
  double sum = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][0] == std::to_string(i - 1));
    const double loc = std::stod(rows[i][2]);
    CHECK((loc == -1.0 || loc == 1.0));
    sum += std::stod(rows[i][1]);
  }
  // sd of tau is sqrt(2/3)
  CHECK(std::abs(sum / 2000.0 - 1.0) < 3.0 * std::sqrt(2.0 / 3.0 / 2000.0));
  const auto s = nlohmann::json::parse(r.err);
  CHECK(s["command"] == "brownian-exit");
  CHECK(s["n"] == 2000);
  CHECK(s["mean"].get<double>() == doctest::Approx(sum / 2000.0).epsilon(1e-9));
  CHECK(s["side_frequency"]["interior"] == 0.0);
  CHECK(s["counter"]["name"] == "n_as");
}

TEST_CASE("reruns are byte identical and the stream base shifts samples") {
  const std::vector<std::string> args{"diffusion-exit", "--drift", "sin", "--a", "-0.5", "--b", "0.5", "--n", "300",
                                      "--seed", "8", "--summary", "none"};
  const Result a = call(args), b = call(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.err.empty());
  std::vector<std::string> shifted = args;
  shifted[8] = "200";
  shifted.insert(shifted.end(), {"--streams", "100"});
  const Result c = call(shifted);
  REQUIRE(c.code == 0);
  const auto ra = csv_rows(a.out), rc = csv_rows(c.out);
  CHECK(ra[0] == std::vector<std::string>{"sample_index", "time", "location", "n_tot", "n_it", "capped"});
  // sample 0 of the shifted run is sample 100 of the first
  for (std::size_t k = 1; k < ra[0].size(); ++k) CHECK(rc[1][k] == ra[101][k]);
}

TEST_CASE("conditional and json output") {
  const Result r = call({"conditional", "--t", "0.4", "--x", "0.3", "--n", "50", "--format", "json", "--summary", "none"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.size() == 50);
  for (const auto& o : j) {
    CHECK(o["position"].get<double>() > -1.0);
    CHECK(o["position"].get<double>() < 1.0);
    CHECK(o["n_c"].get<int>() >= 0);
  }
  CHECK(j[7]["sample_index"] == 7);
}

TEST_CASE("files and histogram") {
  const std::string out = "test_cli_samples.csv", hist = "test_cli_hist.csv", sum = "test_cli_summary.json";
  const Result r = call({"diffusion-exit", "--drift", "ou", "--mu0", "2", "--algo", "gdet", "--n", "500", "--out", out,
                         "--hist", hist, "--bins", "20", "--summary", sum});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream h(hist);
  std::string line;
  std::getline(h, line);
  CHECK(line == "bin_left,bin_right,count,density");
  int bins = 0;
  while (std::getline(h, line)) ++bins;
  CHECK(bins == 20);
  std::ifstream sf(sum);
  const auto s = nlohmann::json::parse(sf);
  CHECK(s["config"]["algo"] == "gdet");
  CHECK(s["config"]["kappa"].get<double>() == doctest::Approx(1.0));
  CHECK(s["counter"]["name"] == "n_tot");
  std::ifstream so(out);
  int rows = 0;
  while (std::getline(so, line)) ++rows;
  CHECK(rows == 501);
  std::remove(out.c_str());
  std::remove(hist.c_str());
  std::remove(sum.c_str());
}

TEST_CASE("usage errors and sampler refusals") {
  CHECK(call({}).code == 1);
  CHECK(call({"bogus"}).code == 1);
  CHECK(call({"brownian-exit", "--n", "0"}).code == 1);
  CHECK(call({"brownian-exit", "--x", "3"}).code == 1);
  CHECK(call({"conditional"}).code == 1);
  CHECK(call({"diffusion-exit", "--drift", "expr"}).code == 1);
  CHECK(call({"diffusion-exit", "--drift", "expr", "--expr", "1 +"}).code == 1);
  const Result ou = call({"diffusion-exit", "--drift", "ou", "--algo", "det"});
  CHECK(ou.code == 1);
  CHECK(ou.err.find("rho") != std::string::npos);
  CHECK(call({"diffusion-exit", "--drift", "ou", "--algo", "det", "--tilted", "--n", "10", "--summary", "none"}).code == 0);
  CHECK(call({"brownian-exit", "--te", "3"}).code == 1);
  const Result v = call({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out == std::string(kVersion) + "\n");
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("validate returns the suite verdict") {
  const std::string report = "test_cli_report.json";
  const Result r = call({"validate", "--suite", "brownian", "--scale", "0.05", "--report", report});
  std::ifstream f(report);
  const auto j = nlohmann::json::parse(f);
  CHECK(r.code == (j["pass"].get<bool>() ? 0 : 2));
  CHECK(j["suite"] == "brownian");
  CHECK(call({"validate", "--suite", "nope"}).code == 1);
  std::remove(report.c_str());
}
