// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "helm/cli.hpp"

using namespace helm;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "helm");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("wavenumber parsing") {
  CHECK(parse_wavenumber("pi") == doctest::Approx(kPi));
  CHECK(parse_wavenumber("2pi") == doctest::Approx(2 * kPi));
  CHECK(parse_wavenumber("10*pi") == doctest::Approx(10 * kPi));
  CHECK(parse_wavenumber(" 0.5 pi ") == doctest::Approx(0.5 * kPi));
  CHECK(parse_wavenumber("3.25") == doctest::Approx(3.25));
  CHECK_THROWS_AS(parse_wavenumber("ten"), ConfigError);
  CHECK_THROWS_AS(parse_wavenumber("2pie"), ConfigError);
  CHECK_THROWS_AS(parse_wavenumber(""), ConfigError);
}

TEST_CASE("configuration validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.k = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.p = 7;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.n = {4, 0};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.p_ref = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.inject = "nonsense";
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("plane-wave rows") {
  const Run r = run({"plane-wave", "--k", "pi", "--p", "1", "--n", "1,4"});
  REQUIRE(r.status == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 3);
  CHECK(l[0] == "n,h,p,k,E_fem,E_ba,E_est,E_est_guar,eff_est,eff_guar,eta,osc,c_ba,c_up");
  CHECK(l[1].rfind("1,2.82842712475,1,3.14159265359,", 0) == 0);
  CHECK(l[2].rfind("4,0.707106781187,1,", 0) == 0);
  CHECK(run({"plane-wave", "--n", "1,4"}).out == r.out);
}

TEST_CASE("plane-wave row values") {
  const PlaneWaveRow row = run_plane_wave(kPi, 1, 8);
  CHECK(*row.report.effectivity() == doctest::Approx(0.78).epsilon(0.04));
  CHECK(row.report.c_up == doctest::Approx(9.42472985245077702));
  CHECK(*row.report.e_ba() <= *row.report.e_fem());
  CHECK(row.defects.divergence < 1e-10);
}

TEST_CASE("argument errors") {
  CHECK(run({}).status != 0);
  CHECK(run({"plane-wave", "--p", "0"}).status != 0);
  CHECK(run({"plane-wave", "--k", "-1"}).status != 0);
  CHECK(run({"plane-wave", "--n", "0"}).status != 0);
  CHECK(run({"plane-wave", "--bogus"}).status != 0);
  CHECK(run({"scattering", "--mesh", "/nonexistent.mesh"}).status != 0);
  CHECK(run({"unknown"}).status != 0);
}

TEST_CASE("scattering header and zero iterations") {
  const Run r = run({"scattering", "--iters", "0"});
  REQUIRE(r.status == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 5);
  CHECK(l[2].find("c_up=42.0520953681") != std::string::npos);
  CHECK(l[3] == "iter,n_elem,h_min,h_max,E_fem,E_est,eff,E_est_guar");
  CHECK(l[4].rfind("0,130,", 0) == 0);
  const Run high = run({"scattering", "--k", "10pi", "--iters", "0", "--pref", "2"});
  CHECK(lines(high.out)[2].find("c_up=198.946768341") != std::string::npos);
}

TEST_CASE("scattering snapshots") {
  const auto dir = std::filesystem::temp_directory_path() / "helm_cli_snapshots";
  std::filesystem::remove_all(dir);
  const auto csv = dir / "history.csv";
  std::filesystem::create_directories(dir);
  const Run r = run({"scattering", "--iters", "1", "--nu", "-pi/12", "--snapshots", dir.string(), "--out",
                     csv.string()});
  REQUIRE(r.status == 0);
  CHECK(r.out.empty());
  CHECK(std::filesystem::exists(dir / "iter_00.mesh"));
  CHECK(std::filesystem::exists(dir / "iter_01.csv"));
  CHECK_NOTHROW(load_mesh(dir / "iter_01.mesh"));
  std::ifstream values(dir / "iter_00.csv");
  std::string header;
  std::getline(values, header);
  CHECK(header == "elem,eta_K,e_K");
  int rows = 0;
  for (std::string line; std::getline(values, line);) ++rows;
  CHECK(rows == 130);
  std::ifstream history(csv);
  std::string first;
  std::getline(history, first);
  CHECK(first.rfind("# mesh=", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("verify passes on a clean build and catches injected faults") {
  const Run clean = run({"verify"});
  CHECK(clean.status == 0);
  CHECK(clean.out.find("FAIL") == std::string::npos);

  const Run sign = run({"verify", "--inject", "boundary-sign"});
  CHECK(sign.status != 0);
  CHECK(sign.out.find("FAIL flux identities") != std::string::npos);

  const Run galerkin = run({"verify", "--inject", "non-galerkin"});
  CHECK(galerkin.status != 0);
  CHECK(galerkin.out.find("FAIL patch compatibility") != std::string::npos);

  CHECK(run({"verify", "--inject", "other"}).status != 0);
}
