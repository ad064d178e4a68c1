#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "thinlab/experiments.hpp"

using namespace thinlab;

namespace {

std::size_t col(const CsvTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return i;
  REQUIRE_MESSAGE(false, ("missing column " + name).c_str());
  return 0;
}

const std::string& cell(const CsvTable& t, std::size_t row, const std::string& name) {
  REQUIRE(row < t.rows.size());
  return t.rows[row][col(t, name)];
}

double dcell(const CsvTable& t, std::size_t row, const std::string& name) {
  return std::stod(cell(t, row, name));
}

}  // namespace

TEST_CASE("grid specs parse with defaults") {
  const auto g = parse_grid("N=1024,R=32");
  CHECK(g.dim == 1);
  CHECK(g.samples == 1024);
  CHECK(g.extent == 32.0);

  const auto d = parse_grid("", 2);
  CHECK(d.dim == 2);
  CHECK(d.samples == 4096);
  CHECK(d.extent == 64.0);

  CHECK(parse_grid("R=16").samples == 4096);
  CHECK_THROWS_AS(parse_grid("Q=3"), std::invalid_argument);
}

TEST_CASE("set specs parse") {
  const auto p = parse_set("periodic:n=3,h=0.1");
  CHECK(p.measure() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(parse_set("empty").measure() == 0.0);
  CHECK_THROWS(parse_set("/tmp/thinlab_no_such_set.csv"));

  const std::string path = "/tmp/thinlab_cli_set.csv";
  {
    std::ofstream out(path);
    p.write_csv(out);
  }
  const auto back = parse_set(path);
  CHECK(back.measure() == doctest::Approx(p.measure()).epsilon(1e-12));
  std::remove(path.c_str());
}

TEST_CASE("seeded thin profile sets") {
  const auto rho = RadiusFunction::power_law(1.0);
  const auto E = thin_profile_set(rho, 0.1, -31.0, 31.0, 5);
  CHECK(E.measure() > 0.0);

  CenterSpec centers;
  centers.lo = Point{-32.0, 0.0};
  centers.hi = Point{32.0, 0.0};
  const auto cert = certify_thinness(E, rho, centers);
  // near the origin unit balls straddle a few spikes, so the sup tracks eps
  // only up to a small factor
  CHECK(cert.epsilon_measured >= 0.08);
  CHECK(cert.epsilon_measured <= 0.35);

  const auto same = thin_profile_set(rho, 0.1, -31.0, 31.0, 5);
  CHECK(same.measure() == E.measure());
  const auto other = thin_profile_set(rho, 0.1, -31.0, 31.0, 6);
  CHECK(other.measure() != E.measure());
}

TEST_CASE("chain constant assembly") {
  CHECK(chain_constant(1.0, 1.0, 0.0, 0.0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(chain_constant(0.4, 0.4, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::isinf(chain_constant(1.0, 1.0, 0.2, 0.05)));
  CHECK(chain_constant(1.0, 1.0, 0.05, 0.01) == doctest::Approx(4.0 / 0.76).epsilon(1e-12));
}

TEST_CASE("compatibility experiment") {
  const auto good = run_verify_condition("powerlaw:a=2", 1e6, 2000);
  CHECK(good.ok);
  REQUIRE(good.table.rows.size() == 1);
  CHECK(cell(good.table, 0, "holds") == "true");
  CHECK(dcell(good.table, 0, "worst_margin") >= -1e-9);

  const auto bad = run_verify_condition("incompat", 1e6, 2000);
  CHECK(bad.ok);  // a failed condition is a result, not a broken run
  CHECK(cell(bad.table, 0, "holds") == "false");
  CHECK(dcell(bad.table, 0, "worst_margin") < 0.0);
}

TEST_CASE("thinness experiment") {
  const auto pass = run_thinness("periodic:n=8,h=0.1", "powerlaw:a=1", 0.8);
  CHECK(pass.ok);
  CHECK(cell(pass.table, 0, "pass") == "true");
  CHECK(dcell(pass.table, 0, "epsilon_measured") == doctest::Approx(0.7).epsilon(5e-3));

  const auto fail = run_thinness("periodic:n=8,h=0.1", "powerlaw:a=1", 0.5);
  CHECK(fail.ok);
  CHECK(cell(fail.table, 0, "pass") == "false");

  const auto none = run_thinness("empty", "powerlaw:a=1", 0.5);
  CHECK(none.ok);
  CHECK(cell(none.table, 0, "pass") == "true");
  CHECK(dcell(none.table, 0, "epsilon_measured") == 0.0);
}

TEST_CASE("cover experiment batches") {
  const auto line = run_cover(1, 10, 3);
  CHECK(line.ok);
  CHECK(line.message.empty());
  REQUIRE(line.table.rows.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(cell(line.table, i, "covered") == "true");
    CHECK(cell(line.table, i, "disjoint") == "true");
    CHECK(dcell(line.table, i, "constant") <= 6.0);
  }

  const auto plane = run_cover(2, 10, 3);
  CHECK(plane.ok);
  REQUIRE(plane.table.rows.size() == 10);
  for (std::size_t i = 0; i < 10; ++i)
    CHECK(dcell(plane.table, i, "constant") <= 36.0);

  const auto again = run_cover(1, 10, 3);
  CHECK(again.table.to_string() == line.table.to_string());
}

TEST_CASE("counterexample experiment") {
  const auto res = run_counterexample("incompat", 0.1, {2.0, 4.0});
  CHECK(res.ok);
  REQUIRE(res.table.rows.size() == 2);
  CHECK(dcell(res.table, 1, "ratio") < dcell(res.table, 0, "ratio"));
  CHECK(dcell(res.table, 0, "thinness_E") <= 0.1 * (1.0 + 1e-9));
  CHECK(dcell(res.table, 0, "thinness_Sigma") <= 0.1 * (1.0 + 1e-9));

  const auto again = run_counterexample("incompat", 0.1, {2.0, 4.0});
  CHECK(again.table.to_string() == res.table.to_string());
}

TEST_CASE("schur experiment on a small grid") {
  const GridSpec grid{1, 64.0, 1 << 11};
  const auto res = run_schur("wolff", grid, {0.1}, 3, 6, 32);
  CHECK(res.ok);
  CHECK(res.message.empty());
  REQUIRE(res.table.rows.size() == 1);
  CHECK(dcell(res.table, 0, "sup_row") > 0.0);
  CHECK(dcell(res.table, 0, "sup_col") > 0.0);
  CHECK(dcell(res.table, 0, "thin_row_sup") > 0.0);
  CHECK(dcell(res.table, 0, "alpha") >= 0.0);
  CHECK(dcell(res.table, 0, "beta") >= 0.0);
  CHECK(dcell(res.table, 0, "C_emp") > 0.0);
}

TEST_CASE("inequality experiment on a small grid") {
  const GridSpec grid{1, 64.0, 1 << 11};
  const auto res = run_up("wolff", grid, 0.05, 3, 6, 32);
  CHECK(res.ok);
  REQUIRE(res.table.rows.size() == 1);
  CHECK(dcell(res.table, 0, "c_emp") > 0.0);
  CHECK(dcell(res.table, 0, "alpha") >= 0.0);
  const std::string& holds = cell(res.table, 0, "holds");
  CHECK((holds == "true" || holds == "false"));
}

TEST_CASE("contraction experiment") {
  const GridSpec grid{1, 64.0, 1 << 11};
  const auto res = run_contraction("bernoulli", "bernoulli", 2.0, 0.05, grid, 7);
  CHECK(res.ok);
  REQUIRE(res.table.rows.size() == 1);
  CHECK(dcell(res.table, 0, "beta") == doctest::Approx(0.916943).epsilon(2e-3));
  CHECK(dcell(res.table, 0, "beta") <= 1.0 + 1e-9);
  CHECK(dcell(res.table, 0, "eps_E") > 0.0);
  CHECK(dcell(res.table, 0, "bound_chain_value") <= 1.0);
}
