#include "gvm/json_io.hpp"

#include <cstdio>
#include <string>

#include "doctest.h"

using namespace gvm;
using nlohmann::json;

TEST_CASE("kernel specs round-trip through json") {
  auto specs = {
      KernelSpec::constant(2.5),
      KernelSpec::rl(HurstExponent(0.75)),
      KernelSpec::fbm(HurstExponent(0.3)),
      KernelSpec::std_ou(-0.8),
      KernelSpec::volterra_ou(0.5, KernelSpec::rl(HurstExponent(0.6))),
      KernelSpec::volterra_ou(1.0, KernelSpec::volterra_ou(-1.0, KernelSpec::constant(1.0))),
  };
  for (const auto& k : specs) CHECK(kernel_from_json(to_json(k)) == k);

  CHECK(to_json(KernelSpec::rl(HurstExponent(0.75))) ==
        json({{"type", "rl"}, {"hurst", 0.75}}));
  CHECK(to_json(KernelSpec::std_ou(0.5)) == json({{"type", "std_ou"}, {"alpha", 0.5}}));

  CHECK_THROWS_AS(kernel_from_json(json::array()), std::invalid_argument);
  CHECK_THROWS_AS(kernel_from_json(json{{"type", "brownian"}}), std::invalid_argument);
  CHECK_THROWS_AS(kernel_from_json(json{{"type", "rl"}}), std::invalid_argument);
  CHECK_THROWS_AS(kernel_from_json(json{{"type", "rl"}, {"hurst", "x"}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(kernel_from_json(json{{"type", "rl"}, {"hurst", 1.5}}),
                  std::invalid_argument);
}

TEST_CASE("seasonality round-trips through json") {
  auto fns = {
      SeasonalityFn::constant(12.0),
      SeasonalityFn::sinusoidal(10.0, 2.0, 1.0, 0.25),
      SeasonalityFn::piecewise_linear({{0.0, 1.0}, {0.5, 2.0}, {2.0, 1.5}}),
  };
  for (const auto& s : fns) CHECK(seasonality_from_json(to_json(s)) == s);

  CHECK(to_json(SeasonalityFn::piecewise_linear({{0.0, 1.0}, {1.0, 3.0}}))["knots"] ==
        json::array({{0.0, 1.0}, {1.0, 3.0}}));

  CHECK_THROWS_AS(seasonality_from_json(json{{"type", "quadratic"}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(seasonality_from_json(json{{"type", "piecewise_linear"},
                                             {"knots", json::array({{0.0, 1.0, 2.0}})}}),
                  std::invalid_argument);
}

TEST_CASE("market specs round-trip through json") {
  MarketSpec market({KernelSpec::rl(HurstExponent(0.75)), KernelSpec::std_ou(0.5)},
                    {1.0, 2.0}, SeasonalityFn::sinusoidal(10.0, 2.0, 1.0, 0.0),
                    ThetaFn({0.0, 0.6}, {{0.2, -0.1}, {0.1, 0.3}}), 2.0);
  MarketSpec back = market_from_json(to_json(market));
  CHECK(back.factors() == market.factors());
  CHECK(back.maturities() == market.maturities());
  CHECK(back.seasonality() == market.seasonality());
  CHECK(back.theta() == market.theta());
  CHECK(back.horizon() == market.horizon());

  json j = to_json(market);
  j.erase("horizon");
  CHECK_THROWS_AS(market_from_json(j), std::invalid_argument);
  json bad = to_json(market);
  bad["factors"] = json::array();
  CHECK_THROWS_AS(market_from_json(bad), std::invalid_argument);
  CHECK_THROWS_AS(market_from_json(json::array()), std::invalid_argument);

  // the validating constructor still runs on decoded input
  json wrong = to_json(market);
  wrong["theta"]["values"] = json::array({{0.2}, {0.1}});
  CHECK_THROWS_AS(market_from_json(wrong), std::invalid_argument);
}

TEST_CASE("reports and estimators serialize with stable shapes") {
  CompletenessReport report;
  report.grid = {0.1, 0.2};
  report.min_singular_value = {0.5, 0.4};
  report.determinant = {1.0, -1.0};
  report.zero_crossings = 1;
  report.degenerate_times = {};
  report.verdict = CompletenessReport::Verdict::complete_except_null_set;
  json j = to_json(report);
  CHECK(j["grid"] == json::array({0.1, 0.2}));
  CHECK(j["zero_crossings"] == 1);
  CHECK(j["degenerate_times"] == json::array());
  CHECK(j["verdict"] == "complete_except_null_set");
  CHECK(to_string(CompletenessReport::Verdict::complete) == "complete");
  CHECK(to_string(CompletenessReport::Verdict::incomplete) == "incomplete");

  Estimator e{1.5, 0.01, 4000};
  json je = to_json(e, 42);
  CHECK(je["mean"] == 1.5);
  CHECK(je["std_err"] == 0.01);
  CHECK(je["n"] == 4000);
  CHECK(je["seed"] == 42);
}

TEST_CASE("json files round-trip through disk") {
  std::string path = std::string(GVM_REPO_DIR) + "/build/json_io_roundtrip.json";
  json j = {{"alpha", 0.5}, {"name", "case"}, {"grid", {1.0, 2.0}}};
  write_json_file(path, j);
  CHECK(load_json_file(path) == j);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_json_file(path), std::invalid_argument);
}
