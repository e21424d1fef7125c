#include "gvm/cli.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "gvm/json_io.hpp"
#include "gvm/kernels.hpp"
#include "gvm/market.hpp"
#include "gvm/pricing.hpp"

using namespace gvm;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run_cli(std::initializer_list<std::string> args) {
  std::vector<std::string> owned{"gvm"};
  owned.insert(owned.end(), args);
  std::vector<const char*> argv;
  for (const auto& a : owned) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::path(GVM_REPO_DIR) / "build" / "cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json two_rl_config() {
  MarketSpec market({KernelSpec::rl(HurstExponent(0.25)), KernelSpec::rl(HurstExponent(0.75))},
                    {1.0, 2.0}, SeasonalityFn::constant(40.0),
                    ThetaFn({0.0}, {{0.2, -0.1}}), 2.0);
  return {{"market", to_json(market)}};
}

}  // namespace

TEST_CASE("cli rejects malformed invocations with exit code 2") {
  CHECK(run_cli({}) == 2);
  CHECK(run_cli({"orbit"}) == 2);
  CHECK(run_cli({"simulate", "--paths", "0"}) == 2);
  CHECK(run_cli({"simulate", "--config", "/nonexistent.json", "--paths", "4"}) == 2);
  CHECK(run_cli({"completeness"}) == 2);  // no market anywhere
  CHECK(run_cli({"--help"}) == 0);
}

TEST_CASE("cli completeness scan writes report, csv, and verdict exit code") {
  fs::path dir = fresh_dir("completeness");
  fs::path cfg_path = dir / "config.json";
  json cfg = two_rl_config();
  cfg["completeness"] = {{"points", 64}};
  write_json_file(cfg_path.string(), cfg);

  CHECK(run_cli({"completeness", "--config", cfg_path.string(), "--out",
                 (dir / "a").string()}) == 0);
  json report = load_json_file((dir / "a" / "completeness.json").string());
  CHECK(report["command"] == "completeness");
  CHECK(report["verdict"] == "complete");
  CHECK(report["grid"].size() == 64);
  std::string csv = slurp(dir / "a" / "completeness.csv");
  CHECK(csv.rfind("t,determinant\n", 0) == 0);

  // identical rerun into a second directory is byte-identical
  CHECK(run_cli({"completeness", "--config", cfg_path.string(), "--out",
                 (dir / "b").string(), "--threads", "2"}) == 0);
  CHECK(slurp(dir / "a" / "completeness.json") == slurp(dir / "b" / "completeness.json"));
  CHECK(slurp(dir / "a" / "completeness.csv") == slurp(dir / "b" / "completeness.csv"));

  // a rank-deficient factor pair earns exit code 3
  json degenerate = {{"market",
                      to_json(MarketSpec({KernelSpec::std_ou(0.5), KernelSpec::std_ou(0.5)},
                                         {1.0, 2.0}, SeasonalityFn::constant(40.0),
                                         ThetaFn({0.0}, {{0.1, 0.1}}), 2.0))},
                     {"completeness", {{"points", 32}}}};
  fs::path bad_path = dir / "degenerate.json";
  write_json_file(bad_path.string(), degenerate);
  CHECK(run_cli({"completeness", "--config", bad_path.string(), "--out",
                 (dir / "c").string()}) == 3);
  CHECK(load_json_file((dir / "c" / "completeness.json").string())["verdict"] ==
        "incomplete");
}

TEST_CASE("cli simulate emits summaries, paths csv, and is seed-deterministic") {
  fs::path dir = fresh_dir("simulate");
  fs::path cfg_path = dir / "config.json";
  json cfg = two_rl_config();
  cfg["simulate"] = {{"paths", 64}, {"n_steps", 32}, {"csv_paths", 4}};
  write_json_file(cfg_path.string(), cfg);

  CHECK(run_cli({"simulate", "--config", cfg_path.string(), "--out",
                 (dir / "a").string(), "--plots"}) == 0);
  json out = load_json_file((dir / "a" / "simulate.json").string());
  CHECK(out["output"] == "spot");
  CHECK(out["paths"] == 64);
  CHECK(out["seed"] == 20260817);
  CHECK(out["times"].size() == out["mean"].size());
  CHECK(out["terminal"]["n"] == 64);
  CHECK(fs::exists(dir / "a" / "simulate.svg"));
  std::string csv = slurp(dir / "a" / "simulate.csv");
  CHECK(csv.rfind("path_id,t,value\n", 0) == 0);

  CHECK(run_cli({"simulate", "--config", cfg_path.string(), "--out",
                 (dir / "b").string(), "--threads", "2"}) == 0);
  CHECK(slurp(dir / "a" / "simulate.json") == slurp(dir / "b" / "simulate.json"));

  // a different seed changes the estimates
  CHECK(run_cli({"simulate", "--config", cfg_path.string(), "--out",
                 (dir / "c").string(), "--seed", "7"}) == 0);
  json other = load_json_file((dir / "c" / "simulate.json").string());
  CHECK(other["seed"] == 7);
  CHECK(other["terminal"]["mean"] != out["terminal"]["mean"]);

  // forward-path mode follows one delivery and reports its initial quote
  cfg["simulate"] = {{"paths", 32}, {"n_steps", 16}, {"output", "forward"},
                     {"maturity_index", 1}, {"measure", "physical"}};
  write_json_file(cfg_path.string(), cfg);
  CHECK(run_cli({"simulate", "--config", cfg_path.string(), "--out",
                 (dir / "fwd").string()}) == 0);
  json fwd = load_json_file((dir / "fwd" / "simulate.json").string());
  CHECK(fwd["maturity"] == 2.0);
  double f0 = forward_initial(market_from_json(cfg["market"]), 2.0).value;
  CHECK(fwd["initial_forward"].get<double>() == doctest::Approx(f0).epsilon(1e-9));
}

TEST_CASE("cli price quotes match the library and honor flag overrides") {
  fs::path dir = fresh_dir("price");
  fs::path cfg_path = dir / "config.json";
  json cfg = two_rl_config();
  cfg["option"] = {{"type", "put"}, {"strike", 10.0}, {"expiry", 0.5},
                   {"maturity_index", 0}};
  write_json_file(cfg_path.string(), cfg);

  CHECK(run_cli({"price", "--config", cfg_path.string(), "--out", dir.string(),
                 "--call", "--strike", "38", "--T", "1", "--Tj", "2"}) == 0);
  json out = load_json_file((dir / "price.json").string());
  CHECK(out["type"] == "call");
  CHECK(out["maturity_index"] == 1);

  MarketSpec market = market_from_json(cfg["market"]);
  OptionQuote q = quote_forward_option(market, 1.0, 1, 38.0, true);
  CHECK(out["price"].get<double>() == doctest::Approx(q.price).epsilon(1e-12));
  CHECK(out["hedge_delta"].get<double>() == doctest::Approx(q.hedge_delta).epsilon(1e-12));
  CHECK(out["sigma"].get<double>() == doctest::Approx(q.sigma).epsilon(1e-12));

  // config-only invocation uses the stored put block
  CHECK(run_cli({"price", "--config", cfg_path.string(), "--out",
                 (dir / "put").string()}) == 0);
  json put_out = load_json_file((dir / "put" / "price.json").string());
  OptionQuote pq = quote_forward_option(market, 0.5, 0, 10.0, false);
  CHECK(put_out["price"].get<double>() == doctest::Approx(pq.price).epsilon(1e-12));

  // an unknown delivery maturity is a usage error
  CHECK(run_cli({"price", "--config", cfg_path.string(), "--out", dir.string(),
                 "--call", "--strike", "38", "--T", "1", "--Tj", "1.7"}) == 2);
}

TEST_CASE("cli reliability option pricing matches the library") {
  fs::path dir = fresh_dir("ro");
  fs::path cfg_path = dir / "config.json";
  json cfg = two_rl_config();
  cfg["reliability_option"] = {{"strike", 40.0}, {"window", {0.5, 1.0}}};
  write_json_file(cfg_path.string(), cfg);

  CHECK(run_cli({"price-ro", "--config", cfg_path.string(), "--out", dir.string()}) == 0);
  json out = load_json_file((dir / "price_ro.json").string());
  MarketSpec market = market_from_json(cfg["market"]);
  ReliabilityOptionPrice ro = reliability_option_price(market, 40.0, 0.5, 1.0);
  CHECK(out["price"].get<double>() == doctest::Approx(ro.price).epsilon(1e-12));
  CHECK(out["window"] == json::array({0.5, 1.0}));
  CHECK(out["quadrature_panels"].get<int>() == ro.quadrature_panels);

  CHECK(run_cli({"price-ro", "--config", cfg_path.string(), "--out", dir.string(),
                 "--lo", "1.0", "--hi", "0.5"}) == 2);
}

TEST_CASE("cli portfolio reports closed forms, sanity estimates, and hedge csv") {
  fs::path dir = fresh_dir("portfolio");
  fs::path cfg_path = dir / "config.json";
  json cfg = two_rl_config();
  cfg["portfolio"] = {{"gamma", 0.5}, {"x0", 1.0}, {"paths", 512}, {"n_steps", 64}};
  write_json_file(cfg_path.string(), cfg);

  CHECK(run_cli({"portfolio", "--config", cfg_path.string(), "--out", dir.string()}) == 0);
  json out = load_json_file((dir / "portfolio.json").string());
  CHECK(out["gamma"] == 0.5);
  CHECK(out["horizon"] == 1.0);
  double budget = out["budget_mc"].get<double>();
  double budget_se = out["budget_mc_std_err"].get<double>();
  CHECK(std::abs(budget - 1.0) < 4.0 * budget_se);
  double closed = out["expected_utility_closed_form"].get<double>();
  double mc = out["expected_utility_mc"].get<double>();
  CHECK(std::abs(mc - closed) < 4.0 * out["expected_utility_mc_std_err"].get<double>());
  CHECK(out["replication_error"].get<double>() < 0.5);

  // ten spread report times, minus the one at the first contract's maturity
  std::string csv = slurp(dir / "portfolio.csv");
  CHECK(csv.rfind("t,wealth,delta_0,delta_1\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);

  // byte-identical across thread counts
  CHECK(run_cli({"portfolio", "--config", cfg_path.string(), "--out",
                 (dir / "t8").string(), "--threads", "8"}) == 0);
  CHECK(slurp(dir / "portfolio.json") == slurp(dir / "t8" / "portfolio.json"));
  CHECK(slurp(dir / "portfolio.csv") == slurp(dir / "t8" / "portfolio.csv"));
}

TEST_CASE("cli tracking error covers single windows and width sweeps") {
  fs::path dir = fresh_dir("tracking");
  fs::path cfg_path = dir / "config.json";
  json cfg = two_rl_config();
  cfg["tracking_error"] = {{"t", 0.5}, {"t_tilde", 1.2}, {"window", {1.0, 1.5}}};
  write_json_file(cfg_path.string(), cfg);

  CHECK(run_cli({"tracking-error", "--config", cfg_path.string(), "--out",
                 dir.string()}) == 0);
  json out = load_json_file((dir / "tracking_error.json").string());
  MarketSpec market = market_from_json(cfg["market"]);
  CHECK(out["tracking_error"].get<double>() ==
        doctest::Approx(tracking_error(market, 0.5, 1.2, 1.0, 1.5)).epsilon(1e-12));

  cfg["tracking_error"] = {{"windows", {{1.0, 1.2}, {1.0, 1.1}, {1.0, 1.05}}}};
  write_json_file(cfg_path.string(), cfg);
  CHECK(run_cli({"tracking-error", "--config", cfg_path.string(), "--out",
                 (dir / "sweep").string()}) == 0);
  json sweep = load_json_file((dir / "sweep" / "tracking_error.json").string());
  CHECK(sweep["windows"].size() == 3);
  CHECK(sweep.contains("slope"));
  CHECK(sweep["slope"].get<double>() > 0.0);
  CHECK(slurp(dir / "sweep" / "tracking_error.csv").rfind("width,tracking_error\n", 0) == 0);
}

TEST_CASE("cli kernel-eval prints values and flags singular points as usage errors") {
  fs::path dir = fresh_dir("kernel_eval");
  fs::path cfg_path = dir / "config.json";
  json cfg = {{"kernel_eval",
               {{"kernel", {{"type", "rl"}, {"hurst", 0.75}}}, {"t", 2.0}, {"s", 1.0},
                {"grid_points", 16}}}};
  write_json_file(cfg_path.string(), cfg);

  CHECK(run_cli({"kernel-eval", "--config", cfg_path.string(), "--out",
                 dir.string()}) == 0);
  json out = load_json_file((dir / "kernel_eval.json").string());
  CHECK(out["value"].get<double>() == doctest::Approx(1.1032626513208373).epsilon(1e-12));
  CHECK(out["exponent_at_diagonal"] == 0.25);
  CHECK(slurp(dir / "kernel_eval.csv").rfind("s,value\n", 0) == 0);

  json singular = {{"kernel_eval",
                    {{"kernel", {{"type", "fbm"}, {"hurst", 0.3}}}, {"t", 1.0}}}};
  write_json_file(cfg_path.string(), singular);
  CHECK(run_cli({"kernel-eval", "--config", cfg_path.string(), "--out", dir.string(),
                 "--s", "1.0"}) == 2);
}

TEST_CASE("cli runs the shipped delivery calendar config end to end") {
  fs::path dir = fresh_dir("calendar");
  std::string cfg = (fs::path(GVM_REPO_DIR) / "configs" / "example12_calendar.json").string();

  CHECK(run_cli({"completeness", "--config", cfg, "--out", dir.string()}) == 0);
  json report = load_json_file((dir / "completeness.json").string());
  CHECK(report["verdict"] != "incomplete");
  CHECK(report["grid"].size() == 512);

  CHECK(run_cli({"tracking-error", "--config", cfg, "--out", dir.string()}) == 0);
  json sweep = load_json_file((dir / "tracking_error.json").string());
  CHECK(sweep["windows"].size() == 6);

  CHECK(run_cli({"price", "--config", cfg, "--out", dir.string()}) == 0);
  json quote = load_json_file((dir / "price.json").string());
  CHECK(quote["price"].get<double>() > 0.0);
  CHECK(quote["maturity"].get<double>() == doctest::Approx(61.0 / 365.0).epsilon(1e-12));
}
