#include "gvm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "gvm/completeness.hpp"
#include "gvm/errors.hpp"
#include "gvm/json_io.hpp"
#include "gvm/kernels.hpp"
#include "gvm/market.hpp"
#include "gvm/portfolio.hpp"
#include "gvm/pricing.hpp"
#include "gvm/simulation.hpp"
#include "gvm/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gvm::cli {

namespace {

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 20260817;
  int threads = 1;
  bool plots = false;
  bool seed_from_flag = false;
  bool threads_from_flag = false;
  bool plots_from_flag = false;

  json config;
  fs::path config_dir;
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string summary_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cli.csv: cannot open \"" + path.string() + "\"");
    out_ << header << '\n';
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << format_double(values[i]);
    }
    out_ << '\n';
  }
  void row(std::size_t id, const std::vector<double>& values) {
    out_ << id;
    for (double v : values) out_ << ',' << format_double(v);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

const json& block(const json& cfg, const char* key) {
  static const json empty = json::object();
  auto it = cfg.find(key);
  if (it == cfg.end()) return empty;
  if (!it->is_object())
    throw std::invalid_argument(std::string("cli.config: \"") + key +
                                "\" must be an object");
  return *it;
}

double get_number(const json& b, const char* key, std::optional<double> fallback = {}) {
  auto it = b.find(key);
  if (it == b.end()) {
    if (fallback) return *fallback;
    throw std::invalid_argument(std::string("cli.config: missing \"") + key + "\"");
  }
  if (!it->is_number())
    throw std::invalid_argument(std::string("cli.config: \"") + key +
                                "\" must be a number");
  return it->get<double>();
}

std::size_t get_count(const json& b, const char* key,
                      std::optional<std::size_t> fallback = {}) {
  auto it = b.find(key);
  if (it == b.end()) {
    if (fallback) return *fallback;
    throw std::invalid_argument(std::string("cli.config: missing \"") + key + "\"");
  }
  if (!it->is_number_integer() || it->get<long long>() < 0)
    throw std::invalid_argument(std::string("cli.config: \"") + key +
                                "\" must be a non-negative integer");
  return it->get<std::size_t>();
}

std::string get_string(const json& b, const char* key, const std::string& fallback) {
  auto it = b.find(key);
  if (it == b.end()) return fallback;
  if (!it->is_string())
    throw std::invalid_argument(std::string("cli.config: \"") + key +
                                "\" must be a string");
  return it->get<std::string>();
}

std::vector<double> get_numbers(const json& b, const char* key) {
  auto it = b.find(key);
  if (it == b.end()) return {};
  if (!it->is_array())
    throw std::invalid_argument(std::string("cli.config: \"") + key +
                                "\" must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : *it) {
    if (!v.is_number())
      throw std::invalid_argument(std::string("cli.config: \"") + key +
                                  "\" must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

MarketSpec load_market(const Options& opt) {
  auto it = opt.config.find("market");
  if (it == opt.config.end())
    throw std::invalid_argument("cli.config: missing \"market\"");
  if (it->is_string()) {
    fs::path p = it->get<std::string>();
    if (p.is_relative()) p = opt.config_dir / p;
    return market_from_json(load_json_file(p.string()));
  }
  return market_from_json(*it);
}

DiscountCurve load_discount(const json& b) {
  auto it = b.find("discount");
  if (it == b.end()) return DiscountCurve::flat(0.0);
  if (it->is_number()) return DiscountCurve::flat(it->get<double>());
  if (!it->is_object())
    throw std::invalid_argument("cli.config: \"discount\" must be a rate or an object");
  return DiscountCurve(get_numbers(*it, "times"), get_numbers(*it, "rates"));
}

fs::path prepare_out_dir(const Options& opt) {
  fs::path dir = opt.out_dir;
  fs::create_directories(dir);
  return dir;
}

std::size_t resolve_maturity_index(const MarketSpec& market, double maturity) {
  const auto& ts = market.maturities();
  for (std::size_t j = 0; j < ts.size(); ++j)
    if (std::abs(ts[j] - maturity) <= 1e-9 * std::max(1.0, std::abs(maturity)))
      return j;
  throw std::invalid_argument("cli.price: " + std::to_string(maturity) +
                              " is not a traded maturity");
}

// Evenly spread interior step indices, used when the config does not pin the
// reporting times itself.
std::vector<std::size_t> spread_indices(std::size_t n_steps, std::size_t slots) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 1; k <= slots; ++k) {
    std::size_t i = (k * n_steps + slots / 2) / slots;
    i = std::clamp<std::size_t>(i, 1, n_steps);
    if (idx.empty() || idx.back() != i) idx.push_back(i);
  }
  return idx;
}

void plot_paths(const fs::path& file, const std::string& title,
                const std::vector<double>& times, const Eigen::MatrixXd& values,
                std::size_t max_series) {
  SvgPlot plot(title, "t", "value");
  std::size_t shown = std::min<std::size_t>(values.rows(), max_series);
  for (std::size_t p = 0; p < shown; ++p) {
    std::vector<double> y(times.size());
    for (std::size_t k = 0; k < times.size(); ++k)
      y[k] = values(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k));
    plot.add_series("path " + std::to_string(p), times, y);
  }
  plot.save(file.string());
}

int cmd_simulate(const Options& opt) {
  MarketSpec market = load_market(opt);
  const json& b = block(opt.config, "simulate");

  std::size_t paths = get_count(b, "paths");
  std::size_t n_steps = get_count(b, "n_steps");
  if (paths == 0) throw std::invalid_argument("cli.simulate: paths must be positive");
  if (n_steps == 0) throw std::invalid_argument("cli.simulate: n_steps must be positive");
  double t_end = get_number(b, "t_end", market.horizon());
  std::string measure_name = get_string(b, "measure", "risk_neutral");
  Measure measure;
  if (measure_name == "risk_neutral") measure = Measure::risk_neutral;
  else if (measure_name == "physical") measure = Measure::physical;
  else throw std::invalid_argument("cli.simulate: unknown measure \"" + measure_name + "\"");
  std::string output = get_string(b, "output", "spot");
  std::size_t csv_paths = std::min(paths, get_count(b, "csv_paths", std::size_t{16}));

  TimeGrid grid = TimeGrid::uniform(t_end, n_steps);
  PathEnsemble ensemble{grid, paths, market.n_factors(), opt.seed};
  fs::path dir = prepare_out_dir(opt);

  json out = {{"command", "simulate"}, {"measure", measure_name},
              {"output", output},      {"paths", paths},
              {"n_steps", n_steps},    {"t_end", t_end},
              {"seed", opt.seed}};

  std::vector<double> times;
  Eigen::MatrixXd values;
  if (output == "spot") {
    times = get_numbers(b, "output_times");
    if (times.empty())
      for (std::size_t i : spread_indices(n_steps, 8)) times.push_back(grid.point(i));
    values = spot_paths(market, ensemble, measure, times, opt.threads);
    std::vector<double> mean, se;
    for (std::size_t k = 0; k < times.size(); ++k) {
      Eigen::VectorXd col = values.col(static_cast<Eigen::Index>(k));
      Estimator est = mc_estimate(std::span<const double>(col.data(),
                                                          static_cast<std::size_t>(col.size())));
      mean.push_back(est.mean);
      se.push_back(est.std_err);
    }
    out["times"] = times;
    out["mean"] = mean;
    out["std_err"] = se;
    Eigen::VectorXd last = values.col(values.cols() - 1);
    out["terminal"] = to_json(
        mc_estimate(std::span<const double>(last.data(), static_cast<std::size_t>(last.size()))),
        opt.seed);
  } else if (output == "forward") {
    std::size_t idx = get_count(b, "maturity_index", std::size_t{0});
    if (idx >= market.n_maturities())
      throw std::invalid_argument("cli.simulate: maturity_index out of range");
    values = forward_paths(market, ensemble, measure, idx, opt.threads);
    times = grid.points();
    Eigen::VectorXd last = values.col(values.cols() - 1);
    out["maturity_index"] = idx;
    out["maturity"] = market.maturities()[idx];
    out["initial_forward"] = values(0, 0);
    out["terminal"] = to_json(
        mc_estimate(std::span<const double>(last.data(), static_cast<std::size_t>(last.size()))),
        opt.seed);
  } else {
    throw std::invalid_argument("cli.simulate: unknown output \"" + output + "\"");
  }

  write_json_file((dir / "simulate.json").string(), out);
  CsvWriter csv(dir / "simulate.csv", "path_id,t,value");
  for (std::size_t p = 0; p < csv_paths; ++p)
    for (std::size_t k = 0; k < times.size(); ++k)
      csv.row(p, {times[k], values(static_cast<Eigen::Index>(p),
                                   static_cast<Eigen::Index>(k))});
  if (opt.plots)
    plot_paths(dir / "simulate.svg",
               output == "spot" ? "simulated spot paths" : "simulated forward paths",
               times, values, 8);

  const json& term = out["terminal"];
  std::cout << "simulate: output=" << output << " measure=" << measure_name
            << " paths=" << paths << " terminal mean="
            << summary_double(term["mean"].get<double>()) << " se="
            << summary_double(term["std_err"].get<double>()) << " -> "
            << (dir / "simulate.json").string() << '\n';
  return 0;
}

int cmd_completeness(const Options& opt) {
  MarketSpec market = load_market(opt);
  const json& b = block(opt.config, "completeness");
  std::vector<double> grid = get_numbers(b, "grid");
  if (grid.empty())
    grid = default_scan_grid(market, get_count(b, "points", std::size_t{1024}));
  CompletenessReport report = scan(market, grid, opt.threads);

  fs::path dir = prepare_out_dir(opt);
  json out = to_json(report);
  out["command"] = "completeness";
  out["points"] = grid.size();
  write_json_file((dir / "completeness.json").string(), out);

  const bool square = !report.determinant.empty();
  CsvWriter csv(dir / "completeness.csv",
                square ? "t,determinant" : "t,min_singular_value");
  const std::vector<double>& curve = square ? report.determinant : report.min_singular_value;
  for (std::size_t i = 0; i < report.grid.size(); ++i)
    csv.row({report.grid[i], curve[i]});

  if (opt.plots) {
    SvgPlot plot("loading matrix scan", "t",
                 square ? "determinant" : "min singular value");
    plot.add_series(square ? "det" : "min sv", report.grid, curve);
    plot.save((dir / "completeness.svg").string());
  }

  double worst = *std::min_element(report.min_singular_value.begin(),
                                   report.min_singular_value.end());
  std::cout << "completeness: verdict=" << to_string(report.verdict)
            << " zero_crossings=" << report.zero_crossings
            << " min_sv=" << summary_double(worst) << " points=" << grid.size()
            << " -> " << (dir / "completeness.json").string() << '\n';
  return report.verdict == CompletenessReport::Verdict::incomplete ? 3 : 0;
}

struct PriceOverrides {
  std::optional<double> strike, expiry, maturity;
  bool call = false, put = false;
};

int cmd_price(const Options& opt, const PriceOverrides& ov) {
  MarketSpec market = load_market(opt);
  const json& b = block(opt.config, "option");

  std::string type = get_string(b, "type", "call");
  if (ov.call) type = "call";
  if (ov.put) type = "put";
  if (type != "call" && type != "put")
    throw std::invalid_argument("cli.price: option type must be call or put");
  double strike = ov.strike ? *ov.strike : get_number(b, "strike");
  double expiry = ov.expiry ? *ov.expiry : get_number(b, "expiry");
  std::size_t idx = 0;
  if (ov.maturity) {
    idx = resolve_maturity_index(market, *ov.maturity);
  } else if (b.contains("maturity")) {
    idx = resolve_maturity_index(market, get_number(b, "maturity"));
  } else {
    idx = get_count(b, "maturity_index", std::size_t{0});
  }

  OptionQuote q = quote_forward_option(market, expiry, idx, strike, type == "call",
                                       load_discount(b));
  fs::path dir = prepare_out_dir(opt);
  json out = {{"command", "price"},
              {"type", type},
              {"strike", strike},
              {"expiry", expiry},
              {"maturity_index", idx},
              {"maturity", market.maturities()[idx]},
              {"forward", forward_initial(market, market.maturities()[idx]).value},
              {"price", q.price},
              {"hedge_delta", q.hedge_delta},
              {"sigma", q.sigma},
              {"d", q.d},
              {"discount_factor", q.discount_factor}};
  write_json_file((dir / "price.json").string(), out);
  std::cout << "price: " << type << " K=" << summary_double(strike) << " T="
            << summary_double(expiry) << " Tj="
            << summary_double(market.maturities()[idx]) << " price="
            << summary_double(q.price) << " delta=" << summary_double(q.hedge_delta)
            << " -> " << (dir / "price.json").string() << '\n';
  return 0;
}

int cmd_price_ro(const Options& opt, std::optional<double> strike_flag,
                 std::optional<double> lo_flag, std::optional<double> hi_flag) {
  MarketSpec market = load_market(opt);
  const json& b = block(opt.config, "reliability_option");
  double strike = strike_flag ? *strike_flag : get_number(b, "strike");
  std::vector<double> window = get_numbers(b, "window");
  double lo = lo_flag ? *lo_flag : (window.size() == 2 ? window[0] : get_number(b, "lo"));
  double hi = hi_flag ? *hi_flag : (window.size() == 2 ? window[1] : get_number(b, "hi"));

  ReliabilityOptionPrice ro =
      reliability_option_price(market, strike, lo, hi, load_discount(b));
  fs::path dir = prepare_out_dir(opt);
  json out = {{"command", "price_ro"},
              {"strike", strike},
              {"window", {ro.window_lo, ro.window_hi}},
              {"price", ro.price},
              {"quadrature_panels", ro.quadrature_panels}};
  write_json_file((dir / "price_ro.json").string(), out);
  std::cout << "price-ro: K=" << summary_double(strike) << " window=["
            << summary_double(lo) << ", " << summary_double(hi) << "] price="
            << summary_double(ro.price) << " panels=" << ro.quadrature_panels
            << " -> " << (dir / "price_ro.json").string() << '\n';
  return 0;
}

struct PortfolioOverrides {
  std::optional<double> gamma, x0;
  std::optional<std::size_t> paths, n_steps;
};

int cmd_portfolio(const Options& opt, const PortfolioOverrides& ov) {
  MarketSpec market = load_market(opt);
  const json& b = block(opt.config, "portfolio");
  double gamma = ov.gamma ? *ov.gamma : get_number(b, "gamma");
  double x0 = ov.x0 ? *ov.x0 : get_number(b, "x0", 1.0);
  double default_horizon = std::min(market.maturities().front(), market.horizon());
  double horizon = get_number(b, "horizon", default_horizon);
  std::size_t paths = ov.paths ? *ov.paths : get_count(b, "paths", std::size_t{4096});
  std::size_t n_steps =
      ov.n_steps ? *ov.n_steps : get_count(b, "n_steps", std::size_t{256});
  if (paths == 0) throw std::invalid_argument("cli.portfolio: paths must be positive");
  if (n_steps == 0)
    throw std::invalid_argument("cli.portfolio: n_steps must be positive");

  CRRAPolicy policy(market, gamma, x0, horizon);
  TimeGrid grid = TimeGrid::uniform(horizon, n_steps);
  PathEnsemble ensemble{grid, paths, market.n_factors(), opt.seed};

  Eigen::VectorXd z = girsanov_density(market, ensemble, opt.threads);
  std::vector<double> util(paths), budget(paths);
  for (std::size_t p = 0; p < paths; ++p) {
    double zt = z[static_cast<Eigen::Index>(p)];
    double xt = policy.terminal_wealth(zt);
    util[p] = policy.utility(xt);
    budget[p] = zt * xt;
  }
  Estimator eu = mc_estimate(util);
  Estimator bu = mc_estimate(budget);
  ReplicationResult rep = replicate(policy, ensemble, opt.threads);

  fs::path dir = prepare_out_dir(opt);
  json out = {{"command", "portfolio"},
              {"gamma", gamma},
              {"x0", x0},
              {"horizon", horizon},
              {"paths", paths},
              {"n_steps", n_steps},
              {"seed", opt.seed},
              {"lambda_star", policy.lambda_star()},
              {"H0", policy.h0()},
              {"expected_utility_closed_form", policy.expected_utility_closed()},
              {"expected_utility_mc", eu.mean},
              {"expected_utility_mc_std_err", eu.std_err},
              {"budget_mc", bu.mean},
              {"budget_mc_std_err", bu.std_err},
              {"replication_error", rep.max_rel_mismatch},
              {"replication_error_mean", rep.mean_rel_mismatch}};
  write_json_file((dir / "portfolio.json").string(), out);

  // Per-time wealth and hedge report. The density is accumulated exactly as in
  // the measure change, and the hedge row uses the linearity of the optimal
  // position in current wealth.
  std::vector<std::size_t> report_idx;
  std::vector<double> csv_times = get_numbers(b, "csv_times");
  if (csv_times.empty()) {
    // the hedge needs a live first contract, so stop short of its maturity
    for (std::size_t i : spread_indices(n_steps, 10))
      if (grid.point(i) < market.maturities().front()) report_idx.push_back(i);
  } else {
    for (double t : csv_times) report_idx.push_back(grid.index_of(t));
  }
  const std::size_t nf = market.n_factors();
  Eigen::MatrixXd theta(n_steps, nf);
  for (std::size_t k = 0; k < n_steps; ++k)
    for (std::size_t i = 0; i < nf; ++i)
      theta(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
          market.theta().value_at(shock_node(market.factors()[i], grid, k))[i];
  std::vector<double> mean_wealth(report_idx.size(), 0.0);
  for (std::size_t p = 0; p < paths; ++p) {
    double log_z = 0.0;
    std::size_t next = 0;
    for (std::size_t k = 0; k < n_steps && next < report_idx.size(); ++k) {
      for (std::size_t i = 0; i < nf; ++i) {
        double th = theta(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
        log_z -= th * ensemble.increment(p, k, i) + 0.5 * th * th * grid.dt(k);
      }
      while (next < report_idx.size() && report_idx[next] == k + 1) {
        mean_wealth[next] +=
            policy.optimal_wealth(grid.point(k + 1), std::exp(log_z)) /
            static_cast<double>(paths);
        ++next;
      }
    }
  }
  std::string header = "t,wealth";
  for (std::size_t j = 0; j < market.n_maturities(); ++j)
    header += ",delta_" + std::to_string(j);
  CsvWriter csv(dir / "portfolio.csv", header);
  for (std::size_t r = 0; r < report_idx.size(); ++r) {
    double t = grid.point(report_idx[r]);
    Eigen::RowVectorXd delta = optimal_delta(policy, t, mean_wealth[r]);
    std::vector<double> row{t, mean_wealth[r]};
    for (Eigen::Index j = 0; j < delta.size(); ++j) row.push_back(delta[j]);
    csv.row(row);
  }
  if (opt.plots) {
    SvgPlot plot("mean optimal wealth", "t", "wealth");
    std::vector<double> ts;
    for (std::size_t i : report_idx) ts.push_back(grid.point(i));
    plot.add_series("E[X*]", ts, mean_wealth);
    plot.save((dir / "portfolio.svg").string());
  }

  std::cout << "portfolio: gamma=" << summary_double(gamma)
            << " lambda*=" << summary_double(policy.lambda_star())
            << " E[u] closed=" << summary_double(policy.expected_utility_closed())
            << " mc=" << summary_double(eu.mean) << " budget="
            << summary_double(bu.mean) << " repl_err="
            << summary_double(rep.max_rel_mismatch) << " -> "
            << (dir / "portfolio.json").string() << '\n';
  return 0;
}

struct TrackingOverrides {
  std::optional<double> t, t_tilde, lo, hi;
};

int cmd_tracking_error(const Options& opt, const TrackingOverrides& ov) {
  MarketSpec market = load_market(opt);
  const json& b = block(opt.config, "tracking_error");
  fs::path dir = prepare_out_dir(opt);

  auto windows_it = b.find("windows");
  if (windows_it != b.end() && !ov.lo && !ov.hi) {
    if (!windows_it->is_array() || windows_it->empty())
      throw std::invalid_argument("cli.tracking-error: \"windows\" must be non-empty");
    json rows = json::array();
    std::vector<double> widths, errors;
    for (const auto& w : *windows_it) {
      if (!w.is_array() || w.size() != 2)
        throw std::invalid_argument("cli.tracking-error: each window must be [lo, hi]");
      double lo = w[0].get<double>(), hi = w[1].get<double>();
      double t = ov.t ? *ov.t : get_number(b, "t", lo);
      double tt = ov.t_tilde ? *ov.t_tilde : get_number(b, "t_tilde", lo);
      double te = tracking_error(market, t, tt, lo, hi);
      rows.push_back({{"window", {lo, hi}}, {"width", hi - lo}, {"tracking_error", te}});
      widths.push_back(hi - lo);
      errors.push_back(te);
    }
    json out = {{"command", "tracking_error"}, {"windows", rows}};
    if (widths.size() >= 2) {
      // least-squares slope of log(error) against log(width)
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < widths.size(); ++i) {
        double lx = std::log(widths[i]), ly = std::log(errors[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
      }
      double n = static_cast<double>(widths.size());
      out["slope"] = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    write_json_file((dir / "tracking_error.json").string(), out);
    CsvWriter csv(dir / "tracking_error.csv", "width,tracking_error");
    for (std::size_t i = 0; i < widths.size(); ++i) csv.row({widths[i], errors[i]});
    if (opt.plots) {
      SvgPlot plot("flow hedge tracking error", "window width", "tracking error");
      plot.add_series("error", widths, errors);
      plot.save((dir / "tracking_error.svg").string());
    }
    std::cout << "tracking-error: windows=" << widths.size();
    if (out.contains("slope"))
      std::cout << " slope=" << summary_double(out["slope"].get<double>());
    std::cout << " -> " << (dir / "tracking_error.json").string() << '\n';
    return 0;
  }

  std::vector<double> window = get_numbers(b, "window");
  double lo = ov.lo ? *ov.lo : (window.size() == 2 ? window[0] : get_number(b, "lo"));
  double hi = ov.hi ? *ov.hi : (window.size() == 2 ? window[1] : get_number(b, "hi"));
  double t = ov.t ? *ov.t : get_number(b, "t", lo);
  double tt = ov.t_tilde ? *ov.t_tilde : get_number(b, "t_tilde", lo);
  double te = tracking_error(market, t, tt, lo, hi);
  json out = {{"command", "tracking_error"},
              {"t", t},
              {"t_tilde", tt},
              {"window", {lo, hi}},
              {"tracking_error", te}};
  write_json_file((dir / "tracking_error.json").string(), out);
  std::cout << "tracking-error: t=" << summary_double(t) << " window=["
            << summary_double(lo) << ", " << summary_double(hi)
            << "] error=" << summary_double(te) << " -> "
            << (dir / "tracking_error.json").string() << '\n';
  return 0;
}

int cmd_kernel_eval(const Options& opt, std::optional<double> t_flag,
                    std::optional<double> s_flag) {
  const json& b = block(opt.config, "kernel_eval");
  auto kit = b.find("kernel");
  if (kit == b.end())
    throw std::invalid_argument("cli.kernel-eval: missing \"kernel\" block");
  KernelSpec kernel = kernel_from_json(*kit);
  double t = t_flag ? *t_flag : get_number(b, "t");
  if (!(t > 0.0)) throw std::invalid_argument("cli.kernel-eval: t must be positive");

  fs::path dir = prepare_out_dir(opt);
  json out = {{"command", "kernel_eval"},
              {"kernel", to_json(kernel)},
              {"describe", kernel.describe()},
              {"t", t},
              {"exponent_at_zero", kernel.exponent_at_zero()},
              {"exponent_at_diagonal", kernel.exponent_at_diagonal()},
              {"l2_norm_sq", l2_segment(kernel, 0.0, t, t)}};
  std::optional<double> value;
  if (s_flag || b.contains("s")) {
    double s = s_flag ? *s_flag : get_number(b, "s");
    value = kernel.evaluate(t, s);
    out["s"] = s;
    out["value"] = *value;
  }
  write_json_file((dir / "kernel_eval.json").string(), out);

  std::size_t n = get_count(b, "grid_points", std::size_t{0});
  if (n > 0) {
    CsvWriter csv(dir / "kernel_eval.csv", "s,value");
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < n; ++k) {
      double s = t * (static_cast<double>(k) + 0.5) / static_cast<double>(n);
      double v = kernel.evaluate(t, s);
      csv.row({s, v});
      xs.push_back(s);
      ys.push_back(v);
    }
    if (opt.plots) {
      SvgPlot plot("kernel section " + kernel.describe(), "s", "K(t, s)");
      plot.add_series("K", xs, ys);
      plot.save((dir / "kernel_eval.svg").string());
    }
  }

  std::cout << "kernel-eval: " << kernel.describe() << " t=" << summary_double(t);
  if (value) std::cout << " value=" << summary_double(*value);
  std::cout << " l2^2=" << summary_double(out["l2_norm_sq"].get<double>()) << " -> "
            << (dir / "kernel_eval.json").string() << '\n';
  return 0;
}

void finalize_options(Options& opt) {
  if (!opt.config_path.empty()) {
    opt.config = load_json_file(opt.config_path);
    if (!opt.config.is_object())
      throw std::invalid_argument("cli.config: top level must be an object");
    opt.config_dir = fs::path(opt.config_path).parent_path();
  } else {
    opt.config = json::object();
  }
  if (!opt.seed_from_flag && opt.config.contains("seed"))
    opt.seed = get_count(opt.config, "seed");
  if (!opt.threads_from_flag && opt.config.contains("threads"))
    opt.threads = static_cast<int>(get_count(opt.config, "threads"));
  if (!opt.plots_from_flag && opt.config.contains("emit_plots")) {
    if (!opt.config["emit_plots"].is_boolean())
      throw std::invalid_argument("cli.config: \"emit_plots\" must be a boolean");
    opt.plots = opt.config["emit_plots"].get<bool>();
  }
  if (opt.out_dir == "." && opt.config.contains("output_dir"))
    opt.out_dir = get_string(opt.config, "output_dir", ".");
  if (opt.threads < 1)
    throw std::invalid_argument("cli: threads must be at least 1");
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Gaussian Volterra forward market toolkit"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON config file");
    sub->add_option("--out", opt.out_dir, "output directory (default .)");
    sub->add_option("--seed", opt.seed, "master RNG seed")
        ->each([&](const std::string&) { opt.seed_from_flag = true; });
    sub->add_option("--threads", opt.threads, "worker thread count")
        ->check(CLI::PositiveNumber)
        ->each([&](const std::string&) { opt.threads_from_flag = true; });
    sub->add_flag("--plots", opt.plots, "emit SVG plots")
        ->each([&](const std::string&) { opt.plots_from_flag = true; });
  };

  CLI::App* sim = app.add_subcommand("simulate", "sample spot or forward paths");
  add_common(sim);
  std::uint64_t sim_paths = 0, sim_steps = 0;
  auto* sim_paths_opt = sim->add_option("--paths", sim_paths, "number of paths")
                            ->check(CLI::PositiveNumber);
  auto* sim_steps_opt = sim->add_option("--steps", sim_steps, "number of time steps")
                            ->check(CLI::PositiveNumber);

  CLI::App* comp = app.add_subcommand("completeness", "scan the loading matrix rank");
  add_common(comp);

  CLI::App* price = app.add_subcommand("price", "quote a forward option");
  add_common(price);
  PriceOverrides pov;
  double price_strike = 0, price_expiry = 0, price_maturity = 0;
  auto* strike_opt = price->add_option("--strike", price_strike, "strike");
  auto* expiry_opt = price->add_option("--T", price_expiry, "option expiry");
  auto* maturity_opt = price->add_option("--Tj", price_maturity, "delivery maturity");
  price->add_flag("--call", pov.call, "price a call");
  price->add_flag("--put", pov.put, "price a put");

  CLI::App* ro = app.add_subcommand("price-ro", "price a reliability option strip");
  add_common(ro);
  double ro_strike = 0, ro_lo = 0, ro_hi = 0;
  auto* ro_strike_opt = ro->add_option("--strike", ro_strike, "strike");
  auto* ro_lo_opt = ro->add_option("--lo", ro_lo, "window start");
  auto* ro_hi_opt = ro->add_option("--hi", ro_hi, "window end");

  CLI::App* port = app.add_subcommand("portfolio", "CRRA optimal investment report");
  add_common(port);
  PortfolioOverrides pfov;
  double port_gamma = 0, port_x0 = 0;
  std::uint64_t port_paths = 0, port_steps = 0;
  auto* gamma_opt = port->add_option("--gamma", port_gamma, "risk aversion, < 1");
  auto* x0_opt = port->add_option("--x0", port_x0, "initial wealth");
  auto* port_paths_opt = port->add_option("--paths", port_paths, "number of paths")
                             ->check(CLI::PositiveNumber);
  auto* port_steps_opt = port->add_option("--steps", port_steps, "number of time steps")
                             ->check(CLI::PositiveNumber);

  CLI::App* track = app.add_subcommand("tracking-error",
                                       "flow forward hedge tracking error");
  add_common(track);
  TrackingOverrides tov;
  double tr_t = 0, tr_tt = 0, tr_lo = 0, tr_hi = 0;
  auto* tr_t_opt = track->add_option("--t", tr_t, "hedge horizon");
  auto* tr_tt_opt = track->add_option("--T-tilde", tr_tt, "proxy maturity");
  auto* tr_lo_opt = track->add_option("--Tj", tr_lo, "delivery start");
  auto* tr_hi_opt = track->add_option("--Tk", tr_hi, "delivery end");

  CLI::App* keval = app.add_subcommand("kernel-eval", "evaluate a kernel section");
  add_common(keval);
  double ke_t = 0, ke_s = 0;
  auto* ke_t_opt = keval->add_option("--t", ke_t, "evaluation time t");
  auto* ke_s_opt = keval->add_option("--s", ke_s, "evaluation time s");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    finalize_options(opt);
    if (sim->parsed()) {
      if (sim_paths_opt->count()) opt.config["simulate"]["paths"] = sim_paths;
      if (sim_steps_opt->count()) opt.config["simulate"]["n_steps"] = sim_steps;
      return cmd_simulate(opt);
    }
    if (comp->parsed()) return cmd_completeness(opt);
    if (price->parsed()) {
      if (strike_opt->count()) pov.strike = price_strike;
      if (expiry_opt->count()) pov.expiry = price_expiry;
      if (maturity_opt->count()) pov.maturity = price_maturity;
      return cmd_price(opt, pov);
    }
    if (ro->parsed())
      return cmd_price_ro(opt,
                          ro_strike_opt->count() ? std::optional<double>(ro_strike)
                                                 : std::nullopt,
                          ro_lo_opt->count() ? std::optional<double>(ro_lo)
                                             : std::nullopt,
                          ro_hi_opt->count() ? std::optional<double>(ro_hi)
                                             : std::nullopt);
    if (port->parsed()) {
      if (gamma_opt->count()) pfov.gamma = port_gamma;
      if (x0_opt->count()) pfov.x0 = port_x0;
      if (port_paths_opt->count()) pfov.paths = port_paths;
      if (port_steps_opt->count()) pfov.n_steps = port_steps;
      return cmd_portfolio(opt, pfov);
    }
    if (track->parsed()) {
      if (tr_t_opt->count()) tov.t = tr_t;
      if (tr_tt_opt->count()) tov.t_tilde = tr_tt;
      if (tr_lo_opt->count()) tov.lo = tr_lo;
      if (tr_hi_opt->count()) tov.hi = tr_hi;
      return cmd_tracking_error(opt, tov);
    }
    if (keval->parsed())
      return cmd_kernel_eval(opt,
                             ke_t_opt->count() ? std::optional<double>(ke_t)
                                               : std::nullopt,
                             ke_s_opt->count() ? std::optional<double>(ke_s)
                                               : std::nullopt);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const incompleteness_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const singular_point_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const unsupported_regime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}

}  // namespace gvm::cli
