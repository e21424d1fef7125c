#include "gvm/json_io.hpp"

#include <fstream>
#include <utility>
#include <vector>

#include "gvm/errors.hpp"

namespace gvm {

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* key,
                            const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end())
    throw std::invalid_argument("config." + ctx + ": missing key \"" + key + "\"");
  return *it;
}

double number(const nlohmann::json& j, const char* key, const std::string& ctx) {
  const nlohmann::json& v = field(j, key, ctx);
  if (!v.is_number())
    throw std::invalid_argument("config." + ctx + ": key \"" + key +
                                "\" must be a number");
  return v.get<double>();
}

std::vector<double> number_list(const nlohmann::json& v, const std::string& ctx) {
  if (!v.is_array())
    throw std::invalid_argument("config." + ctx + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number())
      throw std::invalid_argument("config." + ctx + ": expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const KernelSpec& kernel) {
  nlohmann::json j;
  switch (kernel.type()) {
    case KernelSpec::Type::constant:
      j["type"] = "constant";
      j["c"] = kernel.constant_value();
      break;
    case KernelSpec::Type::rl:
      j["type"] = "rl";
      j["hurst"] = kernel.hurst();
      break;
    case KernelSpec::Type::fbm:
      j["type"] = "fbm";
      j["hurst"] = kernel.hurst();
      break;
    case KernelSpec::Type::std_ou:
      j["type"] = "std_ou";
      j["alpha"] = kernel.alpha();
      break;
    case KernelSpec::Type::volterra_ou:
      j["type"] = "volterra_ou";
      j["alpha"] = kernel.alpha();
      j["base"] = to_json(kernel.base());
      break;
  }
  return j;
}

KernelSpec kernel_from_json(const nlohmann::json& j) {
  if (!j.is_object())
    throw std::invalid_argument("config.kernel: expected an object");
  const nlohmann::json& t = field(j, "type", "kernel");
  if (!t.is_string())
    throw std::invalid_argument("config.kernel: \"type\" must be a string");
  const std::string type = t.get<std::string>();
  if (type == "constant") return KernelSpec::constant(number(j, "c", "kernel"));
  if (type == "rl") return KernelSpec::rl(HurstExponent(number(j, "hurst", "kernel")));
  if (type == "fbm") return KernelSpec::fbm(HurstExponent(number(j, "hurst", "kernel")));
  if (type == "std_ou") return KernelSpec::std_ou(number(j, "alpha", "kernel"));
  if (type == "volterra_ou")
    return KernelSpec::volterra_ou(number(j, "alpha", "kernel"),
                                   kernel_from_json(field(j, "base", "kernel")));
  throw std::invalid_argument("config.kernel: unknown type \"" + type + "\"");
}

nlohmann::json to_json(const SeasonalityFn& seasonality) {
  nlohmann::json j;
  switch (seasonality.type()) {
    case SeasonalityFn::Type::constant:
      j["type"] = "constant";
      j["level"] = seasonality.level();
      break;
    case SeasonalityFn::Type::sinusoidal:
      j["type"] = "sinusoidal";
      j["mean"] = seasonality.mean();
      j["amplitude"] = seasonality.amplitude();
      j["period"] = seasonality.period();
      j["phase"] = seasonality.phase();
      break;
    case SeasonalityFn::Type::piecewise_linear: {
      j["type"] = "piecewise_linear";
      auto knots = nlohmann::json::array();
      for (const auto& [t, v] : seasonality.knots()) knots.push_back({t, v});
      j["knots"] = std::move(knots);
      break;
    }
  }
  return j;
}

SeasonalityFn seasonality_from_json(const nlohmann::json& j) {
  if (!j.is_object())
    throw std::invalid_argument("config.seasonality: expected an object");
  const nlohmann::json& t = field(j, "type", "seasonality");
  if (!t.is_string())
    throw std::invalid_argument("config.seasonality: \"type\" must be a string");
  const std::string type = t.get<std::string>();
  if (type == "constant")
    return SeasonalityFn::constant(number(j, "level", "seasonality"));
  if (type == "sinusoidal")
    return SeasonalityFn::sinusoidal(
        number(j, "mean", "seasonality"), number(j, "amplitude", "seasonality"),
        number(j, "period", "seasonality"), number(j, "phase", "seasonality"));
  if (type == "piecewise_linear") {
    const nlohmann::json& knots = field(j, "knots", "seasonality");
    if (!knots.is_array() || knots.empty())
      throw std::invalid_argument(
          "config.seasonality: \"knots\" must be a non-empty array");
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(knots.size());
    for (const auto& k : knots) {
      std::vector<double> tv = number_list(k, "seasonality");
      if (tv.size() != 2)
        throw std::invalid_argument("config.seasonality: each knot must be [t, value]");
      pairs.emplace_back(tv[0], tv[1]);
    }
    return SeasonalityFn::piecewise_linear(std::move(pairs));
  }
  throw std::invalid_argument("config.seasonality: unknown type \"" + type + "\"");
}

nlohmann::json to_json(const ThetaFn& theta) {
  nlohmann::json values = nlohmann::json::array();
  for (const auto& v : theta.values()) values.push_back(v);
  return {{"times", theta.times()}, {"values", values}};
}

ThetaFn theta_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config.theta: expected an object");
  std::vector<double> times = number_list(field(j, "times", "theta"), "theta");
  const nlohmann::json& values = field(j, "values", "theta");
  if (!values.is_array())
    throw std::invalid_argument("config.theta: \"values\" must be an array");
  std::vector<std::vector<double>> rows;
  rows.reserve(values.size());
  for (const auto& row : values) rows.push_back(number_list(row, "theta"));
  return ThetaFn(std::move(times), std::move(rows));
}

nlohmann::json to_json(const MarketSpec& market) {
  nlohmann::json factors = nlohmann::json::array();
  for (const auto& k : market.factors()) factors.push_back(to_json(k));
  return {{"factors", std::move(factors)},
          {"maturities", market.maturities()},
          {"seasonality", to_json(market.seasonality())},
          {"theta", to_json(market.theta())},
          {"horizon", market.horizon()}};
}

MarketSpec market_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config.market: expected an object");
  const nlohmann::json& factors = field(j, "factors", "market");
  if (!factors.is_array() || factors.empty())
    throw std::invalid_argument("config.market: \"factors\" must be a non-empty array");
  std::vector<KernelSpec> kernels;
  kernels.reserve(factors.size());
  for (const auto& f : factors) kernels.push_back(kernel_from_json(f));
  std::vector<double> maturities =
      number_list(field(j, "maturities", "market"), "market");
  SeasonalityFn seasonality = seasonality_from_json(field(j, "seasonality", "market"));
  ThetaFn theta = theta_from_json(field(j, "theta", "market"));
  double horizon = number(j, "horizon", "market");
  return MarketSpec(std::move(kernels), std::move(maturities), std::move(seasonality),
                    std::move(theta), horizon);
}

std::string to_string(CompletenessReport::Verdict verdict) {
  switch (verdict) {
    case CompletenessReport::Verdict::complete:
      return "complete";
    case CompletenessReport::Verdict::complete_except_null_set:
      return "complete_except_null_set";
    case CompletenessReport::Verdict::incomplete:
      return "incomplete";
  }
  throw std::logic_error("config.verdict: unreachable");
}

nlohmann::json to_json(const CompletenessReport& report) {
  return {{"grid", report.grid},
          {"min_singular_value", report.min_singular_value},
          {"determinant", report.determinant},
          {"zero_crossings", report.zero_crossings},
          {"degenerate_times", report.degenerate_times},
          {"verdict", to_string(report.verdict)}};
}

nlohmann::json to_json(const Estimator& estimator, std::uint64_t seed) {
  return {{"mean", estimator.mean},
          {"std_err", estimator.std_err},
          {"n", estimator.n},
          {"seed", seed}};
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config.load: cannot open \"" + path + "\"");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config.load: " + path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("config.write: cannot open \"" + path + "\"");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("config.write: failed writing \"" + path + "\"");
}

}  // namespace gvm
