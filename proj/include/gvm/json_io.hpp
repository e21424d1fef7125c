#pragma once

#include <cstdint>
#include <string>

#include "gvm/completeness.hpp"
#include "gvm/kernels.hpp"
#include "gvm/market.hpp"
#include "gvm/simulation.hpp"
#include "json.hpp"

namespace gvm {

// Serialization between the library types and their JSON wire format. All
// from_json readers validate shape and values and throw std::invalid_argument
// with a "config.*" prefix on malformed input, so CLI callers can map them to
// a usage error uniformly.

nlohmann::json to_json(const KernelSpec& kernel);
KernelSpec kernel_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SeasonalityFn& seasonality);
SeasonalityFn seasonality_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ThetaFn& theta);
ThetaFn theta_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MarketSpec& market);
MarketSpec market_from_json(const nlohmann::json& j);

std::string to_string(CompletenessReport::Verdict verdict);
nlohmann::json to_json(const CompletenessReport& report);

nlohmann::json to_json(const Estimator& estimator, std::uint64_t seed);

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace gvm
