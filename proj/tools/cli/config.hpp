#pragma once

#include "markup/distributions.hpp"
#include "markup/technology.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace markup::cli {

using Json = nlohmann::ordered_json;

/// Malformed or unsupported configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kConfigVersion = 1;

struct ThetaGrid {
    double min = 0.1;
    double max = 10.0;
    std::size_t n = 100;
};

struct BatterySpec {
    std::string kind = "standard";  // standard | random
    std::size_t count = 200;
    std::uint64_t seed = 20260101;
};

struct OracleSpec {
    std::vector<double> values;
    std::vector<double> masses;
    std::vector<double> quality_grid;
    std::optional<std::size_t> levels;
    std::optional<double> q_max;
    std::string mode = "both";
    double agreement_tol = 0.02;
};

struct SweepSpec {
    double min = 1.05;
    double max = 20.0;
    std::size_t n = 60;
};

struct ScenarioConfig {
    int version = kConfigVersion;
    std::optional<std::string> command;
    std::vector<double> eta;
    std::optional<double> eta_bar;
    std::optional<std::vector<ValueDistribution>> distributions;
    std::optional<BatterySpec> battery;
    std::optional<GeneralConvexCost> cost;
    std::optional<NonlinearDemandModel> demand;
    std::vector<std::string> checks;
    std::optional<std::size_t> grid;
    std::optional<std::size_t> points;
    std::optional<double> tolerance;
    std::optional<double> truncation_k;
    std::optional<std::string> side;
    std::optional<ThetaGrid> theta;
    std::optional<OracleSpec> oracle;
    std::optional<SweepSpec> sweep;
};

ValueDistribution distribution_from_json(const Json& j);
Json distribution_to_json(const ValueDistribution& d);
GeneralConvexCost cost_from_json(const Json& j);
NonlinearDemandModel demand_from_json(const Json& j);

ScenarioConfig parse_config(const Json& j);
ScenarioConfig load_config(const std::string& path);

/// Names accepted in "checks".
const std::vector<std::string>& known_checks();

}  // namespace markup::cli
