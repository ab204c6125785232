#include "config.hpp"

#include "markup/errors.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <variant>

namespace markup::cli {
namespace {

void require_object(const Json& j, const std::string& where) {
    if (!j.is_object()) {
        throw ConfigError(where + ": expected a JSON object");
    }
}

void allow_only(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) {
            throw ConfigError(where + ": unknown field '" + key + "'");
        }
    }
}

double number(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) {
        throw ConfigError(where + ": missing field '" + key + "'");
    }
    const Json& v = j.at(key);
    if (!v.is_number()) {
        throw ConfigError(where + ": field '" + key + "' must be a number");
    }
    return v.get<double>();
}

std::optional<double> optional_number(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) {
        return std::nullopt;
    }
    return number(j, key, where);
}

std::size_t count(const Json& j, const char* key, const std::string& where) {
    const Json& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1) {
        throw ConfigError(where + ": field '" + key + "' must be a positive integer");
    }
    return v.get<std::size_t>();
}

std::vector<double> numbers(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) {
        throw ConfigError(where + ": missing field '" + key + "'");
    }
    const Json& v = j.at(key);
    if (!v.is_array()) {
        throw ConfigError(where + ": field '" + key + "' must be an array of numbers");
    }
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) {
            throw ConfigError(where + ": field '" + key + "' must be an array of numbers");
        }
        out.push_back(x.get<double>());
    }
    return out;
}

std::string string_field(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw ConfigError(where + ": field '" + key + "' must be a string");
    }
    return j.at(key).get<std::string>();
}

// Library constructors report bad parameters as DomainError; surface them
// as config errors with the location attached.
template <class Fn>
auto build(const std::string& where, Fn&& fn) {
    try {
        return fn();
    } catch (const DomainError& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

ThetaGrid theta_from_json(const Json& j) {
    const std::string where = "theta";
    require_object(j, where);
    allow_only(j, where, {"min", "max", "n"});
    ThetaGrid t;
    t.min = optional_number(j, "min", where).value_or(t.min);
    t.max = optional_number(j, "max", where).value_or(t.max);
    if (j.contains("n")) {
        t.n = count(j, "n", where);
    }
    if (!(t.min > 0.0) || !(t.max >= t.min)) {
        throw ConfigError("theta: need 0 < min <= max");
    }
    return t;
}

BatterySpec battery_from_json(const Json& j) {
    const std::string where = "battery";
    require_object(j, where);
    allow_only(j, where, {"kind", "count", "seed"});
    BatterySpec b;
    if (j.contains("kind")) {
        b.kind = string_field(j, "kind", where);
    }
    if (b.kind != "standard" && b.kind != "random") {
        throw ConfigError("battery: kind must be 'standard' or 'random'");
    }
    if (j.contains("count")) {
        b.count = count(j, "count", where);
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) {
            throw ConfigError("battery: seed must be a nonnegative integer");
        }
        b.seed = j.at("seed").get<std::uint64_t>();
    }
    return b;
}

OracleSpec oracle_from_json(const Json& j) {
    const std::string where = "oracle";
    require_object(j, where);
    allow_only(j, where, {"values", "masses", "quality_grid", "levels", "q_max", "mode", "agreement_tol"});
    OracleSpec o;
    o.values = numbers(j, "values", where);
    o.masses = numbers(j, "masses", where);
    if (j.contains("quality_grid")) {
        o.quality_grid = numbers(j, "quality_grid", where);
    }
    if (j.contains("levels")) {
        o.levels = count(j, "levels", where);
    }
    o.q_max = optional_number(j, "q_max", where);
    if (j.contains("mode")) {
        o.mode = string_field(j, "mode", where);
        if (o.mode != "both" && o.mode != "exhaustive" && o.mode != "reduced") {
            throw ConfigError("oracle: mode must be both, exhaustive or reduced");
        }
    }
    o.agreement_tol = optional_number(j, "agreement_tol", where).value_or(o.agreement_tol);
    return o;
}

SweepSpec sweep_from_json(const Json& j) {
    const std::string where = "sweep";
    require_object(j, where);
    allow_only(j, where, {"min", "max", "n"});
    SweepSpec s;
    s.min = optional_number(j, "min", where).value_or(s.min);
    s.max = optional_number(j, "max", where).value_or(s.max);
    if (j.contains("n")) {
        s.n = count(j, "n", where);
    }
    if (!(s.min > 1.0) || !(s.max >= s.min)) {
        throw ConfigError("sweep: need 1 < min <= max");
    }
    return s;
}

}  // namespace

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names{"guarantee",          "holder",
                                                "lower_bound",        "combination",
                                                "convex_cost",        "quantity_separable",
                                                "quantity_nonlinear", "procurement_quality",
                                                "procurement_quantity"};
    return names;
}

ValueDistribution distribution_from_json(const Json& j) {
    require_object(j, "distribution");
    const std::string kind = string_field(j, "kind", "distribution");
    const std::string where = "distribution '" + kind + "'";
    if (kind == "truncated_pareto") {
        allow_only(j, where, {"kind", "alpha", "k"});
        return build(where, [&] { return ValueDistribution::truncated_pareto(number(j, "alpha", where), number(j, "k", where)); });
    }
    if (kind == "pareto") {
        allow_only(j, where, {"kind", "alpha"});
        return build(where, [&] { return ValueDistribution::pareto(number(j, "alpha", where)); });
    }
    if (kind == "uniform") {
        allow_only(j, where, {"kind", "a", "b"});
        return build(where, [&] { return ValueDistribution::uniform(number(j, "a", where), number(j, "b", where)); });
    }
    if (kind == "binary") {
        allow_only(j, where, {"kind", "v_lo", "v_hi", "p_hi"});
        return build(where, [&] {
            return ValueDistribution::binary(number(j, "v_lo", where), number(j, "v_hi", where),
                                             number(j, "p_hi", where));
        });
    }
    if (kind == "power") {
        allow_only(j, where, {"kind", "alpha"});
        return build(where, [&] { return ValueDistribution::power(number(j, "alpha", where)); });
    }
    if (kind == "discrete") {
        allow_only(j, where, {"kind", "values", "masses"});
        return build(where, [&] {
            return ValueDistribution::discrete(numbers(j, "values", where), numbers(j, "masses", where));
        });
    }
    if (kind == "point_mass") {
        allow_only(j, where, {"kind", "v0"});
        return build(where, [&] { return ValueDistribution::point_mass(number(j, "v0", where)); });
    }
    if (kind == "mixture") {
        allow_only(j, where, {"kind", "components", "weights"});
        if (!j.contains("components") || !j.at("components").is_array()) {
            throw ConfigError(where + ": field 'components' must be an array");
        }
        std::vector<ValueDistribution> comps;
        for (const auto& c : j.at("components")) {
            comps.push_back(distribution_from_json(c));
        }
        return build(where, [&] { return ValueDistribution::mixture(std::move(comps), numbers(j, "weights", where)); });
    }
    throw ConfigError("distribution: unknown kind '" + kind + "'");
}

Json distribution_to_json(const ValueDistribution& d) {
    return std::visit(
        [](const auto& p) -> Json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, dist::TruncatedPareto>) {
                return {{"kind", "truncated_pareto"}, {"alpha", p.alpha}, {"k", p.k}};
            } else if constexpr (std::is_same_v<T, dist::Pareto>) {
                return {{"kind", "pareto"}, {"alpha", p.alpha}};
            } else if constexpr (std::is_same_v<T, dist::Uniform>) {
                return {{"kind", "uniform"}, {"a", p.a}, {"b", p.b}};
            } else if constexpr (std::is_same_v<T, dist::Binary>) {
                return {{"kind", "binary"}, {"v_lo", p.v_lo}, {"v_hi", p.v_hi}, {"p_hi", p.p_hi}};
            } else if constexpr (std::is_same_v<T, dist::Power>) {
                return {{"kind", "power"}, {"alpha", p.alpha}};
            } else if constexpr (std::is_same_v<T, dist::Discrete>) {
                return {{"kind", "discrete"}, {"values", p.values}, {"masses", p.masses}};
            } else if constexpr (std::is_same_v<T, dist::PointMass>) {
                return {{"kind", "point_mass"}, {"v0", p.v0}};
            } else {
                Json comps = Json::array();
                for (const auto& c : p.components) {
                    comps.push_back(distribution_to_json(c));
                }
                return {{"kind", "mixture"}, {"components", comps}, {"weights", p.weights}};
            }
        },
        d.params());
}

GeneralConvexCost cost_from_json(const Json& j) {
    require_object(j, "cost");
    const std::string kind = string_field(j, "kind", "cost");
    const std::string where = "cost '" + kind + "'";
    if (kind == "iso_elastic") {
        allow_only(j, where, {"kind", "eta"});
        return build(where, [&] { return GeneralConvexCost::iso_elastic(number(j, "eta", where)); });
    }
    if (kind == "poly_cost") {
        allow_only(j, where, {"kind", "coeffs", "eta_bar"});
        return build(where, [&] { return GeneralConvexCost::polynomial(numbers(j, "coeffs", where), number(j, "eta_bar", where)); });
    }
    throw ConfigError("cost: unknown kind '" + kind + "'");
}

NonlinearDemandModel demand_from_json(const Json& j) {
    require_object(j, "demand");
    const std::string kind = string_field(j, "kind", "demand");
    const std::string where = "demand '" + kind + "'";
    if (kind == "separable_quantity") {
        allow_only(j, where, {"kind", "eta"});
        return build(where, [&] {
            return NonlinearDemandModel::from_separable(SeparableQuantityUtility(number(j, "eta", where)));
        });
    }
    if (kind == "drifting_elasticity") {
        allow_only(j, where, {"kind", "eta_bar"});
        return build(where, [&] { return NonlinearDemandModel::drifting_elasticity(number(j, "eta_bar", where)); });
    }
    throw ConfigError("demand: unknown kind '" + kind + "'");
}

ScenarioConfig parse_config(const Json& j) {
    require_object(j, "config");
    allow_only(j, "config",
               {"version", "command", "eta", "eta_bar", "distributions", "battery", "cost", "demand", "checks", "grid",
                "points", "tolerance", "truncation_k", "side", "theta", "oracle", "sweep"});
    if (!j.contains("version")) {
        throw ConfigError("config: missing field 'version'");
    }
    if (!j.at("version").is_number_integer() || j.at("version").get<int>() != kConfigVersion) {
        throw ConfigError("config: unsupported version (expected " + std::to_string(kConfigVersion) + ")");
    }
    ScenarioConfig c;
    if (j.contains("command")) {
        c.command = string_field(j, "command", "config");
    }
    if (j.contains("eta")) {
        if (j.at("eta").is_array()) {
            c.eta = numbers(j, "eta", "config");
        } else {
            c.eta = {number(j, "eta", "config")};
        }
    }
    c.eta_bar = optional_number(j, "eta_bar", "config");
    if (j.contains("distributions")) {
        if (!j.at("distributions").is_array()) {
            throw ConfigError("config: 'distributions' must be an array");
        }
        std::vector<ValueDistribution> ds;
        for (const auto& d : j.at("distributions")) {
            ds.push_back(distribution_from_json(d));
        }
        c.distributions = std::move(ds);
    }
    if (j.contains("battery")) {
        c.battery = battery_from_json(j.at("battery"));
    }
    if (j.contains("cost")) {
        c.cost = cost_from_json(j.at("cost"));
    }
    if (j.contains("demand")) {
        c.demand = demand_from_json(j.at("demand"));
    }
    if (j.contains("checks")) {
        if (!j.at("checks").is_array()) {
            throw ConfigError("config: 'checks' must be an array of strings");
        }
        for (const auto& x : j.at("checks")) {
            if (!x.is_string()) {
                throw ConfigError("config: 'checks' must be an array of strings");
            }
            const auto name = x.get<std::string>();
            const auto& known = known_checks();
            if (std::find(known.begin(), known.end(), name) == known.end()) {
                throw ConfigError("config: unknown check '" + name + "'");
            }
            c.checks.push_back(name);
        }
    }
    if (j.contains("grid")) {
        c.grid = count(j, "grid", "config");
    }
    if (j.contains("points")) {
        c.points = count(j, "points", "config");
    }
    c.tolerance = optional_number(j, "tolerance", "config");
    c.truncation_k = optional_number(j, "truncation_k", "config");
    if (j.contains("side")) {
        c.side = string_field(j, "side", "config");
    }
    if (j.contains("theta")) {
        c.theta = theta_from_json(j.at("theta"));
    }
    if (j.contains("oracle")) {
        c.oracle = oracle_from_json(j.at("oracle"));
    }
    if (j.contains("sweep")) {
        c.sweep = sweep_from_json(j.at("sweep"));
    }
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(j);
}

}  // namespace markup::cli
