#pragma once
/**
 * @file config.hpp
 * @brief Run configuration: a JSON file with product, market, engine, mc and
 *        output sections, parsed into ready-to-price objects.
 *
 * Rates, yields and volatilities appear in the file in percent (field names
 * carry the _pct suffix); the parser converts to decimals. Curve-valued
 * entries are either a single number or a list of [until, value] pairs with
 * strictly increasing breakpoints.
 */

#include <string>

#include <json.hpp>

#include "qpricer/market_model.hpp"
#include "qpricer/product.hpp"

namespace qpricer {

struct EngineSection {
    int n = 501;
    std::optional<double> log_c;
};

struct McSection {
    std::int64_t pairs = 100000;
    std::uint64_t seed = 42;
};

struct OutputSection {
    std::string format = "text";  // text | json | csv
    std::string path;             // empty = stdout
};

struct RunConfig {
    ProductSchedule product;
    MarketCurves curves;
    EngineSection engine;
    McSection mc;
    OutputSection output;
    /// Input document with defaults filled in; serializing this and parsing
    /// it back reproduces the run exactly.
    nlohmann::json normalized;
};

/// @throws ConfigError naming the offending field on any problem.
RunConfig parse_config(const nlohmann::json& doc);

/// Parse a config file from disk. @throws ConfigError on I/O or syntax errors.
RunConfig load_config(const std::string& path);

}  // namespace qpricer
