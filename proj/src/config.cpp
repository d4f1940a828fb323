#include "qpricer/config.hpp"

#include <fstream>

namespace qpricer {

namespace {

using nlohmann::json;

const json& require(const json& j, const std::string& section, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("missing field: " + section + "." + key);
    return j.at(key);
}

double require_number(const json& j, const std::string& section, const std::string& key) {
    const json& v = require(j, section, key);
    if (!v.is_number()) throw ConfigError("field must be a number: " + section + "." + key);
    return v.get<double>();
}

std::vector<double> require_number_list(const json& j, const std::string& section,
                                        const std::string& key) {
    const json& v = require(j, section, key);
    if (!v.is_array() || v.empty()) {
        throw ConfigError("field must be a non-empty list: " + section + "." + key);
    }
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError("list entries must be numbers: " + section + "." + key);
        out.push_back(e.get<double>());
    }
    return out;
}

// A curve field holds either one percent value or [[until, pct], ...].
PiecewiseCurve parse_curve_pct(const json& v, const std::string& field) {
    if (v.is_number()) return PiecewiseCurve::constant(v.get<double>() / 100.0);
    if (!v.is_array() || v.empty()) {
        throw ConfigError("field must be a number or list of [until, pct] pairs: " + field);
    }
    std::vector<CurveSegment> segments;
    for (const auto& e : v) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            throw ConfigError("curve entries must be [until, pct] pairs: " + field);
        }
        segments.push_back({e[0].get<double>(), e[1].get<double>() / 100.0});
    }
    try {
        return PiecewiseCurve(std::move(segments));
    } catch (const ConfigError& err) {
        throw ConfigError(field + ": " + err.what());
    }
}

std::vector<std::optional<double>> parse_barrier_list(const json& j, const std::string& section,
                                                      const std::string& key) {
    const json& v = require(j, section, key);
    if (!v.is_array()) throw ConfigError("field must be a list: " + section + "." + key);
    std::vector<std::optional<double>> out;
    for (const auto& e : v) {
        if (e.is_null()) {
            out.push_back(std::nullopt);
        } else if (e.is_number()) {
            out.push_back(e.get<double>());
        } else {
            throw ConfigError("barrier entries must be numbers or null: " + section + "." + key);
        }
    }
    return out;
}

ProductSchedule parse_product(const json& p, double valuation_time, double spot) {
    const std::string type = require(p, "product", "type").get<std::string>();
    if (type == "autocallable") {
        const auto dates = require_number_list(p, "product", "dates");
        const auto barriers = require_number_list(p, "product", "barriers");
        std::vector<double> coupons;
        if (p.contains("coupons")) {
            coupons = require_number_list(p, "product", "coupons");
        } else if (p.contains("coupon_rate_pct")) {
            const double rate = require_number(p, "product", "coupon_rate_pct") / 100.0;
            for (double t : dates) coupons.push_back(rate * t);
        } else {
            throw ConfigError("missing field: product.coupons (or product.coupon_rate_pct)");
        }
        const double premium = require_number(p, "product", "final_premium");
        const std::string dir = p.value("direction", std::string("up_and_out"));
        if (dir != "up_and_out" && dir != "down_and_out") {
            throw ConfigError("field must be up_and_out or down_and_out: product.direction");
        }
        return make_autocallable(valuation_time, spot, dates, barriers, coupons, premium,
                                 dir == "up_and_out" ? BarrierDirection::UpAndOut
                                                     : BarrierDirection::DownAndOut);
    }
    if (type == "barrier") {
        const auto dates = require_number_list(p, "product", "dates");
        const auto lower = parse_barrier_list(p, "product", "lower_barriers");
        const auto upper = parse_barrier_list(p, "product", "upper_barriers");
        const json& t = require(p, "product", "terminal");
        const std::string kind = require(t, "product.terminal", "kind").get<std::string>();
        TerminalSpec spec;
        if (kind == "call") {
            spec = TerminalSpec::call(require_number(t, "product.terminal", "strike"));
        } else if (kind == "put") {
            spec = TerminalSpec::put(require_number(t, "product.terminal", "strike"));
        } else if (kind == "cash") {
            spec = TerminalSpec::cash(require_number(t, "product.terminal", "amount"));
        } else if (kind == "asset") {
            spec = TerminalSpec::asset();
        } else {
            throw ConfigError("field must be call, put, cash or asset: product.terminal.kind");
        }
        return make_barrier(valuation_time, spot, dates, lower, upper, spec);
    }
    if (type == "bermudan") {
        const auto dates = require_number_list(p, "product", "dates");
        const double strike = require_number(p, "product", "strike");
        const std::string side = require(p, "product", "side").get<std::string>();
        if (side != "put" && side != "call") {
            throw ConfigError("field must be put or call: product.side");
        }
        return make_bermudan(valuation_time, spot, dates, strike,
                             side == "put" ? ExerciseStyle::BermudanPut
                                           : ExerciseStyle::BermudanCall);
    }
    if (type == "custom") {
        const json& legs = require(p, "product", "legs");
        if (!legs.is_array() || legs.empty()) {
            throw ConfigError("field must be a non-empty list: product.legs");
        }
        ProductSchedule sched;
        sched.valuation_time = valuation_time;
        sched.spot = spot;
        for (const auto& lj : legs) {
            ObservationLeg leg;
            leg.time = require_number(lj, "product.legs[]", "time");
            leg.k_minus = lj.value("k_minus", 0.0);
            if (lj.contains("k_plus") && !lj.at("k_plus").is_null()) {
                leg.k_plus = lj.at("k_plus").get<double>();
            }
            leg.a_minus = lj.value("a_minus", 0.0);
            leg.b_minus = lj.value("b_minus", 0.0);
            leg.a_plus = lj.value("a_plus", 0.0);
            leg.b_plus = lj.value("b_plus", 0.0);
            sched.legs.push_back(leg);
        }
        const json& t = require(p, "product", "terminal");
        sched.terminal.slope = t.value("slope", 0.0);
        sched.terminal.intercept = t.value("intercept", 0.0);
        sched.validate();
        return sched;
    }
    throw ConfigError("field must be autocallable, barrier, bermudan or custom: product.type");
}

}  // namespace

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: root must be an object");
    const json& market = require(doc, "config", "market");
    const json& product = require(doc, "config", "product");

    RunConfig cfg;
    const double spot = require_number(market, "market", "spot");
    const double valuation_time = market.value("valuation_time", 0.0);

    cfg.curves.rate = parse_curve_pct(require(market, "market", "rate_pct"), "market.rate_pct");
    cfg.curves.yield = parse_curve_pct(require(market, "market", "yield_pct"), "market.yield_pct");
    cfg.curves.vol = parse_curve_pct(require(market, "market", "vol_pct"), "market.vol_pct");
    cfg.curves.validate();

    cfg.product = parse_product(product, valuation_time, spot);

    if (doc.contains("engine")) {
        const json& e = doc.at("engine");
        if (e.contains("n")) {
            if (!e.at("n").is_number_integer()) throw ConfigError("field must be an integer: engine.n");
            cfg.engine.n = e.at("n").get<int>();
        }
        if (e.contains("log_c")) cfg.engine.log_c = e.at("log_c").get<double>();
    }
    if (doc.contains("mc")) {
        const json& m = doc.at("mc");
        if (m.contains("pairs")) cfg.mc.pairs = m.at("pairs").get<std::int64_t>();
        if (m.contains("seed")) cfg.mc.seed = m.at("seed").get<std::uint64_t>();
        if (cfg.mc.pairs < 1) throw ConfigError("field must be >= 1: mc.pairs");
    }
    if (doc.contains("output")) {
        const json& o = doc.at("output");
        cfg.output.format = o.value("format", std::string("text"));
        cfg.output.path = o.value("path", std::string());
        if (cfg.output.format != "text" && cfg.output.format != "json" &&
            cfg.output.format != "csv") {
            throw ConfigError("field must be text, json or csv: output.format");
        }
    }

    // Coverage check up front so failures name the config rather than
    // surfacing later from inside the engine.
    try {
        reduce_curves(cfg.curves, cfg.product.all_dates());
    } catch (const ConfigError& err) {
        throw ConfigError(std::string("market curves: ") + err.what());
    }

    cfg.normalized = doc;
    if (!cfg.normalized.contains("engine")) cfg.normalized["engine"] = json::object();
    cfg.normalized["engine"]["n"] = cfg.engine.n;
    if (!cfg.normalized.contains("mc")) cfg.normalized["mc"] = json::object();
    cfg.normalized["mc"]["pairs"] = cfg.mc.pairs;
    cfg.normalized["mc"]["seed"] = cfg.mc.seed;
    if (!cfg.normalized.contains("output")) cfg.normalized["output"] = json::object();
    cfg.normalized["output"]["format"] = cfg.output.format;
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& err) {
        throw ConfigError("config: " + path + ": " + err.what());
    }
    return parse_config(doc);
}

}  // namespace qpricer
