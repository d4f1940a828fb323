// Command-line front end: price products from a config file, run convergence
// studies, cross-check against the Monte-Carlo oracle, print the truncation
// bound, and compute bump-and-reprice greeks.

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpricer/config.hpp"
#include "qpricer/engine.hpp"
#include "qpricer/validation.hpp"

using nlohmann::json;
using namespace qpricer;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericError = 3;

struct CommonFlags {
    std::string config_path;
    std::optional<int> n;
    std::optional<std::string> format;
    std::optional<std::string> out_path;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Path to the run configuration")
        ->required();
    cmd->add_option("--n", flags.n, "Grid size override");
    cmd->add_option("--format", flags.format, "Output format: text | json | csv");
    cmd->add_option("--out", flags.out_path, "Write the report to a file instead of stdout");
}

RunConfig load(const CommonFlags& flags) {
    RunConfig cfg = load_config(flags.config_path);
    if (flags.n) cfg.engine.n = *flags.n;
    if (flags.format) cfg.output.format = *flags.format;
    if (flags.out_path) cfg.output.path = *flags.out_path;
    if (cfg.output.format != "text" && cfg.output.format != "json" &&
        cfg.output.format != "csv") {
        throw ConfigError("field must be text, json or csv: output.format");
    }
    return cfg;
}

void emit(const RunConfig& cfg, const std::string& body) {
    if (cfg.output.path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(cfg.output.path);
    if (!out) throw ConfigError("cannot open output file: " + cfg.output.path);
    out << body;
}

std::string format_rate_echo(const PiecewiseCurve& curve, const std::string& name) {
    std::ostringstream os;
    os << "  " << name << ":";
    for (const auto& seg : curve.segments()) {
        os << " (t<=" << seg.until << ": " << seg.value * 100.0 << "% = " << seg.value << ")";
    }
    os << "\n";
    return os.str();
}

json diagnostics_json(const PriceResult& res) {
    json steps = json::array();
    for (const auto& s : res.steps) {
        json step{{"leg", s.leg_index}, {"time", s.time}, {"max_abs_value", s.max_abs_value}};
        if (s.window) {
            step["window"] = {{"l_minus", s.window->l_minus}, {"l_plus", s.window->l_plus},
                              {"p_minus", s.window->p_minus}, {"p_plus", s.window->p_plus},
                              {"p0", s.window->p0},           {"narrow", s.window->narrow}};
        }
        steps.push_back(step);
    }
    json boundaries = json::array();
    for (const auto& b : res.boundary_solves) {
        json bs{{"iterations", b.iterations}, {"tolerance_met", b.tolerance_met}};
        if (b.level) bs["level"] = *b.level;
        boundaries.push_back(bs);
    }
    return json{{"steps", steps}, {"boundary_solves", boundaries}};
}

int cmd_price(const CommonFlags& flags) {
    const RunConfig cfg = load(flags);
    PriceOptions opt;
    opt.log_c_override = cfg.engine.log_c;
    const PriceResult res = price(cfg.product, cfg.curves, cfg.engine.n, opt);

    std::ostringstream os;
    if (cfg.output.format == "json") {
        json doc{{"price", res.value},
                 {"N", res.n_points},
                 {"logC", res.log_c},
                 {"runtime_ms", res.runtime_ms},
                 {"diagnostics", diagnostics_json(res)}};
        os << doc.dump(2) << "\n";
    } else if (cfg.output.format == "csv") {
        os << "price,N,logC,h,runtime_ms\n";
        os.precision(12);
        os << res.value << "," << res.n_points << "," << res.log_c << "," << res.grid_step
           << "," << res.runtime_ms << "\n";
    } else {
        os.precision(12);
        os << "price:      " << res.value << "\n";
        os << "grid:       N = " << res.n_points << ", logC = " << res.log_c
           << ", h = " << res.grid_step << "\n";
        os << "runtime:    " << res.runtime_ms << " ms\n";
        os << "market echo (percent = decimal):\n";
        os << format_rate_echo(cfg.curves.rate, "rate");
        os << format_rate_echo(cfg.curves.yield, "yield");
        os << format_rate_echo(cfg.curves.vol, "vol");
        if (!res.boundary_solves.empty()) {
            os << "exercise levels:\n";
            for (std::size_t i = 0; i < res.boundary_solves.size(); ++i) {
                const auto& b = res.boundary_solves[i];
                os << "  solve " << i << ": ";
                if (b.level) {
                    os << *b.level << " (" << b.iterations << " iterations)";
                } else {
                    os << "no early exercise";
                }
                os << "\n";
            }
        }
    }
    emit(cfg, os.str());
    return kExitOk;
}

int cmd_converge(const CommonFlags& flags, const std::vector<int>& n_list, int reference_n) {
    const RunConfig cfg = load(flags);
    if (n_list.empty()) throw ConfigError("converge: --n-list must not be empty");
    if (reference_n <= 0) throw ConfigError("converge: --reference-n is required");
    const auto res = convergence_study(cfg.product, cfg.curves, n_list, reference_n);

    std::ostringstream os;
    if (cfg.output.format == "json") {
        json points = json::array();
        for (const auto& p : res.points) {
            points.push_back({{"N", p.n}, {"value", p.value}, {"rel_error", p.rel_error}});
        }
        json doc{{"points", points},
                 {"reference_n", res.reference_n},
                 {"reference_value", res.reference_value},
                 {"observed_order", res.observed_order}};
        os << doc.dump(2) << "\n";
    } else {
        os << "N,value,rel_error\n";
        os.precision(12);
        for (const auto& p : res.points) {
            os << p.n << "," << p.value << "," << p.rel_error << "\n";
        }
        std::cerr.precision(6);
        std::cerr << "# reference N = " << res.reference_n << ", value = " << res.reference_value
                  << ", observed order = " << res.observed_order << "\n";
    }
    emit(cfg, os.str());
    return kExitOk;
}

int cmd_mc_check(const CommonFlags& flags, std::optional<std::int64_t> pairs,
                 std::optional<std::uint64_t> seed) {
    RunConfig cfg = load(flags);
    if (pairs) cfg.mc.pairs = *pairs;
    if (seed) cfg.mc.seed = *seed;

    PriceOptions opt;
    opt.log_c_override = cfg.engine.log_c;
    const PriceResult res = price(cfg.product, cfg.curves, cfg.engine.n, opt);

    ProductSchedule resolved = cfg.product;
    resolved.style = ExerciseStyle::Scheduled;
    resolved.legs = res.resolved_legs;
    const McResult mc = mc_price(resolved, cfg.curves, cfg.mc.pairs, cfg.mc.seed);

    const double diff = res.value - mc.estimate;
    double z;
    if (mc.std_error > 0.0) {
        z = diff / mc.std_error;
    } else {
        // Deterministic payoff: agreement is exact or the check fails outright.
        z = std::abs(diff) <= 1e-12 * (std::abs(mc.estimate) + 1.0)
                ? 0.0
                : std::numeric_limits<double>::infinity();
    }
    const bool ok = std::abs(z) <= 4.0;

    std::ostringstream os;
    if (cfg.output.format == "json") {
        json doc{{"engine_price", res.value},
                 {"mc_estimate", mc.estimate},
                 {"mc_std_error", mc.std_error},
                 {"pairs", mc.n_pairs},
                 {"seed", mc.seed},
                 {"z_score", z},
                 {"pass", ok}};
        os << doc.dump(2) << "\n";
    } else {
        os.precision(12);
        os << "engine price: " << res.value << "\n";
        os << "mc estimate:  " << mc.estimate << " +/- " << mc.std_error << " (" << mc.n_pairs
           << " pairs, seed " << mc.seed << ")\n";
        os << "z-score:      " << z << "\n";
        os << (ok ? "PASS" : "FAIL") << " (|z| <= 4)\n";
    }
    emit(cfg, os.str());
    return ok ? kExitOk : kExitCheckFailed;
}

int cmd_bound(const CommonFlags& flags) {
    const RunConfig cfg = load(flags);
    const auto dates = cfg.product.all_dates();
    const auto intervals = reduce_curves(cfg.curves, dates);
    const double log_c = cfg.engine.log_c.value_or(
        truncation_half_width(intervals, dates.back() - dates.front()));
    const auto b = truncation_bound(cfg.product, cfg.curves, log_c);

    std::ostringstream os;
    if (cfg.output.format == "json") {
        json doc{{"logC", log_c},
                 {"payoff_slope_max", b.slope_max},
                 {"payoff_intercept_max", b.intercept_max},
                 {"rate_floor", b.rate_floor},
                 {"yield_floor", b.yield_floor},
                 {"digital_d_min", b.d_min},
                 {"digital_d_max", b.d_max},
                 {"bound", b.value},
                 {"spot_scale", 1e-15 * (cfg.product.spot + 1.0)}};
        os << doc.dump(2) << "\n";
    } else {
        os.precision(12);
        os << "logC:                     " << log_c << "\n";
        os << "payoff slope max (A):     " << b.slope_max << "\n";
        os << "payoff intercept max (B): " << b.intercept_max << "\n";
        os << "rate floor (R):           " << b.rate_floor << "\n";
        os << "yield floor (Q):          " << b.yield_floor << "\n";
        os << "digital arguments:        [" << b.d_min << ", " << b.d_max << "]\n";
        os << "truncation bound:         " << b.value << "\n";
        os << "1e-15 * (spot + 1):       " << 1e-15 * (cfg.product.spot + 1.0) << "\n";
    }
    emit(cfg, os.str());
    return kExitOk;
}

int cmd_greeks(const CommonFlags& flags, double spot_bump, double vol_bump) {
    const RunConfig cfg = load(flags);
    if (!(spot_bump > 0.0) || !(vol_bump > 0.0)) {
        throw ConfigError("greeks: bump sizes must be positive");
    }

    PriceOptions opt;
    opt.log_c_override = cfg.engine.log_c;
    const auto price_at = [&](double spot_scale, double vol_shift) {
        ProductSchedule bumped = cfg.product;
        bumped.spot = cfg.product.spot * spot_scale;
        MarketCurves curves = cfg.curves;
        if (vol_shift != 0.0) {
            auto segments = cfg.curves.vol.segments();
            for (auto& s : segments) s.value += vol_shift;
            curves.vol = PiecewiseCurve(segments);
        }
        return price(bumped, curves, cfg.engine.n, opt).value;
    };

    const double base = price_at(1.0, 0.0);
    const double s0 = cfg.product.spot;

    struct Central {
        double delta, gamma, vega;
    };
    const auto central = [&](double rel_bump, double vb) {
        const double up = price_at(1.0 + rel_bump, 0.0);
        const double dn = price_at(1.0 - rel_bump, 0.0);
        const double dv_up = price_at(1.0, vb);
        const double dv_dn = price_at(1.0, -vb);
        Central c;
        c.delta = (up - dn) / (2.0 * rel_bump * s0);
        c.gamma = (up - 2.0 * base + dn) / (rel_bump * s0 * rel_bump * s0);
        c.vega = (dv_up - dv_dn) / (2.0 * vb);
        return c;
    };

    const Central wide = central(spot_bump, vol_bump);
    const Central tight = central(0.5 * spot_bump, 0.5 * vol_bump);
    // Richardson extrapolation across the two bump sizes; the residual gap is
    // the consistency indicator.
    const Central extrap{(4.0 * tight.delta - wide.delta) / 3.0,
                         (4.0 * tight.gamma - wide.gamma) / 3.0,
                         (4.0 * tight.vega - wide.vega) / 3.0};

    std::ostringstream os;
    if (cfg.output.format == "json") {
        json doc{{"price", base},
                 {"delta", extrap.delta},
                 {"gamma", extrap.gamma},
                 {"vega", extrap.vega},
                 {"consistency",
                  {{"delta", std::abs(tight.delta - wide.delta)},
                   {"gamma", std::abs(tight.gamma - wide.gamma)},
                   {"vega", std::abs(tight.vega - wide.vega)}}},
                 {"bumps", {{"spot_rel", spot_bump}, {"vol_abs", vol_bump}}}};
        os << doc.dump(2) << "\n";
    } else {
        os.precision(10);
        os << "price: " << base << "\n";
        os << "            bump         bump/2       extrapolated  consistency\n";
        os << "delta: " << wide.delta << "  " << tight.delta << "  " << extrap.delta << "  "
           << std::abs(tight.delta - wide.delta) << "\n";
        os << "gamma: " << wide.gamma << "  " << tight.gamma << "  " << extrap.gamma << "  "
           << std::abs(tight.gamma - wide.gamma) << "\n";
        os << "vega:  " << wide.vega << "  " << tight.vega << "  " << extrap.vega << "  "
           << std::abs(tight.vega - wide.vega) << "\n";
    }
    emit(cfg, os.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qpricer - quadrature pricing engine for discretely monitored options"};
    app.require_subcommand(1);

    CommonFlags price_flags;
    auto* price_cmd = app.add_subcommand("price", "Price the configured product");
    add_common(price_cmd, price_flags);

    CommonFlags conv_flags;
    std::vector<int> n_list;
    int reference_n = 0;
    auto* conv_cmd = app.add_subcommand("converge", "Grid-refinement study");
    add_common(conv_cmd, conv_flags);
    conv_cmd->add_option("--n-list", n_list, "Comma-separated grid sizes")
        ->required()
        ->delimiter(',');
    conv_cmd->add_option("--reference-n", reference_n, "Reference grid size")->required();

    CommonFlags mc_flags;
    std::optional<std::int64_t> pairs;
    std::optional<std::uint64_t> seed;
    auto* mc_cmd = app.add_subcommand("mc-check", "Compare against the Monte-Carlo oracle");
    add_common(mc_cmd, mc_flags);
    mc_cmd->add_option("--pairs", pairs, "Antithetic pair count override");
    mc_cmd->add_option("--seed", seed, "RNG seed override");

    CommonFlags bound_flags;
    auto* bound_cmd = app.add_subcommand("bound", "Print the truncation-error bound");
    add_common(bound_cmd, bound_flags);

    CommonFlags greeks_flags;
    double spot_bump = 0.005;
    double vol_bump = 0.005;
    auto* greeks_cmd = app.add_subcommand("greeks", "Bump-and-reprice delta, gamma, vega");
    add_common(greeks_cmd, greeks_flags);
    greeks_cmd->add_option("--bump", spot_bump, "Relative spot bump (default 0.005)");
    greeks_cmd->add_option("--vol-bump", vol_bump, "Absolute vol bump in decimals (default 0.005)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (price_cmd->parsed()) return cmd_price(price_flags);
        if (conv_cmd->parsed()) return cmd_converge(conv_flags, n_list, reference_n);
        if (mc_cmd->parsed()) return cmd_mc_check(mc_flags, pairs, seed);
        if (bound_cmd->parsed()) return cmd_bound(bound_flags);
        if (greeks_cmd->parsed()) return cmd_greeks(greeks_flags, spot_bump, vol_bump);
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfigError;
    } catch (const NumericError& err) {
        std::cerr << "numeric error: " << err.what() << "\n";
        return kExitNumericError;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitNumericError;
    }
    return kExitOk;
}
