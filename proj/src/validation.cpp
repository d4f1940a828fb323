#include "qpricer/validation.hpp"

#include <atomic>
#include <cfloat>
#include <cmath>
#include <limits>
#include <thread>

#include "qpricer/analytic.hpp"

namespace qpricer {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

// One counter-based stream per antithetic pair, so the sample at a given pair
// index never depends on threading or evaluation order.
struct PairStream {
    std::uint64_t state;
    PairStream(std::uint64_t seed, std::uint64_t pair)
        : state(mix64(seed ^ mix64((pair + 1) * kGolden))) {}
    double next_uniform() {
        state += kGolden;
        return static_cast<double>(mix64(state) >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }
};

struct PathModel {
    double spot = 0.0;
    std::vector<double> drift;     // (r - q - sigma^2/2) dt per interval
    std::vector<double> vol_step;  // sigma sqrt(dt)
    std::vector<double> df;        // discount factor from t0 to each date
    const std::vector<ObservationLeg>* legs = nullptr;
    TerminalPayoff terminal;

    double payoff(std::span<const double> z, double sign) const {
        double s = spot;
        const std::size_t m_count = legs->size();
        for (std::size_t m = 0; m < m_count; ++m) {
            s *= std::exp(drift[m] + vol_step[m] * sign * z[m]);
            const ObservationLeg& leg = (*legs)[m];
            if (leg.has_lower() && s <= leg.k_minus) {
                return df[m] * (leg.a_minus * s + leg.b_minus);
            }
            if (leg.has_upper() && s >= *leg.k_plus) {
                return df[m] * (leg.a_plus * s + leg.b_plus);
            }
            if (m + 1 == m_count) {
                return df[m] * (terminal.slope * s + terminal.intercept);
            }
        }
        return 0.0;  // unreachable
    }

    double pair_mean(std::uint64_t seed, std::uint64_t pair, std::span<double> z,
                     bool flip) const {
        PairStream gen(seed, pair);
        for (auto& v : z) v = norm_cdf_inv(gen.next_uniform());
        const double first = flip ? -1.0 : 1.0;
        return 0.5 * (payoff(z, first) + payoff(z, -first));
    }
};

}  // namespace

McResult mc_price(const ProductSchedule& product, const MarketCurves& curves,
                  std::int64_t n_pairs, std::uint64_t seed, const McOptions& options) {
    product.validate();
    if (product.style != ExerciseStyle::Scheduled) {
        throw ConfigError(
            "mc_price: Bermudan schedules need resolved exercise levels; price them first");
    }
    if (n_pairs < 1) throw ConfigError("mc_price: need at least one pair");

    const auto dates = product.all_dates();
    const auto intervals = reduce_curves(curves, dates);
    const std::size_t m_count = product.legs.size();

    PathModel model;
    model.spot = product.spot;
    model.legs = &product.legs;
    model.terminal = product.terminal;
    model.drift.resize(m_count);
    model.vol_step.resize(m_count);
    model.df.resize(m_count);
    double log_df = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) {
        const IntervalParams& p = intervals[m];
        model.drift[m] = (p.rate - p.yield - 0.5 * p.sigma * p.sigma) * p.dt;
        model.vol_step[m] = p.sigma * std::sqrt(p.dt);
        log_df -= p.rate * p.dt;
        model.df[m] = std::exp(log_df);
    }

    // Fixed-size chunks summed in index order keep the estimate identical for
    // any thread count.
    constexpr std::int64_t chunk_size = 16384;
    const std::int64_t n_chunks = (n_pairs + chunk_size - 1) / chunk_size;
    struct ChunkSums {
        long double sum = 0.0L;
        long double sum_sq = 0.0L;
    };
    std::vector<ChunkSums> chunks(static_cast<std::size_t>(n_chunks));

    std::vector<double> z0(m_count);
    const double shift = model.pair_mean(seed, 0, z0, options.flip_antithetic);

    std::atomic<std::int64_t> next_chunk{0};
    auto worker = [&] {
        std::vector<double> z(m_count);
        for (;;) {
            const std::int64_t c = next_chunk.fetch_add(1);
            if (c >= n_chunks) break;
            const std::int64_t lo = c * chunk_size;
            const std::int64_t hi = std::min(lo + chunk_size, n_pairs);
            ChunkSums sums;
            for (std::int64_t pair = lo; pair < hi; ++pair) {
                const double m = model.pair_mean(seed, static_cast<std::uint64_t>(pair), z,
                                                 options.flip_antithetic);
                const long double d = static_cast<long double>(m) - shift;
                sums.sum += d;
                sums.sum_sq += d * d;
            }
            chunks[static_cast<std::size_t>(c)] = sums;
        }
    };

    int n_threads = options.threads;
    if (n_threads <= 0) {
        n_threads = static_cast<int>(std::thread::hardware_concurrency());
        if (n_threads <= 0) n_threads = 1;
    }
    n_threads = static_cast<int>(std::min<std::int64_t>(n_threads, n_chunks));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    long double sum = 0.0L;
    long double sum_sq = 0.0L;
    for (const auto& c : chunks) {
        sum += c.sum;
        sum_sq += c.sum_sq;
    }
    const long double n = static_cast<long double>(n_pairs);
    const long double mean_shifted = sum / n;

    McResult out;
    out.n_pairs = n_pairs;
    out.seed = seed;
    out.estimate = static_cast<double>(shift + mean_shifted);
    if (n_pairs > 1) {
        const long double var =
            std::max(0.0L, (sum_sq - n * mean_shifted * mean_shifted) / (n - 1.0L));
        out.std_error = static_cast<double>(std::sqrt(var / n));
    }
    return out;
}

TruncationBound truncation_bound(const ProductSchedule& product, const MarketCurves& curves,
                                 double log_c) {
    product.validate();
    if (!(log_c > 0.0)) throw ConfigError("truncation_bound: log_c must be positive");
    const auto dates = product.all_dates();
    const auto intervals = reduce_curves(curves, dates);

    TruncationBound b;
    b.slope_max = std::abs(product.terminal.slope);
    b.intercept_max = std::abs(product.terminal.intercept);
    for (const auto& leg : product.legs) {
        b.slope_max = std::max({b.slope_max, std::abs(leg.a_minus), std::abs(leg.a_plus)});
        b.intercept_max = std::max({b.intercept_max, std::abs(leg.b_minus), std::abs(leg.b_plus)});
    }
    for (const auto& p : intervals) {
        b.rate_floor = std::min(b.rate_floor, p.rate);
        b.yield_floor = std::min(b.yield_floor, p.yield);
    }

    const double t0 = dates.front();
    const double t_mat = dates.back();
    const double c = std::exp(log_c);
    const std::size_t m_count = product.legs.size();

    double sum_asset = 0.0;
    double sum_cash = 0.0;
    b.d_min = std::numeric_limits<double>::infinity();
    b.d_max = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 1; m < m_count; ++m) {
        const double t_m = product.legs[m - 1].time;
        const std::vector<double> pair_dates{t0, t_m};
        const IntervalParams avg = reduce_curves(curves, pair_dates).front();
        sum_asset += binary_asset({product.spot, product.spot * c, +1, avg}) +
                     binary_asset({product.spot, product.spot / c, -1, avg});
        sum_cash += binary_cash({product.spot, product.spot * c, +1, avg}) +
                    binary_cash({product.spot, product.spot / c, -1, avg});
        const double span = t_m - t0;
        const double root = avg.sigma * std::sqrt(span);
        const double up = (avg.rate - avg.yield + 0.5 * avg.sigma * avg.sigma) * span;
        const double dn = (avg.rate - avg.yield - 0.5 * avg.sigma * avg.sigma) * span;
        for (double d : {(-log_c + up) / root, (-log_c - up) / root, (-log_c + dn) / root,
                         (-log_c - dn) / root}) {
            b.d_min = std::min(b.d_min, d);
            b.d_max = std::max(b.d_max, d);
        }
    }
    if (m_count <= 1) {
        b.d_min = b.d_max = 0.0;
        b.value = 0.0;
        return b;
    }
    b.value = std::exp(b.yield_floor * (t0 - t_mat)) * b.slope_max * sum_asset +
              std::exp(b.rate_floor * (t0 - t_mat)) * b.intercept_max * sum_cash;
    return b;
}

ConvergenceResult convergence_study(const ProductSchedule& product, const MarketCurves& curves,
                                    std::span<const int> n_list, int reference_n) {
    if (n_list.empty()) throw ConfigError("convergence_study: empty grid list");
    for (int n : n_list) {
        if (n >= reference_n) {
            throw ConfigError("convergence_study: reference grid must exceed every tested grid");
        }
    }
    ConvergenceResult out;
    out.reference_n = reference_n;
    out.reference_value = price(product, curves, reference_n).value;

    for (int n : n_list) {
        const double v = price(product, curves, n).value;
        const double rel = std::abs(v - out.reference_value) /
                           std::max(std::abs(out.reference_value), DBL_MIN);
        out.points.push_back({n, v, rel});
    }

    // Fit log(error) = a - order * log(N) on points above the round-off floor.
    const double floor = 100.0 * DBL_EPSILON;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int used = 0;
    for (const auto& p : out.points) {
        if (p.rel_error <= floor) continue;
        const double lx = std::log(static_cast<double>(p.n));
        const double ly = std::log(p.rel_error);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++used;
    }
    if (used >= 2) {
        const double denom = used * sxx - sx * sx;
        out.observed_order = -(used * sxy - sx * sy) / denom;
    } else {
        out.observed_order = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

}  // namespace qpricer
