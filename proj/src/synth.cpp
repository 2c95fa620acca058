#include "mmt/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mmt/csv.hpp"
#include "mmt/rng.hpp"

namespace mmt {

namespace {

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
    std::uint64_t state = master ^ fnv1a64(tag);
    return splitmix64(state);
}

std::string symbol_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "SYM%03d", i);
    return buf;
}

double cents(std::int64_t c) { return static_cast<double>(c) / 100.0; }

}  // namespace

void SynthSpec::validate() const {
    auto fail = [](const std::string& why) { throw std::runtime_error("synth spec: " + why); };
    if (symbols < 1) fail("symbols must be >= 1");
    if (session.close_ns <= session.open_ns) fail("session must be non-empty");
    if (!(quote_rate_hz > 0.0)) fail("quote_rate_hz must be > 0");
    if (!(exchange_quote_rate_hz > 0.0)) fail("exchange_quote_rate_hz must be > 0");
    if (!(trade_rate_hz > 0.0)) fail("trade_rate_hz must be > 0");
    if (!(price_volatility >= 0.0)) fail("price_volatility must be >= 0");
    if (!(intraday_cap > 0.0)) fail("intraday_cap must be > 0");
    if (!(base_price_lo > 0.0) || base_price_hi < base_price_lo)
        fail("base price range must satisfy 0 < lo <= hi");
    if (!(spread_mean_ticks >= 0.0) || !(spread_vol_ticks >= 0.0))
        fail("spread parameters must be >= 0");
    if (exchanges < 1 || exchanges > 12) fail("exchanges must be in 1..12");
    if (!routing_weights.empty()) {
        if (static_cast<int>(routing_weights.size()) != exchanges)
            fail("routing_weights must have one entry per exchange");
        double sum = 0.0;
        for (double w : routing_weights) {
            if (!(w >= 0.0)) fail("routing weights must be >= 0");
            sum += w;
        }
        if (std::fabs(sum - 1.0) > 1e-9) fail("routing weights must sum to 1");
    }
    if (!(at_quote_fraction >= 0.0 && at_quote_fraction <= 1.0))
        fail("at_quote_fraction must be in [0, 1]");
    if (planted) {
        const auto& p = *planted;
        if (p.blocks < 1 || p.cols_per_block < 1 || p.length < 2)
            fail("planted blocks need blocks >= 1, cols_per_block >= 1, length >= 2");
        if (!(p.between_corr >= 0.0 && p.between_corr < p.within_corr && p.within_corr <= 1.0))
            fail("planted blocks need 0 <= between_corr < within_corr <= 1");
    }
}

namespace {

// One symbol's day, written straight to the open streams so memory stays
// bounded by a single symbol.
void generate_symbol(const SynthSpec& spec, const std::string& sym, std::ofstream& trades_out,
                     std::ofstream& quotes_out, std::ofstream& daily_out) {
    Rng rng(derive_seed(spec.seed, sym));

    const double p0 = std::round(rng.uniform(spec.base_price_lo, spec.base_price_hi) * 100.0) /
                      100.0;
    const double lo_cap = p0 * (1.0 - spec.intraday_cap);
    const double hi_cap = p0 * (1.0 + spec.intraday_cap);

    double mid = p0;
    double spread_state = spec.spread_mean_ticks;

    auto quote_cents = [&]() -> std::pair<std::int64_t, std::int64_t> {
        std::int64_t ticks = 0;
        if (spec.spread_mean_ticks > 0.0) {
            spread_state += 0.5 * (spec.spread_mean_ticks - spread_state) +
                            spec.spread_vol_ticks * rng.normal();
            ticks = std::max<std::int64_t>(1, std::llround(spread_state));
        }
        const std::int64_t bid_c =
            std::llround(mid * 100.0 - static_cast<double>(ticks) / 2.0);
        return {bid_c, bid_c + ticks};
    };

    auto lots = [&](int max_lots) {
        return static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(max_lots)) + 1) *
               100;
    };

    auto emit_quote = [&](TimestampNs t, std::int64_t bid_c, std::int64_t bsz,
                          std::int64_t ask_c, std::int64_t asz, char exch, bool is_nbbo) {
        quotes_out << t << ',' << sym << ',' << format_double(cents(bid_c)) << ',' << bsz << ','
                   << format_double(cents(ask_c)) << ',' << asz << ',' << exch << ','
                   << (is_nbbo ? 1 : 0) << '\n';
    };

    // NBBO path retained for pricing the trades afterwards
    std::vector<TimestampNs> nbbo_t;
    std::vector<std::int64_t> nbbo_bid_c, nbbo_ask_c;
    auto push_nbbo = [&](TimestampNs t, std::int64_t bid_c, std::int64_t ask_c) {
        nbbo_t.push_back(t);
        nbbo_bid_c.push_back(bid_c);
        nbbo_ask_c.push_back(ask_c);
    };

    auto off = [&](int n) { return static_cast<std::int64_t>(rng.below(n)); };
    // Exchange books jitter away from the NBBO unless the spread regime is
    // pinned at zero, in which case the whole day stays locked.
    const int exch_off_range = spec.spread_mean_ticks > 0.0 ? 3 : 1;

    // Pre-open seeds, one per stream on distinct milliseconds so per-symbol
    // timestamps stay strictly increasing in the merged file.
    {
        const auto [bid_c, ask_c] = quote_cents();
        TimestampNs t = spec.session.open_ns -
                        static_cast<TimestampNs>(spec.exchanges + 1) * kNsPerMs;
        emit_quote(t, bid_c, lots(20), ask_c, lots(20), 'N', true);
        push_nbbo(t, bid_c, ask_c);
        for (int e = 0; e < spec.exchanges; ++e) {
            t += kNsPerMs;
            emit_quote(t, bid_c - off(exch_off_range), lots(20), ask_c + off(exch_off_range),
                       lots(20), static_cast<char>('A' + e), false);
        }
    }

    // Quote events: one merged Poisson stream thinned across NBBO and the
    // per-exchange feeds, so the event times are strictly increasing and the
    // exchange feeds can reference the NBBO state in a single pass.
    const double total_rate =
        spec.quote_rate_hz + spec.exchange_quote_rate_hz * static_cast<double>(spec.exchanges);
    const double nbbo_share = spec.quote_rate_hz / total_rate;

    TimestampNs t = spec.session.open_ns;
    while (true) {
        const double gap_s = rng.exponential(total_rate);
        t += std::max<TimestampNs>(1, std::llround(gap_s * 1000.0)) * kNsPerMs;
        if (t >= spec.session.close_ns) break;
        const double pick = rng.uniform();
        if (pick < nbbo_share) {
            mid = std::clamp(mid * (1.0 + spec.price_volatility * rng.normal()), lo_cap, hi_cap);
            const auto [bid_c, ask_c] = quote_cents();
            emit_quote(t, bid_c, lots(20), ask_c, lots(20), 'N', true);
            push_nbbo(t, bid_c, ask_c);
        } else {
            const int e = std::min<int>(
                spec.exchanges - 1,
                static_cast<int>((pick - nbbo_share) / ((1.0 - nbbo_share) /
                                                        static_cast<double>(spec.exchanges))));
            emit_quote(t, nbbo_bid_c.back() - off(exch_off_range), lots(20),
                       nbbo_ask_c.back() + off(exch_off_range), lots(20),
                       static_cast<char>('A' + e), false);
        }
    }

    // Trades: independent arrivals priced against the NBBO strictly before
    // the trade (the same prevailing-quote convention the classifiers use).
    std::size_t qi = 1;   // nbbo_t[qi - 1] is the prevailing record
    t = spec.session.open_ns;
    while (true) {
        const double gap_s = rng.exponential(spec.trade_rate_hz);
        t += std::max<TimestampNs>(1, std::llround(gap_s * 1000.0)) * kNsPerMs;
        if (t >= spec.session.close_ns) break;
        while (qi < nbbo_t.size() && nbbo_t[qi] < t) ++qi;
        const std::int64_t bid_c = nbbo_bid_c[qi - 1];
        const std::int64_t ask_c = nbbo_ask_c[qi - 1];

        std::int64_t price_c;
        if (rng.uniform() < spec.at_quote_fraction || ask_c - bid_c < 2) {
            price_c = rng.uniform() < 0.5 ? ask_c : bid_c;
        } else {
            price_c = bid_c + 1 + off(static_cast<int>(ask_c - bid_c - 1));
        }
        const std::int64_t size = lots(10);

        int e = 0;
        if (spec.routing_weights.empty()) {
            e = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.exchanges)));
        } else {
            const double u = rng.uniform();
            double acc = 0.0;
            for (int i = 0; i < spec.exchanges; ++i) {
                acc += spec.routing_weights[i];
                if (u < acc || i == spec.exchanges - 1) {
                    e = i;
                    break;
                }
            }
        }
        trades_out << t << ',' << sym << ',' << format_double(cents(price_c)) << ',' << size
                   << ',' << static_cast<char>('A' + e) << '\n';
    }

    // Reference month: 21 making-believe prior days around the base price.
    const double session_secs =
        static_cast<double>(spec.session.close_ns - spec.session.open_ns) / 1e9;
    const double base_vol = spec.trade_rate_hz * session_secs * 550.0;
    for (int d = 1; d <= 21; ++d) {
        char date[16];
        std::snprintf(date, sizeof(date), "2024-02-%02d", d);
        const double vol = std::round(base_vol * rng.uniform(0.75, 1.25));
        const double hi = p0 * (1.0 + rng.uniform(0.001, spec.intraday_cap));
        const double lo = p0 * (1.0 - rng.uniform(0.001, spec.intraday_cap));
        daily_out << sym << ',' << date << ',' << format_double(vol) << ','
                  << format_double(hi) << ',' << format_double(lo) << '\n';
    }
}

}  // namespace

SynthPaths generate_day(const SynthSpec& spec, const std::string& out_dir) {
    spec.validate();
    SynthPaths paths{out_dir + "/trades.csv", out_dir + "/quotes.csv", out_dir + "/daily.csv"};

    std::ofstream trades_out(paths.trades, std::ios::binary);
    std::ofstream quotes_out(paths.quotes, std::ios::binary);
    std::ofstream daily_out(paths.daily, std::ios::binary);
    if (!trades_out || !quotes_out || !daily_out)
        throw std::runtime_error("cannot create synth outputs under " + out_dir);
    trades_out << "timestamp_ns,symbol,price,size,exchange\n";
    quotes_out << "timestamp_ns,symbol,bid_price,bid_size,ask_price,ask_size,exchange,is_nbbo\n";
    daily_out << "symbol,date,share_volume,ask_high,bid_low\n";

    for (int i = 0; i < spec.symbols; ++i)
        generate_symbol(spec, symbol_name(i), trades_out, quotes_out, daily_out);

    if (!trades_out || !quotes_out || !daily_out)
        throw std::runtime_error("write failed under " + out_dir);

    if (spec.planted) {
        const auto& p = *spec.planted;
        const MeasurePanel fixture =
            generate_planted_blocks(p.blocks, p.within_corr, p.between_corr, p.length,
                                    derive_seed(spec.seed, "planted"), p.cols_per_block);
        write_panel_csv(out_dir + "/planted_panel.csv", fixture);
    }
    return paths;
}

MeasurePanel generate_planted_blocks(int k, double within_corr, double between_corr,
                                     int length, std::uint64_t seed, int cols_per_block) {
    if (k < 1 || cols_per_block < 1 || length < 2)
        throw std::runtime_error("planted blocks: need k >= 1, cols_per_block >= 1, length >= 2");
    if (!(between_corr >= 0.0 && between_corr < within_corr && within_corr <= 1.0))
        throw std::runtime_error("planted blocks: need 0 <= between_corr < within_corr <= 1");

    Rng rng(seed);
    const double w_block = std::sqrt(within_corr - between_corr);
    const double w_global = std::sqrt(between_corr);
    const double w_noise = std::sqrt(1.0 - within_corr);

    std::vector<double> global(length);
    for (auto& g : global) g = rng.normal();
    std::vector<std::vector<double>> factor(k, std::vector<double>(length));
    for (auto& f : factor)
        for (auto& v : f) v = rng.normal();

    MeasurePanel panel;
    panel.symbol = "planted";
    panel.interval_start.resize(length);
    for (int r = 0; r < length; ++r)
        panel.interval_start[r] =
            kDefaultSession.open_ns + static_cast<TimestampNs>(r) * kDefaultIntervalNs;
    for (int b = 0; b < k; ++b)
        for (int c = 0; c < cols_per_block; ++c)
            panel.columns.push_back("block" + std::to_string(b + 1) + ".x" +
                                    std::to_string(c + 1));
    panel.values.resize(static_cast<std::size_t>(length) * panel.columns.size());
    panel.hhi_n.assign(panel.values.size(), 0);

    for (int b = 0; b < k; ++b) {
        for (int c = 0; c < cols_per_block; ++c) {
            const double sign = (c % 2 == 0) ? 1.0 : -1.0;
            const std::size_t col = static_cast<std::size_t>(b) * cols_per_block + c;
            for (int r = 0; r < length; ++r) {
                const double v =
                    w_block * factor[b][r] + w_global * global[r] + w_noise * rng.normal();
                panel.values[static_cast<std::size_t>(r) * panel.columns.size() + col] =
                    sign * v;
            }
        }
    }
    return panel;
}

SynthSpec load_synth_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    SynthSpec spec;
    PlantedBlockSpec planted;
    bool have_planted = false;

    auto parse_f = [&](const std::string& v, const std::string& key) {
        double out = 0.0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || p != v.data() + v.size())
            throw std::runtime_error(path + ": bad number for " + key);
        return out;
    };
    auto parse_i = [&](const std::string& v, const std::string& key) {
        return static_cast<std::int64_t>(std::llround(parse_f(v, key)));
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t");
            return s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (key == "seed") spec.seed = static_cast<std::uint64_t>(parse_i(val, key));
        else if (key == "symbols") spec.symbols = static_cast<int>(parse_i(val, key));
        else if (key == "session_open_secs")
            spec.session.open_ns = parse_i(val, key) * kNsPerSec;
        else if (key == "session_close_secs")
            spec.session.close_ns = parse_i(val, key) * kNsPerSec;
        else if (key == "quote_rate_hz") spec.quote_rate_hz = parse_f(val, key);
        else if (key == "exchange_quote_rate_hz") spec.exchange_quote_rate_hz = parse_f(val, key);
        else if (key == "trade_rate_hz") spec.trade_rate_hz = parse_f(val, key);
        else if (key == "price_volatility") spec.price_volatility = parse_f(val, key);
        else if (key == "intraday_cap") spec.intraday_cap = parse_f(val, key);
        else if (key == "base_price_lo") spec.base_price_lo = parse_f(val, key);
        else if (key == "base_price_hi") spec.base_price_hi = parse_f(val, key);
        else if (key == "spread_mean_ticks") spec.spread_mean_ticks = parse_f(val, key);
        else if (key == "spread_vol_ticks") spec.spread_vol_ticks = parse_f(val, key);
        else if (key == "exchanges") spec.exchanges = static_cast<int>(parse_i(val, key));
        else if (key == "at_quote_fraction") spec.at_quote_fraction = parse_f(val, key);
        else if (key == "routing_weights") {
            spec.routing_weights.clear();
            std::stringstream ss(val);
            std::string item;
            while (std::getline(ss, item, ','))
                spec.routing_weights.push_back(parse_f(trim(item), key));
        } else if (key == "planted_blocks") {
            planted.blocks = static_cast<int>(parse_i(val, key));
            have_planted = true;
        } else if (key == "planted_within_corr") {
            planted.within_corr = parse_f(val, key);
            have_planted = true;
        } else if (key == "planted_between_corr") {
            planted.between_corr = parse_f(val, key);
            have_planted = true;
        } else if (key == "planted_cols_per_block") {
            planted.cols_per_block = static_cast<int>(parse_i(val, key));
            have_planted = true;
        } else if (key == "planted_length") {
            planted.length = static_cast<int>(parse_i(val, key));
            have_planted = true;
        } else {
            throw std::runtime_error(path + ": unknown key " + key);
        }
    }
    if (have_planted) spec.planted = planted;
    spec.validate();
    return spec;
}

}  // namespace mmt
