#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmt/panel.hpp"
#include "mmt/records.hpp"

namespace mmt {

struct PlantedBlockSpec {
    int blocks = 2;
    double within_corr = 0.95;
    double between_corr = 0.0;
    int cols_per_block = 6;
    int length = 2340;
};

struct SynthSpec {
    std::uint64_t seed = 1;
    int symbols = 2;
    Session session = kDefaultSession;
    double quote_rate_hz = 0.7;            // NBBO records per second
    double exchange_quote_rate_hz = 0.25;  // per-exchange records per second
    double trade_rate_hz = 0.35;
    double price_volatility = 4e-5;        // relative mid step per quote event
    double intraday_cap = 0.004;           // |mid / open - 1| clamp
    double base_price_lo = 25.0;
    double base_price_hi = 175.0;
    double spread_mean_ticks = 3.0;        // mean-reverting spread, in cents
    double spread_vol_ticks = 1.0;
    int exchanges = 4;
    std::vector<double> routing_weights;   // empty = uniform; must sum to 1
    double at_quote_fraction = 0.6;        // trades exactly at bid/ask
    // Optional panel-level fixture emitted alongside the day.
    std::optional<PlantedBlockSpec> planted;

    void validate() const;                 // throws std::runtime_error
};

struct SynthPaths {
    std::string trades;
    std::string quotes;
    std::string daily;
};

// Writes trades.csv / quotes.csv / daily.csv under out_dir. Deterministic:
// equal seeds give byte-identical files regardless of thread count (symbols
// are generated from per-symbol seeds and written in symbol order). Quotes
// are never crossed; trades land at or inside the prevailing spread; all
// timestamps sit on the 1 ms grid and strictly increase per symbol.
SynthPaths generate_day(const SynthSpec& spec, const std::string& out_dir);

// Panel with k planted correlation blocks: columns in one block share a
// latent driver with loading sqrt(within_corr) and alternating sign, so
// within-block |corr| ~ within_corr and between-block |corr| ~ between_corr.
// Requires 0 <= between_corr < within_corr <= 1.
MeasurePanel generate_planted_blocks(int k, double within_corr, double between_corr,
                                     int length, std::uint64_t seed = 1,
                                     int cols_per_block = 6);

// key = value file mirroring the SynthSpec fields (see README).
SynthSpec load_synth_spec(const std::string& path);

}  // namespace mmt
