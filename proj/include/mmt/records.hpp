#pragma once

#include <cstdint>
#include <string>

namespace mmt {

// All event times are integer nanoseconds since session midnight; interval
// arithmetic stays in integers so bucketing never drifts.
using TimestampNs = std::int64_t;

constexpr TimestampNs kNsPerSec = 1'000'000'000LL;
constexpr TimestampNs kNsPerMs = 1'000'000LL;

struct TradeRecord {
    TimestampNs timestamp = 0;
    std::string symbol;
    double price = 0.0;       // dollars, > 0
    std::int64_t size = 0;    // shares, > 0
    char exchange = '?';
};

struct QuoteRecord {
    TimestampNs timestamp = 0;
    std::string symbol;
    double bid_price = 0.0;
    std::int64_t bid_size = 0;   // shares, >= 0
    double ask_price = 0.0;
    std::int64_t ask_size = 0;
    char exchange = '?';
    bool is_nbbo = false;
    // bid > ask is a data artifact; flagged here and kept out of the
    // measure engine. Locked quotes (bid == ask) are legal and retained.
    bool crossed = false;
};

// Per-symbol normalizers from prevailing-month daily data.
struct DailyReference {
    std::string symbol;
    double adtv = 0.0;   // mean daily share volume
    double adrv = 0.0;   // mean daily (ask high - bid low), dollars
    std::string month_start;
    std::string month_end;
};

struct Session {
    TimestampNs open_ns = 0;
    TimestampNs close_ns = 0;   // half-open: [open, close)
};

// Standard US equities session, 09:30:00 - 16:00:00.
constexpr Session kDefaultSession{34'200 * kNsPerSec, 57'600 * kNsPerSec};

constexpr TimestampNs kDefaultIntervalNs = 10 * kNsPerSec;

}  // namespace mmt
