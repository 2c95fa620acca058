#pragma once

// Record builders so hand-written test fixtures read like event tables.

#include <cstdint>
#include <string>
#include <utility>

#include "mmt/classify.hpp"
#include "mmt/records.hpp"

namespace fx {

constexpr mmt::TimestampNs sec(long long s) { return s * mmt::kNsPerSec; }
constexpr mmt::TimestampNs ms(long long m) { return m * mmt::kNsPerMs; }

inline mmt::QuoteRecord quote(mmt::TimestampNs t, double bid, std::int64_t bid_size, double ask,
                              std::int64_t ask_size, char exchange = 'N', bool is_nbbo = true,
                              std::string symbol = "TST") {
    mmt::QuoteRecord q;
    q.timestamp = t;
    q.symbol = std::move(symbol);
    q.bid_price = bid;
    q.bid_size = bid_size;
    q.ask_price = ask;
    q.ask_size = ask_size;
    q.exchange = exchange;
    q.is_nbbo = is_nbbo;
    q.crossed = bid > ask;
    return q;
}

inline mmt::TradeRecord trade(mmt::TimestampNs t, double price, std::int64_t size,
                              char exchange = 'A', std::string symbol = "TST") {
    mmt::TradeRecord r;
    r.timestamp = t;
    r.symbol = std::move(symbol);
    r.price = price;
    r.size = size;
    r.exchange = exchange;
    return r;
}

inline mmt::ClassifiedTrade classified(mmt::TimestampNs t, double price, std::int64_t size,
                                       mmt::Direction dir, char exchange = 'A') {
    mmt::ClassifiedTrade ct;
    ct.trade = trade(t, price, size, exchange);
    ct.direction = dir;
    return ct;
}

}  // namespace fx
