#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mmt/records.hpp"

namespace mmt {

// Row-level problems are counted and reported with line numbers; file-level
// problems (missing file, bad header) throw std::runtime_error.
struct ParseReport {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::vector<std::string> errors;   // "line 12: non-positive price"

    void reject(std::size_t line, const std::string& why);
};

// Trades CSV: timestamp_ns,symbol,price,size,exchange
// Output is stably sorted by (symbol, timestamp): equal timestamps keep
// file order.
std::vector<TradeRecord> parse_trades(const std::string& path, ParseReport* report = nullptr);

// Quotes CSV: timestamp_ns,symbol,bid_price,bid_size,ask_price,ask_size,exchange,is_nbbo
std::vector<QuoteRecord> parse_quotes(const std::string& path, ParseReport* report = nullptr);

// Daily reference CSV: symbol,date,share_volume,ask_high,bid_low
struct DailyRow {
    std::string symbol;
    std::string date;        // ISO yyyy-mm-dd; compared lexicographically
    double share_volume = 0.0;
    double ask_high = 0.0;
    double bid_low = 0.0;
};

std::vector<DailyRow> parse_daily_rows(const std::string& path, ParseReport* report = nullptr);

// adtv = mean share volume, adrv = mean (ask_high - bid_low) over the rows
// that fall in [window_start, window_end]. Rows with ask_high < bid_low are
// rejected. Throws if no usable day remains.
DailyReference compute_daily_reference(const std::string& symbol,
                                       std::span<const DailyRow> rows,
                                       const std::string& window_start,
                                       const std::string& window_end,
                                       ParseReport* report = nullptr);

void write_trades_csv(const std::string& path, std::span<const TradeRecord> records);
void write_quotes_csv(const std::string& path, std::span<const QuoteRecord> records);
void write_daily_csv(const std::string& path, std::span<const DailyRow> rows);

// Keeps records with open <= t < close. For quotes, the last pre-open record
// of each (symbol, stream) is kept in front as the opening prevailing state;
// pre-open trades are dropped outright.
std::vector<TradeRecord> session_clip(std::vector<TradeRecord> records, const Session& session);
std::vector<QuoteRecord> session_clip(std::vector<QuoteRecord> records, const Session& session);

// Shortest round-trip formatting for all decimal output.
std::string format_double(double v);

}  // namespace mmt
