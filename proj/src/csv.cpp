#include "mmt/csv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace mmt {

namespace {

// Splits one CSV line in place; returns false when the field count differs.
// No quoting: the schemas carry no embedded commas.
bool split_fields(const std::string& line, std::size_t n, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(std::string_view(line).substr(start));
            break;
        }
        out.push_back(std::string_view(line).substr(start, comma - start));
        start = comma + 1;
    }
    return out.size() == n;
}

bool parse_i64(std::string_view s, std::int64_t& v) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [p, ec] = std::from_chars(first, last, v);
    return ec == std::errc() && p == last;
}

bool parse_f64(std::string_view s, double& v) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [p, ec] = std::from_chars(first, last, v);
    return ec == std::errc() && p == last && std::isfinite(v);
}

bool parse_bool(std::string_view s, bool& v) {
    if (s == "1" || s == "true") { v = true; return true; }
    if (s == "0" || s == "false") { v = false; return true; }
    return false;
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

// strips a trailing \r so CRLF files parse
void chomp(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

void expect_header(std::ifstream& in, const std::string& want, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file, missing header");
    chomp(line);
    if (line != want)
        throw std::runtime_error(path + ": bad header '" + line + "', expected '" + want + "'");
}

}  // namespace

void ParseReport::reject(std::size_t line, const std::string& why) {
    ++rejected;
    if (errors.size() < 100)   // cap so a rotten file cannot blow up memory
        errors.push_back("line " + std::to_string(line) + ": " + why);
}

std::vector<TradeRecord> parse_trades(const std::string& path, ParseReport* report) {
    auto in = open_or_throw(path);
    expect_header(in, "timestamp_ns,symbol,price,size,exchange", path);
    ParseReport local;
    ParseReport& rep = report ? *report : local;

    std::vector<TradeRecord> out;
    std::vector<std::string_view> f;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        chomp(line);
        if (line.empty()) continue;
        if (!split_fields(line, 5, f)) {
            rep.reject(lineno, "expected 5 fields");
            continue;
        }
        TradeRecord r;
        if (!parse_i64(f[0], r.timestamp)) { rep.reject(lineno, "bad timestamp"); continue; }
        if (f[1].empty()) { rep.reject(lineno, "empty symbol"); continue; }
        r.symbol = std::string(f[1]);
        if (!parse_f64(f[2], r.price) || r.price <= 0.0) {
            rep.reject(lineno, "non-positive price");
            continue;
        }
        if (!parse_i64(f[3], r.size) || r.size <= 0) {
            rep.reject(lineno, "non-positive size");
            continue;
        }
        if (f[4].size() != 1) { rep.reject(lineno, "exchange must be one character"); continue; }
        r.exchange = f[4][0];
        out.push_back(std::move(r));
        ++rep.accepted;
    }
    std::stable_sort(out.begin(), out.end(), [](const TradeRecord& a, const TradeRecord& b) {
        if (a.symbol != b.symbol) return a.symbol < b.symbol;
        return a.timestamp < b.timestamp;
    });
    return out;
}

std::vector<QuoteRecord> parse_quotes(const std::string& path, ParseReport* report) {
    auto in = open_or_throw(path);
    expect_header(in, "timestamp_ns,symbol,bid_price,bid_size,ask_price,ask_size,exchange,is_nbbo",
                  path);
    ParseReport local;
    ParseReport& rep = report ? *report : local;

    std::vector<QuoteRecord> out;
    std::vector<std::string_view> f;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        chomp(line);
        if (line.empty()) continue;
        if (!split_fields(line, 8, f)) {
            rep.reject(lineno, "expected 8 fields");
            continue;
        }
        QuoteRecord r;
        if (!parse_i64(f[0], r.timestamp)) { rep.reject(lineno, "bad timestamp"); continue; }
        if (f[1].empty()) { rep.reject(lineno, "empty symbol"); continue; }
        r.symbol = std::string(f[1]);
        if (!parse_f64(f[2], r.bid_price) || r.bid_price <= 0.0) {
            rep.reject(lineno, "non-positive bid_price");
            continue;
        }
        if (!parse_i64(f[3], r.bid_size) || r.bid_size < 0) {
            rep.reject(lineno, "negative bid_size");
            continue;
        }
        if (!parse_f64(f[4], r.ask_price) || r.ask_price <= 0.0) {
            rep.reject(lineno, "non-positive ask_price");
            continue;
        }
        if (!parse_i64(f[5], r.ask_size) || r.ask_size < 0) {
            rep.reject(lineno, "negative ask_size");
            continue;
        }
        if (f[6].size() != 1) { rep.reject(lineno, "exchange must be one character"); continue; }
        r.exchange = f[6][0];
        if (!parse_bool(f[7], r.is_nbbo)) { rep.reject(lineno, "bad is_nbbo"); continue; }
        r.crossed = r.bid_price > r.ask_price;
        out.push_back(std::move(r));
        ++rep.accepted;
    }
    std::stable_sort(out.begin(), out.end(), [](const QuoteRecord& a, const QuoteRecord& b) {
        if (a.symbol != b.symbol) return a.symbol < b.symbol;
        return a.timestamp < b.timestamp;
    });
    return out;
}

std::vector<DailyRow> parse_daily_rows(const std::string& path, ParseReport* report) {
    auto in = open_or_throw(path);
    expect_header(in, "symbol,date,share_volume,ask_high,bid_low", path);
    ParseReport local;
    ParseReport& rep = report ? *report : local;

    std::vector<DailyRow> out;
    std::vector<std::string_view> f;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        chomp(line);
        if (line.empty()) continue;
        if (!split_fields(line, 5, f)) {
            rep.reject(lineno, "expected 5 fields");
            continue;
        }
        DailyRow r;
        if (f[0].empty()) { rep.reject(lineno, "empty symbol"); continue; }
        r.symbol = std::string(f[0]);
        if (f[1].empty()) { rep.reject(lineno, "empty date"); continue; }
        r.date = std::string(f[1]);
        if (!parse_f64(f[2], r.share_volume) || r.share_volume < 0.0) {
            rep.reject(lineno, "bad share_volume");
            continue;
        }
        if (!parse_f64(f[3], r.ask_high)) { rep.reject(lineno, "bad ask_high"); continue; }
        if (!parse_f64(f[4], r.bid_low)) { rep.reject(lineno, "bad bid_low"); continue; }
        out.push_back(std::move(r));
        ++rep.accepted;
    }
    return out;
}

DailyReference compute_daily_reference(const std::string& symbol,
                                       std::span<const DailyRow> rows,
                                       const std::string& window_start,
                                       const std::string& window_end,
                                       ParseReport* report) {
    ParseReport local;
    ParseReport& rep = report ? *report : local;
    double vol_sum = 0.0, rng_sum = 0.0;
    std::size_t n = 0;
    std::string lo, hi;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.symbol != symbol) continue;
        if (!window_start.empty() && r.date < window_start) continue;
        if (!window_end.empty() && r.date > window_end) continue;
        if (r.ask_high < r.bid_low) {
            rep.reject(i + 1, symbol + " " + r.date + ": ask_high < bid_low");
            continue;
        }
        vol_sum += r.share_volume;
        rng_sum += r.ask_high - r.bid_low;
        if (n == 0 || r.date < lo) lo = r.date;
        if (n == 0 || r.date > hi) hi = r.date;
        ++n;
    }
    if (n == 0) throw std::runtime_error(symbol + ": no reference days");
    DailyReference ref;
    ref.symbol = symbol;
    ref.adtv = vol_sum / static_cast<double>(n);
    ref.adrv = rng_sum / static_cast<double>(n);
    ref.month_start = lo;
    ref.month_end = hi;
    if (ref.adtv <= 0.0) throw std::runtime_error(symbol + ": reference adtv is not positive");
    if (ref.adrv <= 0.0) throw std::runtime_error(symbol + ": reference adrv is not positive");
    return ref;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    std::array<char, 64> buf;
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf.data(), p);
}

namespace {

std::ofstream create_or_throw(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create " + path);
    return out;
}

}  // namespace

void write_trades_csv(const std::string& path, std::span<const TradeRecord> records) {
    auto out = create_or_throw(path);
    out << "timestamp_ns,symbol,price,size,exchange\n";
    for (const auto& r : records) {
        out << r.timestamp << ',' << r.symbol << ',' << format_double(r.price) << ','
            << r.size << ',' << r.exchange << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_quotes_csv(const std::string& path, std::span<const QuoteRecord> records) {
    auto out = create_or_throw(path);
    out << "timestamp_ns,symbol,bid_price,bid_size,ask_price,ask_size,exchange,is_nbbo\n";
    for (const auto& r : records) {
        out << r.timestamp << ',' << r.symbol << ',' << format_double(r.bid_price) << ','
            << r.bid_size << ',' << format_double(r.ask_price) << ',' << r.ask_size << ','
            << r.exchange << ',' << (r.is_nbbo ? 1 : 0) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_daily_csv(const std::string& path, std::span<const DailyRow> rows) {
    auto out = create_or_throw(path);
    out << "symbol,date,share_volume,ask_high,bid_low\n";
    for (const auto& r : rows) {
        out << r.symbol << ',' << r.date << ',' << format_double(r.share_volume) << ','
            << format_double(r.ask_high) << ',' << format_double(r.bid_low) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<TradeRecord> session_clip(std::vector<TradeRecord> records, const Session& session) {
    std::vector<TradeRecord> out;
    out.reserve(records.size());
    for (auto& r : records) {
        if (r.timestamp >= session.open_ns && r.timestamp < session.close_ns)
            out.push_back(std::move(r));
    }
    return out;
}

std::vector<QuoteRecord> session_clip(std::vector<QuoteRecord> records, const Session& session) {
    // The seed stream key distinguishes the NBBO stream from each
    // per-exchange stream so every stream keeps its own opening state.
    auto stream_key = [](const QuoteRecord& r) {
        return std::pair<std::string, int>(r.symbol,
                                           r.is_nbbo ? 256 : static_cast<unsigned char>(r.exchange));
    };
    std::map<std::pair<std::string, int>, QuoteRecord> seeds;
    std::vector<QuoteRecord> kept;
    kept.reserve(records.size());
    for (auto& r : records) {
        if (r.timestamp < session.open_ns) {
            auto key = stream_key(r);
            auto it = seeds.find(key);
            // input is time-sorted per symbol, so later wins
            if (it == seeds.end() || it->second.timestamp <= r.timestamp)
                seeds[key] = std::move(r);
        } else if (r.timestamp < session.close_ns) {
            kept.push_back(std::move(r));
        }
    }
    std::vector<QuoteRecord> out;
    out.reserve(seeds.size() + kept.size());
    for (auto& [key, r] : seeds) out.push_back(std::move(r));
    for (auto& r : kept) out.push_back(std::move(r));
    std::stable_sort(out.begin(), out.end(), [](const QuoteRecord& a, const QuoteRecord& b) {
        if (a.symbol != b.symbol) return a.symbol < b.symbol;
        return a.timestamp < b.timestamp;
    });
    return out;
}

}  // namespace mmt
