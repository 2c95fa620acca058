#include "mmt/classify.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "mmt/csv.hpp"

namespace mmt {

Classifier classifier_from_name(const std::string& name) {
    if (name == "clnv") return Classifier::Clnv;
    if (name == "lr") return Classifier::Lr;
    if (name == "emo") return Classifier::Emo;
    throw std::runtime_error("unknown classifier '" + name + "' (expected clnv, lr or emo)");
}

const char* classifier_name(Classifier c) {
    switch (c) {
        case Classifier::Clnv: return "clnv";
        case Classifier::Lr: return "lr";
        case Classifier::Emo: return "emo";
    }
    return "?";
}

std::vector<ClassifiedTrade> classify_trades(std::span<const TradeRecord> trades,
                                             std::span<const QuoteRecord> nbbo_quotes,
                                             Classifier algo) {
    constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
    std::vector<ClassifiedTrade> out;
    out.reserve(trades.size());

    std::size_t qi = 0;   // first quote with timestamp >= current trade

    // Tick-test state: the direction of the last price change stands in for
    // "compare with the most recent prior trade at a different price".
    bool have_prev = false;
    double prev_price = 0.0;
    Direction last_change = Direction::Unclassified;

    for (const auto& tr : trades) {
        while (qi < nbbo_quotes.size() && nbbo_quotes[qi].timestamp < tr.timestamp) ++qi;
        const QuoteRecord* q = qi > 0 ? &nbbo_quotes[qi - 1] : nullptr;

        ClassifiedTrade ct;
        ct.trade = tr;
        ct.prevailing_bid = q ? q->bid_price : kNan;
        ct.prevailing_ask = q ? q->ask_price : kNan;

        auto tick_test = [&]() {
            ct.rule_used = RuleUsed::TickRule;
            if (!have_prev) return Direction::Unclassified;
            if (tr.price > prev_price) return Direction::Buy;
            if (tr.price < prev_price) return Direction::Sell;
            return last_change;   // zero tick: direction of the last price change
        };

        ct.rule_used = RuleUsed::QuoteRule;
        if (q == nullptr || q->bid_price == q->ask_price) {
            // no prevailing quote, or a locked quote: quote rules are moot
            ct.direction = tick_test();
        } else {
            const double b = q->bid_price;
            const double a = q->ask_price;
            const double s = a - b;
            switch (algo) {
                case Classifier::Clnv:
                    if (tr.price > a || tr.price < b) {
                        ct.direction = tick_test();
                    } else if (tr.price >= a - 0.3 * s) {
                        ct.direction = Direction::Buy;
                    } else if (tr.price <= b + 0.3 * s) {
                        ct.direction = Direction::Sell;
                    } else {
                        ct.direction = tick_test();
                    }
                    break;
                case Classifier::Lr: {
                    const double mid = (a + b) / 2.0;
                    if (tr.price > mid) {
                        ct.direction = Direction::Buy;
                    } else if (tr.price < mid) {
                        ct.direction = Direction::Sell;
                    } else {
                        ct.direction = tick_test();
                    }
                    break;
                }
                case Classifier::Emo:
                    if (tr.price == a) {
                        ct.direction = Direction::Buy;
                    } else if (tr.price == b) {
                        ct.direction = Direction::Sell;
                    } else {
                        ct.direction = tick_test();
                    }
                    break;
            }
        }

        if (have_prev && tr.price != prev_price)
            last_change = tr.price > prev_price ? Direction::Buy : Direction::Sell;
        prev_price = tr.price;
        have_prev = true;

        out.push_back(std::move(ct));
    }
    return out;
}

void write_classified_csv(const std::string& path, std::span<const ClassifiedTrade> trades) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create " + path);
    out << "timestamp_ns,price,direction,rule_used\n";
    for (const auto& ct : trades) {
        const char* dir = ct.direction == Direction::Buy    ? "buy"
                          : ct.direction == Direction::Sell ? "sell"
                                                            : "unclassified";
        const char* rule = ct.rule_used == RuleUsed::QuoteRule ? "quote" : "tick";
        out << ct.trade.timestamp << ',' << format_double(ct.trade.price) << ',' << dir << ','
            << rule << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace mmt
