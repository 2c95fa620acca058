#pragma once

#include <span>
#include <string>
#include <vector>

#include "mmt/records.hpp"

namespace mmt {

enum class Direction { Buy, Sell, Unclassified };
enum class RuleUsed { QuoteRule, TickRule };

struct ClassifiedTrade {
    TradeRecord trade;
    Direction direction = Direction::Unclassified;
    RuleUsed rule_used = RuleUsed::TickRule;
    // NaN when no quote prevailed at the trade.
    double prevailing_bid = 0.0;
    double prevailing_ask = 0.0;
};

enum class Classifier { Clnv, Lr, Emo };

Classifier classifier_from_name(const std::string& name);   // throws on unknown
const char* classifier_name(Classifier c);

// Single-symbol streams, both time-sorted; quotes must be the uncrossed NBBO
// stream. The prevailing quote for classification is the last quote strictly
// before the trade (no same-timestamp lookahead).
//
//   CLNV: price within the top 30% of [bid, ask] -> Buy, bottom 30% -> Sell
//         (bands closed at bid + 0.3*spread and ask - 0.3*spread); the middle
//         40% and trades outside the quote fall to the tick test.
//   LR:   above mid -> Buy, below mid -> Sell, at mid -> tick test.
//   EMO:  exactly at ask -> Buy, exactly at bid -> Sell, else tick test.
//
// Locked quotes (bid == ask) make the quote rules ambiguous at that price, so
// all three algorithms fall to the tick test there. The tick test compares
// against the most recent prior trade at a different price; with no such
// trade the direction is Unclassified.
std::vector<ClassifiedTrade> classify_trades(std::span<const TradeRecord> trades,
                                             std::span<const QuoteRecord> nbbo_quotes,
                                             Classifier algo);

inline std::vector<ClassifiedTrade> classify_clnv(std::span<const TradeRecord> t,
                                                  std::span<const QuoteRecord> q) {
    return classify_trades(t, q, Classifier::Clnv);
}
inline std::vector<ClassifiedTrade> classify_lr(std::span<const TradeRecord> t,
                                                std::span<const QuoteRecord> q) {
    return classify_trades(t, q, Classifier::Lr);
}
inline std::vector<ClassifiedTrade> classify_emo(std::span<const TradeRecord> t,
                                                 std::span<const QuoteRecord> q) {
    return classify_trades(t, q, Classifier::Emo);
}

// Debug dump: timestamp_ns,price,direction,rule_used
void write_classified_csv(const std::string& path, std::span<const ClassifiedTrade> trades);

}  // namespace mmt
