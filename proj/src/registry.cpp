#include "mmt/registry.hpp"

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace mmt {

namespace {

struct Builder {
    Registry reg;

    void add(const std::string& name, Family fam, Aggregation agg, Normalizer norm, Unit unit,
             const std::string& base, const std::string& desc) {
        MeasureDef d;
        d.index = static_cast<int>(reg.size());
        d.name = name;
        d.family = fam;
        d.agg = agg;
        d.normalizer = norm;
        d.unit = unit;
        d.base = base;
        d.description = desc;
        reg.push_back(std::move(d));
    }
};

Registry build_catalog() {
    Builder b;
    using F = Family;
    using A = Aggregation;
    using N = Normalizer;
    using U = Unit;

    // 1: returns
    b.add("return", F::Return, A::LastPrevailing, N::None, U::Ratio, "return",
          "Mid-quote return over the interval, q_t / q_(t-10s) - 1, from last prevailing mids");

    // 2-9: spreads
    b.add("last.bid.ask.spread", F::Spread, A::LastPrevailing, N::None, U::Dollar,
          "last.quoted.spread", "Last prevailing dollar bid-ask spread (ask - bid)");
    b.add("weighted.bid.ask.spread", F::Spread, A::TimeWeighted, N::None, U::Dollar,
          "weighted.quoted.spread", "Time-weighted dollar bid-ask spread");
    b.add("last.prop.bid.ask.spread", F::Spread, A::LastPrevailing, N::SelfNormalized, U::Pct,
          "last.prop.quoted.spread",
          "Last prevailing proportional bid-ask spread, 100*(ask - bid)/mid");
    b.add("weighted.prop.bid.ask.spread", F::Spread, A::TimeWeighted, N::SelfNormalized, U::Pct,
          "weighted.prop.quoted.spread", "Time-weighted proportional bid-ask spread");
    b.add("last.eff.spread", F::Spread, A::LastPrevailing, N::None, U::Dollar, "last.eff.spread",
          "Dollar effective spread 2|price - mid| of the interval's last trade");
    b.add("weighted.eff.spread", F::Spread, A::TimeWeighted, N::None, U::Dollar,
          "weighted.eff.spread",
          "Share-weighted mean dollar effective spread over the interval's trades");
    b.add("last.prop.eff.spread", F::Spread, A::LastPrevailing, N::SelfNormalized, U::Pct,
          "last.eff.spread",
          "Proportional effective spread 100*2|price - mid|/mid of the interval's last trade");
    b.add("weighted.prop.eff.spread", F::Spread, A::TimeWeighted, N::SelfNormalized, U::Pct,
          "weighted.eff.spread",
          "Share-weighted mean proportional effective spread over the interval's trades");

    // 10-13: volatility
    b.add("bid.volatility", F::Volatility, A::Range, N::Adrv, U::Ratio, "bid.volatility",
          "(high - low) of the prevailing bid price over the interval, divided by ADRV");
    b.add("ask.volatility", F::Volatility, A::Range, N::Adrv, U::Ratio, "ask.volatility",
          "(high - low) of the prevailing ask price over the interval, divided by ADRV");
    b.add("mid.quote.volatility", F::Volatility, A::Range, N::Adrv, U::Ratio,
          "mid.quote.volatility",
          "(high - low) of the prevailing mid quote over the interval, divided by ADRV");
    b.add("trade.volatility", F::Volatility, A::Range, N::Adrv, U::Ratio, "trade.volatility",
          "(high - low) of trade prices within the interval, divided by ADRV");

    // 14-21: trade frequency and volume
    b.add("num.trades", F::TradeFreq, A::Count, N::None, U::Count, "num.trades",
          "Number of trades in the interval");
    b.add("avg.time.between.trades", F::TradeFreq, A::AvgGap, N::None, U::Seconds,
          "avg.time.between.trades", "Average time between trades in the interval, seconds");
    b.add("last.trade.dollar", F::TradeVol, A::LastPrevailing, N::None, U::Dollar,
          "last.trade.size", "Dollar size (price*shares) of the last prevailing trade");
    b.add("weighted.trade.dollar", F::TradeVol, A::TimeWeighted, N::None, U::Dollar,
          "weighted.trade.size", "Time-weighted prevailing per-trade dollar size");
    b.add("last.trade.shares", F::TradeVol, A::LastPrevailing, N::None, U::Shares,
          "last.trade.size", "Share size of the last prevailing trade");
    b.add("weighted.trade.shares", F::TradeVol, A::TimeWeighted, N::None, U::Shares,
          "weighted.trade.size", "Time-weighted prevailing per-trade share size");
    b.add("last.trade.shares.norm", F::TradeVol, A::LastPrevailing, N::Adtv, U::Ratio,
          "last.trade.size", "Share size of the last prevailing trade, divided by ADTV");
    b.add("weighted.trade.shares.norm", F::TradeVol, A::TimeWeighted, N::Adtv, U::Ratio,
          "weighted.trade.size", "Time-weighted prevailing per-trade share size, divided by ADTV");

    // 22-27: trade imbalance
    b.add("directional.num.buy.sell", F::TradeImbalance, A::Count, N::SelfNormalized, U::Ratio,
          "num.buy.sell", "(buys - sells)/(buys + sells) over classified trades in the interval");
    b.add("undirectional.num.buy.sell", F::TradeImbalance, A::Count, N::SelfNormalized, U::Ratio,
          "num.buy.sell", "|buys - sells|/(buys + sells) over classified trades in the interval");
    b.add("directional.last.buy.sell.vol", F::TradeImbalance, A::LastPrevailing,
          N::SelfNormalized, U::Ratio, "last.buy.sell.vol",
          "(x - y)/(x + y) of last prevailing buy and sell share sizes");
    b.add("undirectional.last.buy.sell.vol", F::TradeImbalance, A::LastPrevailing,
          N::SelfNormalized, U::Ratio, "last.buy.sell.vol",
          "|x - y|/(x + y) of last prevailing buy and sell share sizes");
    b.add("directional.weighted.buy.sell.vol", F::TradeImbalance, A::TimeWeighted,
          N::SelfNormalized, U::Ratio, "weighted.buy.sell.vol",
          "(x - y)/(x + y) of time-weighted buy and sell share sizes");
    b.add("undirectional.weighted.buy.sell.vol", F::TradeImbalance, A::TimeWeighted,
          N::SelfNormalized, U::Ratio, "weighted.buy.sell.vol",
          "|x - y|/(x + y) of time-weighted buy and sell share sizes");

    // 28-33: quote frequency
    b.add("num.records", F::QuoteFreq, A::Count, N::None, U::Count, "num.records",
          "Number of NBBO quote records in the interval");
    b.add("num.bid.changes", F::QuoteFreq, A::Count, N::None, U::Count, "num.bid.changes",
          "Number of NBBO records whose bid price differs from the preceding prevailing bid");
    b.add("num.ask.changes", F::QuoteFreq, A::Count, N::None, U::Count, "num.ask.changes",
          "Number of NBBO records whose ask price differs from the preceding prevailing ask");
    b.add("avg.time.between.records", F::QuoteFreq, A::AvgGap, N::None, U::Seconds,
          "avg.time.between.records", "Average time between quote records, seconds");
    b.add("avg.time.between.bid.changes", F::QuoteFreq, A::AvgGap, N::None, U::Seconds,
          "avg.time.between.bid.changes", "Average time between bid-price changes, seconds");
    b.add("avg.time.between.ask.changes", F::QuoteFreq, A::AvgGap, N::None, U::Seconds,
          "avg.time.between.ask.changes", "Average time between ask-price changes, seconds");

    // 34-57: depth, {last,weighted} x {ask,bid,diff,abs.diff} x {dollar,shares,shares.norm}
    struct Side {
        const char* stem;
        const char* text;
    };
    const Side sides[] = {{"ask", "ask depth"},
                          {"bid", "bid depth"},
                          {"diff", "depth difference (ask - bid)"},
                          {"abs.diff", "absolute depth difference |ask - bid|"}};
    for (const auto& side : sides) {
        for (const char* when : {"last", "weighted"}) {
            const bool last = std::string(when) == "last";
            const std::string prefix = std::string(when) + "." + side.stem;
            const std::string base = prefix + ".depth";
            const std::string how = last ? "Last prevailing " : "Time-weighted ";
            const A agg = last ? A::LastPrevailing : A::TimeWeighted;
            b.add(prefix + ".dollar", F::Depth, agg, N::None, U::Dollar, base,
                  how + side.text + " in dollars (price*shares)");
            b.add(prefix + ".shares", F::Depth, agg, N::None, U::Shares, base,
                  how + side.text + " in shares");
            b.add(prefix + ".shares.norm", F::Depth, agg, N::Adtv, U::Ratio, base,
                  how + side.text + " in shares, divided by ADTV");
        }
    }

    // 58-65: quote imbalance
    b.add("directional.num.bid.ask.changes", F::QuoteImbalance, A::Count, N::SelfNormalized,
          U::Ratio, "num.bid.ask.changes",
          "(ask changes - bid changes)/(ask changes + bid changes) in the interval");
    b.add("undirectional.num.bid.ask.changes", F::QuoteImbalance, A::Count, N::SelfNormalized,
          U::Ratio, "num.bid.ask.changes",
          "|ask changes - bid changes|/(ask changes + bid changes) in the interval");
    b.add("directional.last.ask.bid.shares", F::QuoteImbalance, A::LastPrevailing,
          N::SelfNormalized, U::Ratio, "last.ask.bid.shares",
          "(ask - bid)/(ask + bid) of last prevailing NBBO share depths");
    b.add("undirectional.last.ask.bid.shares", F::QuoteImbalance, A::LastPrevailing,
          N::SelfNormalized, U::Ratio, "last.ask.bid.shares",
          "|ask - bid|/(ask + bid) of last prevailing NBBO share depths");
    b.add("directional.weighted.ask.bid.shares", F::QuoteImbalance, A::TimeWeighted,
          N::SelfNormalized, U::Ratio, "weighted.ask.bid.shares",
          "(ask - bid)/(ask + bid) of time-weighted NBBO share depths");
    b.add("undirectional.weighted.ask.bid.shares", F::QuoteImbalance, A::TimeWeighted,
          N::SelfNormalized, U::Ratio, "weighted.ask.bid.shares",
          "|ask - bid|/(ask + bid) of time-weighted NBBO share depths");
    b.add("directional.int.frac.ask.bid.shares", F::QuoteImbalance, A::Integral,
          N::SelfNormalized, U::Ratio, "int.frac.ask.bid.shares",
          "Time average of the instantaneous depth fraction (ask - bid)/(ask + bid)");
    b.add("undirectional.int.frac.ask.bid.shares", F::QuoteImbalance, A::Integral,
          N::SelfNormalized, U::Ratio, "int.frac.ask.bid.shares",
          "Absolute value of the time-averaged depth fraction");

    // 66-91: exchange concentration (HHI of per-exchange fractions)
    auto hhi = [&](const std::string& name, A agg, U unit, const std::string& base,
                   const std::string& what) {
        b.add(name, F::Hhi, agg, N::SelfNormalized, unit, base,
              "HHI (sum of squared per-exchange fractions) of " + what);
    };
    hhi("HHI.num.trades", A::Count, U::Ratio, "hhi.num.trades", "trade counts");
    hhi("HHI.num.buys", A::Count, U::Ratio, "hhi.num.buys", "buy-trade counts");
    hhi("HHI.num.sells", A::Count, U::Ratio, "hhi.num.sells", "sell-trade counts");
    hhi("HHI.last.trade.shares", A::LastPrevailing, U::Shares, "hhi.last.trade.size",
        "last prevailing per-trade share sizes");
    hhi("HHI.weighted.trade.shares", A::TimeWeighted, U::Shares, "hhi.weighted.trade.size",
        "time-weighted per-trade share sizes");
    hhi("HHI.last.trade.dollar", A::LastPrevailing, U::Dollar, "hhi.last.trade.size",
        "last prevailing per-trade dollar sizes");
    hhi("HHI.weighted.trade.dollar", A::TimeWeighted, U::Dollar, "hhi.weighted.trade.size",
        "time-weighted per-trade dollar sizes");
    hhi("HHI.last.buy.shares", A::LastPrevailing, U::Shares, "hhi.last.buy.size",
        "last prevailing buy share sizes");
    hhi("HHI.weighted.buy.shares", A::TimeWeighted, U::Shares, "hhi.weighted.buy.size",
        "time-weighted buy share sizes");
    hhi("HHI.last.sell.shares", A::LastPrevailing, U::Shares, "hhi.last.sell.size",
        "last prevailing sell share sizes");
    hhi("HHI.weighted.sell.shares", A::TimeWeighted, U::Shares, "hhi.weighted.sell.size",
        "time-weighted sell share sizes");
    hhi("HHI.last.buy.dollar", A::LastPrevailing, U::Dollar, "hhi.last.buy.size",
        "last prevailing buy dollar sizes");
    hhi("HHI.weighted.buy.dollar", A::TimeWeighted, U::Dollar, "hhi.weighted.buy.size",
        "time-weighted buy dollar sizes");
    hhi("HHI.last.sell.dollar", A::LastPrevailing, U::Dollar, "hhi.last.sell.size",
        "last prevailing sell dollar sizes");
    hhi("HHI.weighted.sell.dollar", A::TimeWeighted, U::Dollar, "hhi.weighted.sell.size",
        "time-weighted sell dollar sizes");
    hhi("HHI.num.records", A::Count, U::Ratio, "hhi.num.records", "quote record counts");
    hhi("HHI.bid.change.count", A::Count, U::Ratio, "hhi.bid.change.count",
        "bid-price change counts");
    hhi("HHI.ask.change.count", A::Count, U::Ratio, "hhi.ask.change.count",
        "ask-price change counts");
    hhi("HHI.last.bid.shares", A::LastPrevailing, U::Shares, "hhi.last.bid.depth",
        "last prevailing bid share depths");
    hhi("HHI.weighted.bid.shares", A::TimeWeighted, U::Shares, "hhi.weighted.bid.depth",
        "time-weighted bid share depths");
    hhi("HHI.last.ask.shares", A::LastPrevailing, U::Shares, "hhi.last.ask.depth",
        "last prevailing ask share depths");
    hhi("HHI.weighted.ask.shares", A::TimeWeighted, U::Shares, "hhi.weighted.ask.depth",
        "time-weighted ask share depths");
    hhi("HHI.last.bid.dollar", A::LastPrevailing, U::Dollar, "hhi.last.bid.depth",
        "last prevailing bid dollar depths");
    hhi("HHI.weighted.bid.dollar", A::TimeWeighted, U::Dollar, "hhi.weighted.bid.depth",
        "time-weighted bid dollar depths");
    hhi("HHI.last.ask.dollar", A::LastPrevailing, U::Dollar, "hhi.last.ask.depth",
        "last prevailing ask dollar depths");
    hhi("HHI.weighted.ask.dollar", A::TimeWeighted, U::Dollar, "hhi.weighted.ask.depth",
        "time-weighted ask dollar depths");

    if (static_cast<int>(b.reg.size()) != kFullCatalogSize)
        throw std::logic_error("catalog size mismatch");
    std::unordered_set<std::string> names;
    for (const auto& m : b.reg) {
        if (!names.insert(m.name).second) throw std::logic_error("duplicate measure " + m.name);
    }
    return b.reg;
}

}  // namespace

const Registry& full_catalog() {
    static const Registry catalog = build_catalog();
    return catalog;
}

Registry reduce_registry(const Registry& reg) {
    // Group membership is keyed by `base`; the three rules are evaluated
    // against the incoming registry, then applied as one filter pass so the
    // reduction is order-preserving and idempotent.
    std::unordered_map<std::string, unsigned> group_units;   // bitmask per base
    std::unordered_map<std::string, unsigned> group_norms;
    auto unit_bit = [](Unit u) { return 1u << static_cast<unsigned>(u); };
    auto norm_bit = [](Normalizer n) { return 1u << static_cast<unsigned>(n); };
    for (const auto& m : reg) {
        group_units[m.base] |= unit_bit(m.unit);
        group_norms[m.base] |= norm_bit(m.normalizer);
    }

    Registry out;
    for (const auto& m : reg) {
        const unsigned units = group_units[m.base];
        const unsigned norms = group_norms[m.base];
        // 1. dollar measure with a share twin of the same base
        if (m.unit == Unit::Dollar && (units & unit_bit(Unit::Shares))) continue;
        // 2. dollar effective spread with a proportional twin
        if (m.family == Family::Spread && m.unit == Unit::Dollar && (units & unit_bit(Unit::Pct)))
            continue;
        // 3. non-normalized measure with an ADTV-normalized twin
        if (m.unit == Unit::Shares && m.normalizer == Normalizer::None &&
            (norms & norm_bit(Normalizer::Adtv)))
            continue;
        out.push_back(m);
    }
    return out;
}

Registry registry_from_names(const std::vector<std::string>& names) {
    const Registry& catalog = full_catalog();
    std::unordered_map<std::string, const MeasureDef*> by_name;
    for (const auto& m : catalog) by_name[m.name] = &m;
    Registry out;
    std::unordered_set<std::string> seen;
    for (const auto& name : names) {
        auto it = by_name.find(name);
        if (it == by_name.end()) throw std::runtime_error("unknown measure '" + name + "'");
        if (!seen.insert(name).second)
            throw std::runtime_error("duplicate measure '" + name + "'");
        out.push_back(*it->second);
    }
    return out;
}

const MeasureDef* find_measure(const Registry& reg, const std::string& name) {
    for (const auto& m : reg)
        if (m.name == name) return &m;
    return nullptr;
}

}  // namespace mmt
