#pragma once

// Independent single-cell recomputation of every measure in the catalog,
// written with plain loops over the raw records (no StepSeries, no shared
// helpers with the engine). Used to cross-check panel cells one at a time.
//
// Two integration modes for the time-weighted aggregations:
//   Exact    — piecewise-constant segment integration (closed form)
//   Riemann  — left-endpoint 1-ms Riemann sum
// Both renormalize by the covered (defined) time inside the window, matching
// the engine's documented semantics.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mmt/panel.hpp"
#include "mmt/records.hpp"

namespace oracle {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class TwMode { Exact, Riemann };

struct Pt {
    mmt::TimestampNs t;
    double v;
};

// Append honoring "equal timestamps overwrite" (the engine collapses
// duplicate change-point timestamps the same way).
inline void put(std::vector<Pt>& s, mmt::TimestampNs t, double v) {
    if (!s.empty() && s.back().t == t) {
        s.back().v = v;
    } else {
        s.push_back({t, v});
    }
}

// value of the step path strictly before t; NaN when nothing prevails
inline double before(const std::vector<Pt>& s, mmt::TimestampNs t) {
    double v = kNaN;
    for (const auto& p : s) {
        if (p.t < t) v = p.v; else break;
    }
    return v;
}

// value at or before t
inline double at_or_before(const std::vector<Pt>& s, mmt::TimestampNs t) {
    double v = kNaN;
    for (const auto& p : s) {
        if (p.t <= t) v = p.v; else break;
    }
    return v;
}

// time average over [t0, t1), renormalized over the sub-span where the path
// is defined (points with NaN value mark undefined stretches)
inline double tw_exact(const std::vector<Pt>& s, mmt::TimestampNs t0, mmt::TimestampNs t1) {
    double integral = 0.0;
    double covered = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const mmt::TimestampNs seg_lo = std::max(s[i].t, t0);
        const mmt::TimestampNs seg_hi =
            std::min(i + 1 < s.size() ? s[i + 1].t : t1, t1);
        if (seg_hi <= seg_lo || std::isnan(s[i].v)) continue;
        const double dt = static_cast<double>(seg_hi - seg_lo);
        integral += s[i].v * dt;
        covered += dt;
    }
    if (covered <= 0.0) return kNaN;
    return integral / covered;
}

inline double tw_riemann(const std::vector<Pt>& s, mmt::TimestampNs t0, mmt::TimestampNs t1) {
    double sum = 0.0;
    std::int64_t defined = 0;
    std::size_t i = 0;
    for (mmt::TimestampNs t = t0; t < t1; t += mmt::kNsPerMs) {
        while (i < s.size() && s[i].t <= t) ++i;   // i = first point after t
        if (i == 0) continue;                      // nothing prevails yet
        const double v = s[i - 1].v;
        if (std::isnan(v)) continue;
        sum += v;
        ++defined;
    }
    if (defined == 0) return kNaN;
    return sum / static_cast<double>(defined);
}

inline double tw(const std::vector<Pt>& s, mmt::TimestampNs t0, mmt::TimestampNs t1, TwMode mode) {
    return mode == TwMode::Exact ? tw_exact(s, t0, t1) : tw_riemann(s, t0, t1);
}

// min/max of the path over [t0, t1) including the carried-in value
inline bool path_range(const std::vector<Pt>& s, mmt::TimestampNs t0, mmt::TimestampNs t1,
                       double& lo, double& hi) {
    bool any = false;
    const double carry = at_or_before(s, t0);
    auto take = [&](double v) {
        if (std::isnan(v)) return;
        if (!any) { lo = hi = v; any = true; return; }
        if (v < lo) lo = v;
        if (v > hi) hi = v;
    };
    take(carry);
    for (const auto& p : s) {
        if (p.t > t0 && p.t < t1) take(p.v);
    }
    return any;
}

// Everything the brute-force recomputation needs, precomputed once per
// SymbolData with plain passes so individual cell queries stay simple.
struct CellContext {
    const mmt::SymbolData* sd = nullptr;

    // NBBO-derived step paths
    std::vector<Pt> bid, ask, mid, spr_d, spr_p;
    std::vector<Pt> bid_sz, ask_sz, bid_dol, ask_dol;
    std::vector<Pt> diff_sz, adiff_sz, diff_dol, adiff_dol, imb_sz;
    std::vector<mmt::TimestampNs> nbbo_times;          // in-session record times
    std::vector<mmt::TimestampNs> bid_chg, ask_chg;    // change-record times

    // trade-derived step paths
    std::vector<Pt> tr_sh, tr_dol, buy_sh, sell_sh, buy_dol, sell_dol;

    // per-exchange paths for the HHI bases
    struct Exch {
        char id = '?';
        std::vector<Pt> bid_sz, ask_sz, bid_dol, ask_dol;
        std::vector<mmt::TimestampNs> rec_times, bid_chg, ask_chg;
        std::vector<Pt> tr_sh, tr_dol, buy_sh, sell_sh, buy_dol, sell_dol;
        std::vector<mmt::TimestampNs> trade_times, buy_times, sell_times;
    };
    std::vector<Exch> exch;

    bool zero_events = false;

    explicit CellContext(const mmt::SymbolData& data, const mmt::Session& session)
        : sd(&data) {
        std::size_t exch_records = 0;
        for (const auto& [e, recs] : data.by_exchange) exch_records += recs.size();
        zero_events = data.nbbo.empty() && data.trades.empty() && exch_records == 0;

        double prev_bid = kNaN, prev_ask = kNaN;
        for (const auto& q : data.nbbo) {
            const double m = (q.bid_price + q.ask_price) / 2.0;
            const double s = q.ask_price - q.bid_price;
            put(bid, q.timestamp, q.bid_price);
            put(ask, q.timestamp, q.ask_price);
            put(mid, q.timestamp, m);
            put(spr_d, q.timestamp, s);
            put(spr_p, q.timestamp, 100.0 * s / m);
            const double bs = static_cast<double>(q.bid_size);
            const double as = static_cast<double>(q.ask_size);
            put(bid_sz, q.timestamp, bs);
            put(ask_sz, q.timestamp, as);
            put(bid_dol, q.timestamp, bs * q.bid_price);
            put(ask_dol, q.timestamp, as * q.ask_price);
            put(diff_sz, q.timestamp, as - bs);
            put(adiff_sz, q.timestamp, std::fabs(as - bs));
            put(diff_dol, q.timestamp, as * q.ask_price - bs * q.bid_price);
            put(adiff_dol, q.timestamp, std::fabs(as * q.ask_price - bs * q.bid_price));
            put(imb_sz, q.timestamp, as + bs > 0.0 ? (as - bs) / (as + bs) : kNaN);
            if (q.timestamp >= session.open_ns) {
                nbbo_times.push_back(q.timestamp);
                if (!std::isnan(prev_bid) && q.bid_price != prev_bid) bid_chg.push_back(q.timestamp);
                if (!std::isnan(prev_ask) && q.ask_price != prev_ask) ask_chg.push_back(q.timestamp);
            } else {
                // pre-open seed records establish the prevailing values but
                // are not themselves records or changes
            }
            prev_bid = q.bid_price;
            prev_ask = q.ask_price;
        }

        for (const auto& ct : data.trades) {
            const auto& t = ct.trade;
            const double sh = static_cast<double>(t.size);
            put(tr_sh, t.timestamp, sh);
            put(tr_dol, t.timestamp, sh * t.price);
            if (ct.direction == mmt::Direction::Buy) {
                put(buy_sh, t.timestamp, sh);
                put(buy_dol, t.timestamp, sh * t.price);
            } else if (ct.direction == mmt::Direction::Sell) {
                put(sell_sh, t.timestamp, sh);
                put(sell_dol, t.timestamp, sh * t.price);
            }
        }

        for (const auto& [e, recs] : data.by_exchange) {
            Exch ex;
            ex.id = e;
            double pb = kNaN, pa = kNaN;
            for (const auto& q : recs) {
                const double bs = static_cast<double>(q.bid_size);
                const double as = static_cast<double>(q.ask_size);
                put(ex.bid_sz, q.timestamp, bs);
                put(ex.ask_sz, q.timestamp, as);
                put(ex.bid_dol, q.timestamp, bs * q.bid_price);
                put(ex.ask_dol, q.timestamp, as * q.ask_price);
                if (q.timestamp >= session.open_ns) {
                    ex.rec_times.push_back(q.timestamp);
                    if (!std::isnan(pb) && q.bid_price != pb) ex.bid_chg.push_back(q.timestamp);
                    if (!std::isnan(pa) && q.ask_price != pa) ex.ask_chg.push_back(q.timestamp);
                }
                pb = q.bid_price;
                pa = q.ask_price;
            }
            exch.push_back(std::move(ex));
        }
        auto find_exch = [&](char e) -> Exch& {
            for (auto& ex : exch)
                if (ex.id == e) return ex;
            exch.push_back(Exch{});
            exch.back().id = e;
            return exch.back();
        };
        for (const auto& ct : data.trades) {
            const auto& t = ct.trade;
            Exch& ex = find_exch(t.exchange);
            const double sh = static_cast<double>(t.size);
            ex.trade_times.push_back(t.timestamp);
            put(ex.tr_sh, t.timestamp, sh);
            put(ex.tr_dol, t.timestamp, sh * t.price);
            if (ct.direction == mmt::Direction::Buy) {
                ex.buy_times.push_back(t.timestamp);
                put(ex.buy_sh, t.timestamp, sh);
                put(ex.buy_dol, t.timestamp, sh * t.price);
            } else if (ct.direction == mmt::Direction::Sell) {
                ex.sell_times.push_back(t.timestamp);
                put(ex.sell_sh, t.timestamp, sh);
                put(ex.sell_dol, t.timestamp, sh * t.price);
            }
        }
    }
};

inline std::int64_t count_in(const std::vector<mmt::TimestampNs>& ts,
                             mmt::TimestampNs t0, mmt::TimestampNs t1) {
    std::int64_t n = 0;
    for (auto t : ts)
        if (t >= t0 && t < t1) ++n;
    return n;
}

// (last - first)/(k-1) in seconds over events inside the window
inline double avg_gap(const std::vector<mmt::TimestampNs>& ts,
                      mmt::TimestampNs t0, mmt::TimestampNs t1) {
    mmt::TimestampNs first = 0, last = 0;
    std::int64_t k = 0;
    for (auto t : ts) {
        if (t < t0 || t >= t1) continue;
        if (k == 0) first = t;
        last = t;
        ++k;
    }
    if (k < 2) return kNaN;
    return static_cast<double>(last - first) / static_cast<double>(k - 1) / 1e9;
}

inline double hhi_of(const std::vector<double>& contributions, int* n_active = nullptr) {
    double total = 0.0;
    int n = 0;
    for (double q : contributions) {
        if (std::isnan(q)) continue;
        total += q;
        ++n;
    }
    if (n_active) *n_active = n;
    if (n == 0 || total <= 0.0) return kNaN;
    double h = 0.0;
    for (double q : contributions) {
        if (std::isnan(q)) continue;
        const double f = q / total;
        h += f * f;
    }
    return h;
}

// Recompute one (measure, interval) cell from scratch. T/E are the window
// bounds; `mode` selects the integration scheme for time-weighted parts.
inline double cell(const CellContext& c, const std::string& name,
                   mmt::TimestampNs T, mmt::TimestampNs E, TwMode mode = TwMode::Exact) {
    if (c.zero_events) return kNaN;
    const mmt::SymbolData& sd = *c.sd;
    const bool ref = sd.has_ref;
    const double adtv = ref ? sd.ref.adtv : kNaN;
    const double adrv = ref ? sd.ref.adrv : kNaN;
    const double trade_norm = sd.trade_norm == mmt::Normalizer::Adrv ? adrv : adtv;

    auto vol_of = [&](const std::vector<Pt>& s) {
        double lo, hi;
        if (!ref || !path_range(s, T, E, lo, hi)) return kNaN;
        return (hi - lo) / adrv;
    };
    auto imb = [](double x, double y) {
        if (std::isnan(x) || std::isnan(y) || x + y == 0.0) return kNaN;
        return (x - y) / (x + y);
    };

    if (name == "return") {
        const double q1 = before(c.mid, E);
        const double q0 = before(c.mid, T);
        if (std::isnan(q0) || std::isnan(q1)) return kNaN;
        return q1 / q0 - 1.0;
    }
    if (name == "last.bid.ask.spread") return before(c.spr_d, E);
    if (name == "weighted.bid.ask.spread") return tw(c.spr_d, T, E, mode);
    if (name == "last.prop.bid.ask.spread") return before(c.spr_p, E);
    if (name == "weighted.prop.bid.ask.spread") return tw(c.spr_p, T, E, mode);

    if (name == "last.eff.spread" || name == "weighted.eff.spread" ||
        name == "last.prop.eff.spread" || name == "weighted.prop.eff.spread") {
        const bool prop = name.find("prop") != std::string::npos;
        const bool last = name.rfind("last", 0) == 0;
        double last_val = kNaN, wsum = 0.0, shares = 0.0;
        for (const auto& ct : sd.trades) {
            const auto& t = ct.trade;
            if (t.timestamp < T || t.timestamp >= E) continue;
            const double m = at_or_before(c.mid, t.timestamp);
            if (std::isnan(m)) continue;
            double eff = 2.0 * std::fabs(t.price - m);
            if (prop) eff = 100.0 * eff / m;
            last_val = eff;
            wsum += static_cast<double>(t.size) * eff;
            shares += static_cast<double>(t.size);
        }
        if (last) return last_val;
        return shares > 0.0 ? wsum / shares : kNaN;
    }

    if (name == "bid.volatility") return vol_of(c.bid);
    if (name == "ask.volatility") return vol_of(c.ask);
    if (name == "mid.quote.volatility") return vol_of(c.mid);
    if (name == "trade.volatility") {
        if (!ref) return kNaN;
        double lo = 0.0, hi = 0.0;
        bool any = false;
        for (const auto& ct : sd.trades) {
            const auto t = ct.trade.timestamp;
            if (t < T || t >= E) continue;
            const double p = ct.trade.price;
            if (!any) { lo = hi = p; any = true; continue; }
            if (p < lo) lo = p;
            if (p > hi) hi = p;
        }
        return any ? (hi - lo) / adrv : kNaN;
    }

    if (name == "num.trades" || name == "avg.time.between.trades" ||
        name == "directional.num.buy.sell" || name == "undirectional.num.buy.sell") {
        std::vector<mmt::TimestampNs> times;
        std::int64_t buys = 0, sells = 0;
        for (const auto& ct : sd.trades) {
            const auto t = ct.trade.timestamp;
            if (t < T || t >= E) continue;
            times.push_back(t);
            if (ct.direction == mmt::Direction::Buy) ++buys;
            if (ct.direction == mmt::Direction::Sell) ++sells;
        }
        if (name == "num.trades") return static_cast<double>(times.size());
        if (name == "avg.time.between.trades") return avg_gap(times, T, E);
        const double v = imb(static_cast<double>(buys), static_cast<double>(sells));
        return name.rfind("un", 0) == 0 ? std::fabs(v) : v;
    }

    if (name == "last.trade.dollar") return before(c.tr_dol, E);
    if (name == "weighted.trade.dollar") return tw(c.tr_dol, T, E, mode);
    if (name == "last.trade.shares") return before(c.tr_sh, E);
    if (name == "weighted.trade.shares") return tw(c.tr_sh, T, E, mode);
    if (name == "last.trade.shares.norm") return ref ? before(c.tr_sh, E) / trade_norm : kNaN;
    if (name == "weighted.trade.shares.norm")
        return ref ? tw(c.tr_sh, T, E, mode) / trade_norm : kNaN;

    if (name == "directional.last.buy.sell.vol")
        return imb(before(c.buy_sh, E), before(c.sell_sh, E));
    if (name == "undirectional.last.buy.sell.vol")
        return std::fabs(imb(before(c.buy_sh, E), before(c.sell_sh, E)));
    if (name == "directional.weighted.buy.sell.vol")
        return imb(tw(c.buy_sh, T, E, mode), tw(c.sell_sh, T, E, mode));
    if (name == "undirectional.weighted.buy.sell.vol")
        return std::fabs(imb(tw(c.buy_sh, T, E, mode), tw(c.sell_sh, T, E, mode)));

    if (name == "num.records") return static_cast<double>(count_in(c.nbbo_times, T, E));
    if (name == "num.bid.changes") return static_cast<double>(count_in(c.bid_chg, T, E));
    if (name == "num.ask.changes") return static_cast<double>(count_in(c.ask_chg, T, E));
    if (name == "avg.time.between.records") return avg_gap(c.nbbo_times, T, E);
    if (name == "avg.time.between.bid.changes") return avg_gap(c.bid_chg, T, E);
    if (name == "avg.time.between.ask.changes") return avg_gap(c.ask_chg, T, E);

    // depth family: {last,weighted}.{ask,bid,diff,abs.diff}.{dollar,shares,shares.norm}
    {
        const std::vector<Pt>* base = nullptr;
        bool norm = false;
        auto pick = [&](const std::string& stem, const std::vector<Pt>& dol,
                        const std::vector<Pt>& sh) {
            if (name == "last." + stem + ".dollar" || name == "weighted." + stem + ".dollar")
                base = &dol;
            else if (name == "last." + stem + ".shares" || name == "weighted." + stem + ".shares")
                base = &sh;
            else if (name == "last." + stem + ".shares.norm" ||
                     name == "weighted." + stem + ".shares.norm") {
                base = &sh;
                norm = true;
            }
        };
        pick("ask", c.ask_dol, c.ask_sz);
        pick("bid", c.bid_dol, c.bid_sz);
        pick("diff", c.diff_dol, c.diff_sz);
        pick("abs.diff", c.adiff_dol, c.adiff_sz);
        if (base) {
            const double v = name.rfind("last", 0) == 0 ? before(*base, E) : tw(*base, T, E, mode);
            if (!norm) return v;
            return ref ? v / adtv : kNaN;
        }
    }

    if (name == "directional.num.bid.ask.changes" || name == "undirectional.num.bid.ask.changes") {
        const double v = imb(static_cast<double>(count_in(c.ask_chg, T, E)),
                             static_cast<double>(count_in(c.bid_chg, T, E)));
        return name.rfind("un", 0) == 0 ? std::fabs(v) : v;
    }
    if (name == "directional.last.ask.bid.shares")
        return imb(before(c.ask_sz, E), before(c.bid_sz, E));
    if (name == "undirectional.last.ask.bid.shares")
        return std::fabs(imb(before(c.ask_sz, E), before(c.bid_sz, E)));
    if (name == "directional.weighted.ask.bid.shares")
        return imb(tw(c.ask_sz, T, E, mode), tw(c.bid_sz, T, E, mode));
    if (name == "undirectional.weighted.ask.bid.shares")
        return std::fabs(imb(tw(c.ask_sz, T, E, mode), tw(c.bid_sz, T, E, mode)));
    if (name == "directional.int.frac.ask.bid.shares") return tw(c.imb_sz, T, E, mode);
    if (name == "undirectional.int.frac.ask.bid.shares")
        return std::fabs(tw(c.imb_sz, T, E, mode));

    if (name.rfind("HHI.", 0) == 0) {
        std::vector<double> q;
        for (const auto& ex : c.exch) {
            double v = kNaN;
            if (name == "HHI.num.trades") {
                const auto n = count_in(ex.trade_times, T, E);
                v = n > 0 ? static_cast<double>(n) : kNaN;
            } else if (name == "HHI.num.buys") {
                const auto n = count_in(ex.buy_times, T, E);
                v = n > 0 ? static_cast<double>(n) : kNaN;
            } else if (name == "HHI.num.sells") {
                const auto n = count_in(ex.sell_times, T, E);
                v = n > 0 ? static_cast<double>(n) : kNaN;
            } else if (name == "HHI.num.records") {
                const auto n = count_in(ex.rec_times, T, E);
                v = n > 0 ? static_cast<double>(n) : kNaN;
            } else if (name == "HHI.bid.change.count") {
                const auto n = count_in(ex.bid_chg, T, E);
                v = n > 0 ? static_cast<double>(n) : kNaN;
            } else if (name == "HHI.ask.change.count") {
                const auto n = count_in(ex.ask_chg, T, E);
                v = n > 0 ? static_cast<double>(n) : kNaN;
            } else if (name == "HHI.last.trade.shares") {
                v = before(ex.tr_sh, E);
            } else if (name == "HHI.weighted.trade.shares") {
                v = tw(ex.tr_sh, T, E, mode);
            } else if (name == "HHI.last.trade.dollar") {
                v = before(ex.tr_dol, E);
            } else if (name == "HHI.weighted.trade.dollar") {
                v = tw(ex.tr_dol, T, E, mode);
            } else if (name == "HHI.last.buy.shares") {
                v = before(ex.buy_sh, E);
            } else if (name == "HHI.weighted.buy.shares") {
                v = tw(ex.buy_sh, T, E, mode);
            } else if (name == "HHI.last.sell.shares") {
                v = before(ex.sell_sh, E);
            } else if (name == "HHI.weighted.sell.shares") {
                v = tw(ex.sell_sh, T, E, mode);
            } else if (name == "HHI.last.buy.dollar") {
                v = before(ex.buy_dol, E);
            } else if (name == "HHI.weighted.buy.dollar") {
                v = tw(ex.buy_dol, T, E, mode);
            } else if (name == "HHI.last.sell.dollar") {
                v = before(ex.sell_dol, E);
            } else if (name == "HHI.weighted.sell.dollar") {
                v = tw(ex.sell_dol, T, E, mode);
            } else if (name == "HHI.last.bid.shares") {
                v = before(ex.bid_sz, E);
            } else if (name == "HHI.weighted.bid.shares") {
                v = tw(ex.bid_sz, T, E, mode);
            } else if (name == "HHI.last.ask.shares") {
                v = before(ex.ask_sz, E);
            } else if (name == "HHI.weighted.ask.shares") {
                v = tw(ex.ask_sz, T, E, mode);
            } else if (name == "HHI.last.bid.dollar") {
                v = before(ex.bid_dol, E);
            } else if (name == "HHI.weighted.bid.dollar") {
                v = tw(ex.bid_dol, T, E, mode);
            } else if (name == "HHI.last.ask.dollar") {
                v = before(ex.ask_dol, E);
            } else if (name == "HHI.weighted.ask.dollar") {
                v = tw(ex.ask_dol, T, E, mode);
            } else {
                return kNaN;   // unknown HHI base
            }
            q.push_back(v);
        }
        return hhi_of(q);
    }

    return kNaN;   // unknown measure name
}

}  // namespace oracle
