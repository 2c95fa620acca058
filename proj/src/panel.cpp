#include "mmt/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "mmt/csv.hpp"
#include "mmt/step_series.hpp"

namespace mmt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Event times bucketed onto the row grid: per-row count plus first/last
// event time, accumulated in one pass.
struct RowEvents {
    std::vector<std::int32_t> count;
    std::vector<TimestampNs> first, last;

    explicit RowEvents(std::size_t rows) : count(rows, 0), first(rows, 0), last(rows, 0) {}

    void add(std::size_t row, TimestampNs t) {
        if (count[row] == 0) first[row] = t;
        last[row] = t;
        ++count[row];
    }

    double count_at(std::size_t row) const { return static_cast<double>(count[row]); }

    // (last - first)/(k - 1) seconds, needs at least two events in the row
    double avg_gap(std::size_t row) const {
        if (count[row] < 2) return kNaN;
        return static_cast<double>(last[row] - first[row]) /
               static_cast<double>(count[row] - 1) / 1e9;
    }
};

// All per-symbol state the per-row measure evaluation draws from.
struct Series {
    // NBBO paths
    StepSeries bid, ask, mid, spr_d, spr_p;
    StepSeries bid_sz, ask_sz, bid_dol, ask_dol;
    StepSeries diff_sz, adiff_sz, diff_dol, adiff_dol, imb_sz;

    // trade paths
    StepSeries tr_sh, tr_dol, buy_sh, sell_sh;

    // per-exchange paths for the HHI bases
    struct Exch {
        StepSeries bid_sz, ask_sz, bid_dol, ask_dol;
        StepSeries tr_sh, tr_dol, buy_sh, sell_sh, buy_dol, sell_dol;
        RowEvents records, bid_chg, ask_chg;
        RowEvents trades, buys, sells;

        explicit Exch(std::size_t rows)
            : records(rows), bid_chg(rows), ask_chg(rows), trades(rows), buys(rows), sells(rows) {}
    };
    std::vector<char> exch_ids;
    std::vector<Exch> exch;

    // per-row event summaries
    RowEvents nbbo_records, bid_changes, ask_changes;
    RowEvents trades, buys, sells;

    // per-row trade aggregates that are not step-path queries
    std::vector<double> trade_px_lo, trade_px_hi;                    // NaN when no trade
    std::vector<double> eff_last_d, eff_last_p;                      // last trade's eff spreads
    std::vector<double> eff_wsum_d, eff_wsum_p, eff_shares;          // share-weighted sums

    Series(std::size_t rows)
        : nbbo_records(rows), bid_changes(rows), ask_changes(rows), trades(rows), buys(rows),
          sells(rows), trade_px_lo(rows, kNaN), trade_px_hi(rows, kNaN), eff_last_d(rows, kNaN),
          eff_last_p(rows, kNaN), eff_wsum_d(rows, 0.0), eff_wsum_p(rows, 0.0),
          eff_shares(rows, 0.0) {}

    Exch& exchange(char id, std::size_t rows) {
        for (std::size_t i = 0; i < exch_ids.size(); ++i)
            if (exch_ids[i] == id) return exch[i];
        exch_ids.push_back(id);
        exch.emplace_back(rows);
        return exch.back();
    }
};

double opt(const std::optional<double>& v) { return v ? *v : kNaN; }

double imbalance(double x, double y) {
    if (std::isnan(x) || std::isnan(y) || x + y == 0.0) return kNaN;
    return (x - y) / (x + y);
}

struct HhiResult {
    double value = kNaN;
    std::uint8_t n_active = 0;
};

// contributions: one value per exchange, NaN = inactive
HhiResult hhi(const std::vector<double>& q) {
    double total = 0.0;
    int n = 0;
    for (double v : q) {
        if (std::isnan(v)) continue;
        total += v;
        ++n;
    }
    if (n == 0 || total <= 0.0) return {};
    double h = 0.0;
    for (double v : q) {
        if (std::isnan(v)) continue;
        const double f = v / total;
        h += f * f;
    }
    return {h, static_cast<std::uint8_t>(std::min(n, 255))};
}

}  // namespace

int MeasurePanel::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

MeasurePanel build_panel(const SymbolData& data, const Registry& registry,
                         const Session& session, TimestampNs interval_ns) {
    if (interval_ns <= 0) throw std::invalid_argument("interval must be positive");
    if (session.close_ns <= session.open_ns)
        throw std::invalid_argument("session must be non-empty");

    const std::size_t rows = static_cast<std::size_t>(
        (session.close_ns - session.open_ns + interval_ns - 1) / interval_ns);

    MeasurePanel panel;
    panel.symbol = data.symbol;
    panel.interval_start.resize(rows);
    for (std::size_t r = 0; r < rows; ++r)
        panel.interval_start[r] = session.open_ns + static_cast<TimestampNs>(r) * interval_ns;
    panel.columns.reserve(registry.size());
    for (const auto& m : registry) panel.columns.push_back(m.name);
    panel.values.assign(rows * registry.size(), kNaN);
    panel.hhi_n.assign(rows * registry.size(), 0);

    std::size_t exch_quote_records = 0;
    for (const auto& [e, recs] : data.by_exchange) exch_quote_records += recs.size();
    // A symbol with no events at all yields an all-missing panel rather than
    // a panel of zero counts: there is no stream to count against.
    if (data.nbbo.empty() && data.trades.empty() && exch_quote_records == 0) return panel;

    auto row_of = [&](TimestampNs t) -> std::ptrdiff_t {
        if (t < session.open_ns || t >= session.close_ns) return -1;
        return static_cast<std::ptrdiff_t>((t - session.open_ns) / interval_ns);
    };

    Series s(rows);

    // --- NBBO paths and record/change events ------------------------------
    {
        bool have_prev = false;
        double prev_bid = 0.0, prev_ask = 0.0;
        for (const auto& q : data.nbbo) {
            const double m = (q.bid_price + q.ask_price) / 2.0;
            const double spread = q.ask_price - q.bid_price;
            const double bs = static_cast<double>(q.bid_size);
            const double as = static_cast<double>(q.ask_size);
            s.bid.append(q.timestamp, q.bid_price);
            s.ask.append(q.timestamp, q.ask_price);
            s.mid.append(q.timestamp, m);
            s.spr_d.append(q.timestamp, spread);
            s.spr_p.append(q.timestamp, 100.0 * spread / m);
            s.bid_sz.append(q.timestamp, bs);
            s.ask_sz.append(q.timestamp, as);
            s.bid_dol.append(q.timestamp, bs * q.bid_price);
            s.ask_dol.append(q.timestamp, as * q.ask_price);
            s.diff_sz.append(q.timestamp, as - bs);
            s.adiff_sz.append(q.timestamp, std::fabs(as - bs));
            s.diff_dol.append(q.timestamp, as * q.ask_price - bs * q.bid_price);
            s.adiff_dol.append(q.timestamp, std::fabs(as * q.ask_price - bs * q.bid_price));
            s.imb_sz.append(q.timestamp, as + bs > 0.0 ? (as - bs) / (as + bs) : kNaN);

            const auto r = row_of(q.timestamp);
            if (r >= 0) {
                s.nbbo_records.add(static_cast<std::size_t>(r), q.timestamp);
                if (have_prev && q.bid_price != prev_bid)
                    s.bid_changes.add(static_cast<std::size_t>(r), q.timestamp);
                if (have_prev && q.ask_price != prev_ask)
                    s.ask_changes.add(static_cast<std::size_t>(r), q.timestamp);
            }
            prev_bid = q.bid_price;
            prev_ask = q.ask_price;
            have_prev = true;
        }
    }

    // --- per-exchange quote paths (HHI bases) ------------------------------
    for (const auto& [e, recs] : data.by_exchange) {
        if (recs.empty()) continue;
        auto& ex = s.exchange(e, rows);
        bool have_prev = false;
        double prev_bid = 0.0, prev_ask = 0.0;
        for (const auto& q : recs) {
            const double bs = static_cast<double>(q.bid_size);
            const double as = static_cast<double>(q.ask_size);
            ex.bid_sz.append(q.timestamp, bs);
            ex.ask_sz.append(q.timestamp, as);
            ex.bid_dol.append(q.timestamp, bs * q.bid_price);
            ex.ask_dol.append(q.timestamp, as * q.ask_price);
            const auto r = row_of(q.timestamp);
            if (r >= 0) {
                ex.records.add(static_cast<std::size_t>(r), q.timestamp);
                if (have_prev && q.bid_price != prev_bid)
                    ex.bid_chg.add(static_cast<std::size_t>(r), q.timestamp);
                if (have_prev && q.ask_price != prev_ask)
                    ex.ask_chg.add(static_cast<std::size_t>(r), q.timestamp);
            }
            prev_bid = q.bid_price;
            prev_ask = q.ask_price;
            have_prev = true;
        }
    }

    // --- trade paths, per-row trade aggregates -----------------------------
    for (const auto& ct : data.trades) {
        const auto& t = ct.trade;
        const double sh = static_cast<double>(t.size);
        const double dol = sh * t.price;
        s.tr_sh.append(t.timestamp, sh);
        s.tr_dol.append(t.timestamp, dol);
        if (ct.direction == Direction::Buy) s.buy_sh.append(t.timestamp, sh);
        if (ct.direction == Direction::Sell) s.sell_sh.append(t.timestamp, sh);

        auto& ex = s.exchange(t.exchange, rows);
        ex.tr_sh.append(t.timestamp, sh);
        ex.tr_dol.append(t.timestamp, dol);
        if (ct.direction == Direction::Buy) {
            ex.buy_sh.append(t.timestamp, sh);
            ex.buy_dol.append(t.timestamp, dol);
        } else if (ct.direction == Direction::Sell) {
            ex.sell_sh.append(t.timestamp, sh);
            ex.sell_dol.append(t.timestamp, dol);
        }

        const auto ri = row_of(t.timestamp);
        if (ri < 0) continue;
        const auto r = static_cast<std::size_t>(ri);
        s.trades.add(r, t.timestamp);
        if (ct.direction == Direction::Buy) s.buys.add(r, t.timestamp);
        if (ct.direction == Direction::Sell) s.sells.add(r, t.timestamp);
        ex.trades.add(r, t.timestamp);
        if (ct.direction == Direction::Buy) ex.buys.add(r, t.timestamp);
        if (ct.direction == Direction::Sell) ex.sells.add(r, t.timestamp);

        if (std::isnan(s.trade_px_lo[r]) || t.price < s.trade_px_lo[r])
            s.trade_px_lo[r] = t.price;
        if (std::isnan(s.trade_px_hi[r]) || t.price > s.trade_px_hi[r])
            s.trade_px_hi[r] = t.price;

        // effective spread against the mid prevailing at the trade
        const auto m = s.mid.value_at(t.timestamp);
        if (m) {
            const double eff_d = 2.0 * std::fabs(t.price - *m);
            const double eff_p = 100.0 * eff_d / *m;
            s.eff_last_d[r] = eff_d;
            s.eff_last_p[r] = eff_p;
            s.eff_wsum_d[r] += sh * eff_d;
            s.eff_wsum_p[r] += sh * eff_p;
            s.eff_shares[r] += sh;
        }
    }

    // --- per-row evaluation of the full catalog ----------------------------
    const bool ref = data.has_ref;
    const double adtv = ref ? data.ref.adtv : kNaN;
    const double adrv = ref ? data.ref.adrv : kNaN;
    const double trade_norm_div = data.trade_norm == Normalizer::Adrv ? adrv : adtv;

    const Registry& catalog = full_catalog();
    std::vector<double> cell(catalog.size(), kNaN);
    std::vector<std::uint8_t> cell_hhi_n(catalog.size(), 0);

    // registry column -> catalog slot
    std::vector<int> slot_of(registry.size(), -1);
    for (std::size_t j = 0; j < registry.size(); ++j) {
        const MeasureDef* def = find_measure(catalog, registry[j].name);
        if (!def) throw std::invalid_argument("unknown measure " + registry[j].name);
        slot_of[j] = def->index;
    }

    std::vector<double> q;   // HHI contribution scratch

    auto range_vol = [&](const StepSeries& path, TimestampNs t0, TimestampNs t1) {
        if (!ref) return kNaN;
        const auto r = path.range_on(t0, t1);
        if (!r) return kNaN;
        return (r->second - r->first) / adrv;
    };

    for (std::size_t r = 0; r < rows; ++r) {
        const TimestampNs T = panel.interval_start[r];
        const TimestampNs E = std::min(T + interval_ns, session.close_ns);
        std::fill(cell.begin(), cell.end(), kNaN);
        std::fill(cell_hhi_n.begin(), cell_hhi_n.end(), 0);

        auto last = [&](const StepSeries& p) { return opt(p.value_before(E)); };
        auto tw = [&](const StepSeries& p) { return opt(p.time_weighted_avg(T, E)); };

        // 0: return
        {
            const double q1 = opt(s.mid.value_before(E));
            const double q0 = opt(s.mid.value_before(T));
            cell[0] = (std::isnan(q0) || std::isnan(q1)) ? kNaN : q1 / q0 - 1.0;
        }
        // 1-4: quoted spreads
        cell[1] = last(s.spr_d);
        cell[2] = tw(s.spr_d);
        cell[3] = last(s.spr_p);
        cell[4] = tw(s.spr_p);
        // 5-8: effective spreads (per-interval trade aggregates)
        cell[5] = s.eff_last_d[r];
        cell[6] = s.eff_shares[r] > 0.0 ? s.eff_wsum_d[r] / s.eff_shares[r] : kNaN;
        cell[7] = s.eff_last_p[r];
        cell[8] = s.eff_shares[r] > 0.0 ? s.eff_wsum_p[r] / s.eff_shares[r] : kNaN;
        // 9-12: volatility
        cell[9] = range_vol(s.bid, T, E);
        cell[10] = range_vol(s.ask, T, E);
        cell[11] = range_vol(s.mid, T, E);
        cell[12] = (!ref || std::isnan(s.trade_px_lo[r]))
                       ? kNaN
                       : (s.trade_px_hi[r] - s.trade_px_lo[r]) / adrv;
        // 13-14: trade frequency
        cell[13] = s.trades.count_at(r);
        cell[14] = s.trades.avg_gap(r);
        // 15-20: trade volume
        cell[15] = last(s.tr_dol);
        cell[16] = tw(s.tr_dol);
        cell[17] = last(s.tr_sh);
        cell[18] = tw(s.tr_sh);
        cell[19] = ref ? cell[17] / trade_norm_div : kNaN;
        cell[20] = ref ? cell[18] / trade_norm_div : kNaN;
        // 21-26: trade imbalance
        {
            const double nb = s.buys.count_at(r);
            const double ns = s.sells.count_at(r);
            cell[21] = nb + ns > 0.0 ? (nb - ns) / (nb + ns) : kNaN;
            cell[22] = std::fabs(cell[21]);
            cell[23] = imbalance(last(s.buy_sh), last(s.sell_sh));
            cell[24] = std::fabs(cell[23]);
            cell[25] = imbalance(tw(s.buy_sh), tw(s.sell_sh));
            cell[26] = std::fabs(cell[25]);
        }
        // 27-32: quote frequency
        cell[27] = s.nbbo_records.count_at(r);
        cell[28] = s.bid_changes.count_at(r);
        cell[29] = s.ask_changes.count_at(r);
        cell[30] = s.nbbo_records.avg_gap(r);
        cell[31] = s.bid_changes.avg_gap(r);
        cell[32] = s.ask_changes.avg_gap(r);
        // 33-56: depth, {ask,bid,diff,abs.diff} x {last,weighted} x 3 units
        {
            const StepSeries* dol[] = {&s.ask_dol, &s.bid_dol, &s.diff_dol, &s.adiff_dol};
            const StepSeries* sh[] = {&s.ask_sz, &s.bid_sz, &s.diff_sz, &s.adiff_sz};
            std::size_t k = 33;
            for (int side = 0; side < 4; ++side) {
                for (int weighted = 0; weighted < 2; ++weighted) {
                    const double vd = weighted ? tw(*dol[side]) : last(*dol[side]);
                    const double vs = weighted ? tw(*sh[side]) : last(*sh[side]);
                    cell[k++] = vd;
                    cell[k++] = vs;
                    cell[k++] = ref ? vs / adtv : kNaN;
                }
            }
        }
        // 57-64: quote imbalance
        cell[57] = imbalance(s.ask_changes.count_at(r), s.bid_changes.count_at(r));
        cell[58] = std::fabs(cell[57]);
        cell[59] = imbalance(last(s.ask_sz), last(s.bid_sz));
        cell[60] = std::fabs(cell[59]);
        cell[61] = imbalance(tw(s.ask_sz), tw(s.bid_sz));
        cell[62] = std::fabs(cell[61]);
        cell[63] = tw(s.imb_sz);
        cell[64] = std::fabs(cell[63]);
        // 65-90: HHI
        {
            auto fill_hhi = [&](std::size_t slot, auto&& contribution) {
                q.clear();
                for (auto& ex : s.exch) q.push_back(contribution(ex));
                const HhiResult h = hhi(q);
                cell[slot] = h.value;
                cell_hhi_n[slot] = h.n_active;
            };
            auto count_q = [&](const RowEvents& ev) {
                const double n = ev.count_at(r);
                return n > 0.0 ? n : kNaN;
            };
            fill_hhi(65, [&](Series::Exch& ex) { return count_q(ex.trades); });
            fill_hhi(66, [&](Series::Exch& ex) { return count_q(ex.buys); });
            fill_hhi(67, [&](Series::Exch& ex) { return count_q(ex.sells); });
            fill_hhi(68, [&](Series::Exch& ex) { return opt(ex.tr_sh.value_before(E)); });
            fill_hhi(69, [&](Series::Exch& ex) { return opt(ex.tr_sh.time_weighted_avg(T, E)); });
            fill_hhi(70, [&](Series::Exch& ex) { return opt(ex.tr_dol.value_before(E)); });
            fill_hhi(71, [&](Series::Exch& ex) { return opt(ex.tr_dol.time_weighted_avg(T, E)); });
            fill_hhi(72, [&](Series::Exch& ex) { return opt(ex.buy_sh.value_before(E)); });
            fill_hhi(73, [&](Series::Exch& ex) { return opt(ex.buy_sh.time_weighted_avg(T, E)); });
            fill_hhi(74, [&](Series::Exch& ex) { return opt(ex.sell_sh.value_before(E)); });
            fill_hhi(75, [&](Series::Exch& ex) { return opt(ex.sell_sh.time_weighted_avg(T, E)); });
            fill_hhi(76, [&](Series::Exch& ex) { return opt(ex.buy_dol.value_before(E)); });
            fill_hhi(77, [&](Series::Exch& ex) { return opt(ex.buy_dol.time_weighted_avg(T, E)); });
            fill_hhi(78, [&](Series::Exch& ex) { return opt(ex.sell_dol.value_before(E)); });
            fill_hhi(79, [&](Series::Exch& ex) { return opt(ex.sell_dol.time_weighted_avg(T, E)); });
            fill_hhi(80, [&](Series::Exch& ex) { return count_q(ex.records); });
            fill_hhi(81, [&](Series::Exch& ex) { return count_q(ex.bid_chg); });
            fill_hhi(82, [&](Series::Exch& ex) { return count_q(ex.ask_chg); });
            fill_hhi(83, [&](Series::Exch& ex) { return opt(ex.bid_sz.value_before(E)); });
            fill_hhi(84, [&](Series::Exch& ex) { return opt(ex.bid_sz.time_weighted_avg(T, E)); });
            fill_hhi(85, [&](Series::Exch& ex) { return opt(ex.ask_sz.value_before(E)); });
            fill_hhi(86, [&](Series::Exch& ex) { return opt(ex.ask_sz.time_weighted_avg(T, E)); });
            fill_hhi(87, [&](Series::Exch& ex) { return opt(ex.bid_dol.value_before(E)); });
            fill_hhi(88, [&](Series::Exch& ex) { return opt(ex.bid_dol.time_weighted_avg(T, E)); });
            fill_hhi(89, [&](Series::Exch& ex) { return opt(ex.ask_dol.value_before(E)); });
            fill_hhi(90, [&](Series::Exch& ex) { return opt(ex.ask_dol.time_weighted_avg(T, E)); });
        }

        for (std::size_t j = 0; j < registry.size(); ++j) {
            panel.values[r * registry.size() + j] = cell[static_cast<std::size_t>(slot_of[j])];
            panel.hhi_n[r * registry.size() + j] = cell_hhi_n[static_cast<std::size_t>(slot_of[j])];
        }
    }
    return panel;
}

// ---------------------------------------------------------------------------
// CSV and binary cache
// ---------------------------------------------------------------------------

void write_panel_csv(const std::string& path, const MeasurePanel& panel) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create " + path);
    out << "interval_start_ns";
    for (const auto& c : panel.columns) out << ',' << c;
    out << '\n';
    for (std::size_t r = 0; r < panel.rows(); ++r) {
        out << panel.interval_start[r];
        for (std::size_t c = 0; c < panel.cols(); ++c) {
            const double v = panel.at(r, c);
            out << ',';
            if (!std::isnan(v)) out << format_double(v);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

MeasurePanel read_panel_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    MeasurePanel panel;
    {
        std::size_t start = 0;
        bool first = true;
        while (start <= line.size()) {
            std::size_t comma = line.find(',', start);
            const std::size_t end = comma == std::string::npos ? line.size() : comma;
            std::string field = line.substr(start, end - start);
            if (first) {
                if (field != "interval_start_ns")
                    throw std::runtime_error(path + ": bad header");
                first = false;
            } else {
                panel.columns.push_back(std::move(field));
            }
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t start = 0;
        std::size_t field_idx = 0;
        while (start <= line.size()) {
            std::size_t comma = line.find(',', start);
            const std::size_t end = comma == std::string::npos ? line.size() : comma;
            const char* fb = line.data() + start;
            const char* fe = line.data() + end;
            if (field_idx == 0) {
                TimestampNs t = 0;
                auto [p, ec] = std::from_chars(fb, fe, t);
                if (ec != std::errc() || p != fe)
                    throw std::runtime_error(path + ": bad interval_start_ns");
                panel.interval_start.push_back(t);
            } else {
                double v = kNaN;
                if (fb != fe) {
                    auto [p, ec] = std::from_chars(fb, fe, v);
                    if (ec != std::errc() || p != fe)
                        throw std::runtime_error(path + ": bad value");
                }
                panel.values.push_back(v);
            }
            ++field_idx;
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (field_idx != panel.columns.size() + 1)
            throw std::runtime_error(path + ": wrong field count");
    }
    panel.hhi_n.assign(panel.values.size(), 0);
    return panel;
}

namespace {

constexpr char kPanelMagic[8] = {'M', 'M', 'T', 'P', 'N', 'L', '1', '\n'};
constexpr std::uint32_t kPanelVersion = 1;

template <typename T>
void put_raw(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
void get_raw(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
}

}  // namespace

void write_panel_cache(const std::string& path, const MeasurePanel& panel) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create " + path);
    out.write(kPanelMagic, sizeof(kPanelMagic));
    put_raw(out, kPanelVersion);
    put_raw(out, static_cast<std::uint32_t>(panel.rows()));
    put_raw(out, static_cast<std::uint32_t>(panel.cols()));
    put_raw(out, static_cast<std::uint32_t>(panel.symbol.size()));
    out.write(panel.symbol.data(), static_cast<std::streamsize>(panel.symbol.size()));
    out.write(reinterpret_cast<const char*>(panel.interval_start.data()),
              static_cast<std::streamsize>(panel.rows() * sizeof(TimestampNs)));
    std::vector<double> col(panel.rows());
    for (std::size_t c = 0; c < panel.cols(); ++c) {
        put_raw(out, static_cast<std::uint32_t>(panel.columns[c].size()));
        out.write(panel.columns[c].data(),
                  static_cast<std::streamsize>(panel.columns[c].size()));
        for (std::size_t r = 0; r < panel.rows(); ++r) col[r] = panel.at(r, c);
        out.write(reinterpret_cast<const char*>(col.data()),
                  static_cast<std::streamsize>(col.size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

MeasurePanel read_panel_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kPanelMagic, sizeof(magic)) != 0)
        throw std::runtime_error(path + ": not a panel cache");
    std::uint32_t version = 0, rows = 0, cols = 0, symbol_len = 0;
    get_raw(in, version);
    if (version != kPanelVersion) throw std::runtime_error(path + ": unsupported cache version");
    get_raw(in, rows);
    get_raw(in, cols);
    get_raw(in, symbol_len);
    MeasurePanel panel;
    panel.symbol.resize(symbol_len);
    in.read(panel.symbol.data(), symbol_len);
    panel.interval_start.resize(rows);
    in.read(reinterpret_cast<char*>(panel.interval_start.data()),
            static_cast<std::streamsize>(rows * sizeof(TimestampNs)));
    panel.columns.resize(cols);
    panel.values.assign(static_cast<std::size_t>(rows) * cols, kNaN);
    std::vector<double> col(rows);
    for (std::uint32_t c = 0; c < cols; ++c) {
        std::uint32_t name_len = 0;
        get_raw(in, name_len);
        panel.columns[c].resize(name_len);
        in.read(panel.columns[c].data(), name_len);
        in.read(reinterpret_cast<char*>(col.data()),
                static_cast<std::streamsize>(col.size() * sizeof(double)));
        for (std::uint32_t r = 0; r < rows; ++r) panel.values[r * cols + c] = col[r];
    }
    if (!in) throw std::runtime_error(path + ": truncated panel cache");
    panel.hhi_n.assign(panel.values.size(), 0);
    return panel;
}

}  // namespace mmt
