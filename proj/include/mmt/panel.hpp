#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mmt/classify.hpp"
#include "mmt/records.hpp"
#include "mmt/registry.hpp"

namespace mmt {

// Per-symbol matrix of measure values on the 10-second grid. Missing cells
// are NaN in memory and empty fields in CSV; they are never silently zero.
struct MeasurePanel {
    std::string symbol;
    std::vector<TimestampNs> interval_start;
    std::vector<std::string> columns;        // registry order
    std::vector<double> values;              // row-major, rows x cols
    // Active-exchange count behind each HHI cell (0 for non-HHI columns and
    // missing cells); kept so the [1/N, 1] bound can be checked exactly.
    std::vector<std::uint8_t> hhi_n;

    std::size_t rows() const { return interval_start.size(); }
    std::size_t cols() const { return columns.size(); }
    double at(std::size_t r, std::size_t c) const { return values[r * columns.size() + c]; }
    double& at(std::size_t r, std::size_t c) { return values[r * columns.size() + c]; }
    int column_index(const std::string& name) const;   // -1 if absent
};

// Session-clipped, crossed-free inputs for one symbol. `nbbo` may start with
// one pre-open seed record; `by_exchange` holds the per-exchange quote
// streams (used only by the HHI measures).
struct SymbolData {
    std::string symbol;
    std::vector<QuoteRecord> nbbo;
    std::map<char, std::vector<QuoteRecord>> by_exchange;
    std::vector<ClassifiedTrade> trades;
    DailyReference ref;
    bool has_ref = false;
    // Normalizer applied to the trade-volume *.norm measures (ADTV by
    // default; ADRV available as a toggle).
    Normalizer trade_norm = Normalizer::Adtv;
};

// Builds the full panel over the session grid. Intervals are half-open
// [t, t + interval); events exactly on a boundary belong to the later
// interval. "Last prevailing" within a row means the value in effect just
// before the row's end. Sparse symbols produce missing cells, never errors.
MeasurePanel build_panel(const SymbolData& data, const Registry& registry,
                         const Session& session = kDefaultSession,
                         TimestampNs interval_ns = kDefaultIntervalNs);

// CSV: header `interval_start_ns,<measure names...>`, missing = empty field.
void write_panel_csv(const std::string& path, const MeasurePanel& panel);
MeasurePanel read_panel_csv(const std::string& path);

// Columnar binary cache. Layout (native little-endian):
//   magic "MMTPNL1\n", u32 version, u32 rows, u32 cols, u32 symbol_len,
//   symbol bytes, rows x i64 interval_start, then per column: u32 name_len,
//   name bytes, rows x f64 values. NaN encodes missing.
void write_panel_cache(const std::string& path, const MeasurePanel& panel);
MeasurePanel read_panel_cache(const std::string& path);

}  // namespace mmt
