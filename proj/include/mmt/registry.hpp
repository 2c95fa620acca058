#pragma once

#include <string>
#include <vector>

namespace mmt {

enum class Family {
    Return,
    Spread,
    Volatility,
    TradeFreq,
    TradeVol,
    TradeImbalance,
    QuoteFreq,
    Depth,
    QuoteImbalance,
    Hhi,
};

enum class Aggregation { LastPrevailing, TimeWeighted, Count, AvgGap, Integral, Range };

enum class Normalizer { None, Adtv, Adrv, SelfNormalized };

// Unit of the underlying quantity; drives the redundancy-pruning rules.
enum class Unit { Price, Pct, Shares, Dollar, Count, Seconds, Ratio };

struct MeasureDef {
    int index = 0;              // position in the full catalog
    std::string name;           // dotted lowercase, HHI.* for concentration
    Family family = Family::Return;
    Aggregation agg = Aggregation::LastPrevailing;
    Normalizer normalizer = Normalizer::None;
    Unit unit = Unit::Ratio;
    std::string base;           // quantity key shared by unit/normalizer twins
    std::string description;
};

using Registry = std::vector<MeasureDef>;

// The full 91-measure catalog, fixed order. The catalog is the cross of the
// measure families (spreads, volatility, trade and quote activity, depth,
// imbalances, exchange concentration) over {last prevailing, time-weighted}
// aggregation and {dollar, shares, shares/ADTV} units where each applies.
const Registry& full_catalog();

inline Registry default_registry() { return full_catalog(); }

// Deterministic redundancy pruning:
//   1. drop dollar-unit measures that have a share-unit twin (same base),
//   2. drop dollar effective spreads in favor of the proportional ones,
//   3. drop non-normalized measures that have an ADTV-normalized twin.
// Idempotent; preserves catalog order.
Registry reduce_registry(const Registry& reg);

inline Registry reduced_registry() { return reduce_registry(full_catalog()); }

// Subset in the given order; throws std::runtime_error on unknown names.
Registry registry_from_names(const std::vector<std::string>& names);

const MeasureDef* find_measure(const Registry& reg, const std::string& name);

constexpr int kFullCatalogSize = 91;

}  // namespace mmt
