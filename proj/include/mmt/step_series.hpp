#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mmt/records.hpp"

namespace mmt {

// Right-continuous step function given by its change points: evaluation at t
// returns the latest change point at or before t. Appending at an existing
// timestamp overwrites, so change-point timestamps are strictly increasing.
// A NaN value marks the series as undefined from that point on (until the
// next change point): evaluation there reports "no value" and the stretch is
// excluded from time-weighted averages and ranges.
class StepSeries {
public:
    void append(TimestampNs t, double v);

    bool empty() const { return ts_.empty(); }
    std::size_t size() const { return ts_.size(); }
    std::span<const TimestampNs> timestamps() const { return ts_; }
    std::span<const double> values() const { return vs_; }

    // latest change point with timestamp <= t
    std::optional<double> value_at(TimestampNs t) const;
    // latest change point with timestamp strictly before t
    std::optional<double> value_before(TimestampNs t) const;

    // index of first change point with timestamp >= t
    std::size_t lower_index(TimestampNs t) const;

    // (1 / covered) * integral of the series over [t0, t1); if the series only
    // becomes defined at some t* inside the interval, the average runs over
    // [t*, t1) instead. Undefined over the whole interval -> nullopt.
    std::optional<double> time_weighted_avg(TimestampNs t0, TimestampNs t1) const;

    // {min, max} of the path on [t0, t1), including the value carried in at t0.
    std::optional<std::pair<double, double>> range_on(TimestampNs t0, TimestampNs t1) const;

private:
    std::vector<TimestampNs> ts_;
    std::vector<double> vs_;
};

inline std::optional<double> last_prevailing(const StepSeries& s, TimestampNs t) {
    return s.value_at(t);
}

inline std::optional<double> time_weighted_avg(const StepSeries& s, TimestampNs t0, TimestampNs t1) {
    return s.time_weighted_avg(t0, t1);
}

}  // namespace mmt
