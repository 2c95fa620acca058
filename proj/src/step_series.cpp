#include "mmt/step_series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmt {

void StepSeries::append(TimestampNs t, double v) {
    if (!ts_.empty()) {
        if (t == ts_.back()) {
            vs_.back() = v;   // same instant: the later record prevails
            return;
        }
        if (t < ts_.back()) throw std::invalid_argument("StepSeries::append: time went backwards");
    }
    ts_.push_back(t);
    vs_.push_back(v);
}

std::size_t StepSeries::lower_index(TimestampNs t) const {
    return static_cast<std::size_t>(std::lower_bound(ts_.begin(), ts_.end(), t) - ts_.begin());
}

std::optional<double> StepSeries::value_at(TimestampNs t) const {
    const std::size_t i =
        static_cast<std::size_t>(std::upper_bound(ts_.begin(), ts_.end(), t) - ts_.begin());
    if (i == 0) return std::nullopt;
    const double v = vs_[i - 1];
    if (std::isnan(v)) return std::nullopt;   // NaN marks an undefined stretch
    return v;
}

std::optional<double> StepSeries::value_before(TimestampNs t) const {
    const std::size_t i = lower_index(t);
    if (i == 0) return std::nullopt;
    const double v = vs_[i - 1];
    if (std::isnan(v)) return std::nullopt;
    return v;
}

std::optional<double> StepSeries::time_weighted_avg(TimestampNs t0, TimestampNs t1) const {
    if (t1 <= t0 || ts_.empty() || ts_[0] >= t1) return std::nullopt;
    // first segment overlapping [t0, t1)
    std::size_t i =
        static_cast<std::size_t>(std::upper_bound(ts_.begin(), ts_.end(), t0) - ts_.begin());
    if (i > 0) --i;
    double integral = 0.0;
    double covered = 0.0;
    for (; i < ts_.size() && ts_[i] < t1; ++i) {
        const TimestampNs lo = std::max(ts_[i], t0);
        const TimestampNs hi = std::min(i + 1 < ts_.size() ? ts_[i + 1] : t1, t1);
        if (hi <= lo || std::isnan(vs_[i])) continue;
        const double dt = static_cast<double>(hi - lo);
        integral += vs_[i] * dt;
        covered += dt;
    }
    if (covered <= 0.0) return std::nullopt;
    return integral / covered;
}

std::optional<std::pair<double, double>> StepSeries::range_on(TimestampNs t0, TimestampNs t1) const {
    if (t1 <= t0) return std::nullopt;
    bool any = false;
    double lo = 0.0, hi = 0.0;
    auto take = [&](double v) {
        if (std::isnan(v)) return;
        if (!any) {
            lo = hi = v;
            any = true;
            return;
        }
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    };
    if (auto carry = value_at(t0)) take(*carry);
    for (std::size_t i = lower_index(t0); i < ts_.size() && ts_[i] < t1; ++i) {
        if (ts_[i] > t0) take(vs_[i]);   // ts_[i] == t0 is the carry, already taken
    }
    if (!any) return std::nullopt;
    return std::make_pair(lo, hi);
}

}  // namespace mmt
