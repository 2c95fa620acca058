#include "mmt/distance.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "mmt/csv.hpp"

namespace mmt {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

bool DistanceMatrix::complete() const {
    for (std::size_t i = 0; i < n(); ++i)
        for (std::size_t j = 0; j < n(); ++j)
            if (i != j && std::isnan(at(i, j))) return false;
    return true;
}

std::optional<double> correlation_distance(std::span<const double> x,
                                           std::span<const double> y,
                                           int min_support, std::int32_t* support_out) {
    if (x.size() != y.size()) throw std::invalid_argument("series length mismatch");
    // pass 1: means over pairwise-complete rows
    double sx = 0.0, sy = 0.0;
    std::int64_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isnan(x[i]) || std::isnan(y[i])) continue;
        sx += x[i];
        sy += y[i];
        ++n;
    }
    if (support_out) *support_out = static_cast<std::int32_t>(n);
    if (n < min_support || n < 2) return std::nullopt;
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    // pass 2: centered moments
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isnan(x[i]) || std::isnan(y[i])) continue;
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;   // constant on common rows
    double r = sxy / std::sqrt(sxx * syy);
    double a = std::fabs(r);
    if (a > 1.0) a = 1.0;   // guard rounding
    return 1.0 - a;
}

namespace {

DistanceMatrix compute_matrix(const MeasurePanel& panel, const DistanceOptions& opts,
                              bool parallel) {
    if (panel.cols() == 0) throw std::invalid_argument("empty panel");
    const std::size_t n = panel.cols();
    const std::size_t rows = panel.rows();

    // contiguous columns for cache-friendly pair scans
    std::vector<std::vector<double>> col(n);
    std::vector<char> active(n, 1);
    for (std::size_t c = 0; c < n; ++c) {
        col[c].resize(rows);
        std::size_t defined = 0;
        for (std::size_t r = 0; r < rows; ++r) {
            col[c][r] = panel.at(r, c);
            if (!std::isnan(col[c][r])) ++defined;
        }
        const double coverage =
            rows == 0 ? 0.0 : static_cast<double>(defined) / static_cast<double>(rows);
        if (coverage < opts.min_coverage) active[c] = 0;
    }

    DistanceMatrix m;
    m.ids = panel.columns;
    m.d.assign(n * n, kNaN);
    m.support.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 0.0;

    // flattened strict upper triangle
    const std::size_t npairs = n * (n - 1) / 2;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(npairs);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

    auto run_pair = [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        if (!active[i] || !active[j]) return;
        std::int32_t support = 0;
        const auto d = correlation_distance(col[i], col[j], opts.min_support, &support);
        m.at(i, j) = m.at(j, i) = d ? *d : kNaN;
        m.support[i * n + j] = m.support[j * n + i] = support;
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic, 64)
        for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(pairs.size()); ++k)
            run_pair(static_cast<std::size_t>(k));
    } else {
        for (std::size_t k = 0; k < pairs.size(); ++k) run_pair(k);
    }
    return m;
}

}  // namespace

DistanceMatrix pairwise_distances(const MeasurePanel& panel, const DistanceOptions& opts) {
#ifdef _OPENMP
    return compute_matrix(panel, opts, true);
#else
    return compute_matrix(panel, opts, false);
#endif
}

DistanceMatrix pairwise_distances_serial(const MeasurePanel& panel,
                                         const DistanceOptions& opts) {
    return compute_matrix(panel, opts, false);
}

DistanceMatrix average_distances(std::span<const DistanceMatrix> mats) {
    if (mats.empty()) throw std::invalid_argument("no matrices to average");
    const auto& ids = mats[0].ids;
    for (const auto& m : mats)
        if (m.ids != ids) throw std::invalid_argument("distance matrices have mismatched ids");

    const std::size_t n = ids.size();
    DistanceMatrix out;
    out.ids = ids;
    out.d.assign(n * n, kNaN);
    out.support.assign(n * n, 0);
    for (std::size_t e = 0; e < n * n; ++e) {
        double sum = 0.0;
        std::int32_t cnt = 0;
        for (const auto& m : mats) {
            if (std::isnan(m.d[e])) continue;
            sum += m.d[e];
            ++cnt;
        }
        if (cnt > 0) out.d[e] = sum / static_cast<double>(cnt);
        out.support[e] = cnt;
    }
    return out;
}

void write_distance_csv(const std::string& path, const DistanceMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create " + path);
    for (std::size_t i = 0; i < m.n(); ++i) {
        if (i) out << ',';
        out << m.ids[i];
    }
    out << '\n';
    for (std::size_t i = 0; i < m.n(); ++i) {
        for (std::size_t j = 0; j < m.n(); ++j) {
            if (j) out << ',';
            const double v = m.at(i, j);
            if (!std::isnan(v)) out << format_double(v);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

DistanceMatrix read_distance_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    DistanceMatrix m;
    {
        std::size_t start = 0;
        while (start <= line.size()) {
            const std::size_t comma = line.find(',', start);
            const std::size_t end = comma == std::string::npos ? line.size() : comma;
            m.ids.push_back(line.substr(start, end - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }
    const std::size_t n = m.ids.size();
    m.d.reserve(n * n);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t start = 0;
        std::size_t fields = 0;
        while (start <= line.size()) {
            const std::size_t comma = line.find(',', start);
            const std::size_t end = comma == std::string::npos ? line.size() : comma;
            double v = kNaN;
            if (end > start) {
                auto [p, ec] = std::from_chars(line.data() + start, line.data() + end, v);
                if (ec != std::errc() || p != line.data() + end)
                    throw std::runtime_error(path + ": bad distance value");
            }
            m.d.push_back(v);
            ++fields;
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields != n) throw std::runtime_error(path + ": wrong field count");
    }
    if (m.d.size() != n * n) throw std::runtime_error(path + ": wrong row count");
    // support is an in-memory diagnostic; it is not persisted in the CSV
    m.support.assign(n * n, 0);
    for (std::size_t e = 0; e < n * n; ++e)
        if (!std::isnan(m.d[e])) m.support[e] = 1;
    return m;
}

DistanceMatrix drop_undefined(const DistanceMatrix& m, std::vector<std::string>* dropped) {
    const std::size_t n = m.n();
    std::vector<char> keep(n, 1);

    // Dead columns (undefined against everything) go first, so one fully
    // missing measure does not take the whole matrix down with it.
    for (std::size_t i = 0; i < n; ++i) {
        bool any_defined = false;
        for (std::size_t j = 0; j < n && !any_defined; ++j)
            if (i != j && !std::isnan(m.at(i, j))) any_defined = true;
        if (!any_defined && n > 1) keep[i] = 0;
    }
    // Then every measure that still has an undefined entry against another
    // surviving measure.
    std::vector<char> keep2 = keep;
    for (std::size_t i = 0; i < n; ++i) {
        if (!keep[i]) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || !keep[j]) continue;
            if (std::isnan(m.at(i, j))) {
                keep2[i] = 0;
                break;
            }
        }
    }
    keep = std::move(keep2);

    DistanceMatrix out;
    std::vector<std::size_t> map;
    for (std::size_t i = 0; i < n; ++i) {
        if (keep[i]) {
            map.push_back(i);
            out.ids.push_back(m.ids[i]);
        } else if (dropped) {
            dropped->push_back(m.ids[i]);
        }
    }
    const std::size_t k = map.size();
    out.d.resize(k * k);
    out.support.resize(k * k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
            out.d[a * k + b] = m.at(map[a], map[b]);
            out.support[a * k + b] = m.support_at(map[a], map[b]);
        }
    return out;
}

}  // namespace mmt
