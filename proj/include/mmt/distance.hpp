#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmt/panel.hpp"

namespace mmt {

// Symmetric measure-by-measure distance matrix with pairwise-complete
// support counts. Undefined entries are NaN (support below min_support,
// or a constant series on the common rows).
struct DistanceMatrix {
    std::vector<std::string> ids;
    std::vector<double> d;              // n x n, NaN = undefined
    std::vector<std::int32_t> support;  // pairwise-complete observation count

    std::size_t n() const { return ids.size(); }
    double at(std::size_t i, std::size_t j) const { return d[i * ids.size() + j]; }
    double& at(std::size_t i, std::size_t j) { return d[i * ids.size() + j]; }
    std::int32_t support_at(std::size_t i, std::size_t j) const { return support[i * ids.size() + j]; }
    bool complete() const;              // no NaN off-diagonal
};

struct DistanceOptions {
    int min_support = 30;       // pairwise-complete rows required
    double min_coverage = 0.0;  // fraction of rows a column must define to participate
};

// 1 - |Pearson correlation| over pairwise-complete entries, in [0, 1].
// nullopt when support < min_support or either series is constant on the
// common rows. Two-pass (centered) computation.
std::optional<double> correlation_distance(std::span<const double> x,
                                           std::span<const double> y,
                                           int min_support = 30,
                                           std::int32_t* support_out = nullptr);

// OpenMP-parallel over column pairs; entries are bitwise identical to the
// serial reference because each pair is computed independently.
DistanceMatrix pairwise_distances(const MeasurePanel& panel,
                                  const DistanceOptions& opts = {});
// Serial reference implementation, kept for tests and benchmarks.
DistanceMatrix pairwise_distances_serial(const MeasurePanel& panel,
                                         const DistanceOptions& opts = {});

// Entrywise mean over the matrices where the entry is defined; support
// becomes the number of contributing matrices. Throws on mismatched ids.
DistanceMatrix average_distances(std::span<const DistanceMatrix> mats);

// Square CSV, header row/column = ids, undefined entries empty.
void write_distance_csv(const std::string& path, const DistanceMatrix& m);
DistanceMatrix read_distance_csv(const std::string& path);

// Resolves undefined entries by dropping measures: first the dead columns
// (undefined against everything), then any measure still undefined against a
// survivor. The remaining submatrix is complete; dropped names are appended
// to `dropped` in id order.
DistanceMatrix drop_undefined(const DistanceMatrix& m, std::vector<std::string>* dropped = nullptr);

}  // namespace mmt
