// Compares the OpenMP pairwise-distance kernel against the serial reference:
// same panel, timed, and checked for bitwise-identical output. Also times the
// 91-leaf minimax clustering stage on the resulting matrix.
#include <chrono>
#include <cstdio>
#include <cstring>

#include "mmt/cluster.hpp"
#include "mmt/distance.hpp"
#include "mmt/synth.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    const std::chrono::duration<double, std::milli> dt =
        std::chrono::steady_clock::now() - t0;
    return dt.count();
}

}  // namespace

int main() {
    // 13 blocks x 7 columns = a 91-wide panel over a full trading day
    const mmt::MeasurePanel panel = mmt::generate_planted_blocks(13, 0.9, 0.1, 2340, 7, 7);
    std::printf("panel: %zu rows x %zu cols\n", panel.rows(), panel.cols());
#ifdef _OPENMP
    std::printf("openmp: enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("openmp: disabled at build time\n");
#endif

    const int reps = 5;
    mmt::DistanceMatrix serial, parallel;

    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) serial = mmt::pairwise_distances_serial(panel);
    const double serial_ms = ms_since(t0) / reps;

    t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) parallel = mmt::pairwise_distances(panel);
    const double parallel_ms = ms_since(t0) / reps;

    const bool identical =
        serial.d.size() == parallel.d.size() &&
        std::memcmp(serial.d.data(), parallel.d.data(), serial.d.size() * sizeof(double)) == 0 &&
        serial.support == parallel.support;

    std::printf("pairwise_distances  serial   %8.2f ms\n", serial_ms);
    std::printf("pairwise_distances  parallel %8.2f ms  (x%.2f)\n", parallel_ms,
                parallel_ms > 0.0 ? serial_ms / parallel_ms : 0.0);
    std::printf("bitwise identical:  %s\n", identical ? "yes" : "NO - MISMATCH");

    t0 = std::chrono::steady_clock::now();
    const auto tree = mmt::minimax_linkage_cluster(serial);
    const double cluster_ms = ms_since(t0);
    std::printf("minimax clustering  %zu leaves %8.2f ms\n", tree.leaf_count(), cluster_ms);

    return identical ? 0 : 1;
}
