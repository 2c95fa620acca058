#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmt/classify.hpp"
#include "mmt/cluster.hpp"
#include "mmt/distance.hpp"
#include "mmt/panel.hpp"
#include "mmt/registry.hpp"

namespace mmt {

// Exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Exit code 3.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PipelineConfig {
    std::string trades_path;
    std::string quotes_path;
    std::string daily_path;
    std::string out_dir;
    Session session = kDefaultSession;
    int interval_secs = 10;
    Classifier classifier = Classifier::Clnv;
    std::string registry_mode = "full";     // full | reduced | path to name list
    double cut_height = 0.7;
    int min_support = 30;
    double min_coverage = 0.5;              // column coverage to contribute per symbol
    std::vector<std::string> symbols;       // filter; empty = all
    int workers = 0;                        // 0 = available parallelism
    std::uint64_t seed = 0;                 // recorded in the report; unused otherwise
    Normalizer trade_norm = Normalizer::Adtv;
    bool iterate_pruning = false;           // re-cluster prototypes until stable
    bool write_binary_panels = true;
    bool write_symbol_distances = true;     // distances/ cache feeds `cluster`

    void validate() const;                  // throws ConfigError
};

struct PrototypeRow {
    int rank = 0;
    std::string name;
    std::string description;
    std::vector<std::string> members;
};

struct StageTiming {
    std::string stage;
    double ms = 0.0;
};

struct RunReport {
    int symbols_processed = 0;
    int symbols_skipped = 0;
    std::size_t trade_rows_rejected = 0;
    std::size_t quote_rows_rejected = 0;
    std::size_t daily_rows_rejected = 0;
    std::vector<std::string> measures_dropped;
    std::vector<PrototypeRow> prototypes;
    std::vector<StageTiming> timings;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
};

// ingest -> classify -> per-symbol panels -> per-symbol distance matrices ->
// averaged matrix -> minimax tree -> cut -> prototypes. Writes panels,
// distance_avg.csv, dendrogram.{json,newick,svg}, prototypes.csv and
// report.json under out_dir. Deterministic for fixed inputs and config,
// independent of worker count.
RunReport run_pipeline(const PipelineConfig& config);

// The panel half of the pipeline only: ingest, classify, write panels/ and
// report.json, no distances or clustering.
RunReport run_measures(const PipelineConfig& config);

// Stages, exposed so tests and the CLI subcommands can compose them.
Registry select_registry(const PipelineConfig& config);
std::vector<SymbolData> ingest_symbols(const PipelineConfig& config, RunReport& report);
MeasurePanel build_symbol_panel(const SymbolData& data, const Registry& registry,
                                const PipelineConfig& config);

struct ClusterOutput {
    PrototypeDendrogram tree;
    std::vector<Cluster> clusters;
    std::vector<PrototypeRow> prototypes;
    std::vector<std::string> dropped;       // measures dropped before clustering
};

ClusterOutput cluster_distances(const DistanceMatrix& averaged, const Registry& registry,
                                double cut_height, bool iterate_pruning);

// rank,name,description,cluster_size,cluster_members (members ;-joined)
void write_prototype_csv(const std::string& path, std::span<const PrototypeRow> rows);

}  // namespace mmt
