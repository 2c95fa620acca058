// mmt: tick-data measure panels, correlation distances and prototype
// clustering. Subcommands: run, measures, cluster, render, synth.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mmt/classify.hpp"
#include "mmt/csv.hpp"
#include "mmt/distance.hpp"
#include "mmt/pipeline.hpp"
#include "mmt/synth.hpp"
#include "mmt/tree_io.hpp"

namespace fs = std::filesystem;

namespace {

struct CliShared {
    mmt::PipelineConfig config;
    std::string classifier = "clnv";
    std::string trade_norm = "adtv";
    std::int64_t session_open_secs = 34'200;
    std::int64_t session_close_secs = 57'600;

    void finish() {
        config.classifier = mmt::classifier_from_name(classifier);
        config.trade_norm =
            trade_norm == "adrv" ? mmt::Normalizer::Adrv : mmt::Normalizer::Adtv;
        config.session = {session_open_secs * mmt::kNsPerSec,
                          session_close_secs * mmt::kNsPerSec};
    }
};

void add_input_flags(CLI::App* cmd, CliShared& s) {
    cmd->add_option("--trades", s.config.trades_path, "Trades CSV")->required();
    cmd->add_option("--quotes", s.config.quotes_path, "Quotes CSV")->required();
    cmd->add_option("--daily", s.config.daily_path, "Daily reference CSV")->required();
    cmd->add_option("--out", s.config.out_dir, "Output directory")->required();
    cmd->add_option("--interval-secs", s.config.interval_secs, "Interval length, seconds")
        ->capture_default_str();
    cmd->add_option("--classifier", s.classifier, "Trade classifier")
        ->check(CLI::IsMember({"clnv", "lr", "emo"}))
        ->capture_default_str();
    cmd->add_option("--registry", s.config.registry_mode,
                    "full | reduced | file with one measure name per line")
        ->capture_default_str();
    cmd->add_option("--symbols", s.config.symbols, "Only process these symbols")
        ->delimiter(',');
    cmd->add_option("--workers", s.config.workers, "Worker threads (0 = all)")
        ->capture_default_str();
    cmd->add_option("--seed", s.config.seed, "Recorded in the report; no effect on results")
        ->capture_default_str();
    cmd->add_option("--min-support", s.config.min_support,
                    "Pairwise-complete intervals required per correlation")
        ->capture_default_str();
    cmd->add_option("--min-coverage", s.config.min_coverage,
                    "Fraction of intervals a measure must define to contribute")
        ->capture_default_str();
    cmd->add_option("--session-open", s.session_open_secs, "Session open, seconds since midnight")
        ->capture_default_str();
    cmd->add_option("--session-close", s.session_close_secs,
                    "Session close, seconds since midnight")
        ->capture_default_str();
    cmd->add_option("--trade-norm", s.trade_norm, "Normalizer for *.norm trade volumes")
        ->check(CLI::IsMember({"adtv", "adrv"}))
        ->capture_default_str();
    cmd->add_flag("--no-binary-panels",
                  [&s](std::int64_t) { s.config.write_binary_panels = false; },
                  "Skip the .bin panel caches");
}

void print_timings(const mmt::RunReport& report) {
    for (const auto& t : report.timings)
        std::fprintf(stderr, "stage %-18s %10.1f ms\n", t.stage.c_str(), t.ms);
}

void print_prototypes(const mmt::RunReport& report) {
    std::fprintf(stderr, "%d symbols, %zu warnings, %zu measures dropped\n",
                 report.symbols_processed, report.warnings.size(),
                 report.measures_dropped.size());
    for (const auto& p : report.prototypes)
        std::fprintf(stderr, "  #%-3d %-42s (cluster of %zu)\n", p.rank, p.name.c_str(),
                     p.members.size());
}

std::vector<std::string> sorted_csv_files(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tick-data measure panels, correlation distances and prototype clustering"};
    app.require_subcommand(1);

    CliShared run_s, measures_s;

    auto* run = app.add_subcommand("run", "Full pipeline: panels, distances, clustering");
    run->set_config("--config", "", "key = value file mirroring this subcommand's flags");
    add_input_flags(run, run_s);
    run->add_option("--cut", run_s.config.cut_height, "Dendrogram cut height")
        ->capture_default_str();
    run->add_flag("--iterate-pruning", run_s.config.iterate_pruning,
                  "Re-cluster prototypes until the set is stable");
    run->add_flag("--no-symbol-distances",
                  [&run_s](std::int64_t) { run_s.config.write_symbol_distances = false; },
                  "Skip the per-symbol distance CSVs");

    auto* measures = app.add_subcommand("measures", "Panels only, no clustering");
    measures->configurable();
    add_input_flags(measures, measures_s);

    auto* cluster = app.add_subcommand("cluster", "Cluster cached distance matrices");
    cluster->configurable();
    std::string cl_matrix, cl_matrices, cl_out, cl_registry = "full";
    double cl_cut = 0.7;
    bool cl_iterate = false;
    auto* opt_matrix =
        cluster->add_option("--matrix", cl_matrix, "Averaged distance matrix CSV");
    cluster->add_option("--matrices", cl_matrices, "Directory of per-symbol distance CSVs")
        ->excludes(opt_matrix);
    cluster->add_option("--out", cl_out, "Output directory")->required();
    cluster->add_option("--cut", cl_cut, "Dendrogram cut height")->capture_default_str();
    cluster->add_option("--registry", cl_registry, "Registry for measure descriptions")
        ->capture_default_str();
    cluster->add_flag("--iterate-pruning", cl_iterate,
                      "Re-cluster prototypes until the set is stable");

    auto* render = app.add_subcommand("render", "Re-render a dendrogram JSON");
    render->configurable();
    std::string rd_tree, rd_out;
    double rd_cut = -1.0;
    std::string rd_format = "all";
    render->add_option("--tree", rd_tree, "dendrogram.json produced by run/cluster")
        ->required();
    render->add_option("--out", rd_out, "Output directory")->required();
    render->add_option("--cut", rd_cut, "Cut line height for the SVG (omit to hide)");
    render->add_option("--format", rd_format, "svg | newick | json | all")
        ->check(CLI::IsMember({"svg", "newick", "json", "all"}))
        ->capture_default_str();

    auto* synth = app.add_subcommand("synth", "Generate a deterministic synthetic day");
    synth->configurable();
    std::string sy_spec, sy_out;
    synth->add_option("--spec", sy_spec, "key = value synth spec file");
    synth->add_option("--out", sy_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) {
            run_s.finish();
            const mmt::RunReport report = mmt::run_pipeline(run_s.config);
            print_timings(report);
            print_prototypes(report);
        } else if (measures->parsed()) {
            measures_s.finish();
            const mmt::RunReport report = mmt::run_measures(measures_s.config);
            print_timings(report);
            std::fprintf(stderr, "%d symbols, %zu warnings\n", report.symbols_processed,
                         report.warnings.size());
        } else if (cluster->parsed()) {
            if (cl_matrix.empty() == cl_matrices.empty())
                throw mmt::ConfigError("cluster needs exactly one of --matrix or --matrices");
            if (!(cl_cut >= 0.0))
                throw mmt::ConfigError("cut height must be a finite value >= 0");

            mmt::DistanceMatrix averaged;
            if (!cl_matrix.empty()) {
                averaged = mmt::read_distance_csv(cl_matrix);
            } else {
                const auto files = sorted_csv_files(cl_matrices);
                if (files.empty())
                    throw mmt::DataError("no .csv distance matrices under " + cl_matrices);
                std::vector<mmt::DistanceMatrix> mats;
                mats.reserve(files.size());
                for (const auto& f : files) mats.push_back(mmt::read_distance_csv(f));
                averaged = mmt::average_distances(mats);
            }

            mmt::Registry registry;
            {
                mmt::PipelineConfig reg_cfg;
                reg_cfg.registry_mode = cl_registry;
                registry = mmt::select_registry(reg_cfg);
            }
            const mmt::ClusterOutput out =
                mmt::cluster_distances(averaged, registry, cl_cut, cl_iterate);

            fs::create_directories(cl_out);
            mmt::write_distance_csv(cl_out + "/distance_avg.csv", averaged);
            mmt::write_text_file(cl_out + "/dendrogram.json",
                                 mmt::dendrogram_to_json(out.tree).dump(2) + "\n");
            mmt::write_text_file(cl_out + "/dendrogram.newick",
                                 mmt::dendrogram_to_newick(out.tree));
            mmt::write_text_file(cl_out + "/dendrogram.svg",
                                 mmt::dendrogram_to_svg(out.tree, cl_cut));
            mmt::write_prototype_csv(cl_out + "/prototypes.csv", out.prototypes);
            for (const auto& p : out.prototypes)
                std::fprintf(stderr, "  #%-3d %-42s (cluster of %zu)\n", p.rank,
                             p.name.c_str(), p.members.size());
        } else if (render->parsed()) {
            const auto tree =
                mmt::dendrogram_from_json(nlohmann::json::parse(mmt::read_text_file(rd_tree)));
            fs::create_directories(rd_out);
            if (rd_format == "svg" || rd_format == "all")
                mmt::write_text_file(rd_out + "/dendrogram.svg",
                                     mmt::dendrogram_to_svg(tree, rd_cut));
            if (rd_format == "newick" || rd_format == "all")
                mmt::write_text_file(rd_out + "/dendrogram.newick",
                                     mmt::dendrogram_to_newick(tree));
            if (rd_format == "json" || rd_format == "all")
                mmt::write_text_file(rd_out + "/dendrogram.json",
                                     mmt::dendrogram_to_json(tree).dump(2) + "\n");
        } else if (synth->parsed()) {
            mmt::SynthSpec spec;
            if (!sy_spec.empty()) {
                try {
                    spec = mmt::load_synth_spec(sy_spec);
                } catch (const std::exception& e) {
                    throw mmt::ConfigError(e.what());
                }
            }
            fs::create_directories(sy_out);
            const auto paths = mmt::generate_day(spec, sy_out);
            std::fprintf(stderr, "wrote %s, %s, %s\n", paths.trades.c_str(),
                         paths.quotes.c_str(), paths.daily.c_str());
        }
    } catch (const mmt::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const mmt::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
