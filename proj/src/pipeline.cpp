#include "mmt/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <type_traits>
#include <utility>

#include "mmt/csv.hpp"
#include "mmt/tree_io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mmt {

namespace fs = std::filesystem;

void PipelineConfig::validate() const {
    auto fail = [](const std::string& why) { throw ConfigError(why); };
    if (trades_path.empty()) fail("missing trades path");
    if (quotes_path.empty()) fail("missing quotes path");
    if (daily_path.empty()) fail("missing daily path");
    if (out_dir.empty()) fail("missing output directory");
    if (session.close_ns <= session.open_ns) fail("session must satisfy open < close");
    if (interval_secs < 1) fail("interval must be at least 1 second");
    if (!(cut_height >= 0.0) || !std::isfinite(cut_height))
        fail("cut height must be a finite value >= 0");
    if (min_support < 2) fail("min support must be at least 2");
    if (!(min_coverage >= 0.0 && min_coverage <= 1.0)) fail("min coverage must be in [0, 1]");
    if (workers < 0) fail("workers must be >= 0");
    if (trade_norm != Normalizer::Adtv && trade_norm != Normalizer::Adrv)
        fail("trade normalizer must be adtv or adrv");
    if (registry_mode != "full" && registry_mode != "reduced" && !fs::exists(registry_mode))
        fail("registry must be 'full', 'reduced', or an existing measure-list file");
}

Registry select_registry(const PipelineConfig& config) {
    if (config.registry_mode == "full") return full_catalog();
    if (config.registry_mode == "reduced") return reduced_registry();
    std::ifstream in(config.registry_mode);
    if (!in) throw ConfigError("cannot open registry file " + config.registry_mode);
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto a = line.find_first_not_of(" \t");
        if (a == std::string::npos) continue;
        const auto b = line.find_last_not_of(" \t");
        names.push_back(line.substr(a, b - a + 1));
    }
    if (names.empty()) throw ConfigError("registry file " + config.registry_mode + " is empty");
    try {
        return registry_from_names(names);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("registry file ") + config.registry_mode + ": " + e.what());
    }
}

std::vector<SymbolData> ingest_symbols(const PipelineConfig& config, RunReport& report) {
    ParseReport trades_rep, quotes_rep, daily_rep;
    std::vector<TradeRecord> trades;
    std::vector<QuoteRecord> quotes;
    std::vector<DailyRow> daily;
    try {
        trades = parse_trades(config.trades_path, &trades_rep);
        quotes = parse_quotes(config.quotes_path, &quotes_rep);
        daily = parse_daily_rows(config.daily_path, &daily_rep);
    } catch (const std::exception& e) {
        throw DataError(e.what());
    }
    report.trade_rows_rejected += trades_rep.rejected;
    report.quote_rows_rejected += quotes_rep.rejected;
    report.daily_rows_rejected += daily_rep.rejected;
    for (const auto* rep : {&trades_rep, &quotes_rep, &daily_rep})
        for (const auto& e : rep->errors) report.warnings.push_back(e);

    // crossed quotes are flagged at parse time and never reach the measures
    {
        std::map<std::string, std::size_t> crossed;
        std::vector<QuoteRecord> clean;
        clean.reserve(quotes.size());
        for (auto& q : quotes) {
            if (q.crossed)
                ++crossed[q.symbol];
            else
                clean.push_back(std::move(q));
        }
        quotes = std::move(clean);
        for (const auto& [sym, n] : crossed)
            report.warnings.push_back(sym + ": " + std::to_string(n) +
                                      " crossed quote record(s) excluded");
    }

    trades = session_clip(std::move(trades), config.session);
    quotes = session_clip(std::move(quotes), config.session);

    const bool filter = !config.symbols.empty();
    auto wanted = [&](const std::string& sym) {
        return !filter ||
               std::find(config.symbols.begin(), config.symbols.end(), sym) !=
                   config.symbols.end();
    };

    std::map<std::string, SymbolData> by_symbol;
    for (auto& q : quotes) {
        if (!wanted(q.symbol)) continue;
        auto& sd = by_symbol[q.symbol];
        if (q.is_nbbo)
            sd.nbbo.push_back(std::move(q));
        else
            sd.by_exchange[q.exchange].push_back(std::move(q));
    }
    std::map<std::string, std::vector<TradeRecord>> trades_by_symbol;
    for (auto& t : trades) {
        if (!wanted(t.symbol)) continue;
        by_symbol[t.symbol];   // symbol may have trades but no quotes
        trades_by_symbol[t.symbol].push_back(std::move(t));
    }
    std::map<std::string, std::vector<DailyRow>> daily_by_symbol;
    for (auto& row : daily) daily_by_symbol[row.symbol].push_back(std::move(row));

    if (filter)
        for (const auto& sym : config.symbols)
            if (!by_symbol.count(sym)) {
                report.warnings.push_back(sym + ": requested symbol has no data");
                ++report.symbols_skipped;
            }

    std::vector<SymbolData> out;
    for (auto& [sym, sd] : by_symbol) {
        sd.symbol = sym;
        sd.trade_norm = config.trade_norm;

        const auto dit = daily_by_symbol.find(sym);
        if (dit == daily_by_symbol.end()) {
            report.warnings.push_back(sym + ": no daily reference rows; " +
                                      "normalized measures will be missing");
        } else {
            try {
                ParseReport ref_rep;
                sd.ref = compute_daily_reference(sym, dit->second, "", "", &ref_rep);
                report.daily_rows_rejected += ref_rep.rejected;
                for (const auto& e : ref_rep.errors) report.warnings.push_back(sym + ": " + e);
                sd.has_ref = true;
            } catch (const std::exception& e) {
                report.warnings.push_back(sym + ": unusable daily reference (" + e.what() +
                                          "); normalized measures will be missing");
            }
        }

        const auto tit = trades_by_symbol.find(sym);
        std::span<const TradeRecord> sym_trades =
            tit == trades_by_symbol.end() ? std::span<const TradeRecord>() : tit->second;
        sd.trades = classify_trades(sym_trades, sd.nbbo, config.classifier);
        out.push_back(std::move(sd));
    }

    if (out.empty()) throw DataError("no usable symbols after ingestion");
    report.symbols_processed = static_cast<int>(out.size());
    return out;
}

MeasurePanel build_symbol_panel(const SymbolData& data, const Registry& registry,
                                const PipelineConfig& config) {
    return build_panel(data, registry, config.session,
                       static_cast<TimestampNs>(config.interval_secs) * kNsPerSec);
}

namespace {

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<PrototypeRow> make_prototype_rows(const std::vector<Cluster>& clusters,
                                              const std::vector<std::string>& ids,
                                              const Registry& registry) {
    std::vector<PrototypeRow> rows;
    for (const auto& c : clusters) {
        PrototypeRow row;
        row.name = ids[c.prototype];
        const MeasureDef* def = find_measure(registry, row.name);
        row.description = def ? def->description : "";
        for (int m : c.members) row.members.push_back(ids[m]);
        rows.push_back(std::move(row));
    }
    // biggest clusters first; prototype name settles ties
    std::sort(rows.begin(), rows.end(), [](const PrototypeRow& a, const PrototypeRow& b) {
        if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
        return a.name < b.name;
    });
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = static_cast<int>(i) + 1;
    return rows;
}

DistanceMatrix submatrix(const DistanceMatrix& m, const std::vector<std::string>& keep) {
    std::vector<std::size_t> idx;
    for (const auto& name : keep)
        for (std::size_t i = 0; i < m.n(); ++i)
            if (m.ids[i] == name) {
                idx.push_back(i);
                break;
            }
    DistanceMatrix out;
    for (auto i : idx) out.ids.push_back(m.ids[i]);
    const std::size_t k = idx.size();
    out.d.resize(k * k);
    out.support.resize(k * k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
            out.d[a * k + b] = m.at(idx[a], idx[b]);
            out.support[a * k + b] = m.support_at(idx[a], idx[b]);
        }
    return out;
}

}  // namespace

ClusterOutput cluster_distances(const DistanceMatrix& averaged, const Registry& registry,
                                double cut_height, bool iterate_pruning) {
    ClusterOutput out;
    DistanceMatrix usable = drop_undefined(averaged, &out.dropped);
    if (usable.n() == 0)
        throw DataError("no measure has a defined averaged distance to any other measure");

    out.tree = minimax_linkage_cluster(usable);
    out.clusters = cut_at_height(out.tree, cut_height);
    out.prototypes = make_prototype_rows(out.clusters, usable.ids, registry);

    if (iterate_pruning) {
        // Re-cluster the surviving prototypes until the set stops shrinking;
        // each round works on the induced submatrix of the averaged distances.
        DistanceMatrix current = std::move(usable);
        std::vector<PrototypeRow> rows = out.prototypes;
        while (rows.size() > 1 && rows.size() < current.n()) {
            std::vector<std::string> keep;
            for (const auto& r : rows) keep.push_back(r.name);
            std::sort(keep.begin(), keep.end());
            current = submatrix(current, keep);
            const PrototypeDendrogram tree = minimax_linkage_cluster(current);
            const auto clusters = cut_at_height(tree, cut_height);
            rows = make_prototype_rows(clusters, current.ids, registry);
        }
        out.prototypes = std::move(rows);
    }
    return out;
}

void write_prototype_csv(const std::string& path, std::span<const PrototypeRow> rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create " + path);
    out << "rank,name,description,cluster_size,cluster_members\n";
    for (const auto& r : rows) {
        out << r.rank << ',' << r.name << ',' << csv_quote(r.description) << ','
            << r.members.size() << ',';
        for (std::size_t i = 0; i < r.members.size(); ++i) {
            if (i) out << ';';
            out << r.members[i];
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

nlohmann::json RunReport::to_json() const {
    nlohmann::json j;
    j["symbols_processed"] = symbols_processed;
    j["symbols_skipped"] = symbols_skipped;
    j["rows_rejected"] = {{"trades", trade_rows_rejected},
                          {"quotes", quote_rows_rejected},
                          {"daily", daily_rows_rejected}};
    j["measures_dropped"] = measures_dropped;
    j["prototypes"] = nlohmann::json::array();
    for (const auto& p : prototypes) {
        nlohmann::json row;
        row["rank"] = p.rank;
        row["name"] = p.name;
        row["description"] = p.description;
        row["cluster_size"] = p.members.size();
        row["members"] = p.members;
        j["prototypes"].push_back(std::move(row));
    }
    j["warnings"] = warnings;
    // stage timings deliberately stay out: report.json must be byte-identical
    // across runs with equal inputs; the CLI prints timings to stderr instead
    return j;
}

namespace {

struct StageClock {
    RunReport& report;

    template <typename Fn>
    auto operator()(const std::string& stage, Fn&& fn) {
        using clock = std::chrono::steady_clock;
        const auto t0 = clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            const std::chrono::duration<double, std::milli> dt = clock::now() - t0;
            report.timings.push_back({stage, dt.count()});
        } else {
            auto result = fn();
            const std::chrono::duration<double, std::milli> dt = clock::now() - t0;
            report.timings.push_back({stage, dt.count()});
            return result;
        }
    }
};

void make_out_dirs(const PipelineConfig& config, bool with_distances) {
    try {
        fs::create_directories(config.out_dir);
        fs::create_directories(fs::path(config.out_dir) / "panels");
        if (with_distances) fs::create_directories(fs::path(config.out_dir) / "distances");
    } catch (const std::exception& e) {
        throw ConfigError(std::string("cannot create output directories: ") + e.what());
    }
}

// Per-symbol fan-out: panels written always, distance matrices only when
// `matrices` is given. Parallel over symbols; each file is written wholly by
// one worker, so outputs do not depend on the schedule.
void process_symbols(const PipelineConfig& config, const Registry& registry,
                     const std::vector<SymbolData>& symbols,
                     std::vector<DistanceMatrix>* matrices) {
    const std::size_t nsym = symbols.size();
    std::vector<std::exception_ptr> failures(nsym);
    const DistanceOptions dopts{config.min_support, config.min_coverage};
#ifdef _OPENMP
    const int threads = config.workers > 0 ? config.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nsym); ++i) {
        try {
            const auto& sd = symbols[i];
            const MeasurePanel panel = build_symbol_panel(sd, registry, config);
            write_panel_csv(config.out_dir + "/panels/" + sd.symbol + ".csv", panel);
            if (config.write_binary_panels)
                write_panel_cache(config.out_dir + "/panels/" + sd.symbol + ".bin", panel);
            if (matrices) {
                (*matrices)[i] = pairwise_distances(panel, dopts);
                if (config.write_symbol_distances)
                    write_distance_csv(config.out_dir + "/distances/" + sd.symbol + ".csv",
                                       (*matrices)[i]);
            }
        } catch (...) {
            failures[i] = std::current_exception();
        }
    }
    for (std::size_t i = 0; i < nsym; ++i)
        if (failures[i]) std::rethrow_exception(failures[i]);
}

}  // namespace

RunReport run_measures(const PipelineConfig& config) {
    config.validate();
    RunReport report;
    StageClock timed{report};
    make_out_dirs(config, false);

    const Registry registry = select_registry(config);
    std::vector<SymbolData> symbols =
        timed("ingest", [&] { return ingest_symbols(config, report); });
    timed("panels", [&] { process_symbols(config, registry, symbols, nullptr); });
    timed("write", [&] {
        write_text_file(config.out_dir + "/report.json", report.to_json().dump(2) + "\n");
    });
    return report;
}

RunReport run_pipeline(const PipelineConfig& config) {
    config.validate();

    RunReport report;
    StageClock timed{report};
    make_out_dirs(config, config.write_symbol_distances);

    const Registry registry = select_registry(config);
    std::vector<SymbolData> symbols =
        timed("ingest", [&] { return ingest_symbols(config, report); });

    std::vector<DistanceMatrix> matrices(symbols.size());
    timed("panels+distances",
          [&] { process_symbols(config, registry, symbols, &matrices); });

    const DistanceMatrix averaged =
        timed("average", [&] { return average_distances(matrices); });

    const ClusterOutput clustered = timed("cluster", [&] {
        return cluster_distances(averaged, registry, config.cut_height, config.iterate_pruning);
    });
    report.measures_dropped = clustered.dropped;
    for (const auto& name : clustered.dropped)
        report.warnings.push_back(name + ": dropped before clustering (undefined distances)");
    report.prototypes = clustered.prototypes;

    timed("write", [&] {
        write_distance_csv(config.out_dir + "/distance_avg.csv", averaged);
        write_text_file(config.out_dir + "/dendrogram.json",
                        dendrogram_to_json(clustered.tree).dump(2) + "\n");
        write_text_file(config.out_dir + "/dendrogram.newick",
                        dendrogram_to_newick(clustered.tree));
        write_text_file(config.out_dir + "/dendrogram.svg",
                        dendrogram_to_svg(clustered.tree, config.cut_height));
        write_prototype_csv(config.out_dir + "/prototypes.csv", clustered.prototypes);
        write_text_file(config.out_dir + "/report.json", report.to_json().dump(2) + "\n");
    });
    return report;
}

}  // namespace mmt
