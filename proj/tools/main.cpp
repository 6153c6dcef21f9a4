// techmap: patent-class proximity measures, technology network maps and
// the cross-measure comparison pipeline.
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "techmap/pipeline.hpp"
#include "techmap/util.hpp"
#include "techmap/version.hpp"

namespace fs = std::filesystem;
using namespace techmap;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

int run_ingest(const std::string& input, const std::string& schema_path,
               const std::string& out, bool verbose) {
    CorpusSchema schema;
    if (!schema_path.empty()) schema = CorpusSchema::load(schema_path);
    Corpus corpus = parse_corpus(input, schema);
    write_corpus(corpus, out);
    if (verbose)
        std::cerr << "ingested " << corpus.size() << " records -> " << out << "\n";
    return 0;
}

int run_aggregate(const std::string& corpus_path, const std::string& out_dir,
                  const std::vector<std::string>& exclusions, const std::string& period_arg,
                  bool verbose) {
    Corpus corpus = parse_corpus(corpus_path);
    ClassUniverse universe = build_class_universe(corpus, exclusions);
    PeriodSpec period;
    if (!period_arg.empty()) {
        period = PeriodSpec::parse(period_arg);
        corpus = slice_period(corpus, period);
    } else {
        period = {0, 0};
        for (const auto& r : corpus.records()) {
            if (period == PeriodSpec{0, 0}) period = {r.grant_year, r.grant_year};
            period.start_year = std::min(period.start_year, r.grant_year);
            period.end_year = std::max(period.end_year, r.grant_year);
        }
    }
    write_aggregates(build_aggregates(corpus, universe, period), out_dir);
    if (verbose) {
        auto skipped = count_unclassified(corpus, universe);
        std::cerr << "aggregated " << corpus.size() << " records over " << universe.size()
                  << " classes";
        if (skipped > 0) std::cerr << " (" << skipped << " records without admitted class)";
        std::cerr << " -> " << out_dir << "\n";
    }
    return 0;
}

int run_measure(const std::string& agg_dir, const std::string& measure_arg,
                const std::string& out, const std::string& cooccurrence, bool d2_keep_diagonal,
                bool verbose) {
    AggregateBundle bundle = read_aggregates(agg_dir);
    MeasureOptions options;
    options.cooccurrence_universe = cooccurrence == "all" ? CooccurrenceUniverse::all
                                                          : CooccurrenceUniverse::diversified;
    options.d2_keep_diagonal = d2_keep_diagonal;
    if (measure_arg == "all") {
        fs::create_directories(out);
        for (auto id : kAllMeasures) {
            auto path = fs::path(out) / (to_string(id) + ".csv");
            write_matrix(compute_measure(bundle, id, options), path);
            if (verbose) std::cerr << to_string(id) << " -> " << path.string() << "\n";
        }
    } else {
        auto id = measure_from_string(measure_arg);
        write_matrix(compute_measure(bundle, id, options), out);
        if (verbose) std::cerr << to_string(id) << " -> " << out << "\n";
    }
    return 0;
}

int run_network(const std::string& matrix_path, const std::string& stats_path,
                std::size_t multiplier, bool communities, std::uint64_t seed,
                const std::string& out_prefix, bool verbose) {
    // The measure id only labels the in-memory matrix here; derive it from
    // the file name when possible.
    MeasureId id = MeasureId::A1;
    try {
        id = measure_from_string(fs::path(matrix_path).stem().string());
    } catch (const ValidationError&) {
    }
    auto pm = read_matrix(matrix_path, id, {0, 0});
    auto stats = read_class_stats(stats_path);
    TechNetwork net = build_network(pm, stats);
    Backbone bb = filter_backbone(net, multiplier);

    Partition part;
    GraphExportOptions gopts;
    if (communities) {
        part = detect_communities(bb, seed);
        gopts.partition = &part;
    }
    write_file_atomic(out_prefix + ".graphml", to_graphml(bb.network, gopts));
    write_file_atomic(out_prefix + ".dot", to_dot(bb.network, gopts));
    write_file_atomic(out_prefix + ".edges.csv", to_edge_list(bb.network));

    auto degree = degree_centrality(net);
    std::vector<double> eigen;
    try {
        eigen = eigenvector_centrality(net);
    } catch (const ValidationError& e) {
        std::cerr << "warning: eigenvector centrality unavailable: " << e.what() << "\n";
    }
    std::string csv = "class;degree;eigenvector\n";
    const auto& codes = net.universe.codes();
    for (std::size_t i = 0; i < codes.size(); ++i) {
        csv += codes[i];
        csv += ';';
        csv += format_sig12(degree[i]);
        csv += ';';
        csv += eigen.empty() ? "" : format_sig12(eigen[i]);
        csv += '\n';
    }
    write_file_atomic(out_prefix + ".centrality.csv", csv);
    if (verbose)
        std::cerr << "backbone: " << bb.network.edges.size() << " of "
                  << bb.parent_edge_count << " edges"
                  << (communities ? ", modularity " + format_fixed3(part.modularity) : "")
                  << " -> " << out_prefix << ".*\n";
    return 0;
}

int run_compare(const std::string& matrices_dir, const std::string& stats_path,
                const std::string& out_dir, const std::string& pairs, bool verbose) {
    // Accepts either a flat directory of <ID>.csv files (single period) or
    // per-period subdirectories named START-END.
    std::vector<ProximityMatrix> matrices;
    auto load_dir = [&](const fs::path& dir, const PeriodSpec& period) {
        for (auto id : kAllMeasures) {
            auto p = dir / (to_string(id) + ".csv");
            if (fs::exists(p)) matrices.push_back(read_matrix(p, id, period));
        }
    };
    std::vector<std::pair<PeriodSpec, fs::path>> period_dirs;
    for (const auto& entry : fs::directory_iterator(matrices_dir)) {
        if (!entry.is_directory()) continue;
        try {
            period_dirs.emplace_back(PeriodSpec::parse(entry.path().filename().string()),
                                     entry.path());
        } catch (const ValidationError&) {
        }
    }
    std::sort(period_dirs.begin(), period_dirs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (period_dirs.empty()) {
        load_dir(matrices_dir, {0, 0});
    } else {
        for (const auto& [period, dir] : period_dirs) load_dir(dir, period);
    }
    if (matrices.empty())
        throw ValidationError("no matrix files found under " + matrices_dir);

    CompareOptions options;
    options.pairs = pairs == "joint_nonzero" ? PairFilter::joint_nonzero : PairFilter::all;
    auto stats = read_class_stats(stats_path);
    auto written = write_report(compare_measures(matrices, stats, options), out_dir);
    if (verbose)
        std::cerr << "compared " << matrices.size() << " matrices -> " << written.size()
                  << " report files in " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"technology network mapping toolkit"};
    app.set_version_flag("--version", std::string(kVersion));
    bool verbose = false;
    app.add_flag("--verbose", verbose, "print progress to stderr");
    std::size_t jobs = 1;
    app.add_option("--jobs", jobs, "worker threads for the pipeline");
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "normalize a raw patent record file");
    std::string in_input, in_schema, in_out;
    ingest->add_option("--input", in_input, "raw delimited record file")->required();
    ingest->add_option("--schema", in_schema, "JSON column-mapping file");
    ingest->add_option("--out", in_out, "normalized corpus file")->required();

    // aggregate
    auto* aggregate = app.add_subcommand("aggregate", "build count structures from a corpus");
    std::string ag_corpus, ag_out, ag_period;
    std::vector<std::string> ag_exclude{"*99"};
    aggregate->add_option("--corpus", ag_corpus, "normalized corpus file")->required();
    aggregate->add_option("--out-dir", ag_out, "aggregate cache directory")->required();
    aggregate->add_option("--exclude", ag_exclude, "class exclusion patterns");
    aggregate->add_option("--period", ag_period, "restrict to START-END years");

    // measure
    auto* measure = app.add_subcommand("measure", "compute proximity matrices");
    std::string me_agg, me_measure = "all", me_out, me_cooc = "diversified";
    bool me_d2_keep = false;
    measure->add_option("--agg-dir", me_agg, "aggregate cache directory")->required();
    measure->add_option("--measure", me_measure, "measure id (A1..D3) or 'all'");
    measure->add_option("--out", me_out, "output file (or directory for 'all')")->required();
    measure->add_option("--cooccurrence-universe", me_cooc, "diversified|all")
        ->check(CLI::IsMember({"diversified", "all"}));
    measure->add_flag("--d2-keep-diagonal", me_d2_keep, "keep the shared-count diagonal in D2");

    // network
    auto* network = app.add_subcommand("network", "build and export a technology network");
    std::string ne_matrix, ne_stats, ne_out;
    std::size_t ne_multiplier = 2;
    std::uint64_t ne_seed = 42;
    bool ne_communities = false;
    network->add_option("--matrix", ne_matrix, "proximity matrix file")->required();
    network->add_option("--stats", ne_stats, "class_stats.csv file")->required();
    network->add_option("--backbone-multiplier", ne_multiplier, "kept edges per vertex");
    network->add_flag("--communities", ne_communities, "run Louvain on the backbone");
    network->add_option("--seed", ne_seed, "community detection seed");
    network->add_option("--out", ne_out, "output path prefix")->required();

    // compare
    auto* compare = app.add_subcommand("compare", "cross-measure comparison tables");
    std::string co_matrices, co_stats, co_out, co_pairs = "all";
    compare->add_option("--matrices", co_matrices, "matrix directory (flat or per-period)")
        ->required();
    compare->add_option("--stats", co_stats, "class_stats.csv file")->required();
    compare->add_option("--out-dir", co_out, "report directory")->required();
    compare->add_option("--pairs", co_pairs, "all|joint_nonzero")
        ->check(CLI::IsMember({"all", "joint_nonzero"}));

    // overlay
    auto* overlay_cmd = app.add_subcommand("overlay", "export an agent overlay map");
    std::string ov_config, ov_agent, ov_kind = "organization", ov_period, ov_measure = "B1";
    overlay_cmd->add_option("--config", ov_config, "pipeline config file")->required();
    overlay_cmd->add_option("--agent", ov_agent, "agent id")->required();
    overlay_cmd->add_option("--kind", ov_kind, "inventor|organization|country")
        ->check(CLI::IsMember({"inventor", "organization", "country"}));
    overlay_cmd->add_option("--period", ov_period, "START-END years")->required();
    overlay_cmd->add_option("--measure", ov_measure, "measure id for the base map");

    // run
    auto* run = app.add_subcommand("run", "run the full pipeline from a config file");
    std::string run_config;
    run->add_option("--config", run_config, "pipeline config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (*ingest) return run_ingest(in_input, in_schema, in_out, verbose);
        if (*aggregate) return run_aggregate(ag_corpus, ag_out, ag_exclude, ag_period, verbose);
        if (*measure) return run_measure(me_agg, me_measure, me_out, me_cooc, me_d2_keep, verbose);
        if (*network)
            return run_network(ne_matrix, ne_stats, ne_multiplier, ne_communities, ne_seed,
                               ne_out, verbose);
        if (*compare) return run_compare(co_matrices, co_stats, co_out, co_pairs, verbose);
        if (*overlay_cmd) {
            auto config = PipelineConfig::load(ov_config);
            auto files = export_overlay(config, ov_agent, agent_kind_from_string(ov_kind),
                                        PeriodSpec::parse(ov_period),
                                        measure_from_string(ov_measure));
            if (verbose)
                for (const auto& f : files) std::cerr << "wrote " << f.string() << "\n";
            return 0;
        }
        if (*run) {
            auto config = PipelineConfig::load(run_config);
            if (jobs > 1) config.jobs = jobs;
            auto manifest = run_pipeline(config);
            if (verbose) {
                std::size_t hits = 0;
                for (const auto& s : manifest.stages)
                    if (s.cache_hit) ++hits;
                std::cerr << manifest.stages.size() << " stages (" << hits
                          << " cache hits) -> " << config.output_dir.string() << "\n";
                for (const auto& s : manifest.stages)
                    for (const auto& w : s.warnings)
                        std::cerr << "warning [" << s.name << "]: " << w << "\n";
            }
            return 0;
        }
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
