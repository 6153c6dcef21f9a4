#include "techmap/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "techmap/util.hpp"
#include "techmap/version.hpp"

namespace techmap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string pair_filter_name(PairFilter p) {
    return p == PairFilter::all ? "all" : "joint_nonzero";
}

PairFilter pair_filter_from(const std::string& s) {
    if (s == "all") return PairFilter::all;
    if (s == "joint_nonzero") return PairFilter::joint_nonzero;
    throw ValidationError("bad pairs switch: " + s);
}

std::string cooccurrence_name(CooccurrenceUniverse u) {
    return u == CooccurrenceUniverse::diversified ? "diversified" : "all";
}

CooccurrenceUniverse cooccurrence_from(const std::string& s) {
    if (s == "diversified") return CooccurrenceUniverse::diversified;
    if (s == "all") return CooccurrenceUniverse::all;
    throw ValidationError("bad cooccurrence_universe switch: " + s);
}

std::string basis_name(CentralityBasis b) {
    return b == CentralityBasis::full ? "full" : "backbone";
}

std::string basis_name(LouvainBasis b) {
    return b == LouvainBasis::full ? "full" : "backbone";
}

}  // namespace

PipelineConfig PipelineConfig::load(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ValidationError("bad config file " + path.string() + ": " + e.what());
    }
    PipelineConfig c;
    const fs::path base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        fs::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };
    try {
        if (!j.contains("input")) throw ValidationError("config missing 'input'");
        if (!j.contains("output_dir")) throw ValidationError("config missing 'output_dir'");
        c.input = resolve(j["input"].get<std::string>());
        c.output_dir = resolve(j["output_dir"].get<std::string>());
        if (j.contains("schema")) c.schema = resolve(j["schema"].get<std::string>());
        if (j.contains("exclusion_patterns"))
            c.exclusion_patterns = j["exclusion_patterns"].get<std::vector<std::string>>();
        if (j.contains("periods")) {
            c.periods.clear();
            for (const auto& p : j["periods"]) c.periods.push_back(PeriodSpec::parse(p));
        }
        if (j.contains("measures")) {
            c.measures.clear();
            for (const auto& m : j["measures"]) {
                auto s = m.get<std::string>();
                if (s == "all") {
                    c.measures.assign(kAllMeasures.begin(), kAllMeasures.end());
                    break;
                }
                c.measures.push_back(measure_from_string(s));
            }
        }
        if (j.contains("backbone_multiplier"))
            c.backbone_multiplier = j["backbone_multiplier"].get<std::size_t>();
        if (j.contains("community_seed"))
            c.community_seed = j["community_seed"].get<std::uint64_t>();
        if (j.contains("centrality_tolerance"))
            c.centrality_tolerance = j["centrality_tolerance"].get<double>();
        if (j.contains("centrality_max_iterations"))
            c.centrality_max_iterations = j["centrality_max_iterations"].get<std::size_t>();
        if (j.contains("pairs")) c.pairs = pair_filter_from(j["pairs"].get<std::string>());
        if (j.contains("cooccurrence_universe"))
            c.cooccurrence_universe = cooccurrence_from(j["cooccurrence_universe"].get<std::string>());
        if (j.contains("d2_keep_diagonal")) c.d2_keep_diagonal = j["d2_keep_diagonal"].get<bool>();
        if (j.contains("centrality_on")) {
            auto s = j["centrality_on"].get<std::string>();
            if (s == "full") c.centrality_on = CentralityBasis::full;
            else if (s == "backbone") c.centrality_on = CentralityBasis::backbone;
            else throw ValidationError("bad centrality_on switch: " + s);
        }
        if (j.contains("louvain_on")) {
            auto s = j["louvain_on"].get<std::string>();
            if (s == "full") c.louvain_on = LouvainBasis::full;
            else if (s == "backbone") c.louvain_on = LouvainBasis::backbone;
            else throw ValidationError("bad louvain_on switch: " + s);
        }
        if (j.contains("jobs")) c.jobs = j["jobs"].get<std::size_t>();
    } catch (const json::exception& e) {
        throw ValidationError("bad config file " + path.string() + ": " + e.what());
    }
    if (c.periods.empty())
        c.periods = {PeriodSpec{1977, 1986}, PeriodSpec{1987, 1996}, PeriodSpec{1997, 2006},
                     PeriodSpec{1976, 2006}};
    if (c.measures.empty()) c.measures.assign(kAllMeasures.begin(), kAllMeasures.end());
    c.validate();
    return c;
}

void PipelineConfig::validate() const {
    if (input.empty()) throw ValidationError("config: input path is empty");
    if (output_dir.empty()) throw ValidationError("config: output_dir is empty");
    if (periods.empty()) throw ValidationError("config: at least one period required");
    if (measures.empty()) throw ValidationError("config: at least one measure required");
    if (backbone_multiplier < 1) throw ValidationError("config: backbone_multiplier must be >= 1");
    if (centrality_tolerance <= 0.0)
        throw ValidationError("config: centrality_tolerance must be positive");
    if (centrality_max_iterations < 1)
        throw ValidationError("config: centrality_max_iterations must be >= 1");
    for (const auto& p : periods)
        if (p.start_year > p.end_year)
            throw ValidationError("config: bad period " + p.label());
}

PeriodSpec PipelineConfig::primary_period() const {
    PeriodSpec primary = periods.front();
    for (const auto& p : periods)
        if (p.span() > primary.span()) primary = p;
    return primary;
}

std::string PipelineConfig::semantic_digest() const {
    // Canonical rendering of every field that changes results. output_dir
    // and jobs only affect where and how fast.
    json j;
    j["version"] = kVersion;
    j["exclusion_patterns"] = exclusion_patterns;
    std::vector<std::string> ps;
    for (const auto& p : periods) ps.push_back(p.label());
    j["periods"] = ps;
    std::vector<std::string> ms;
    for (auto m : measures) ms.push_back(to_string(m));
    j["measures"] = ms;
    j["backbone_multiplier"] = backbone_multiplier;
    j["community_seed"] = community_seed;
    j["centrality_tolerance"] = centrality_tolerance;
    j["centrality_max_iterations"] = centrality_max_iterations;
    j["pairs"] = pair_filter_name(pairs);
    j["cooccurrence_universe"] = cooccurrence_name(cooccurrence_universe);
    j["d2_keep_diagonal"] = d2_keep_diagonal;
    j["centrality_on"] = basis_name(centrality_on);
    j["louvain_on"] = basis_name(louvain_on);
    std::uint64_t h = fnv1a(j.dump());
    if (!schema.empty()) h = fnv1a(read_file(schema), h);
    return digest_hex(h);
}

// --- stage runner -----------------------------------------------------------

namespace {

// Rethrows with the stage name while keeping the error type (and with it
// the CLI exit code).
[[noreturn]] void rethrow_with_stage(const std::string& stage) {
    try {
        throw;
    } catch (const NumericalError& e) {
        throw NumericalError("stage '" + stage + "' failed: " + e.what(), e.residual);
    } catch (const SchemaError& e) {
        throw SchemaError("stage '" + stage + "' failed: " + std::string(e.what()));
    } catch (const ValidationError& e) {
        throw ValidationError("stage '" + stage + "' failed: " + std::string(e.what()));
    } catch (const IoError& e) {
        throw IoError("stage '" + stage + "' failed: " + std::string(e.what()));
    } catch (const std::exception& e) {
        throw Error("stage '" + stage + "' failed: " + std::string(e.what()));
    }
}

class StageRunner {
  public:
    explicit StageRunner(fs::path out_dir) : out_dir_(std::move(out_dir)) {
        stamps_path_ = out_dir_ / "cache" / "stamps.json";
        if (fs::exists(stamps_path_)) {
            try {
                stamps_ = json::parse(read_file(stamps_path_));
            } catch (const json::exception&) {
                stamps_ = json::object();  // stale cache, start over
            }
        } else {
            stamps_ = json::object();
        }
        if (!stamps_.contains("stages") || !stamps_["stages"].is_object())
            stamps_["stages"] = json::object();
    }

    bool is_hit(const std::string& name, std::uint64_t input_digest,
                const std::vector<std::string>& outputs_rel) {
        std::lock_guard lock(mutex_);
        return is_hit_locked(name, input_digest, outputs_rel);
    }

    // Runs fn unless the stamp and every output digest still match.
    void run(const std::string& name, std::uint64_t input_digest,
             const std::vector<std::string>& outputs_rel,
             const std::function<void(std::vector<std::string>&)>& fn, StageRecord& record) {
        record.name = name;
        record.outputs = outputs_rel;
        {
            std::lock_guard lock(mutex_);
            if (is_hit_locked(name, input_digest, outputs_rel)) {
                record.cache_hit = true;
                const auto& st = stamps_["stages"][name];
                if (st.contains("warnings"))
                    record.warnings = st["warnings"].get<std::vector<std::string>>();
                return;
            }
        }
        try {
            fn(record.warnings);
        } catch (...) {
            for (const auto& rel : outputs_rel) {
                std::error_code ec;
                fs::remove(out_dir_ / rel, ec);
            }
            {
                std::lock_guard lock(mutex_);
                stamps_["stages"].erase(name);
            }
            rethrow_with_stage(name);
        }
        json outputs = json::object();
        for (const auto& rel : outputs_rel) {
            auto p = out_dir_ / rel;
            if (!fs::exists(p))
                throw Error("stage '" + name + "' did not produce " + rel);
            outputs[rel] = digest_hex(digest_file(p));
        }
        std::lock_guard lock(mutex_);
        stamps_["stages"][name] = {{"input", digest_hex(input_digest)},
                                   {"outputs", outputs},
                                   {"warnings", record.warnings}};
    }

    void save() {
        std::lock_guard lock(mutex_);
        write_file_atomic(stamps_path_, stamps_.dump(2) + "\n");
    }

  private:
    bool is_hit_locked(const std::string& name, std::uint64_t input_digest,
                       const std::vector<std::string>& outputs_rel) {
        const auto& stages = stamps_["stages"];
        if (!stages.contains(name)) return false;
        const auto& st = stages[name];
        if (!st.contains("input") || st["input"] != digest_hex(input_digest)) return false;
        if (!st.contains("outputs")) return false;
        for (const auto& rel : outputs_rel) {
            if (!st["outputs"].contains(rel)) return false;
            auto p = out_dir_ / rel;
            if (!fs::exists(p)) return false;
            if (st["outputs"][rel] != digest_hex(digest_file(p))) return false;
        }
        return true;
    }

    fs::path out_dir_;
    fs::path stamps_path_;
    json stamps_;
    std::mutex mutex_;
};

std::string stage_key(std::initializer_list<std::string> parts) {
    std::string s;
    for (const auto& p : parts) {
        s += p;
        s += '|';
    }
    return s;
}

json manifest_to_json(const RunManifest& m) {
    json j;
    j["toolkit_version"] = m.toolkit_version;
    j["config_digest"] = m.config_digest;
    j["input_digest"] = m.input_digest;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    auto stages = json::array();
    for (const auto& s : m.stages) {
        json sj;
        sj["name"] = s.name;
        sj["cache_hit"] = s.cache_hit;
        sj["outputs"] = s.outputs;
        sj["warnings"] = s.warnings;
        stages.push_back(sj);
    }
    j["stages"] = stages;
    return j;
}

std::string sanitize_filename(const std::string& s) {
    std::string out;
    for (char c : s)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') ? c : '_';
    return out.empty() ? std::string("_") : out;
}

std::uint64_t digest_files(const std::vector<fs::path>& paths) {
    std::uint64_t h = kFnvBasis;
    for (const auto& p : paths) {
        h = fnv1a(p.filename().string(), h);
        h = fnv1a(digest_hex(digest_file(p)), h);
    }
    return h;
}

}  // namespace

RunManifest run_pipeline(const PipelineConfig& config) {
    config.validate();
    const fs::path out = config.output_dir;
    fs::create_directories(out);

    RunManifest manifest;
    manifest.toolkit_version = kVersion;
    manifest.config_digest = config.semantic_digest();
    manifest.started_at = iso8601_utc_now();

    const std::string input_bytes = read_file(config.input);
    manifest.input_digest = digest_hex(fnv1a(input_bytes));

    CorpusSchema schema;
    if (!config.schema.empty()) schema = CorpusSchema::load(config.schema);

    StageRunner runner(out);

    // ingest: normalize the raw records into the canonical corpus file.
    StageRecord ingest_record;
    const std::string corpus_rel = "corpus.csv";
    const std::uint64_t ingest_key = fnv1a(stage_key(
        {"ingest", kVersion, manifest.input_digest,
         config.schema.empty() ? "default-schema" : digest_hex(fnv1a(read_file(config.schema)))}));
    runner.run("ingest", ingest_key, {corpus_rel},
               [&](std::vector<std::string>&) {
                   Corpus corpus = parse_corpus_text(input_bytes, schema);
                   write_corpus(corpus, out / corpus_rel);
               },
               ingest_record);
    manifest.stages.push_back(ingest_record);

    const std::string corpus_digest = digest_hex(digest_file(out / corpus_rel));

    // The corpus and universe are shared by every later stage; load lazily
    // so fully cached reruns stay cheap.
    std::optional<Corpus> corpus;
    std::optional<ClassUniverse> universe;
    std::mutex corpus_mutex;
    auto with_corpus = [&]() -> const Corpus& {
        std::lock_guard lock(corpus_mutex);
        if (!corpus) corpus = parse_corpus(out / corpus_rel);
        return *corpus;
    };
    auto with_universe = [&]() -> const ClassUniverse& {
        const Corpus& c = with_corpus();
        std::lock_guard lock(corpus_mutex);
        if (!universe) universe = build_class_universe(c, config.exclusion_patterns);
        return *universe;
    };

    const std::vector<std::string> aggregate_files = {
        "universe.csv",       "citations_class_class.csv", "citations_class_patent.csv",
        "coclass_shared.csv", "class_counts.csv",          "agents_inventor.csv",
        "agents_organization.csv", "agents_country.csv",   "class_stats.csv",
        "meta.csv"};

    std::string exclusions = "[";
    for (const auto& e : config.exclusion_patterns) exclusions += e + ",";
    exclusions += "]";

    // aggregate: one directory of count tables per period.
    std::vector<StageRecord> aggregate_records(config.periods.size());
    std::vector<std::uint64_t> aggregate_keys(config.periods.size());
    for (std::size_t pi = 0; pi < config.periods.size(); ++pi) {
        const auto& period = config.periods[pi];
        const std::string rel_dir = "aggregates/" + period.label();
        std::vector<std::string> rels;
        for (const auto& f : aggregate_files) rels.push_back(rel_dir + "/" + f);
        const std::uint64_t key = fnv1a(
            stage_key({"aggregate", kVersion, corpus_digest, period.label(), exclusions}));
        aggregate_keys[pi] = key;
        runner.run("aggregate/" + period.label(), key, rels,
                   [&](std::vector<std::string>& warnings) {
                       const ClassUniverse& u = with_universe();
                       Corpus sliced = slice_period(with_corpus(), period);
                       auto unclassified = count_unclassified(sliced, u);
                       if (unclassified > 0)
                           warnings.push_back(std::to_string(unclassified) + " of " +
                                              std::to_string(sliced.size()) +
                                              " records contribute to no admitted class");
                       write_aggregates(build_aggregates(sliced, u, period), out / rel_dir);
                   },
                   aggregate_records[pi]);
        manifest.stages.push_back(aggregate_records[pi]);
    }

    // measure: one matrix file per (period, measure).
    struct MeasureTask {
        std::size_t period_index;
        MeasureId id;
    };
    std::vector<MeasureTask> tasks;
    for (std::size_t pi = 0; pi < config.periods.size(); ++pi)
        for (auto id : config.measures) tasks.push_back({pi, id});

    std::vector<std::uint64_t> aggregate_digests(config.periods.size());
    for (std::size_t pi = 0; pi < config.periods.size(); ++pi) {
        std::vector<fs::path> files;
        for (const auto& f : aggregate_files)
            files.push_back(out / ("aggregates/" + config.periods[pi].label()) / f);
        aggregate_digests[pi] = digest_files(files);
    }

    std::map<std::size_t, std::shared_ptr<const AggregateBundle>> bundles;
    std::mutex bundle_mutex;
    auto with_bundle = [&](std::size_t pi) {
        std::lock_guard lock(bundle_mutex);
        auto it = bundles.find(pi);
        if (it != bundles.end()) return it->second;
        auto bundle = std::make_shared<const AggregateBundle>(
            read_aggregates(out / ("aggregates/" + config.periods[pi].label())));
        bundles.emplace(pi, bundle);
        return bundle;
    };

    MeasureOptions measure_options;
    measure_options.cooccurrence_universe = config.cooccurrence_universe;
    measure_options.d2_keep_diagonal = config.d2_keep_diagonal;

    std::vector<StageRecord> measure_records(tasks.size());
    parallel_for(tasks.size(), config.jobs, [&](std::size_t ti) {
        const auto& task = tasks[ti];
        const auto& period = config.periods[task.period_index];
        const std::string rel =
            "matrices/" + period.label() + "/" + to_string(task.id) + ".csv";
        std::string opts;
        switch (task.id) {
            case MeasureId::C1:
            case MeasureId::C2:
            case MeasureId::C3:
                opts = cooccurrence_name(config.cooccurrence_universe);
                break;
            case MeasureId::D2:
                opts = config.d2_keep_diagonal ? "keep_diagonal" : "zero_diagonal";
                break;
            default: break;
        }
        const std::uint64_t key = fnv1a(stage_key(
            {"measure", kVersion, digest_hex(aggregate_digests[task.period_index]),
             period.label(), to_string(task.id), opts}));
        runner.run("measure/" + period.label() + "/" + to_string(task.id), key, {rel},
                   [&](std::vector<std::string>&) {
                       auto bundle = with_bundle(task.period_index);
                       write_matrix(compute_measure(*bundle, task.id, measure_options),
                                    out / rel);
                   },
                   measure_records[ti]);
    });
    for (auto& r : measure_records) manifest.stages.push_back(std::move(r));

    // network: backbone exports and centralities for the primary period.
    const PeriodSpec primary = config.primary_period();
    const std::size_t primary_index = static_cast<std::size_t>(
        std::find(config.periods.begin(), config.periods.end(), primary) -
        config.periods.begin());
    const std::string primary_label = primary.label();
    const std::string stats_rel = "aggregates/" + primary_label + "/class_stats.csv";

    const std::string network_opts = stage_key(
        {std::to_string(config.backbone_multiplier), std::to_string(config.community_seed),
         format_sig12(config.centrality_tolerance),
         std::to_string(config.centrality_max_iterations), basis_name(config.centrality_on),
         basis_name(config.louvain_on)});

    std::vector<StageRecord> network_records(config.measures.size());
    parallel_for(config.measures.size(), config.jobs, [&](std::size_t mi) {
        const MeasureId id = config.measures[mi];
        const std::string matrix_rel = "matrices/" + primary_label + "/" + to_string(id) + ".csv";
        const std::string prefix = "networks/" + to_string(id);
        const std::vector<std::string> rels = {prefix + ".graphml", prefix + ".dot",
                                               prefix + ".edges.csv",
                                               prefix + ".centrality.csv"};
        const std::uint64_t key = fnv1a(stage_key(
            {"network", kVersion, digest_hex(digest_file(out / matrix_rel)),
             digest_hex(digest_file(out / stats_rel)), network_opts}));
        runner.run(
            "network/" + to_string(id), key, rels,
            [&](std::vector<std::string>& warnings) {
                auto pm = read_matrix(out / matrix_rel, id, primary);
                auto stats = read_class_stats(out / stats_rel);
                TechNetwork net = build_network(pm, stats);
                Backbone bb = filter_backbone(net, config.backbone_multiplier);
                Partition part = config.louvain_on == LouvainBasis::backbone
                                     ? detect_communities(bb, config.community_seed)
                                     : detect_communities(net, config.community_seed);
                GraphExportOptions gopts;
                gopts.partition = &part;
                write_file_atomic(out / rels[0], to_graphml(bb.network, gopts));
                write_file_atomic(out / rels[1], to_dot(bb.network, gopts));
                write_file_atomic(out / rels[2], to_edge_list(bb.network));

                const TechNetwork& basis =
                    config.centrality_on == CentralityBasis::backbone ? bb.network : net;
                auto degree = degree_centrality(basis);
                std::vector<double> eigen;
                try {
                    eigen = eigenvector_centrality(basis, config.centrality_tolerance,
                                                   config.centrality_max_iterations);
                } catch (const ValidationError& e) {
                    warnings.push_back("eigenvector centrality unavailable: " +
                                       std::string(e.what()));
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
                write_file_atomic(out / rels[3], csv);
            },
            network_records[mi]);
    });
    for (auto& r : network_records) manifest.stages.push_back(std::move(r));

    // compare: the paper-style tables and the machine-readable report.
    std::vector<std::string> table_rels;
    if (config.periods.size() >= 2)
        for (auto id : config.measures)
            table_rels.push_back("tables/table2_" + to_string(id) + ".csv");
    table_rels.push_back("tables/table3.csv");
    table_rels.push_back("tables/table4a.csv");
    table_rels.push_back("tables/table4b.csv");
    table_rels.push_back("tables/table5.csv");
    table_rels.push_back("tables/report.json");

    std::vector<fs::path> matrix_files;
    for (const auto& period : config.periods)
        for (auto id : config.measures)
            matrix_files.push_back(out / ("matrices/" + period.label()) / (to_string(id) + ".csv"));
    const std::uint64_t compare_key = fnv1a(stage_key(
        {"compare", kVersion, digest_hex(digest_files(matrix_files)),
         digest_hex(digest_file(out / stats_rel)), pair_filter_name(config.pairs),
         std::to_string(config.backbone_multiplier), format_sig12(config.centrality_tolerance),
         std::to_string(config.centrality_max_iterations), basis_name(config.centrality_on)}));

    StageRecord compare_record;
    runner.run("compare", compare_key, table_rels,
               [&](std::vector<std::string>&) {
                   std::vector<ProximityMatrix> matrices;
                   for (const auto& period : config.periods)
                       for (auto id : config.measures)
                           matrices.push_back(read_matrix(
                               out / ("matrices/" + period.label()) / (to_string(id) + ".csv"),
                               id, period));
                   auto stats = read_class_stats(out / stats_rel);
                   CompareOptions copts;
                   copts.pairs = config.pairs;
                   copts.centrality_on_backbone =
                       config.centrality_on == CentralityBasis::backbone;
                   copts.backbone_multiplier = config.backbone_multiplier;
                   copts.centrality_tolerance = config.centrality_tolerance;
                   copts.centrality_max_iterations = config.centrality_max_iterations;
                   write_report(compare_measures(matrices, stats, copts), out / "tables");
               },
               compare_record);
    manifest.stages.push_back(compare_record);

    runner.save();
    manifest.finished_at = iso8601_utc_now();
    write_file_atomic(out / "run_manifest.json", manifest_to_json(manifest).dump(2) + "\n");
    return manifest;
}

std::vector<fs::path> export_overlay(const PipelineConfig& config, const std::string& agent_id,
                                     AgentKind kind, const PeriodSpec& period,
                                     MeasureId measure) {
    const fs::path out = config.output_dir;
    const PeriodSpec primary = config.primary_period();
    const fs::path corpus_path = out / "corpus.csv";
    const fs::path matrix_path =
        out / ("matrices/" + primary.label()) / (to_string(measure) + ".csv");
    const fs::path stats_path = out / ("aggregates/" + primary.label()) / "class_stats.csv";
    if (!fs::exists(corpus_path))
        throw ValidationError("missing " + corpus_path.string() + "; run the ingest stage first");
    if (!fs::exists(matrix_path))
        throw ValidationError("missing " + matrix_path.string() + "; run the measure stage first");
    if (!fs::exists(stats_path))
        throw ValidationError("missing " + stats_path.string() +
                              "; run the aggregate stage first");

    Corpus corpus = parse_corpus(corpus_path);
    auto pm = read_matrix(matrix_path, measure, primary);
    auto stats = read_class_stats(stats_path);
    TechNetwork net = build_network(pm, stats);
    Backbone bb = filter_backbone(net, config.backbone_multiplier);
    Partition part = config.louvain_on == LouvainBasis::backbone
                         ? detect_communities(bb, config.community_seed)
                         : detect_communities(net, config.community_seed);
    OverlaySet set = overlay(net, corpus, agent_id, kind, period);

    StageRecord record;
    record.name = "overlay/" + to_string(measure) + "/" + to_string(kind) + "/" + agent_id +
                  "/" + period.label();
    if (!set.agent_found)
        record.warnings.push_back("agent '" + agent_id + "' not found in the corpus");
    else if (set.highlighted.empty())
        record.warnings.push_back("overlay is empty for " + period.label());

    GraphExportOptions gopts;
    gopts.partition = &part;
    gopts.overlay = &set;
    const std::string stem = "overlays/" + to_string(measure) + "_" + to_string(kind) + "_" +
                             sanitize_filename(agent_id) + "_" + period.label();
    std::vector<fs::path> written;
    write_file_atomic(out / (stem + ".graphml"), to_graphml(bb.network, gopts));
    written.push_back(out / (stem + ".graphml"));
    write_file_atomic(out / (stem + ".dot"), to_dot(bb.network, gopts));
    written.push_back(out / (stem + ".dot"));
    record.outputs = {stem + ".graphml", stem + ".dot"};

    // Append to the manifest so the warning is visible in run metadata.
    const fs::path manifest_path = out / "run_manifest.json";
    json mj;
    if (fs::exists(manifest_path)) {
        try {
            mj = json::parse(read_file(manifest_path));
        } catch (const json::exception&) {
            mj = json::object();
        }
    }
    if (!mj.contains("stages") || !mj["stages"].is_array()) mj["stages"] = json::array();
    json sj;
    sj["name"] = record.name;
    sj["cache_hit"] = false;
    sj["outputs"] = record.outputs;
    sj["warnings"] = record.warnings;
    mj["stages"].push_back(sj);
    write_file_atomic(manifest_path, mj.dump(2) + "\n");
    return written;
}

}  // namespace techmap
