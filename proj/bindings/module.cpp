#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "techmap/pipeline.hpp"
#include "techmap/version.hpp"

namespace py = pybind11;
using namespace techmap;

namespace {

std::vector<std::vector<double>> grid_to_lists(const Grid<double>& g) {
    std::vector<std::vector<double>> rows(g.size(), std::vector<double>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) rows[i][j] = g.at(i, j);
    return rows;
}

MeasureOptions make_options(const std::string& cooccurrence, bool d2_keep_diagonal) {
    MeasureOptions o;
    o.cooccurrence_universe = cooccurrence == "all" ? CooccurrenceUniverse::all
                                                    : CooccurrenceUniverse::diversified;
    o.d2_keep_diagonal = d2_keep_diagonal;
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "patent-class proximity measures and technology network maps";
#ifdef TECHMAP_VERSION_INFO
    m.attr("__version__") = TECHMAP_VERSION_INFO;
#else
    m.attr("__version__") = kVersion;
#endif

    py::register_exception<SchemaError>(m, "SchemaError");
    py::register_exception<ValidationError>(m, "ValidationError");
    py::register_exception<NumericalError>(m, "NumericalError");

    py::class_<PatentRecord>(m, "PatentRecord")
        .def(py::init([](std::string id, int year, std::vector<std::string> classes,
                         std::vector<std::string> references, std::vector<std::string> inventors,
                         std::vector<std::string> organizations,
                         std::vector<std::string> countries) {
                 PatentRecord r{std::move(id),         year,
                                std::move(classes),    std::move(references),
                                std::move(inventors),  std::move(organizations),
                                std::move(countries)};
                 return r;
             }),
             py::arg("patent_id"), py::arg("grant_year"), py::arg("classes"),
             py::arg("references") = std::vector<std::string>{},
             py::arg("inventors") = std::vector<std::string>{},
             py::arg("organizations") = std::vector<std::string>{},
             py::arg("countries") = std::vector<std::string>{})
        .def_readwrite("patent_id", &PatentRecord::patent_id)
        .def_readwrite("grant_year", &PatentRecord::grant_year)
        .def_readwrite("classes", &PatentRecord::classes)
        .def_readwrite("references", &PatentRecord::references)
        .def_readwrite("inventors", &PatentRecord::inventors)
        .def_readwrite("organizations", &PatentRecord::organizations)
        .def_readwrite("countries", &PatentRecord::countries);

    py::class_<PeriodSpec>(m, "PeriodSpec")
        .def(py::init<int, int>(), py::arg("start_year"), py::arg("end_year"))
        .def_static("parse", &PeriodSpec::parse)
        .def_readwrite("start_year", &PeriodSpec::start_year)
        .def_readwrite("end_year", &PeriodSpec::end_year)
        .def("label", &PeriodSpec::label)
        .def("__repr__", [](const PeriodSpec& p) { return "PeriodSpec(" + p.label() + ")"; });

    py::class_<Corpus>(m, "Corpus")
        .def(py::init<std::vector<PatentRecord>>(), py::arg("records"))
        .def("records", &Corpus::records)
        .def("__len__", &Corpus::size);

    py::class_<ClassUniverse>(m, "ClassUniverse")
        .def(py::init<std::vector<std::string>>(), py::arg("codes"))
        .def("codes", &ClassUniverse::codes)
        .def("index_of", &ClassUniverse::index_of)
        .def("__len__", &ClassUniverse::size);

    m.def("parse_corpus",
          [](const std::filesystem::path& path, const std::filesystem::path& schema) {
              return schema.empty() ? parse_corpus(path)
                                    : parse_corpus(path, CorpusSchema::load(schema));
          },
          py::arg("path"), py::arg("schema") = std::filesystem::path{});
    m.def("write_corpus",
          [](const Corpus& c, const std::filesystem::path& path) { write_corpus(c, path); },
          py::arg("corpus"), py::arg("path"));
    m.def("slice_period", &slice_period, py::arg("corpus"), py::arg("period"));
    m.def("build_class_universe", &build_class_universe, py::arg("corpus"),
          py::arg("exclusion_patterns") = std::vector<std::string>{"*99"});
    m.def("count_unclassified", &count_unclassified, py::arg("corpus"), py::arg("universe"));

    py::class_<CitationAggregate>(m, "CitationAggregate")
        .def_property_readonly("class_to_class",
                               [](const CitationAggregate& a) {
                                   std::vector<std::vector<std::int64_t>> rows(
                                       a.universe.size(),
                                       std::vector<std::int64_t>(a.universe.size()));
                                   for (std::size_t i = 0; i < a.universe.size(); ++i)
                                       for (std::size_t j = 0; j < a.universe.size(); ++j)
                                           rows[i][j] = a.class_to_class.at(i, j);
                                   return rows;
                               })
        .def("reference_set_size", &CitationAggregate::reference_set_size);

    py::class_<CoClassCounts>(m, "CoClassCounts")
        .def_readonly("class_patent_counts", &CoClassCounts::class_patent_counts)
        .def_readonly("multi_class_total", &CoClassCounts::multi_class_total)
        .def("shared", [](const CoClassCounts& c, std::size_t i, std::size_t j) {
            return c.shared.at(i, j);
        });

    py::class_<AgentClassMatrix>(m, "AgentClassMatrix")
        .def_readonly("counts", &AgentClassMatrix::counts)
        .def_readonly("grand_total", &AgentClassMatrix::grand_total);

    py::class_<RtaMatrix>(m, "RtaMatrix").def_readonly("values", &RtaMatrix::values);

    py::class_<AgentCooccurrence>(m, "AgentCooccurrence")
        .def_readonly("class_agent_counts", &AgentCooccurrence::class_agent_counts)
        .def_readonly("agent_total", &AgentCooccurrence::agent_total)
        .def("observed", [](const AgentCooccurrence& c, std::size_t i, std::size_t j) {
            return c.observed.at(i, j);
        });

    py::class_<ClassStats>(m, "ClassStats")
        .def_readonly("patent_counts", &ClassStats::patent_counts)
        .def_readonly("forward_citations", &ClassStats::forward_citations);

    py::class_<AggregateBundle>(m, "AggregateBundle")
        .def_readonly("period", &AggregateBundle::period)
        .def_readonly("universe", &AggregateBundle::universe)
        .def_readonly("citations", &AggregateBundle::citations)
        .def_readonly("coclass", &AggregateBundle::coclass)
        .def_readonly("stats", &AggregateBundle::stats);

    m.def("build_citation_aggregate", &build_citation_aggregate);
    m.def("build_coclass_counts", &build_coclass_counts);
    m.def(
        "build_agent_class_matrix",
        [](const Corpus& c, const ClassUniverse& u, const std::string& kind) {
            return build_agent_class_matrix(c, u, agent_kind_from_string(kind));
        },
        py::arg("corpus"), py::arg("universe"), py::arg("kind"));
    m.def("compute_rta", &compute_rta);
    m.def(
        "build_agent_cooccurrence",
        [](const AgentClassMatrix& acm, const std::string& universe_mode) {
            return build_agent_cooccurrence(acm, universe_mode == "all"
                                                     ? CooccurrenceUniverse::all
                                                     : CooccurrenceUniverse::diversified);
        },
        py::arg("acm"), py::arg("universe_mode") = "diversified");
    m.def("build_class_stats", &build_class_stats);
    m.def("build_aggregates", &build_aggregates, py::arg("corpus"), py::arg("universe"),
          py::arg("period"));

    py::class_<ProximityMatrix>(m, "ProximityMatrix")
        .def_property_readonly("id", [](const ProximityMatrix& p) { return to_string(p.id); })
        .def_readonly("period", &ProximityMatrix::period)
        .def_property_readonly("codes",
                               [](const ProximityMatrix& p) { return p.universe.codes(); })
        .def("value",
             [](const ProximityMatrix& p, std::size_t i, std::size_t j) {
                 return p.values.at(i, j);
             })
        .def("values", [](const ProximityMatrix& p) { return grid_to_lists(p.values); });

    m.def(
        "compute_measure",
        [](const AggregateBundle& bundle, const std::string& id, const std::string& cooccurrence,
           bool d2_keep_diagonal) {
            return compute_measure(bundle, measure_from_string(id),
                                   make_options(cooccurrence, d2_keep_diagonal));
        },
        py::arg("bundle"), py::arg("measure"), py::arg("cooccurrence_universe") = "diversified",
        py::arg("d2_keep_diagonal") = false);
    m.def("measure_name",
          [](const std::string& id) { return measure_name(measure_from_string(id)); });
    m.def("write_matrix", &write_matrix, py::arg("matrix"), py::arg("path"));
    m.def(
        "read_matrix",
        [](const std::filesystem::path& path, const std::string& id, const PeriodSpec& period) {
            return read_matrix(path, measure_from_string(id), period);
        },
        py::arg("path"), py::arg("measure"), py::arg("period"));

    py::class_<Edge>(m, "Edge")
        .def_readonly("u", &Edge::u)
        .def_readonly("v", &Edge::v)
        .def_readonly("weight", &Edge::weight)
        .def("__repr__", [](const Edge& e) {
            return "Edge(" + std::to_string(e.u) + ", " + std::to_string(e.v) + ", " +
                   std::to_string(e.weight) + ")";
        });

    py::class_<TechNetwork>(m, "TechNetwork")
        .def_property_readonly("codes",
                               [](const TechNetwork& n) { return n.universe.codes(); })
        .def_readonly("vertex_size", &TechNetwork::vertex_size)
        .def_readonly("edges", &TechNetwork::edges);

    py::class_<Backbone>(m, "Backbone")
        .def_readonly("network", &Backbone::network)
        .def_readonly("parent_edge_count", &Backbone::parent_edge_count);

    py::class_<Partition>(m, "Partition")
        .def_readonly("community", &Partition::community)
        .def_readonly("modularity", &Partition::modularity);

    py::class_<OverlaySet>(m, "OverlaySet")
        .def_readonly("agent_id", &OverlaySet::agent_id)
        .def_readonly("highlighted", &OverlaySet::highlighted)
        .def_readonly("agent_found", &OverlaySet::agent_found);

    m.def("build_network",
          [](const ProximityMatrix& pm, const ClassStats* stats) {
              return stats ? build_network(pm, *stats) : build_network(pm);
          },
          py::arg("matrix"), py::arg("stats") = nullptr);
    m.def("maximum_spanning_tree", &maximum_spanning_tree);
    m.def("filter_backbone", &filter_backbone, py::arg("network"), py::arg("multiplier") = 2);
    m.def("degree_centrality", &degree_centrality);
    m.def("eigenvector_centrality", &eigenvector_centrality, py::arg("network"),
          py::arg("tolerance") = 1e-10, py::arg("max_iterations") = 10000);
    m.def("detect_communities",
          py::overload_cast<const TechNetwork&, std::uint64_t>(&detect_communities),
          py::arg("network"), py::arg("seed") = 42);
    m.def("detect_communities",
          py::overload_cast<const Backbone&, std::uint64_t>(&detect_communities),
          py::arg("backbone"), py::arg("seed") = 42);
    m.def("modularity",
          py::overload_cast<const TechNetwork&, const std::vector<std::size_t>&>(&modularity));
    m.def(
        "overlay",
        [](const TechNetwork& net, const Corpus& corpus, const std::string& agent,
           const std::string& kind, const PeriodSpec& period) {
            return overlay(net, corpus, agent, agent_kind_from_string(kind), period);
        },
        py::arg("network"), py::arg("corpus"), py::arg("agent_id"), py::arg("kind"),
        py::arg("period"));
    m.def("to_graphml", [](const TechNetwork& n) { return to_graphml(n); });
    m.def("to_dot", [](const TechNetwork& n) { return to_dot(n); });
    m.def("to_edge_list", [](const TechNetwork& n) { return to_edge_list(n); });

    m.def("pearson",
          [](const std::vector<double>& x, const std::vector<double>& y) {
              return pearson(x, y);
          });
    m.def("spearman",
          [](const std::vector<double>& x, const std::vector<double>& y) {
              return spearman(x, y);
          });
    m.def("edge_vector", [](const ProximityMatrix& pm) { return edge_vector(pm).values; });

    py::class_<StageRecord>(m, "StageRecord")
        .def_readonly("name", &StageRecord::name)
        .def_readonly("cache_hit", &StageRecord::cache_hit)
        .def_readonly("outputs", &StageRecord::outputs)
        .def_readonly("warnings", &StageRecord::warnings);

    py::class_<RunManifest>(m, "RunManifest")
        .def_readonly("toolkit_version", &RunManifest::toolkit_version)
        .def_readonly("config_digest", &RunManifest::config_digest)
        .def_readonly("input_digest", &RunManifest::input_digest)
        .def_readonly("stages", &RunManifest::stages);

    m.def(
        "run_pipeline",
        [](const std::filesystem::path& config_path) {
            return run_pipeline(PipelineConfig::load(config_path));
        },
        py::arg("config_path"));
    m.def(
        "export_overlay",
        [](const std::filesystem::path& config_path, const std::string& agent,
           const std::string& kind, const std::string& period, const std::string& measure) {
            return export_overlay(PipelineConfig::load(config_path), agent,
                                  agent_kind_from_string(kind), PeriodSpec::parse(period),
                                  measure_from_string(measure));
        },
        py::arg("config_path"), py::arg("agent_id"), py::arg("kind"), py::arg("period"),
        py::arg("measure") = "B1");
}
