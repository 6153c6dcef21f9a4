#pragma once
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "techmap/corpus.hpp"
#include "techmap/grid.hpp"

namespace techmap {

// Citation counts into individual cited patents, keyed by interned id.
using CitedCounts = std::unordered_map<std::uint32_t, std::int64_t>;

// Class-level citation structures. class_to_class(i, j) counts citations
// from patents in class i to patents in class j (in-corpus targets only);
// class_to_patent[i] counts citations from class i into each cited patent,
// including targets outside the corpus. The per-class reference set is the
// support of class_to_patent[i].
struct CitationAggregate {
    ClassUniverse universe;
    Grid<std::int64_t> class_to_class;
    std::vector<CitedCounts> class_to_patent;
    std::vector<std::string> cited_ids;  // intern table for CitedCounts keys

    std::size_t reference_set_size(std::size_t i) const { return class_to_patent[i].size(); }
};

CitationAggregate build_citation_aggregate(const Corpus& corpus, const ClassUniverse& universe);

// Co-classification counts. shared(i, j) = patents carrying both classes;
// the diagonal holds the plain class sizes N_i.
struct CoClassCounts {
    ClassUniverse universe;
    Grid<std::int64_t> shared;
    std::vector<std::int64_t> class_patent_counts;       // N_i over all patents
    std::vector<std::int64_t> multiclass_patent_counts;  // N_i over multi-class patents
    std::int64_t multi_class_total = 0;                  // T
};

CoClassCounts build_coclass_counts(const Corpus& corpus, const ClassUniverse& universe);

// Patent counts x(c, i) per agent and class, whole counting: a patent with
// m agents and k admitted classes contributes m*k increments.
struct AgentClassMatrix {
    ClassUniverse universe;
    AgentKind kind = AgentKind::inventor;
    std::map<std::string, std::map<std::size_t, std::int64_t>> counts;
    std::vector<std::int64_t> class_totals;
    std::int64_t grand_total = 0;
};

AgentClassMatrix build_agent_class_matrix(const Corpus& corpus, const ClassUniverse& universe,
                                          AgentKind kind);

struct RtaMatrix {
    ClassUniverse universe;
    AgentKind kind = AgentKind::inventor;
    // Zero entries omitted; value(c, i) defaults to 0.
    std::map<std::string, std::map<std::size_t, double>> values;
};

// Throws ValidationError when the matrix has no patents at all.
RtaMatrix compute_rta(const AgentClassMatrix& acm);

enum class CooccurrenceUniverse { diversified, all };

// observed(i, j) = agents holding patents in both classes; by default the
// universe is restricted to agents active in two or more classes so that
// O, N and T live in one hypergeometric probability space.
struct AgentCooccurrence {
    ClassUniverse universe;
    AgentKind kind = AgentKind::inventor;
    Grid<std::int64_t> observed;
    std::vector<std::int64_t> class_agent_counts;  // N_i
    std::int64_t agent_total = 0;                  // T
};

AgentCooccurrence build_agent_cooccurrence(
    const AgentClassMatrix& acm,
    CooccurrenceUniverse universe_mode = CooccurrenceUniverse::diversified);

// Per-class popularity and impact: class sizes and forward citations
// received from within the corpus.
struct ClassStats {
    ClassUniverse universe;
    std::vector<std::int64_t> patent_counts;
    std::vector<std::int64_t> forward_citations;
};

ClassStats build_class_stats(const Corpus& corpus, const ClassUniverse& universe);

// Everything the measures need, built in one pass over the corpus.
struct AggregateBundle {
    PeriodSpec period;
    ClassUniverse universe;
    CitationAggregate citations;
    CoClassCounts coclass;
    std::map<AgentKind, AgentClassMatrix> agents;
    ClassStats stats;
};

AggregateBundle build_aggregates(const Corpus& corpus, const ClassUniverse& universe,
                                 const PeriodSpec& period);

// Tabular cache: one delimited text file with a header per structure.
void write_aggregates(const AggregateBundle& bundle, const std::filesystem::path& dir);
AggregateBundle read_aggregates(const std::filesystem::path& dir);

void write_class_stats(const ClassStats& stats, const std::filesystem::path& path);
ClassStats read_class_stats(const std::filesystem::path& path);

}  // namespace techmap
