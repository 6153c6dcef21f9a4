#pragma once
#include <array>
#include <filesystem>
#include <string>

#include "techmap/aggregate.hpp"

namespace techmap {

// The twelve class-proximity measures. A: citation based, B: agent
// diversification likelihood, C: agent co-occurrence t-statistic,
// D: co-classification based.
enum class MeasureId { A1, A2, A3, B1, B2, B3, C1, C2, C3, D1, D2, D3 };

inline constexpr std::array<MeasureId, 12> kAllMeasures = {
    MeasureId::A1, MeasureId::A2, MeasureId::A3, MeasureId::B1,
    MeasureId::B2, MeasureId::B3, MeasureId::C1, MeasureId::C2,
    MeasureId::C3, MeasureId::D1, MeasureId::D2, MeasureId::D3};

std::string to_string(MeasureId id);
MeasureId measure_from_string(const std::string& s);
std::string measure_name(MeasureId id);   // human label for reports
AgentKind measure_agent_kind(MeasureId id);  // valid for B* and C* only

// Symmetric class-by-class proximity values with zero diagonal.
struct ProximityMatrix {
    MeasureId id = MeasureId::A1;
    PeriodSpec period;
    ClassUniverse universe;
    Grid<double> values;
};

struct MeasureOptions {
    CooccurrenceUniverse cooccurrence_universe = CooccurrenceUniverse::diversified;
    bool d2_keep_diagonal = false;
};

// A1: Jaccard index of the per-class cited-patent sets.
ProximityMatrix normalized_co_reference(const CitationAggregate& agg);
// A2: cosine of class-to-class citation count rows.
ProximityMatrix class_class_cosine(const CitationAggregate& agg);
// A3: cosine over the cited-patent dimension.
ProximityMatrix class_patent_cosine(const CitationAggregate& agg);
// B1/B2/B3: min conditional probability of specialization (RTA > 1) in one
// class given specialization in the other.
ProximityMatrix diversification_likelihood(const RtaMatrix& rta);
// C1/C2/C3: deviation of observed agent co-occurrence from the
// hypergeometric expectation, in standard deviations.
ProximityMatrix cooccurrence_frequency(const AgentCooccurrence& co);
// D1: Jaccard index of class patent sets.
ProximityMatrix normalized_co_classification(const CoClassCounts& cc);
// D2: cosine of shared-count rows, diagonal zeroed first.
ProximityMatrix coclass_cosine(const CoClassCounts& cc, bool keep_diagonal = false);
// D3: co-occurrence t-statistic over patents instead of agents.
ProximityMatrix patent_cooccurrence_frequency(const CoClassCounts& cc);

ProximityMatrix compute_measure(const AggregateBundle& bundle, MeasureId id,
                                const MeasureOptions& options = {});

// Matrix files: first row and column carry class codes, full symmetric
// matrix, 12 significant digits.
void write_matrix(const ProximityMatrix& pm, const std::filesystem::path& path);
ProximityMatrix read_matrix(const std::filesystem::path& path, MeasureId id,
                            const PeriodSpec& period);

}  // namespace techmap
