#pragma once
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "techmap/network.hpp"

namespace techmap {

// Correlation of a constant vector is undefined; such cells render as
// blanks in the tables instead of 0 or an error.
using Cell = std::optional<double>;

Cell pearson(std::span<const double> x, std::span<const double> y);
Cell spearman(std::span<const double> x, std::span<const double> y);
// Average ranks, ties get the mean rank (1-based).
std::vector<double> average_ranks(std::span<const double> v);

// Upper-triangle flatten of a proximity matrix in lexicographic class-pair
// order, diagonal excluded.
struct EdgeVector {
    MeasureId id = MeasureId::A1;
    PeriodSpec period;
    std::vector<double> values;
};

EdgeVector edge_vector(const ProximityMatrix& pm);

enum class PairFilter { all, joint_nonzero };

// Symmetric table of correlation coefficients with per-row averages over
// the other rows.
struct CorrelationTable {
    std::vector<std::string> labels;
    Grid<Cell> cells;
    std::vector<Cell> row_average;
};

// Pearson over edge vectors of one measure across periods.
CorrelationTable temporal_stability(const std::vector<EdgeVector>& per_period,
                                    PairFilter pairs = PairFilter::all);
// Pearson over edge vectors of all measures for one period.
CorrelationTable cross_measure_correlation(const std::vector<EdgeVector>& vectors,
                                           PairFilter pairs = PairFilter::all);

enum class CentralityKind { degree, eigenvector };

// Pearson over per-vertex centrality vectors of the given networks.
CorrelationTable centrality_correlation(
    const std::vector<std::pair<MeasureId, const TechNetwork*>>& networks, CentralityKind kind,
    double tolerance = 1e-10, std::size_t max_iterations = 10000);

// Spearman of degree/eigenvector centralities against class patent counts
// and forward citations.
struct ImportanceTable {
    struct Row {
        MeasureId id = MeasureId::A1;
        Cell degree_citations, degree_patents, eigen_citations, eigen_patents;
    };
    std::vector<Row> rows;
};

ImportanceTable importance_correlation(
    const std::vector<std::pair<MeasureId, const TechNetwork*>>& networks, const ClassStats& stats,
    double tolerance = 1e-10, std::size_t max_iterations = 10000);

// Measures ranked by the mean of their per-table average correlations,
// ties broken by measure id.
struct RankedMeasure {
    MeasureId id = MeasureId::A1;
    Cell mean_average;
    std::vector<Cell> per_table;
};

std::vector<RankedMeasure> representativeness_ranking(const std::vector<CorrelationTable>& tables);

struct CompareOptions {
    PairFilter pairs = PairFilter::all;
    bool centrality_on_backbone = false;
    std::size_t backbone_multiplier = 2;
    double centrality_tolerance = 1e-10;
    std::size_t centrality_max_iterations = 10000;
};

// The full cross-measure comparison: per-measure temporal stability,
// edge-weight and centrality correlation tables for the primary period,
// importance rank correlations, and the representativeness ranking.
struct ComparisonReport {
    PeriodSpec primary_period;
    std::vector<MeasureId> table2_measures;
    std::vector<CorrelationTable> table2;  // one per measure, labels = periods
    CorrelationTable table3;               // edge weights
    CorrelationTable table4a;              // degree centrality
    CorrelationTable table4b;              // eigenvector centrality
    ImportanceTable table5;
    std::vector<RankedMeasure> ranking;    // over tables 3, 4a, 4b
};

// Matrices may cover several periods; the primary period is the one with
// the widest year span (first wins on ties).
ComparisonReport compare_measures(const std::vector<ProximityMatrix>& matrices,
                                  const ClassStats& stats, const CompareOptions& options = {});

// table2_<id>.csv, table3.csv, table4a.csv, table4b.csv, table5.csv plus
// report.json with full-precision values.
std::vector<std::filesystem::path> write_report(const ComparisonReport& report,
                                                const std::filesystem::path& dir);

std::string table_to_csv(const CorrelationTable& table, char delim = ';');
std::string importance_to_csv(const ImportanceTable& table, char delim = ';');

}  // namespace techmap
