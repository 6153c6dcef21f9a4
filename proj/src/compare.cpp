#include "techmap/compare.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <json.hpp>

#include "techmap/util.hpp"

namespace techmap {

Cell pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw ValidationError("pearson: vector lengths differ (" + std::to_string(x.size()) +
                              " vs " + std::to_string(y.size()) + ")");
    const std::size_t n = x.size();
    if (n < 2) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;  // constant input
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

Cell spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw ValidationError("spearman: vector lengths differ (" + std::to_string(x.size()) +
                              " vs " + std::to_string(y.size()) + ")");
    auto rx = average_ranks(x);
    auto ry = average_ranks(y);
    return pearson(rx, ry);
}

EdgeVector edge_vector(const ProximityMatrix& pm) {
    EdgeVector v;
    v.id = pm.id;
    v.period = pm.period;
    const std::size_t n = pm.universe.size();
    v.values.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) v.values.push_back(pm.values.at(i, j));
    return v;
}

namespace {

// Pearson restricted to positions where both values are nonzero, when the
// joint_nonzero filter is on.
Cell edge_pearson(const std::vector<double>& x, const std::vector<double>& y,
                  PairFilter pairs) {
    if (pairs == PairFilter::all) return pearson(x, y);
    std::vector<double> fx, fy;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != 0.0 && y[i] != 0.0) {
            fx.push_back(x[i]);
            fy.push_back(y[i]);
        }
    return pearson(fx, fy);
}

CorrelationTable pairwise_table(const std::vector<std::string>& labels,
                                const std::vector<std::vector<double>>& vectors,
                                PairFilter pairs) {
    CorrelationTable t;
    t.labels = labels;
    const std::size_t k = labels.size();
    t.cells = Grid<Cell>(k);
    for (std::size_t i = 0; i < k; ++i) {
        t.cells.at(i, i) = 1.0;
        for (std::size_t j = i + 1; j < k; ++j) {
            auto r = edge_pearson(vectors[i], vectors[j], pairs);
            t.cells.at(i, j) = r;
            t.cells.at(j, i) = r;
        }
    }
    t.row_average.assign(k, std::nullopt);
    for (std::size_t i = 0; i < k; ++i) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            if (t.cells.at(i, j)) {
                sum += *t.cells.at(i, j);
                ++count;
            }
        }
        if (count > 0) t.row_average[i] = sum / static_cast<double>(count);
    }
    return t;
}

}  // namespace

CorrelationTable temporal_stability(const std::vector<EdgeVector>& per_period,
                                    PairFilter pairs) {
    if (per_period.size() < 2)
        throw ValidationError("temporal stability needs at least two periods");
    std::vector<std::string> labels;
    std::vector<std::vector<double>> vectors;
    for (const auto& ev : per_period) {
        labels.push_back(ev.period.label());
        vectors.push_back(ev.values);
    }
    return pairwise_table(labels, vectors, pairs);
}

CorrelationTable cross_measure_correlation(const std::vector<EdgeVector>& vectors,
                                           PairFilter pairs) {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> values;
    for (const auto& ev : vectors) {
        labels.push_back(to_string(ev.id));
        values.push_back(ev.values);
    }
    return pairwise_table(labels, values, pairs);
}

namespace {

// Degree or eigenvector centralities; degenerate networks yield a zero
// vector, which downstream correlation marks undefined.
std::vector<double> centrality_or_zero(const TechNetwork& net, CentralityKind kind,
                                       double tolerance, std::size_t max_iterations) {
    if (kind == CentralityKind::degree) return degree_centrality(net);
    try {
        return eigenvector_centrality(net, tolerance, max_iterations);
    } catch (const ValidationError&) {
        return std::vector<double>(net.universe.size(), 0.0);
    }
}

}  // namespace

CorrelationTable centrality_correlation(
    const std::vector<std::pair<MeasureId, const TechNetwork*>>& networks, CentralityKind kind,
    double tolerance, std::size_t max_iterations) {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> vectors;
    for (const auto& [id, net] : networks) {
        labels.push_back(to_string(id));
        vectors.push_back(centrality_or_zero(*net, kind, tolerance, max_iterations));
    }
    return pairwise_table(labels, vectors, PairFilter::all);
}

ImportanceTable importance_correlation(
    const std::vector<std::pair<MeasureId, const TechNetwork*>>& networks, const ClassStats& stats,
    double tolerance, std::size_t max_iterations) {
    ImportanceTable table;
    std::vector<double> patents(stats.patent_counts.begin(), stats.patent_counts.end());
    std::vector<double> citations(stats.forward_citations.begin(),
                                  stats.forward_citations.end());
    for (const auto& [id, net] : networks) {
        ImportanceTable::Row row;
        row.id = id;
        auto degree = degree_centrality(*net);
        auto eigen =
            centrality_or_zero(*net, CentralityKind::eigenvector, tolerance, max_iterations);
        row.degree_citations = spearman(degree, citations);
        row.degree_patents = spearman(degree, patents);
        row.eigen_citations = spearman(eigen, citations);
        row.eigen_patents = spearman(eigen, patents);
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<RankedMeasure> representativeness_ranking(
    const std::vector<CorrelationTable>& tables) {
    if (tables.empty()) throw ValidationError("ranking needs at least one table");
    // Collect the measure ids present, in id order.
    std::vector<MeasureId> ids;
    for (auto id : kAllMeasures)
        for (const auto& t : tables)
            if (std::find(t.labels.begin(), t.labels.end(), to_string(id)) != t.labels.end()) {
                ids.push_back(id);
                break;
            }

    std::vector<RankedMeasure> ranked;
    for (auto id : ids) {
        RankedMeasure rm;
        rm.id = id;
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& t : tables) {
            auto it = std::find(t.labels.begin(), t.labels.end(), to_string(id));
            Cell avg;
            if (it != t.labels.end())
                avg = t.row_average[static_cast<std::size_t>(it - t.labels.begin())];
            rm.per_table.push_back(avg);
            if (avg) {
                sum += *avg;
                ++count;
            }
        }
        if (count > 0) rm.mean_average = sum / static_cast<double>(count);
        ranked.push_back(std::move(rm));
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const RankedMeasure& a,
                                                      const RankedMeasure& b) {
        if (a.mean_average.has_value() != b.mean_average.has_value())
            return a.mean_average.has_value();
        if (!a.mean_average) return false;  // both undefined: keep id order
        return *a.mean_average > *b.mean_average;  // ties: stable sort keeps id order
    });
    return ranked;
}

ComparisonReport compare_measures(const std::vector<ProximityMatrix>& matrices,
                                  const ClassStats& stats, const CompareOptions& options) {
    if (matrices.empty()) throw ValidationError("no proximity matrices to compare");

    // Group by period; the primary period has the widest span.
    std::vector<PeriodSpec> periods;
    for (const auto& pm : matrices)
        if (std::find(periods.begin(), periods.end(), pm.period) == periods.end())
            periods.push_back(pm.period);
    PeriodSpec primary = periods.front();
    for (const auto& p : periods)
        if (p.span() > primary.span()) primary = p;

    ComparisonReport report;
    report.primary_period = primary;

    // Table 2 analog: per-measure stability across periods (when >= 2).
    if (periods.size() >= 2) {
        for (auto id : kAllMeasures) {
            std::vector<EdgeVector> evs;
            for (const auto& p : periods)
                for (const auto& pm : matrices)
                    if (pm.id == id && pm.period == p) evs.push_back(edge_vector(pm));
            if (evs.size() >= 2) {
                report.table2_measures.push_back(id);
                report.table2.push_back(temporal_stability(evs, options.pairs));
            }
        }
    }

    // Primary-period matrices in measure-id order.
    std::vector<const ProximityMatrix*> primary_matrices;
    for (auto id : kAllMeasures)
        for (const auto& pm : matrices)
            if (pm.id == id && pm.period == primary) primary_matrices.push_back(&pm);

    std::vector<EdgeVector> edge_vectors;
    for (const auto* pm : primary_matrices) edge_vectors.push_back(edge_vector(*pm));
    report.table3 = cross_measure_correlation(edge_vectors, options.pairs);

    // Networks for centrality tables; centralities on the full network or
    // its backbone per configuration.
    std::vector<TechNetwork> nets;
    nets.reserve(primary_matrices.size());
    for (const auto* pm : primary_matrices) {
        TechNetwork full = build_network(*pm, stats);
        if (options.centrality_on_backbone)
            nets.push_back(filter_backbone(full, options.backbone_multiplier).network);
        else
            nets.push_back(std::move(full));
    }
    std::vector<std::pair<MeasureId, const TechNetwork*>> net_refs;
    for (std::size_t i = 0; i < nets.size(); ++i)
        net_refs.emplace_back(primary_matrices[i]->id, &nets[i]);

    report.table4a = centrality_correlation(net_refs, CentralityKind::degree,
                                            options.centrality_tolerance,
                                            options.centrality_max_iterations);
    report.table4b = centrality_correlation(net_refs, CentralityKind::eigenvector,
                                            options.centrality_tolerance,
                                            options.centrality_max_iterations);
    report.table5 = importance_correlation(net_refs, stats, options.centrality_tolerance,
                                           options.centrality_max_iterations);
    report.ranking =
        representativeness_ranking({report.table3, report.table4a, report.table4b});
    return report;
}

// --- rendering --------------------------------------------------------------

namespace {

std::string cell_text(const Cell& c) { return c ? format_fixed3(*c) : ""; }

nlohmann::json cell_json(const Cell& c) {
    return c ? nlohmann::json(*c) : nlohmann::json(nullptr);
}

nlohmann::json table_json(const CorrelationTable& t) {
    nlohmann::json j;
    j["labels"] = t.labels;
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < t.labels.size(); ++i) {
        auto row = nlohmann::json::array();
        for (std::size_t k = 0; k < t.labels.size(); ++k) row.push_back(cell_json(t.cells.at(i, k)));
        rows.push_back(row);
    }
    j["coefficients"] = rows;
    auto avg = nlohmann::json::array();
    for (const auto& a : t.row_average) avg.push_back(cell_json(a));
    j["average"] = avg;
    return j;
}

}  // namespace

std::string table_to_csv(const CorrelationTable& t, char delim) {
    std::string out;
    for (const auto& l : t.labels) {
        out += delim;
        out += l;
    }
    out += '\n';
    for (std::size_t i = 0; i < t.labels.size(); ++i) {
        out += t.labels[i];
        for (std::size_t j = 0; j < t.labels.size(); ++j) {
            out += delim;
            out += cell_text(t.cells.at(i, j));
        }
        out += '\n';
    }
    out += "Average";
    for (const auto& a : t.row_average) {
        out += delim;
        out += cell_text(a);
    }
    out += '\n';
    return out;
}

std::string importance_to_csv(const ImportanceTable& t, char delim) {
    std::string out = std::string("measure") + delim + "degree_vs_citations" + delim +
                      "degree_vs_patents" + delim + "eigenvector_vs_citations" + delim +
                      "eigenvector_vs_patents\n";
    for (const auto& row : t.rows) {
        out += to_string(row.id);
        out += delim;
        out += cell_text(row.degree_citations);
        out += delim;
        out += cell_text(row.degree_patents);
        out += delim;
        out += cell_text(row.eigen_citations);
        out += delim;
        out += cell_text(row.eigen_patents);
        out += '\n';
    }
    return out;
}

std::vector<std::filesystem::path> write_report(const ComparisonReport& report,
                                                const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::filesystem::path& p, const std::string& content) {
        write_file_atomic(p, content);
        written.push_back(p);
    };

    for (std::size_t i = 0; i < report.table2.size(); ++i)
        emit(dir / ("table2_" + to_string(report.table2_measures[i]) + ".csv"),
             table_to_csv(report.table2[i]));
    emit(dir / "table3.csv", table_to_csv(report.table3));
    emit(dir / "table4a.csv", table_to_csv(report.table4a));
    emit(dir / "table4b.csv", table_to_csv(report.table4b));
    emit(dir / "table5.csv", importance_to_csv(report.table5));

    nlohmann::json j;
    j["primary_period"] = report.primary_period.label();
    auto t2 = nlohmann::json::object();
    for (std::size_t i = 0; i < report.table2.size(); ++i)
        t2[to_string(report.table2_measures[i])] = table_json(report.table2[i]);
    j["edge_weight_stability"] = t2;
    j["edge_weight_correlations"] = table_json(report.table3);
    j["degree_centrality_correlations"] = table_json(report.table4a);
    j["eigenvector_centrality_correlations"] = table_json(report.table4b);
    auto t5 = nlohmann::json::array();
    for (const auto& row : report.table5.rows) {
        nlohmann::json r;
        r["measure"] = to_string(row.id);
        r["degree_vs_citations"] = cell_json(row.degree_citations);
        r["degree_vs_patents"] = cell_json(row.degree_patents);
        r["eigenvector_vs_citations"] = cell_json(row.eigen_citations);
        r["eigenvector_vs_patents"] = cell_json(row.eigen_patents);
        t5.push_back(r);
    }
    j["importance_correlations"] = t5;
    auto rank = nlohmann::json::array();
    for (const auto& rm : report.ranking) {
        nlohmann::json r;
        r["measure"] = to_string(rm.id);
        r["name"] = measure_name(rm.id);
        r["mean_average_correlation"] = cell_json(rm.mean_average);
        auto per = nlohmann::json::array();
        for (const auto& c : rm.per_table) per.push_back(cell_json(c));
        r["per_table_average"] = per;
        rank.push_back(r);
    }
    j["representativeness_ranking"] = rank;
    emit(dir / "report.json", j.dump(2) + "\n");
    return written;
}

}  // namespace techmap
