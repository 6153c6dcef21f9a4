#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "techmap/compare.hpp"
#include "test_support.hpp"

using namespace techmap;
using test_support::make_network;
using test_support::rec;

namespace {

ProximityMatrix matrix_from(const Grid<double>& g, MeasureId id, PeriodSpec period) {
    ProximityMatrix pm;
    pm.id = id;
    pm.period = period;
    std::vector<std::string> codes;
    for (std::size_t i = 0; i < g.size(); ++i) codes.push_back("K" + std::to_string(i));
    pm.universe = ClassUniverse(codes);
    pm.values = g;
    return pm;
}

}  // namespace

TEST_CASE("pearson") {
    CHECK(*pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*pearson(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) ==
          doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(*pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2}) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK_FALSE(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}).has_value());
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1}),
                    ValidationError);
}

TEST_CASE("spearman") {
    CHECK(*spearman(std::vector<double>{1, 2, 3}, std::vector<double>{10, 200, 3000}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*spearman(std::vector<double>{1, 2, 3}, std::vector<double>{30, 10, 20}) ==
          doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(*spearman(std::vector<double>{1, 1, 2}, std::vector<double>{5, 5, 9}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(spearman(std::vector<double>{1}, std::vector<double>{}), ValidationError);
}

TEST_CASE("average ranks handle ties") {
    auto r = average_ranks(std::vector<double>{1, 1, 2});
    CHECK(r[0] == 1.5);
    CHECK(r[1] == 1.5);
    CHECK(r[2] == 3.0);
}

TEST_CASE("pearson and spearman match the direct-formula references") {
    std::mt19937_64 rng(123);
    for (int it = 0; it < 200; ++it) {
        const std::size_t n = 2 + rng() % 40;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            // Small integer grids produce plenty of ties.
            x[i] = static_cast<double>(rng() % 8);
            y[i] = static_cast<double>(rng() % 8);
        }
        if (it % 10 == 0) std::fill(x.begin(), x.end(), 3.0);  // constants

        double ref = 0.0;
        const bool defined = oracle::ref_pearson(x, y, ref);
        auto mine = pearson(x, y);
        CHECK(mine.has_value() == defined);
        if (defined) CHECK(*mine == doctest::Approx(ref).epsilon(1e-12));

        const bool sdefined = oracle::ref_spearman(x, y, ref);
        auto smine = spearman(x, y);
        CHECK(smine.has_value() == sdefined);
        if (sdefined) CHECK(*smine == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("pearson is affine invariant, spearman is monotone invariant") {
    std::mt19937_64 rng(321);
    for (int it = 0; it < 30; ++it) {
        const std::size_t n = 5 + rng() % 20;
        std::vector<double> x(n), y(n), y2(n), y3(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(rng() % 100) / 10.0;
            y[i] = static_cast<double>(rng() % 100) / 10.0;
            y2[i] = 3.0 * y[i] + 11.0;        // positive affine
            y3[i] = std::exp(y[i] / 10.0);    // strictly monotone
        }
        auto a = pearson(x, y);
        auto b = pearson(x, y2);
        if (a && b) CHECK(*a == doctest::Approx(*b).epsilon(1e-10));
        auto c = pearson(y, x);
        if (a && c) CHECK(*a == doctest::Approx(*c).epsilon(1e-12));

        auto s = spearman(x, y);
        auto s3 = spearman(x, y3);
        if (s && s3) CHECK(*s == doctest::Approx(*s3).epsilon(1e-12));
    }
}

TEST_CASE("edge_vector flattens the upper triangle in pair order") {
    Grid<double> g(3, 0.0);
    g.set_symmetric(0, 1, 0.1);
    g.set_symmetric(0, 2, 0.2);
    g.set_symmetric(1, 2, 0.3);
    auto pm = matrix_from(g, MeasureId::A1, {1990, 2000});
    auto ev = edge_vector(pm);
    CHECK(ev.values == std::vector<double>{0.1, 0.2, 0.3});

    Grid<double> big(121, 0.0);
    auto big_pm = matrix_from(big, MeasureId::A1, {1990, 2000});
    CHECK(edge_vector(big_pm).values.size() == 7260);
}

TEST_CASE("temporal stability") {
    std::mt19937_64 rng(11);
    auto corpus = oracle::random_corpus(rng);
    auto u = build_class_universe(corpus, {"*99"});
    auto pm1 = compute_measure(build_aggregates(corpus, u, {1990, 1999}), MeasureId::D1);
    auto pm2 = pm1;
    pm2.period = {2000, 2009};

    SUBCASE("identical matrices correlate at 1") {
        auto table = temporal_stability({edge_vector(pm1), edge_vector(pm2)});
        REQUIRE(table.labels.size() == 2);
        CHECK(*table.cells.at(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(*table.cells.at(0, 0) == 1.0);
        CHECK(table.labels[0] == "1990-1999");
    }
    SUBCASE("needs two periods") {
        CHECK_THROWS_AS(temporal_stability({edge_vector(pm1)}), ValidationError);
    }
}

TEST_CASE("independent corpora correlate near zero") {
    // >= 1000 class pairs needs at least 46 classes.
    std::mt19937_64 rng(2026);
    oracle::CorpusParams params;
    params.max_patents = 400;
    params.max_classes = 50;
    params.sprinkle_excluded = false;

    std::vector<std::string> codes;
    for (std::size_t i = 0; i < 50; ++i)
        codes.push_back("C" + std::string(i < 10 ? "0" : "") + std::to_string(i));
    ClassUniverse u(codes);

    auto make = [&](std::uint64_t seed) {
        std::mt19937_64 local(seed);
        std::vector<PatentRecord> records;
        for (std::size_t p = 0; p < 400; ++p) {
            std::vector<std::string> cls = {codes[local() % codes.size()],
                                            codes[local() % codes.size()]};
            records.push_back(rec("p" + std::to_string(p), 2000, cls));
        }
        return Corpus(std::move(records));
    };
    auto pm_a = compute_measure(build_aggregates(make(1), u, {2000, 2000}), MeasureId::D1);
    auto pm_b = compute_measure(build_aggregates(make(2), u, {2000, 2000}), MeasureId::D1);
    REQUIRE(edge_vector(pm_a).values.size() >= 1000);
    auto r = pearson(edge_vector(pm_a).values, edge_vector(pm_b).values);
    REQUIRE(r.has_value());
    CHECK(std::abs(*r) < 0.2);
}

TEST_CASE("cross-measure correlation") {
    std::mt19937_64 rng(13);
    auto corpus = oracle::random_corpus(rng);
    auto u = build_class_universe(corpus, {"*99"});
    auto bundle = build_aggregates(corpus, u, {1990, 2009});

    SUBCASE("identical copies give the all-ones table") {
        auto base = compute_measure(bundle, MeasureId::D1);
        std::vector<EdgeVector> evs;
        for (auto id : kAllMeasures) {
            auto pm = base;
            pm.id = id;
            evs.push_back(edge_vector(pm));
        }
        auto table = cross_measure_correlation(evs);
        for (std::size_t i = 0; i < 12; ++i) {
            CHECK(*table.row_average[i] == doctest::Approx(1.0).epsilon(1e-12));
            for (std::size_t j = 0; j < 12; ++j)
                CHECK(*table.cells.at(i, j) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("tables are symmetric with unit diagonal and bounded cells") {
        std::vector<EdgeVector> evs;
        for (auto id : kAllMeasures) evs.push_back(edge_vector(compute_measure(bundle, id)));
        auto table = cross_measure_correlation(evs);
        for (std::size_t i = 0; i < 12; ++i) {
            CHECK(*table.cells.at(i, i) == 1.0);
            for (std::size_t j = 0; j < 12; ++j) {
                CHECK(table.cells.at(i, j).has_value() == table.cells.at(j, i).has_value());
                if (table.cells.at(i, j)) {
                    CHECK(*table.cells.at(i, j) == *table.cells.at(j, i));
                    CHECK(*table.cells.at(i, j) >= -1.0);
                    CHECK(*table.cells.at(i, j) <= 1.0);
                }
            }
        }
    }
}

TEST_CASE("centrality correlation of identical networks is 1") {
    auto net = make_network(4, {{0, 1, 1.0}, {1, 2, 2.0}, {2, 3, 1.0}});
    std::vector<std::pair<MeasureId, const TechNetwork*>> nets = {{MeasureId::A1, &net},
                                                                  {MeasureId::B1, &net}};
    for (auto kind : {CentralityKind::degree, CentralityKind::eigenvector}) {
        auto table = centrality_correlation(nets, kind);
        CHECK(*table.cells.at(0, 1) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("edgeless networks produce undefined cells") {
    auto net = make_network(4, {{0, 1, 1.0}, {1, 2, 2.0}, {2, 3, 1.0}});
    auto empty = make_network(4, {});
    std::vector<std::pair<MeasureId, const TechNetwork*>> nets = {{MeasureId::A1, &net},
                                                                  {MeasureId::A2, &empty}};
    auto table = centrality_correlation(nets, CentralityKind::degree);
    CHECK_FALSE(table.cells.at(0, 1).has_value());
    CHECK_FALSE(table.row_average[0].has_value());
    auto csv = table_to_csv(table);
    CHECK(csv.find("A1;;") != std::string::npos);  // blank cell rendering
}

TEST_CASE("importance correlation is 1 when centrality tracks the counts") {
    // Star weights make degree ranking follow vertex index; stats do too.
    auto net = make_network(4, {{0, 1, 1.0}, {0, 2, 2.0}, {0, 3, 3.0}, {1, 2, 0.25}});
    ClassStats stats;
    stats.universe = net.universe;
    stats.patent_counts = {60, 10, 20, 30};    // degree order: 0 -> 6, 1 -> 1.25, ...
    stats.forward_citations = {600, 100, 200, 300};
    std::vector<std::pair<MeasureId, const TechNetwork*>> nets = {{MeasureId::A1, &net}};
    auto table = importance_correlation(nets, stats);
    REQUIRE(table.rows.size() == 1);
    CHECK(*table.rows[0].degree_patents == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*table.rows[0].degree_citations == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("representativeness ranking") {
    auto make_table = [](std::vector<std::pair<std::string, double>> rows) {
        CorrelationTable t;
        t.cells = Grid<Cell>(rows.size());
        for (const auto& [label, avg] : rows) {
            t.labels.push_back(label);
            t.row_average.push_back(avg);
        }
        return t;
    };
    SUBCASE("dominating average ranks first") {
        auto t = make_table({{"A1", 0.9}, {"A2", 0.1}, {"B1", 0.5}});
        auto ranked = representativeness_ranking({t});
        REQUIRE(ranked.size() == 3);
        CHECK(ranked[0].id == MeasureId::A1);
        CHECK(ranked[1].id == MeasureId::B1);
        CHECK(ranked[2].id == MeasureId::A2);
        CHECK(*ranked[0].mean_average == doctest::Approx(0.9));
    }
    SUBCASE("ties fall back to measure-id order") {
        auto t = make_table({{"B1", 0.5}, {"A1", 0.5}, {"A2", 0.5}});
        auto ranked = representativeness_ranking({t});
        CHECK(ranked[0].id == MeasureId::A1);
        CHECK(ranked[1].id == MeasureId::A2);
        CHECK(ranked[2].id == MeasureId::B1);
    }
    SUBCASE("mean over several tables") {
        auto t1 = make_table({{"A1", 0.2}, {"B1", 0.6}});
        auto t2 = make_table({{"A1", 1.0}, {"B1", 0.0}});
        auto ranked = representativeness_ranking({t1, t2});
        CHECK(ranked[0].id == MeasureId::A1);  // mean 0.6 vs 0.3
        CHECK(*ranked[0].mean_average == doctest::Approx(0.6));
        CHECK(ranked[0].per_table.size() == 2);
    }
}

TEST_CASE("compare_measures produces the full report") {
    std::mt19937_64 rng(77);
    oracle::CorpusParams params;
    params.max_patents = 50;
    auto corpus = oracle::random_corpus(rng, params);
    auto u = build_class_universe(corpus, {"*99"});

    std::vector<ProximityMatrix> matrices;
    for (PeriodSpec period : {PeriodSpec{1990, 1999}, PeriodSpec{2000, 2009},
                              PeriodSpec{1990, 2009}}) {
        auto sliced = slice_period(corpus, period);
        auto bundle = build_aggregates(sliced, u, period);
        for (auto id : kAllMeasures) matrices.push_back(compute_measure(bundle, id));
    }
    auto stats = build_class_stats(corpus, u);
    auto report = compare_measures(matrices, stats);

    CHECK(report.primary_period == PeriodSpec{1990, 2009});
    CHECK(report.table2_measures.size() == 12);
    CHECK(report.table2[0].labels.size() == 3);
    CHECK(report.table3.labels.size() == 12);
    CHECK(report.table4a.labels.size() == 12);
    CHECK(report.table5.rows.size() == 12);
    CHECK(report.ranking.size() == 12);

    // Ranking agrees with recomputing the mean of per-table averages.
    for (const auto& rm : report.ranking) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& t : {report.table3, report.table4a, report.table4b}) {
            auto it = std::find(t.labels.begin(), t.labels.end(), to_string(rm.id));
            REQUIRE(it != t.labels.end());
            auto avg = t.row_average[static_cast<std::size_t>(it - t.labels.begin())];
            if (avg) {
                sum += *avg;
                ++count;
            }
        }
        if (count > 0)
            CHECK(*rm.mean_average == doctest::Approx(sum / count).epsilon(1e-12));
    }

    test_support::TempDir dir("report");
    auto files = write_report(report, dir.path);
    CHECK(files.size() == 12 + 5);
    CHECK(std::filesystem::exists(dir.path / "table3.csv"));
    CHECK(std::filesystem::exists(dir.path / "report.json"));
}
