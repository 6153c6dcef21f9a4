#include "techmap/aggregate.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "techmap/util.hpp"

namespace techmap {

namespace {

std::int64_t parse_count(const std::string& s, const std::string& where) {
    std::int64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw IoError("bad count '" + s + "' in " + where);
    return v;
}

std::size_t class_index(const ClassUniverse& universe, const std::string& code,
                        const std::string& where) {
    auto i = universe.index_of(code);
    if (!i) throw IoError("unknown class '" + code + "' in " + where);
    return *i;
}

}  // namespace

CitationAggregate build_citation_aggregate(const Corpus& corpus, const ClassUniverse& universe) {
    if (universe.size() == 0) throw ValidationError("empty class universe");
    CitationAggregate agg;
    agg.universe = universe;
    agg.class_to_class = Grid<std::int64_t>(universe.size());
    agg.class_to_patent.resize(universe.size());

    std::unordered_map<std::string, std::uint32_t> intern;
    auto intern_id = [&](const std::string& id) {
        auto it = intern.find(id);
        if (it != intern.end()) return it->second;
        auto idx = static_cast<std::uint32_t>(agg.cited_ids.size());
        agg.cited_ids.push_back(id);
        intern.emplace(id, idx);
        return idx;
    };

    for (const auto& p : corpus.records()) {
        auto citing = universe.admitted(p);
        if (citing.empty() || p.references.empty()) continue;
        for (const auto& q_id : p.references) {
            auto q_interned = intern_id(q_id);
            for (auto i : citing) agg.class_to_patent[i][q_interned] += 1;
            if (const PatentRecord* q = corpus.find(q_id)) {
                for (auto j : universe.admitted(*q))
                    for (auto i : citing) agg.class_to_class.at(i, j) += 1;
            }
        }
    }
    return agg;
}

CoClassCounts build_coclass_counts(const Corpus& corpus, const ClassUniverse& universe) {
    if (universe.size() == 0) throw ValidationError("empty class universe");
    CoClassCounts cc;
    cc.universe = universe;
    cc.shared = Grid<std::int64_t>(universe.size());
    cc.class_patent_counts.assign(universe.size(), 0);
    cc.multiclass_patent_counts.assign(universe.size(), 0);

    for (const auto& p : corpus.records()) {
        auto classes = universe.admitted(p);
        for (auto i : classes) cc.class_patent_counts[i] += 1;
        for (std::size_t a = 0; a < classes.size(); ++a)
            for (std::size_t b = a + 1; b < classes.size(); ++b)
                cc.shared.add_symmetric(classes[a], classes[b], 1);
        if (classes.size() >= 2) {
            cc.multi_class_total += 1;
            for (auto i : classes) cc.multiclass_patent_counts[i] += 1;
        }
    }
    for (std::size_t i = 0; i < universe.size(); ++i)
        cc.shared.at(i, i) = cc.class_patent_counts[i];
    return cc;
}

AgentClassMatrix build_agent_class_matrix(const Corpus& corpus, const ClassUniverse& universe,
                                          AgentKind kind) {
    AgentClassMatrix acm;
    acm.universe = universe;
    acm.kind = kind;
    acm.class_totals.assign(universe.size(), 0);
    for (const auto& p : corpus.records()) {
        const auto& agents = agent_field(p, kind);
        if (agents.empty()) continue;
        auto classes = universe.admitted(p);
        if (classes.empty()) continue;
        for (const auto& agent : agents) {
            auto& row = acm.counts[agent];
            for (auto i : classes) {
                row[i] += 1;
                acm.class_totals[i] += 1;
                acm.grand_total += 1;
            }
        }
    }
    return acm;
}

RtaMatrix compute_rta(const AgentClassMatrix& acm) {
    if (acm.grand_total <= 0)
        throw ValidationError("cannot compute RTA: no patents counted for " +
                              to_string(acm.kind) + "s");
    RtaMatrix rta;
    rta.universe = acm.universe;
    rta.kind = acm.kind;
    const double grand = static_cast<double>(acm.grand_total);
    for (const auto& [agent, row] : acm.counts) {
        std::int64_t agent_total = 0;
        for (const auto& [i, x] : row) agent_total += x;
        if (agent_total == 0) continue;
        auto& out = rta.values[agent];
        for (const auto& [i, x] : row) {
            if (x == 0) continue;
            const double class_total = static_cast<double>(acm.class_totals[i]);
            out[i] = (static_cast<double>(x) * grand) /
                     (static_cast<double>(agent_total) * class_total);
        }
    }
    return rta;
}

AgentCooccurrence build_agent_cooccurrence(const AgentClassMatrix& acm,
                                           CooccurrenceUniverse universe_mode) {
    AgentCooccurrence co;
    co.universe = acm.universe;
    co.kind = acm.kind;
    co.observed = Grid<std::int64_t>(acm.universe.size());
    co.class_agent_counts.assign(acm.universe.size(), 0);
    for (const auto& [agent, row] : acm.counts) {
        std::vector<std::size_t> active;
        active.reserve(row.size());
        for (const auto& [i, x] : row)
            if (x > 0) active.push_back(i);
        if (universe_mode == CooccurrenceUniverse::diversified && active.size() < 2) continue;
        if (active.empty()) continue;
        co.agent_total += 1;
        for (auto i : active) co.class_agent_counts[i] += 1;
        for (std::size_t a = 0; a < active.size(); ++a)
            for (std::size_t b = a + 1; b < active.size(); ++b)
                co.observed.add_symmetric(active[a], active[b], 1);
    }
    for (std::size_t i = 0; i < co.universe.size(); ++i)
        co.observed.at(i, i) = co.class_agent_counts[i];
    return co;
}

ClassStats build_class_stats(const Corpus& corpus, const ClassUniverse& universe) {
    ClassStats stats;
    stats.universe = universe;
    stats.patent_counts.assign(universe.size(), 0);
    stats.forward_citations.assign(universe.size(), 0);

    // Forward citations for each patent, counted from within the corpus.
    std::unordered_map<std::string, std::int64_t> forward;
    for (const auto& p : corpus.records())
        for (const auto& q_id : p.references)
            if (corpus.find(q_id)) forward[q_id] += 1;

    for (const auto& p : corpus.records()) {
        auto classes = universe.admitted(p);
        if (classes.empty()) continue;
        auto it = forward.find(p.patent_id);
        const std::int64_t f = it == forward.end() ? 0 : it->second;
        for (auto i : classes) {
            stats.patent_counts[i] += 1;
            stats.forward_citations[i] += f;
        }
    }
    return stats;
}

AggregateBundle build_aggregates(const Corpus& corpus, const ClassUniverse& universe,
                                 const PeriodSpec& period) {
    AggregateBundle b;
    b.period = period;
    b.universe = universe;
    b.citations = build_citation_aggregate(corpus, universe);
    b.coclass = build_coclass_counts(corpus, universe);
    for (auto kind : {AgentKind::inventor, AgentKind::organization, AgentKind::country})
        b.agents.emplace(kind, build_agent_class_matrix(corpus, universe, kind));
    b.stats = build_class_stats(corpus, universe);
    return b;
}

// --- tabular cache ---------------------------------------------------------

namespace {

constexpr char kDelim = ';';

std::string universe_csv(const ClassUniverse& u) {
    std::string out = "class\n";
    for (const auto& c : u.codes()) {
        out += c;
        out += '\n';
    }
    return out;
}

std::string class_class_csv(const CitationAggregate& agg) {
    std::string out = "citing_class;cited_class;count\n";
    const auto& codes = agg.universe.codes();
    for (std::size_t i = 0; i < codes.size(); ++i)
        for (std::size_t j = 0; j < codes.size(); ++j)
            if (auto v = agg.class_to_class.at(i, j); v != 0) {
                out += codes[i];
                out += kDelim;
                out += codes[j];
                out += kDelim;
                out += std::to_string(v);
                out += '\n';
            }
    return out;
}

std::string class_patent_csv(const CitationAggregate& agg) {
    std::string out = "citing_class;cited_patent;count\n";
    const auto& codes = agg.universe.codes();
    for (std::size_t i = 0; i < codes.size(); ++i) {
        std::vector<std::pair<std::string, std::int64_t>> rows;
        rows.reserve(agg.class_to_patent[i].size());
        for (const auto& [q, v] : agg.class_to_patent[i])
            rows.emplace_back(agg.cited_ids[q], v);
        std::sort(rows.begin(), rows.end());
        for (const auto& [q, v] : rows) {
            out += codes[i];
            out += kDelim;
            out += q;
            out += kDelim;
            out += std::to_string(v);
            out += '\n';
        }
    }
    return out;
}

std::string shared_csv(const CoClassCounts& cc) {
    std::string out = "class_a;class_b;count\n";
    const auto& codes = cc.universe.codes();
    for (std::size_t i = 0; i < codes.size(); ++i)
        for (std::size_t j = i + 1; j < codes.size(); ++j)
            if (auto v = cc.shared.at(i, j); v != 0) {
                out += codes[i];
                out += kDelim;
                out += codes[j];
                out += kDelim;
                out += std::to_string(v);
                out += '\n';
            }
    return out;
}

std::string class_counts_csv(const CoClassCounts& cc) {
    std::string out = "class;patents;multiclass_patents\n";
    const auto& codes = cc.universe.codes();
    for (std::size_t i = 0; i < codes.size(); ++i) {
        out += codes[i];
        out += kDelim;
        out += std::to_string(cc.class_patent_counts[i]);
        out += kDelim;
        out += std::to_string(cc.multiclass_patent_counts[i]);
        out += '\n';
    }
    return out;
}

std::string agents_csv(const AgentClassMatrix& acm) {
    std::string out = "agent;class;count\n";
    const auto& codes = acm.universe.codes();
    for (const auto& [agent, row] : acm.counts)
        for (const auto& [i, v] : row) {
            out += agent;
            out += kDelim;
            out += codes[i];
            out += kDelim;
            out += std::to_string(v);
            out += '\n';
        }
    return out;
}

std::string stats_csv(const ClassStats& stats) {
    std::string out = "class;patents;forward_citations\n";
    const auto& codes = stats.universe.codes();
    for (std::size_t i = 0; i < codes.size(); ++i) {
        out += codes[i];
        out += kDelim;
        out += std::to_string(stats.patent_counts[i]);
        out += kDelim;
        out += std::to_string(stats.forward_citations[i]);
        out += '\n';
    }
    return out;
}

std::string meta_csv(const AggregateBundle& b) {
    std::string out = "key;value\n";
    out += "period_start;" + std::to_string(b.period.start_year) + "\n";
    out += "period_end;" + std::to_string(b.period.end_year) + "\n";
    out += "multi_class_total;" + std::to_string(b.coclass.multi_class_total) + "\n";
    return out;
}

// Reads a delimited file, checks the header, returns data rows as cells.
std::vector<std::vector<std::string>> read_table(const std::filesystem::path& path,
                                                 const std::string& expected_header) {
    auto text = read_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty table: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected_header)
        throw IoError("unexpected header in " + path.string() + ": '" + line + "'");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(split(line, kDelim));
    }
    return rows;
}

}  // namespace

void write_aggregates(const AggregateBundle& b, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file_atomic(dir / "universe.csv", universe_csv(b.universe));
    write_file_atomic(dir / "citations_class_class.csv", class_class_csv(b.citations));
    write_file_atomic(dir / "citations_class_patent.csv", class_patent_csv(b.citations));
    write_file_atomic(dir / "coclass_shared.csv", shared_csv(b.coclass));
    write_file_atomic(dir / "class_counts.csv", class_counts_csv(b.coclass));
    for (const auto& [kind, acm] : b.agents)
        write_file_atomic(dir / ("agents_" + to_string(kind) + ".csv"), agents_csv(acm));
    write_file_atomic(dir / "class_stats.csv", stats_csv(b.stats));
    write_file_atomic(dir / "meta.csv", meta_csv(b));
}

AggregateBundle read_aggregates(const std::filesystem::path& dir) {
    AggregateBundle b;

    std::vector<std::string> codes;
    for (const auto& row : read_table(dir / "universe.csv", "class")) codes.push_back(row[0]);
    b.universe = ClassUniverse(std::move(codes));
    const std::size_t n = b.universe.size();

    for (const auto& row : read_table(dir / "meta.csv", "key;value")) {
        if (row[0] == "period_start") b.period.start_year = (int)parse_count(row[1], "meta.csv");
        if (row[0] == "period_end") b.period.end_year = (int)parse_count(row[1], "meta.csv");
        if (row[0] == "multi_class_total")
            b.coclass.multi_class_total = parse_count(row[1], "meta.csv");
    }

    b.citations.universe = b.universe;
    b.citations.class_to_class = Grid<std::int64_t>(n);
    b.citations.class_to_patent.resize(n);
    for (const auto& row :
         read_table(dir / "citations_class_class.csv", "citing_class;cited_class;count")) {
        auto i = class_index(b.universe, row[0], "citations_class_class.csv");
        auto j = class_index(b.universe, row[1], "citations_class_class.csv");
        b.citations.class_to_class.at(i, j) = parse_count(row[2], "citations_class_class.csv");
    }
    {
        std::unordered_map<std::string, std::uint32_t> intern;
        for (const auto& row :
             read_table(dir / "citations_class_patent.csv", "citing_class;cited_patent;count")) {
            auto i = class_index(b.universe, row[0], "citations_class_patent.csv");
            auto it = intern.find(row[1]);
            std::uint32_t q;
            if (it == intern.end()) {
                q = static_cast<std::uint32_t>(b.citations.cited_ids.size());
                b.citations.cited_ids.push_back(row[1]);
                intern.emplace(row[1], q);
            } else {
                q = it->second;
            }
            b.citations.class_to_patent[i][q] = parse_count(row[2], "citations_class_patent.csv");
        }
    }

    b.coclass.universe = b.universe;
    b.coclass.shared = Grid<std::int64_t>(n);
    b.coclass.class_patent_counts.assign(n, 0);
    b.coclass.multiclass_patent_counts.assign(n, 0);
    for (const auto& row : read_table(dir / "class_counts.csv", "class;patents;multiclass_patents")) {
        auto i = class_index(b.universe, row[0], "class_counts.csv");
        b.coclass.class_patent_counts[i] = parse_count(row[1], "class_counts.csv");
        b.coclass.multiclass_patent_counts[i] = parse_count(row[2], "class_counts.csv");
        b.coclass.shared.at(i, i) = b.coclass.class_patent_counts[i];
    }
    for (const auto& row : read_table(dir / "coclass_shared.csv", "class_a;class_b;count")) {
        auto i = class_index(b.universe, row[0], "coclass_shared.csv");
        auto j = class_index(b.universe, row[1], "coclass_shared.csv");
        b.coclass.shared.set_symmetric(i, j, parse_count(row[2], "coclass_shared.csv"));
    }

    for (auto kind : {AgentKind::inventor, AgentKind::organization, AgentKind::country}) {
        AgentClassMatrix acm;
        acm.universe = b.universe;
        acm.kind = kind;
        acm.class_totals.assign(n, 0);
        auto path = dir / ("agents_" + to_string(kind) + ".csv");
        for (const auto& row : read_table(path, "agent;class;count")) {
            auto i = class_index(b.universe, row[1], path.filename().string());
            auto v = parse_count(row[2], path.filename().string());
            acm.counts[row[0]][i] = v;
            acm.class_totals[i] += v;
            acm.grand_total += v;
        }
        b.agents.emplace(kind, std::move(acm));
    }

    b.stats = read_class_stats(dir / "class_stats.csv");
    return b;
}

void write_class_stats(const ClassStats& stats, const std::filesystem::path& path) {
    write_file_atomic(path, stats_csv(stats));
}

ClassStats read_class_stats(const std::filesystem::path& path) {
    ClassStats stats;
    std::vector<std::string> codes;
    std::vector<std::pair<std::int64_t, std::int64_t>> values;
    for (const auto& row : read_table(path, "class;patents;forward_citations")) {
        codes.push_back(row[0]);
        values.emplace_back(parse_count(row[1], "class_stats.csv"),
                            parse_count(row[2], "class_stats.csv"));
    }
    ClassUniverse universe(codes);
    if (universe.size() != codes.size())
        throw IoError("duplicate classes in " + path.string());
    stats.universe = universe;
    stats.patent_counts.assign(universe.size(), 0);
    stats.forward_citations.assign(universe.size(), 0);
    for (std::size_t r = 0; r < codes.size(); ++r) {
        auto i = *universe.index_of(codes[r]);
        stats.patent_counts[i] = values[r].first;
        stats.forward_citations[i] = values[r].second;
    }
    return stats;
}

}  // namespace techmap
