#include "techmap/measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "techmap/util.hpp"

namespace techmap {

std::string to_string(MeasureId id) {
    switch (id) {
        case MeasureId::A1: return "A1";
        case MeasureId::A2: return "A2";
        case MeasureId::A3: return "A3";
        case MeasureId::B1: return "B1";
        case MeasureId::B2: return "B2";
        case MeasureId::B3: return "B3";
        case MeasureId::C1: return "C1";
        case MeasureId::C2: return "C2";
        case MeasureId::C3: return "C3";
        case MeasureId::D1: return "D1";
        case MeasureId::D2: return "D2";
        case MeasureId::D3: return "D3";
    }
    throw ValidationError("unknown measure id");
}

MeasureId measure_from_string(const std::string& s) {
    for (auto id : kAllMeasures)
        if (to_string(id) == s) return id;
    throw ValidationError("unknown measure id: " + s);
}

std::string measure_name(MeasureId id) {
    switch (id) {
        case MeasureId::A1: return "normalized co-reference";
        case MeasureId::A2: return "class-to-class cosine";
        case MeasureId::A3: return "class-to-patent cosine";
        case MeasureId::B1: return "inventor diversification likelihood";
        case MeasureId::B2: return "organization diversification likelihood";
        case MeasureId::B3: return "country diversification likelihood";
        case MeasureId::C1: return "inventor co-occurrence frequency";
        case MeasureId::C2: return "organization co-occurrence frequency";
        case MeasureId::C3: return "country co-occurrence frequency";
        case MeasureId::D1: return "normalized co-classification";
        case MeasureId::D2: return "co-classification cosine";
        case MeasureId::D3: return "patent co-occurrence frequency";
    }
    throw ValidationError("unknown measure id");
}

AgentKind measure_agent_kind(MeasureId id) {
    switch (id) {
        case MeasureId::B1:
        case MeasureId::C1: return AgentKind::inventor;
        case MeasureId::B2:
        case MeasureId::C2: return AgentKind::organization;
        case MeasureId::B3:
        case MeasureId::C3: return AgentKind::country;
        default: throw ValidationError("measure " + to_string(id) + " has no agent kind");
    }
}

namespace {

ProximityMatrix blank(MeasureId id, const ClassUniverse& universe) {
    ProximityMatrix pm;
    pm.id = id;
    pm.universe = universe;
    pm.values = Grid<double>(universe.size(), 0.0);
    return pm;
}

double clamp01(double v) { return std::min(std::max(v, 0.0), 1.0); }

// (O - mu) / sigma with the hypergeometric mean and variance; 0 when the
// variance degenerates.
double cooccurrence_t(double O, double Ni, double Nj, double T) {
    if (T < 2.0) return 0.0;
    const double mu = Ni * Nj / T;
    const double var = mu * ((T - Ni) / T) * ((T - Nj) / (T - 1.0));
    if (var <= 0.0) return 0.0;
    return (O - mu) / std::sqrt(var);
}

}  // namespace

ProximityMatrix normalized_co_reference(const CitationAggregate& agg) {
    auto pm = blank(MeasureId::A1, agg.universe);
    const std::size_t n = agg.universe.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto& a = agg.class_to_patent[i];
            const auto& b = agg.class_to_patent[j];
            const auto& small = a.size() <= b.size() ? a : b;
            const auto& large = a.size() <= b.size() ? b : a;
            std::size_t inter = 0;
            for (const auto& [q, _] : small)
                if (large.count(q)) ++inter;
            const std::size_t uni = a.size() + b.size() - inter;
            const double v = uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
            pm.values.set_symmetric(i, j, v);
        }
    }
    return pm;
}

ProximityMatrix class_class_cosine(const CitationAggregate& agg) {
    auto pm = blank(MeasureId::A2, agg.universe);
    const std::size_t n = agg.universe.size();
    std::vector<double> norm(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double v = static_cast<double>(agg.class_to_class.at(i, k));
            s += v * v;
        }
        norm[i] = std::sqrt(s);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (norm[i] == 0.0 || norm[j] == 0.0) continue;
            double dot = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                dot += static_cast<double>(agg.class_to_class.at(i, k)) *
                       static_cast<double>(agg.class_to_class.at(j, k));
            pm.values.set_symmetric(i, j, clamp01(dot / (norm[i] * norm[j])));
        }
    }
    return pm;
}

ProximityMatrix class_patent_cosine(const CitationAggregate& agg) {
    auto pm = blank(MeasureId::A3, agg.universe);
    const std::size_t n = agg.universe.size();
    std::vector<double> norm(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (const auto& [_, v] : agg.class_to_patent[i])
            s += static_cast<double>(v) * static_cast<double>(v);
        norm[i] = std::sqrt(s);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (norm[i] == 0.0 || norm[j] == 0.0) continue;
            const auto& a = agg.class_to_patent[i];
            const auto& b = agg.class_to_patent[j];
            const auto& small = a.size() <= b.size() ? a : b;
            const auto& large = a.size() <= b.size() ? b : a;
            double dot = 0.0;
            for (const auto& [q, v] : small) {
                auto it = large.find(q);
                if (it != large.end())
                    dot += static_cast<double>(v) * static_cast<double>(it->second);
            }
            pm.values.set_symmetric(i, j, clamp01(dot / (norm[i] * norm[j])));
        }
    }
    return pm;
}

ProximityMatrix diversification_likelihood(const RtaMatrix& rta) {
    MeasureId id = rta.kind == AgentKind::inventor       ? MeasureId::B1
                   : rta.kind == AgentKind::organization ? MeasureId::B2
                                                         : MeasureId::B3;
    auto pm = blank(id, rta.universe);
    const std::size_t n = rta.universe.size();

    // Specialization sets A_i = {agents with RTA > 1 in class i}; pair
    // intersections counted agent by agent.
    std::vector<std::int64_t> set_size(n, 0);
    Grid<std::int64_t> inter(n);
    for (const auto& [agent, row] : rta.values) {
        std::vector<std::size_t> specialized;
        for (const auto& [i, v] : row)
            if (v > 1.0) specialized.push_back(i);
        for (auto i : specialized) set_size[i] += 1;
        for (std::size_t a = 0; a < specialized.size(); ++a)
            for (std::size_t b = a + 1; b < specialized.size(); ++b)
                inter.add_symmetric(specialized[a], specialized[b], 1);
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (set_size[i] == 0 || set_size[j] == 0) continue;
            const double v = static_cast<double>(inter.at(i, j)) /
                             static_cast<double>(std::max(set_size[i], set_size[j]));
            pm.values.set_symmetric(i, j, v);
        }
    }
    return pm;
}

ProximityMatrix cooccurrence_frequency(const AgentCooccurrence& co) {
    MeasureId id = co.kind == AgentKind::inventor       ? MeasureId::C1
                   : co.kind == AgentKind::organization ? MeasureId::C2
                                                        : MeasureId::C3;
    auto pm = blank(id, co.universe);
    const std::size_t n = co.universe.size();
    const double T = static_cast<double>(co.agent_total);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            pm.values.set_symmetric(
                i, j,
                cooccurrence_t(static_cast<double>(co.observed.at(i, j)),
                               static_cast<double>(co.class_agent_counts[i]),
                               static_cast<double>(co.class_agent_counts[j]), T));
    return pm;
}

ProximityMatrix normalized_co_classification(const CoClassCounts& cc) {
    auto pm = blank(MeasureId::D1, cc.universe);
    const std::size_t n = cc.universe.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double inter = static_cast<double>(cc.shared.at(i, j));
            const double uni = static_cast<double>(cc.class_patent_counts[i]) +
                               static_cast<double>(cc.class_patent_counts[j]) - inter;
            if (uni > 0.0) pm.values.set_symmetric(i, j, inter / uni);
        }
    }
    return pm;
}

ProximityMatrix coclass_cosine(const CoClassCounts& cc, bool keep_diagonal) {
    auto pm = blank(MeasureId::D2, cc.universe);
    const std::size_t n = cc.universe.size();
    Grid<double> m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m.at(i, j) = (i == j && !keep_diagonal)
                             ? 0.0
                             : static_cast<double>(cc.shared.at(i, j));
    std::vector<double> norm(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += m.at(i, k) * m.at(i, k);
        norm[i] = std::sqrt(s);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (norm[i] == 0.0 || norm[j] == 0.0) continue;
            double dot = 0.0;
            for (std::size_t k = 0; k < n; ++k) dot += m.at(i, k) * m.at(j, k);
            pm.values.set_symmetric(i, j, clamp01(dot / (norm[i] * norm[j])));
        }
    }
    return pm;
}

ProximityMatrix patent_cooccurrence_frequency(const CoClassCounts& cc) {
    auto pm = blank(MeasureId::D3, cc.universe);
    const std::size_t n = cc.universe.size();
    const double T = static_cast<double>(cc.multi_class_total);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            pm.values.set_symmetric(
                i, j,
                cooccurrence_t(static_cast<double>(cc.shared.at(i, j)),
                               static_cast<double>(cc.multiclass_patent_counts[i]),
                               static_cast<double>(cc.multiclass_patent_counts[j]), T));
    return pm;
}

ProximityMatrix compute_measure(const AggregateBundle& bundle, MeasureId id,
                                const MeasureOptions& options) {
    ProximityMatrix pm;
    switch (id) {
        case MeasureId::A1: pm = normalized_co_reference(bundle.citations); break;
        case MeasureId::A2: pm = class_class_cosine(bundle.citations); break;
        case MeasureId::A3: pm = class_patent_cosine(bundle.citations); break;
        case MeasureId::B1:
        case MeasureId::B2:
        case MeasureId::B3: {
            const auto& acm = bundle.agents.at(measure_agent_kind(id));
            if (acm.grand_total == 0) {
                // No agents of this kind: every specialization set is empty.
                pm = blank(id, bundle.universe);
            } else {
                pm = diversification_likelihood(compute_rta(acm));
            }
            break;
        }
        case MeasureId::C1:
        case MeasureId::C2:
        case MeasureId::C3: {
            const auto& acm = bundle.agents.at(measure_agent_kind(id));
            pm = cooccurrence_frequency(
                build_agent_cooccurrence(acm, options.cooccurrence_universe));
            break;
        }
        case MeasureId::D1: pm = normalized_co_classification(bundle.coclass); break;
        case MeasureId::D2: pm = coclass_cosine(bundle.coclass, options.d2_keep_diagonal); break;
        case MeasureId::D3: pm = patent_cooccurrence_frequency(bundle.coclass); break;
    }
    pm.id = id;
    pm.period = bundle.period;
    return pm;
}

void write_matrix(const ProximityMatrix& pm, const std::filesystem::path& path) {
    const char d = ';';
    const auto& codes = pm.universe.codes();
    std::string out = "class";
    for (const auto& c : codes) {
        out += d;
        out += c;
    }
    out += '\n';
    for (std::size_t i = 0; i < codes.size(); ++i) {
        out += codes[i];
        for (std::size_t j = 0; j < codes.size(); ++j) {
            out += d;
            out += format_sig12(pm.values.at(i, j));
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

ProximityMatrix read_matrix(const std::filesystem::path& path, MeasureId id,
                            const PeriodSpec& period) {
    auto text = read_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty matrix file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split(line, ';');
    if (header.size() < 2) throw IoError("bad matrix header in " + path.string());
    std::vector<std::string> codes(header.begin() + 1, header.end());

    ProximityMatrix pm;
    pm.id = id;
    pm.period = period;
    pm.universe = ClassUniverse(codes);
    if (pm.universe.size() != codes.size())
        throw IoError("duplicate class codes in " + path.string());
    const std::size_t n = codes.size();
    pm.values = Grid<double>(n, 0.0);

    std::size_t r = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (r >= n) throw IoError("too many rows in " + path.string());
        auto cells = split(line, ';');
        if (cells.size() != n + 1)
            throw IoError("bad row width in " + path.string());
        auto i = pm.universe.index_of(cells[0]);
        if (!i || *i != r) throw IoError("unexpected row order in " + path.string());
        for (std::size_t j = 0; j < n; ++j) {
            try {
                pm.values.at(r, j) = std::stod(cells[j + 1]);
            } catch (const std::exception&) {
                throw IoError("bad value '" + cells[j + 1] + "' in " + path.string());
            }
        }
        ++r;
    }
    if (r != n) throw IoError("missing rows in " + path.string());
    for (std::size_t i = 0; i < n; ++i) {
        if (pm.values.at(i, i) != 0.0)
            throw ValidationError("nonzero diagonal in " + path.string());
        for (std::size_t j = i + 1; j < n; ++j)
            if (pm.values.at(i, j) != pm.values.at(j, i))
                throw ValidationError("asymmetric matrix in " + path.string());
    }
    return pm;
}

}  // namespace techmap
