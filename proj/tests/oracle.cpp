#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "techmap/network.hpp"

namespace oracle {

using techmap::AgentKind;
using techmap::PatentRecord;

namespace {

bool has_code(const PatentRecord& r, const std::string& code) {
    return std::find(r.classes.begin(), r.classes.end(), code) != r.classes.end();
}

std::vector<std::string> admitted_codes(const PatentRecord& r, const ClassUniverse& u) {
    std::vector<std::string> out;
    for (const auto& code : u.codes())
        if (has_code(r, code)) out.push_back(code);
    return out;
}

double set_jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    std::size_t inter = 0;
    for (const auto& x : a)
        if (b.count(x)) ++inter;
    const std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double map_cosine(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [k, v] : a) {
        na += v * v;
        auto it = b.find(k);
        if (it != b.end()) dot += v * it->second;
    }
    for (const auto& [k, v] : b) nb += v * v;
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double vec_cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        dot += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double hypergeometric_t(double O, double Ni, double Nj, double T) {
    if (T < 2.0) return 0.0;
    const double mu = Ni * Nj / T;
    const double var = mu * ((T - Ni) / T) * ((T - Nj) / (T - 1.0));
    if (var <= 0.0) return 0.0;
    return (O - mu) / std::sqrt(var);
}

AgentKind kind_of(MeasureId id) {
    switch (id) {
        case MeasureId::B1:
        case MeasureId::C1: return AgentKind::inventor;
        case MeasureId::B2:
        case MeasureId::C2: return AgentKind::organization;
        default: return AgentKind::country;
    }
}

const std::vector<std::string>& agents_of(const PatentRecord& r, AgentKind kind) {
    return techmap::agent_field(r, kind);
}

Grid<double> ref_a1(const Corpus& corpus, const ClassUniverse& u) {
    const auto& codes = u.codes();
    std::vector<std::set<std::string>> refs(codes.size());
    for (std::size_t i = 0; i < codes.size(); ++i)
        for (const auto& r : corpus.records())
            if (has_code(r, codes[i]))
                refs[i].insert(r.references.begin(), r.references.end());
    Grid<double> g(codes.size(), 0.0);
    for (std::size_t i = 0; i < codes.size(); ++i)
        for (std::size_t j = i + 1; j < codes.size(); ++j)
            g.set_symmetric(i, j, set_jaccard(refs[i], refs[j]));
    return g;
}

Grid<double> ref_a2(const Corpus& corpus, const ClassUniverse& u) {
    const auto& codes = u.codes();
    const std::size_t n = codes.size();
    std::vector<std::vector<double>> cc(n, std::vector<double>(n, 0.0));
    for (const auto& p : corpus.records()) {
        for (const auto& q_id : p.references) {
            const PatentRecord* q = corpus.find(q_id);
            if (!q) continue;
            for (std::size_t i = 0; i < n; ++i) {
                if (!has_code(p, codes[i])) continue;
                for (std::size_t j = 0; j < n; ++j)
                    if (has_code(*q, codes[j])) cc[i][j] += 1.0;
            }
        }
    }
    Grid<double> g(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) g.set_symmetric(i, j, vec_cosine(cc[i], cc[j]));
    return g;
}

Grid<double> ref_a3(const Corpus& corpus, const ClassUniverse& u) {
    const auto& codes = u.codes();
    const std::size_t n = codes.size();
    std::vector<std::map<std::string, double>> counts(n);
    for (const auto& p : corpus.records())
        for (std::size_t i = 0; i < n; ++i)
            if (has_code(p, codes[i]))
                for (const auto& q_id : p.references) counts[i][q_id] += 1.0;
    Grid<double> g(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            g.set_symmetric(i, j, map_cosine(counts[i], counts[j]));
    return g;
}

Grid<double> ref_b(const Corpus& corpus, const ClassUniverse& u, AgentKind kind) {
    const auto& codes = u.codes();
    const std::size_t n = codes.size();
    // x(c, i) with whole counting.
    std::map<std::string, std::vector<double>> x;
    for (const auto& p : corpus.records()) {
        auto classes = admitted_codes(p, u);
        for (const auto& agent : agents_of(p, kind)) {
            auto& row = x.try_emplace(agent, std::vector<double>(n, 0.0)).first->second;
            for (const auto& code : classes)
                row[static_cast<std::size_t>(
                    std::find(codes.begin(), codes.end(), code) - codes.begin())] += 1.0;
        }
    }
    double grand = 0.0;
    std::vector<double> class_total(n, 0.0);
    for (const auto& [agent, row] : x)
        for (std::size_t i = 0; i < n; ++i) {
            class_total[i] += row[i];
            grand += row[i];
        }

    std::vector<std::set<std::string>> specialized(n);
    if (grand > 0.0) {
        for (const auto& [agent, row] : x) {
            double agent_total = 0.0;
            for (double v : row) agent_total += v;
            if (agent_total == 0.0) continue;
            for (std::size_t i = 0; i < n; ++i) {
                if (row[i] == 0.0 || class_total[i] == 0.0) continue;
                const double rta = (row[i] / agent_total) / (class_total[i] / grand);
                if (rta > 1.0) specialized[i].insert(agent);
            }
        }
    }
    Grid<double> g(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (specialized[i].empty() || specialized[j].empty()) continue;
            std::size_t inter = 0;
            for (const auto& a : specialized[i])
                if (specialized[j].count(a)) ++inter;
            const double p_i_given_j =
                static_cast<double>(inter) / static_cast<double>(specialized[j].size());
            const double p_j_given_i =
                static_cast<double>(inter) / static_cast<double>(specialized[i].size());
            g.set_symmetric(i, j, std::min(p_i_given_j, p_j_given_i));
        }
    }
    return g;
}

Grid<double> ref_c(const Corpus& corpus, const ClassUniverse& u, AgentKind kind,
                   CooccurrenceUniverse mode) {
    const auto& codes = u.codes();
    const std::size_t n = codes.size();
    std::map<std::string, std::set<std::string>> active;  // agent -> admitted codes
    for (const auto& p : corpus.records()) {
        auto classes = admitted_codes(p, u);
        if (classes.empty()) continue;
        for (const auto& agent : agents_of(p, kind))
            active[agent].insert(classes.begin(), classes.end());
    }
    double T = 0.0;
    std::vector<double> N(n, 0.0);
    Grid<double> O(n, 0.0);
    for (const auto& [agent, classes] : active) {
        if (mode == CooccurrenceUniverse::diversified && classes.size() < 2) continue;
        T += 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!classes.count(codes[i])) continue;
            N[i] += 1.0;
            for (std::size_t j = i + 1; j < n; ++j)
                if (classes.count(codes[j])) O.add_symmetric(i, j, 1.0);
        }
    }
    Grid<double> g(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            g.set_symmetric(i, j, hypergeometric_t(O.at(i, j), N[i], N[j], T));
    return g;
}

Grid<double> ref_d1(const Corpus& corpus, const ClassUniverse& u) {
    const auto& codes = u.codes();
    const std::size_t n = codes.size();
    Grid<double> g(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double both = 0.0, either = 0.0;
            for (const auto& r : corpus.records()) {
                const bool a = has_code(r, codes[i]);
                const bool b = has_code(r, codes[j]);
                if (a && b) both += 1.0;
                if (a || b) either += 1.0;
            }
            if (either > 0.0) g.set_symmetric(i, j, both / either);
        }
    }
    return g;
}

Grid<double> ref_d2(const Corpus& corpus, const ClassUniverse& u, bool keep_diagonal) {
    const auto& codes = u.codes();
    const std::size_t n = codes.size();
    std::vector<std::vector<double>> shared(n, std::vector<double>(n, 0.0));
    for (const auto& r : corpus.records())
        for (std::size_t i = 0; i < n; ++i) {
            if (!has_code(r, codes[i])) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) {
                    if (keep_diagonal) shared[i][i] += 1.0;
                } else if (has_code(r, codes[j])) {
                    shared[i][j] += 1.0;
                }
            }
        }
    Grid<double> g(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            g.set_symmetric(i, j, vec_cosine(shared[i], shared[j]));
    return g;
}

Grid<double> ref_d3(const Corpus& corpus, const ClassUniverse& u) {
    const auto& codes = u.codes();
    const std::size_t n = codes.size();
    double T = 0.0;
    std::vector<double> N(n, 0.0);
    Grid<double> O(n, 0.0);
    for (const auto& r : corpus.records()) {
        auto classes = admitted_codes(r, u);
        for (std::size_t a = 0; a < classes.size(); ++a)
            for (std::size_t b2 = a + 1; b2 < classes.size(); ++b2) {
                auto i = static_cast<std::size_t>(
                    std::find(codes.begin(), codes.end(), classes[a]) - codes.begin());
                auto j = static_cast<std::size_t>(
                    std::find(codes.begin(), codes.end(), classes[b2]) - codes.begin());
                O.add_symmetric(i, j, 1.0);
            }
        if (classes.size() >= 2) {
            T += 1.0;
            for (const auto& code : classes)
                N[static_cast<std::size_t>(std::find(codes.begin(), codes.end(), code) -
                                           codes.begin())] += 1.0;
        }
    }
    Grid<double> g(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            g.set_symmetric(i, j, hypergeometric_t(O.at(i, j), N[i], N[j], T));
    return g;
}

}  // namespace

Grid<double> measure(const Corpus& corpus, const ClassUniverse& universe, MeasureId id,
                     CooccurrenceUniverse cooccurrence, bool d2_keep_diagonal) {
    switch (id) {
        case MeasureId::A1: return ref_a1(corpus, universe);
        case MeasureId::A2: return ref_a2(corpus, universe);
        case MeasureId::A3: return ref_a3(corpus, universe);
        case MeasureId::B1:
        case MeasureId::B2:
        case MeasureId::B3: return ref_b(corpus, universe, kind_of(id));
        case MeasureId::C1:
        case MeasureId::C2:
        case MeasureId::C3: return ref_c(corpus, universe, kind_of(id), cooccurrence);
        case MeasureId::D1: return ref_d1(corpus, universe);
        case MeasureId::D2: return ref_d2(corpus, universe, d2_keep_diagonal);
        case MeasureId::D3: return ref_d3(corpus, universe);
    }
    throw techmap::ValidationError("unknown measure");
}

// --- generators ---------------------------------------------------------------

namespace {

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& pool) {
    return pool[rng() % pool.size()];
}

std::vector<std::string> dedup(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

Corpus random_corpus(std::mt19937_64& rng, const CorpusParams& params) {
    const std::size_t n_classes = 2 + rng() % (params.max_classes - 1);
    std::vector<std::string> codes;
    for (std::size_t i = 0; i < n_classes; ++i) codes.push_back("C0" + std::to_string(i));
    const std::vector<std::string> excluded = {"X99", "Y99"};

    std::vector<std::string> inventors, organizations, countries, externals;
    for (std::size_t i = 0; i < params.max_agents; ++i) inventors.push_back("i" + std::to_string(i));
    for (std::size_t i = 0; i < std::max<std::size_t>(params.max_agents / 2, 2); ++i)
        organizations.push_back("org" + std::to_string(i));
    for (std::size_t i = 0; i < 4; ++i) countries.push_back("T" + std::to_string(i));
    for (std::size_t i = 0; i < 30; ++i) externals.push_back("ext" + std::to_string(i));

    const std::size_t n_patents = 1 + rng() % params.max_patents;
    std::vector<PatentRecord> records;
    for (std::size_t p = 0; p < n_patents; ++p) {
        PatentRecord r;
        r.patent_id = "p" + std::to_string(p);
        r.grant_year = 1990 + static_cast<int>(rng() % 20);
        std::vector<std::string> cls;
        const std::size_t k = 1 + rng() % 3;
        for (std::size_t c = 0; c < k; ++c) cls.push_back(pick(rng, codes));
        if (params.sprinkle_excluded && rng() % 7 == 0) cls.push_back(pick(rng, excluded));
        r.classes = dedup(cls);

        std::vector<std::string> refs;
        const std::size_t n_refs = rng() % 6;
        for (std::size_t q = 0; q < n_refs; ++q) {
            if (p > 0 && rng() % 5 < 3)
                refs.push_back("p" + std::to_string(rng() % p));
            else
                refs.push_back(pick(rng, externals));
        }
        r.references = dedup(refs);

        std::vector<std::string> inv, org, cty;
        if (rng() % 10 != 0) {
            const std::size_t ni = 1 + rng() % 3;
            for (std::size_t a = 0; a < ni; ++a) inv.push_back(pick(rng, inventors));
        }
        if (rng() % 5 != 0) org.push_back(pick(rng, organizations));
        if (rng() % 4 != 0) {
            const std::size_t nc = 1 + rng() % 2;
            for (std::size_t a = 0; a < nc; ++a) cty.push_back(pick(rng, countries));
        }
        r.inventors = dedup(inv);
        r.organizations = dedup(org);
        r.countries = dedup(cty);
        records.push_back(std::move(r));
    }
    return Corpus(std::move(records));
}

namespace {
const std::vector<std::string> kBlockA = {"A01", "A02", "A03"};
const std::vector<std::string> kBlockB = {"B01", "B02", "B03"};
}  // namespace

const std::vector<std::string>& planted_block_a() { return kBlockA; }
const std::vector<std::string>& planted_block_b() { return kBlockB; }

Corpus planted_corpus(std::mt19937_64& rng, std::size_t patents_per_block) {
    const std::size_t total = 2 * patents_per_block;
    std::vector<std::vector<std::string>> inventor_pool(2);
    for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t i = 0; i < 12; ++i)
            inventor_pool[b].push_back((b == 0 ? "ia" : "ib") + std::to_string(i));

    auto block_classes = [&](std::size_t b) -> const std::vector<std::string>& {
        return b == 0 ? kBlockA : kBlockB;
    };

    std::vector<PatentRecord> records;
    for (std::size_t p = 0; p < total; ++p) {
        const std::size_t b = p % 2;  // patents alternate between the blocks
        PatentRecord r;
        r.patent_id = "p" + std::to_string(p);
        r.grant_year = 1990 + static_cast<int>(rng() % 10);

        std::vector<std::string> cls;
        const std::size_t k = (rng() % 10 < 7) ? 2 : 1;
        for (std::size_t c = 0; c < k; ++c) {
            const bool own = rng() % 10 < 9;
            cls.push_back(pick(rng, block_classes(own ? b : 1 - b)));
        }
        r.classes = dedup(cls);

        std::vector<std::string> refs;
        const std::size_t n_refs = 1 + rng() % 4;
        for (std::size_t q = 0; q < n_refs && p >= 2; ++q) {
            const bool own = rng() % 10 < 9;
            const std::size_t target_block = own ? b : 1 - b;
            std::size_t candidate = rng() % p;
            if (candidate % 2 != target_block)
                candidate = candidate + 1 < p ? candidate + 1 : candidate - 1;
            if (candidate % 2 == target_block) refs.push_back("p" + std::to_string(candidate));
        }
        r.references = dedup(refs);

        std::vector<std::string> inv;
        const std::size_t ni = 1 + rng() % 2;
        for (std::size_t a = 0; a < ni; ++a) {
            const bool own = rng() % 20 < 19;
            inv.push_back(pick(rng, inventor_pool[own ? b : 1 - b]));
        }
        r.inventors = dedup(inv);
        r.organizations = {b == 0 ? "orgA" : "orgB"};
        r.countries = {b == 0 ? "CA" : "CB"};
        records.push_back(std::move(r));
    }
    return Corpus(std::move(records));
}

// --- correlation references -----------------------------------------------------

bool ref_pearson(const std::vector<double>& x, const std::vector<double>& y, double& out) {
    const std::size_t n = x.size();
    if (n < 2) return false;
    long double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxy += static_cast<long double>(x[i]) * y[i];
        sxx += static_cast<long double>(x[i]) * x[i];
        syy += static_cast<long double>(y[i]) * y[i];
    }
    const long double num = static_cast<long double>(n) * sxy - sx * sy;
    const long double dx = static_cast<long double>(n) * sxx - sx * sx;
    const long double dy = static_cast<long double>(n) * syy - sy * sy;
    if (dx <= 0 || dy <= 0) return false;
    out = static_cast<double>(num / (sqrtl(dx) * sqrtl(dy)));
    return true;
}

bool ref_spearman(const std::vector<double>& x, const std::vector<double>& y, double& out) {
    const std::size_t n = x.size();
    auto rank = [n](const std::vector<double>& v) {
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t smaller = 0, equal = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (v[j] < v[i]) ++smaller;
                if (v[j] == v[i]) ++equal;
            }
            r[i] = static_cast<double>(smaller) + 1.0 +
                   (static_cast<double>(equal) - 1.0) / 2.0;
        }
        return r;
    };
    return ref_pearson(rank(x), rank(y), out);
}

// --- graph references -------------------------------------------------------------

namespace {

struct Dsu {
    std::vector<std::size_t> parent;
    explicit Dsu(std::size_t n) : parent(n) {
        for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

}  // namespace

double best_spanning_weight(std::size_t n, const std::vector<Edge>& edges) {
    Dsu components(n);
    for (const auto& e : edges) components.unite(e.u, e.v);
    std::map<std::size_t, std::size_t> comp_size;
    for (std::size_t v = 0; v < n; ++v) comp_size[components.find(v)] += 1;

    double total = 0.0;
    for (const auto& [root, size] : comp_size) {
        if (size < 2) continue;
        std::vector<Edge> comp_edges;
        for (const auto& e : edges)
            if (components.find(e.u) == root) comp_edges.push_back(e);
        const std::size_t need = size - 1;
        std::vector<std::size_t> choice(need);
        double best = -std::numeric_limits<double>::infinity();
        auto recurse = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
            if (depth == need) {
                Dsu dsu(n);
                double w = 0.0;
                std::size_t joins = 0;
                for (auto idx : choice) {
                    if (dsu.unite(comp_edges[idx].u, comp_edges[idx].v)) ++joins;
                    w += comp_edges[idx].weight;
                }
                if (joins == need) best = std::max(best, w);
                return;
            }
            for (std::size_t i = start; i < comp_edges.size(); ++i) {
                choice[depth] = i;
                self(self, i + 1, depth + 1);
            }
        };
        recurse(recurse, 0, 0);
        total += best;
    }
    return total;
}

double best_modularity(const techmap::TechNetwork& net) {
    const std::size_t n = net.universe.size();
    std::vector<std::size_t> assignment(n, 0);
    double best = -1.0;
    // Restricted growth strings enumerate all set partitions.
    auto recurse = [&](auto&& self, std::size_t v, std::size_t max_used) -> void {
        if (v == n) {
            best = std::max(best, techmap::modularity(net, assignment));
            return;
        }
        for (std::size_t c = 0; c <= max_used; ++c) {
            assignment[v] = c;
            self(self, v + 1, std::max(max_used, c + 1));
        }
    };
    recurse(recurse, 0, 0);
    return best;
}

}  // namespace oracle
