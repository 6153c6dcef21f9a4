#include "techmap/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "techmap/util.hpp"

namespace techmap {

TechNetwork build_network(const ProximityMatrix& pm, const ClassStats& stats) {
    if (!(stats.universe == pm.universe))
        throw ValidationError("class stats universe does not match the matrix");
    TechNetwork net = build_network(pm);
    for (std::size_t i = 0; i < net.vertex_size.size(); ++i)
        net.vertex_size[i] = static_cast<double>(stats.patent_counts[i]);
    return net;
}

TechNetwork build_network(const ProximityMatrix& pm) {
    TechNetwork net;
    net.universe = pm.universe;
    const std::size_t n = pm.universe.size();
    net.vertex_size.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (double w = pm.values.at(i, j); w != 0.0) {
                if (!std::isfinite(w))
                    throw ValidationError("non-finite weight in proximity matrix");
                net.edges.push_back({i, j, w});
            }
    return net;
}

namespace {

// Union-find with path halving.
struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
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

bool heavier(const Edge& a, const Edge& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
}

bool pair_order(const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
}

}  // namespace

std::vector<Edge> maximum_spanning_tree(const TechNetwork& net) {
    std::vector<Edge> sorted = net.edges;
    std::sort(sorted.begin(), sorted.end(), heavier);
    DisjointSets ds(net.universe.size());
    std::vector<Edge> kept;
    for (const auto& e : sorted)
        if (ds.unite(e.u, e.v)) kept.push_back(e);
    std::sort(kept.begin(), kept.end(), pair_order);
    return kept;
}

Backbone filter_backbone(const TechNetwork& net, std::size_t multiplier) {
    if (multiplier < 1) throw ValidationError("backbone multiplier must be >= 1");
    const std::size_t target =
        std::min(multiplier * net.universe.size(), net.edges.size());

    auto mst = maximum_spanning_tree(net);
    std::vector<Edge> kept = mst;

    std::vector<Edge> rest;
    rest.reserve(net.edges.size());
    for (const auto& e : net.edges) {
        bool in_mst = std::binary_search(
            mst.begin(), mst.end(), e,
            [](const Edge& a, const Edge& b) { return pair_order(a, b); });
        if (!in_mst) rest.push_back(e);
    }
    std::sort(rest.begin(), rest.end(), heavier);
    for (const auto& e : rest) {
        if (kept.size() >= target) break;
        kept.push_back(e);
    }
    std::sort(kept.begin(), kept.end(), pair_order);

    Backbone bb;
    bb.network.universe = net.universe;
    bb.network.vertex_size = net.vertex_size;
    bb.network.edges = std::move(kept);
    bb.parent_edge_count = net.edges.size();
    return bb;
}

std::vector<double> degree_centrality(const TechNetwork& net) {
    std::vector<double> degree(net.universe.size(), 0.0);
    for (const auto& e : net.edges) {
        degree[e.u] += e.weight;
        degree[e.v] += e.weight;
    }
    return degree;
}

std::vector<double> eigenvector_centrality(const TechNetwork& net, double tolerance,
                                           std::size_t max_iterations) {
    const std::size_t n = net.universe.size();
    if (n == 0) throw ValidationError("empty network");
    double max_abs = 0.0;
    for (const auto& e : net.edges) max_abs = std::max(max_abs, std::abs(e.weight));
    if (max_abs == 0.0)
        throw ValidationError("eigenvector centrality needs at least one weighted edge");

    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> y(n);
    double diff = 0.0;
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        std::fill(y.begin(), y.end(), 0.0);
        for (const auto& e : net.edges) {
            y[e.u] += e.weight * x[e.v];
            y[e.v] += e.weight * x[e.u];
        }
        double norm = 0.0;
        for (double v : y) norm += v * v;
        norm = std::sqrt(norm);
        if (norm == 0.0)
            throw NumericalError("power iteration collapsed to the zero vector", 0.0);
        // Max-norm change; a dominant negative eigenvalue flips the sign
        // every step, so compare against both orientations.
        double d_plus = 0.0, d_minus = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double yi = y[i] / norm;
            d_plus = std::max(d_plus, std::abs(yi - x[i]));
            d_minus = std::max(d_minus, std::abs(yi + x[i]));
            x[i] = yi;
        }
        diff = std::min(d_plus, d_minus);
        if (diff < tolerance) {
            // Canonical sign: the entry with the largest magnitude is positive.
            std::size_t arg = 0;
            for (std::size_t i = 1; i < n; ++i)
                if (std::abs(x[i]) > std::abs(x[arg])) arg = i;
            if (x[arg] < 0.0)
                for (auto& v : x) v = -v;
            return x;
        }
    }
    throw NumericalError("eigenvector centrality did not converge within " +
                             std::to_string(max_iterations) + " iterations",
                         diff);
}

// --- Louvain ----------------------------------------------------------------

namespace {

// Working graph for Louvain: an undirected edge list where a (c, c, w)
// entry is a self-loop of weight w (counted as 2w in A_cc and degrees,
// the usual convention).
struct LouvainGraph {
    std::size_t n = 0;
    std::vector<Edge> edges;
};

struct LouvainAdj {
    std::vector<std::vector<std::pair<std::size_t, double>>> neighbors;  // excludes self-loops
    std::vector<double> self_loop;  // A_ii
    std::vector<double> degree;     // k_i
    double total = 0.0;             // 2m

    explicit LouvainAdj(const LouvainGraph& g)
        : neighbors(g.n), self_loop(g.n, 0.0), degree(g.n, 0.0) {
        for (const auto& e : g.edges) {
            if (e.u == e.v) {
                self_loop[e.u] += 2.0 * e.weight;
                degree[e.u] += 2.0 * e.weight;
            } else {
                neighbors[e.u].emplace_back(e.v, e.weight);
                neighbors[e.v].emplace_back(e.u, e.weight);
                degree[e.u] += e.weight;
                degree[e.v] += e.weight;
            }
        }
        for (double k : degree) total += k;
    }
};

// Deterministic Fisher-Yates; bounded draws use modulo so that the
// permutation is identical across standard library implementations.
void shuffle_order(std::vector<std::size_t>& order, std::mt19937_64& rng) {
    for (std::size_t i = order.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }
}

// One round of local moves. Returns the node->community assignment and
// whether any vertex changed community.
bool one_level(const LouvainAdj& adj, std::mt19937_64& rng,
               std::vector<std::size_t>& node2com) {
    const std::size_t n = adj.neighbors.size();
    node2com.resize(n);
    std::iota(node2com.begin(), node2com.end(), 0);
    std::vector<double> tot(adj.degree);  // sigma_tot per community

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    shuffle_order(order, rng);

    const double two_m = adj.total;
    if (two_m == 0.0) return false;
    const double m = two_m / 2.0;

    bool any_move = false;
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::size_t v : order) {
            const std::size_t c_old = node2com[v];
            // Weight from v to each neighboring community.
            std::map<std::size_t, double> links;
            links[c_old];  // staying put is always a candidate
            for (const auto& [u, w] : adj.neighbors[v]) links[node2com[u]] += w;

            tot[c_old] -= adj.degree[v];
            std::size_t best = c_old;
            double best_gain = -std::numeric_limits<double>::infinity();
            for (const auto& [c, k_vc] : links) {
                const double gain = (k_vc - tot[c] * adj.degree[v] / two_m) / m;
                if (gain > best_gain) {
                    best_gain = gain;
                    best = c;  // map order is ascending: ties keep the smallest id
                }
            }
            tot[best] += adj.degree[v];
            if (best != c_old) {
                node2com[v] = best;
                moved = true;
                any_move = true;
            }
        }
    }
    return any_move;
}

// Renumbers communities contiguously in ascending order of their current id.
std::size_t compact_ids(std::vector<std::size_t>& ids) {
    std::map<std::size_t, std::size_t>remap;
    for (auto c : ids) remap.emplace(c, 0);
    std::size_t next = 0;
    for (auto& [c, fresh] : remap) fresh = next++;
    for (auto& c : ids) c = remap[c];
    return next;
}

LouvainGraph aggregate(const LouvainGraph& g, const std::vector<std::size_t>& node2com,
                       std::size_t n_communities) {
    LouvainGraph out;
    out.n = n_communities;
    std::map<std::pair<std::size_t, std::size_t>, double> acc;
    for (const auto& e : g.edges) {
        auto cu = node2com[e.u];
        auto cv = node2com[e.v];
        if (cu > cv) std::swap(cu, cv);
        acc[{cu, cv}] += e.weight;
    }
    out.edges.reserve(acc.size());
    for (const auto& [pair, w] : acc) out.edges.push_back({pair.first, pair.second, w});
    return out;
}

}  // namespace

double modularity(const TechNetwork& net, const std::vector<std::size_t>& community) {
    const std::size_t n = net.universe.size();
    if (community.size() != n)
        throw ValidationError("partition does not cover all vertices");
    double two_m = 0.0;
    std::vector<double> degree(n, 0.0);
    for (const auto& e : net.edges) {
        degree[e.u] += e.weight;
        degree[e.v] += e.weight;
        two_m += 2.0 * e.weight;
    }
    if (two_m == 0.0) return 0.0;

    std::map<std::size_t, double> internal, tot;
    for (const auto& e : net.edges)
        if (community[e.u] == community[e.v]) internal[community[e.u]] += 2.0 * e.weight;
    for (std::size_t i = 0; i < n; ++i) tot[community[i]] += degree[i];

    double q = 0.0;
    for (const auto& [c, t] : tot) {
        const double in_c = internal.count(c) ? internal.at(c) : 0.0;
        q += in_c / two_m - (t / two_m) * (t / two_m);
    }
    return q;
}

double modularity(const Backbone& bb, const std::vector<std::size_t>& community) {
    return modularity(bb.network, community);
}

Partition detect_communities(const TechNetwork& net, std::uint64_t seed) {
    const std::size_t n = net.universe.size();
    Partition part;
    part.community.resize(n);
    std::iota(part.community.begin(), part.community.end(), 0);

    LouvainGraph g;
    g.n = n;
    g.edges = net.edges;
    std::mt19937_64 rng(seed);

    std::vector<std::size_t> assignment = part.community;  // original vertex -> community
    while (true) {
        LouvainAdj adj(g);
        std::vector<std::size_t> node2com;
        const bool improved = one_level(adj, rng, node2com);
        const std::size_t n_communities = compact_ids(node2com);
        for (auto& c : assignment) c = node2com[c];
        if (!improved || n_communities == g.n) break;
        g = aggregate(g, node2com, n_communities);
    }

    // Stable public ids: communities ordered by their smallest vertex.
    compact_ids(assignment);
    part.community = std::move(assignment);
    part.modularity = modularity(net, part.community);
    return part;
}

Partition detect_communities(const Backbone& bb, std::uint64_t seed) {
    return detect_communities(bb.network, seed);
}

OverlaySet overlay(const TechNetwork& net, const Corpus& corpus, const std::string& agent_id,
                   AgentKind kind, const PeriodSpec& period) {
    OverlaySet set;
    set.agent_id = agent_id;
    set.kind = kind;
    set.period = period;
    std::vector<std::size_t> hits;
    for (const auto& r : corpus.records()) {
        const auto& agents = agent_field(r, kind);
        if (std::find(agents.begin(), agents.end(), agent_id) == agents.end()) continue;
        set.agent_found = true;
        if (!period.contains(r.grant_year)) continue;
        for (auto i : net.universe.admitted(r)) hits.push_back(i);
    }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    set.highlighted = std::move(hits);
    return set;
}

// --- exports ----------------------------------------------------------------

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

bool highlighted(const OverlaySet* overlay, std::size_t i) {
    return overlay && std::binary_search(overlay->highlighted.begin(),
                                         overlay->highlighted.end(), i);
}

}  // namespace

std::string to_graphml(const TechNetwork& net, const GraphExportOptions& options) {
    const auto& codes = net.universe.codes();
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
    out += "  <key id=\"code\" for=\"node\" attr.name=\"code\" attr.type=\"string\"/>\n";
    out += "  <key id=\"size\" for=\"node\" attr.name=\"size\" attr.type=\"double\"/>\n";
    if (options.partition)
        out += "  <key id=\"community\" for=\"node\" attr.name=\"community\" attr.type=\"int\"/>\n";
    if (options.overlay)
        out += "  <key id=\"overlay\" for=\"node\" attr.name=\"overlay\" attr.type=\"boolean\"/>\n";
    out += "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n";
    out += "  <graph id=\"technet\" edgedefault=\"undirected\">\n";
    for (std::size_t i = 0; i < codes.size(); ++i) {
        out += "    <node id=\"n" + std::to_string(i) + "\">";
        out += "<data key=\"code\">" + xml_escape(codes[i]) + "</data>";
        out += "<data key=\"size\">" + format_sig12(net.vertex_size[i]) + "</data>";
        if (options.partition)
            out += "<data key=\"community\">" +
                   std::to_string(options.partition->community[i]) + "</data>";
        if (options.overlay)
            out += std::string("<data key=\"overlay\">") +
                   (highlighted(options.overlay, i) ? "true" : "false") + "</data>";
        out += "</node>\n";
    }
    for (const auto& e : net.edges) {
        out += "    <edge source=\"n" + std::to_string(e.u) + "\" target=\"n" +
               std::to_string(e.v) + "\">";
        out += "<data key=\"weight\">" + format_sig12(e.weight) + "</data>";
        out += "</edge>\n";
    }
    out += "  </graph>\n</graphml>\n";
    return out;
}

std::string to_dot(const TechNetwork& net, const GraphExportOptions& options) {
    const auto& codes = net.universe.codes();
    std::string out = "graph technet {\n";
    for (std::size_t i = 0; i < codes.size(); ++i) {
        out += "  n" + std::to_string(i) + " [label=\"" + codes[i] + "\"";
        out += ", size=" + format_sig12(net.vertex_size[i]);
        if (options.partition)
            out += ", community=" + std::to_string(options.partition->community[i]);
        if (highlighted(options.overlay, i)) out += ", style=filled, fillcolor=red";
        out += "];\n";
    }
    for (const auto& e : net.edges)
        out += "  n" + std::to_string(e.u) + " -- n" + std::to_string(e.v) +
               " [weight=" + format_sig12(e.weight) + "];\n";
    out += "}\n";
    return out;
}

std::string to_edge_list(const TechNetwork& net, char delim) {
    const auto& codes = net.universe.codes();
    std::string out = std::string("source") + delim + "target" + delim + "weight\n";
    for (const auto& e : net.edges) {
        out += codes[e.u];
        out += delim;
        out += codes[e.v];
        out += delim;
        out += format_sig12(e.weight);
        out += '\n';
    }
    return out;
}

}  // namespace techmap
