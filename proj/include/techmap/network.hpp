#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "techmap/measures.hpp"

namespace techmap {

// Undirected weighted edge over class indices, u < v.
struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;
    double weight = 0.0;

    bool operator==(const Edge&) const = default;
};

// Weighted undirected technology network over the class universe.
// Vertices are class indices; vertex_size carries class patent counts for
// display and export.
struct TechNetwork {
    ClassUniverse universe;
    std::vector<double> vertex_size;
    std::vector<Edge> edges;  // sorted by (u, v), no duplicates, no loops
};

TechNetwork build_network(const ProximityMatrix& pm, const ClassStats& stats);
TechNetwork build_network(const ProximityMatrix& pm);

// Maximum-weight spanning forest, deterministic under ties (weight desc,
// then lexicographic vertex-pair order).
std::vector<Edge> maximum_spanning_tree(const TechNetwork& net);

// MST plus the strongest remaining edges until min(multiplier*N, |E|)
// edges are kept.
struct Backbone {
    TechNetwork network;  // the filtered graph
    std::size_t parent_edge_count = 0;
};

Backbone filter_backbone(const TechNetwork& net, std::size_t multiplier);

// Weighted degree (edge-weight sum per vertex).
std::vector<double> degree_centrality(const TechNetwork& net);

// Dominant eigenvector of the weighted adjacency matrix by power
// iteration from a uniform start vector, normalized to unit Euclidean
// norm. Throws NumericalError when the iteration does not converge and
// ValidationError when the network carries no usable weight.
std::vector<double> eigenvector_centrality(const TechNetwork& net, double tolerance = 1e-10,
                                           std::size_t max_iterations = 10000);

struct Partition {
    std::vector<std::size_t> community;  // per vertex, ids contiguous from 0
    double modularity = 0.0;
};

// Louvain local moves plus aggregation, deterministic for a given seed.
Partition detect_communities(const TechNetwork& net, std::uint64_t seed);
Partition detect_communities(const Backbone& bb, std::uint64_t seed);

// Weighted Newman modularity of a vertex partition.
double modularity(const TechNetwork& net, const std::vector<std::size_t>& community);
double modularity(const Backbone& bb, const std::vector<std::size_t>& community);

// Classes in which one agent patented during a period.
struct OverlaySet {
    std::string agent_id;
    AgentKind kind = AgentKind::inventor;
    PeriodSpec period;
    std::vector<std::size_t> highlighted;  // sorted class indices
    bool agent_found = false;
};

OverlaySet overlay(const TechNetwork& net, const Corpus& corpus, const std::string& agent_id,
                   AgentKind kind, const PeriodSpec& period);

struct GraphExportOptions {
    const Partition* partition = nullptr;
    const OverlaySet* overlay = nullptr;
};

std::string to_graphml(const TechNetwork& net, const GraphExportOptions& options = {});
std::string to_dot(const TechNetwork& net, const GraphExportOptions& options = {});
std::string to_edge_list(const TechNetwork& net, char delim = ';');

}  // namespace techmap
