#pragma once

#include "hie/common.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace hie::graph {

using Edge = std::pair<int, int>;

/// Undirected simple graph. Edges are stored once with u < v; self-loops are
/// never stored and get added at use sites that need them.
struct Graph {
    int n = 0;
    std::vector<Edge> edges;
    /// n x f, empty when absent.
    Mat features;
    /// Empty when absent.
    std::vector<int> labels;
    /// Ground-truth tree level per node, empty when absent.
    std::vector<int> depth;

    std::vector<std::vector<int>> adjacency() const;
    std::vector<int> degrees() const;
    int num_classes() const;
    bool has_edge(int u, int v) const;

    /// Throws if any invariant is broken.
    void validate() const;
};

/// Canonicalizes (u < v), drops self-loops and duplicates, sorts.
std::vector<Edge> normalize_edges(std::vector<Edge> edges);

enum class TreeVariant { L, H };

/// Complete `branching`-ary tree filled level by level up to `node_budget`
/// nodes, with labels and class-conditional Gaussian features:
///  - H: the root is class 0, every subtree under a root child is its own class;
///  - L: classes follow depth, with the first four levels merged into class 0.
/// Class k features are drawn from N(k, 1) per coordinate.
Graph gen_tree(int branching, int node_budget, TreeVariant variant, int feature_dim, std::uint64_t seed);

/// Mean over nodes of the fraction of neighbors sharing the node's label.
/// Isolated nodes are skipped with a warning.
double homophily(const Graph& g);

enum class Centrality { Degree, Betweenness, Closeness };

/// Degree, unnormalized betweenness over unordered pairs (Brandes), or
/// closeness (n - 1) / sum of distances.
Vec centrality(const Graph& g, Centrality kind);

/// Index of the maximum entry, lowest index on ties.
int argmax_node(const Vec& scores);

/// BFS hop distances from `source`; -1 for unreachable nodes.
std::vector<int> bfs_distances(const Graph& g, int source);
bool is_connected(const Graph& g);

}  // namespace hie::graph
