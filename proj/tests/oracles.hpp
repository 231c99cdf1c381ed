#pragma once

// Slow, obviously-correct reference implementations used as test oracles.

#include "hie/graph.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <vector>

namespace hie::testing {

/// AUC by comparing every positive with every negative; ties count one half.
inline double auc_pairwise(const std::vector<double>& pos, const std::vector<double>& neg) {
    std::int64_t twice = 0;
    for (const double p : pos) {
        for (const double n : neg) {
            twice += p > n ? 2 : (p == n ? 1 : 0);
        }
    }
    return static_cast<double>(twice) / (2.0 * static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

/// Average precision as the step integral of precision over recall, one step
/// per distinct score threshold.
inline double ap_thresholds(const std::vector<double>& pos, const std::vector<double>& neg) {
    std::set<double, std::greater<>> thresholds(pos.begin(), pos.end());
    thresholds.insert(neg.begin(), neg.end());
    double ap = 0.0;
    double prev_recall = 0.0;
    for (const double t : thresholds) {
        const auto tp = std::count_if(pos.begin(), pos.end(), [t](double s) { return s >= t; });
        const auto fp = std::count_if(neg.begin(), neg.end(), [t](double s) { return s >= t; });
        const double recall = static_cast<double>(tp) / static_cast<double>(pos.size());
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return ap;
}

/// Betweenness by listing every shortest path between every unordered pair.
inline Vec betweenness_enumerate(const graph::Graph& g) {
    const auto adj = g.adjacency();
    Vec out = Vec::Zero(g.n);
    for (int s = 0; s < g.n; ++s) {
        const std::vector<int> ds = graph::bfs_distances(g, s);
        for (int t = s + 1; t < g.n; ++t) {
            if (ds[static_cast<std::size_t>(t)] < 0) {
                continue;
            }
            // Depth-first walk along strictly increasing BFS layers.
            std::vector<std::vector<int>> paths;
            std::vector<int> path = {s};
            const std::function<void(int)> walk = [&](int u) {
                if (u == t) {
                    paths.push_back(path);
                    return;
                }
                for (const int v : adj[static_cast<std::size_t>(u)]) {
                    if (ds[static_cast<std::size_t>(v)] == ds[static_cast<std::size_t>(u)] + 1 &&
                        ds[static_cast<std::size_t>(v)] <= ds[static_cast<std::size_t>(t)]) {
                        path.push_back(v);
                        walk(v);
                        path.pop_back();
                    }
                }
            };
            walk(s);
            std::vector<int> through(static_cast<std::size_t>(g.n), 0);
            for (const auto& p : paths) {
                for (std::size_t k = 1; k + 1 < p.size(); ++k) {
                    ++through[static_cast<std::size_t>(p[k])];
                }
            }
            for (int v = 0; v < g.n; ++v) {
                out(v) += static_cast<double>(through[static_cast<std::size_t>(v)]) / static_cast<double>(paths.size());
            }
        }
    }
    return out;
}

/// Random connected graph: a random spanning tree plus extra edges.
template <class Rng>
graph::Graph random_connected_graph(int n, double extra_p, Rng& rng) {
    graph::Graph g;
    g.n = n;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int v = 1; v < n; ++v) {
        g.edges.emplace_back(std::uniform_int_distribution<int>(0, v - 1)(rng), v);
    }
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            if (u(rng) < extra_p) {
                g.edges.emplace_back(a, b);
            }
        }
    }
    g.edges = graph::normalize_edges(g.edges);
    return g;
}

}  // namespace hie::testing
