#include "hie/graph.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <stack>
#include <string>

namespace hie::graph {

std::vector<std::vector<int>> Graph::adjacency() const {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const auto& [u, v] : edges) {
        adj[static_cast<std::size_t>(u)].push_back(v);
        adj[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& row : adj) {
        std::sort(row.begin(), row.end());
    }
    return adj;
}

std::vector<int> Graph::degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(n), 0);
    for (const auto& [u, v] : edges) {
        ++deg[static_cast<std::size_t>(u)];
        ++deg[static_cast<std::size_t>(v)];
    }
    return deg;
}

int Graph::num_classes() const {
    if (labels.empty()) {
        return 0;
    }
    return *std::max_element(labels.begin(), labels.end()) + 1;
}

bool Graph::has_edge(int u, int v) const {
    if (u > v) {
        std::swap(u, v);
    }
    return std::binary_search(edges.begin(), edges.end(), Edge{u, v});
}

void Graph::validate() const {
    if (n < 0) {
        throw Error("graph: negative node count");
    }
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto [u, v] = edges[k];
        if (u < 0 || v < 0 || u >= n || v >= n) {
            throw Error("graph: edge endpoint out of range");
        }
        if (u >= v) {
            throw Error("graph: edges must be stored as u < v without self-loops");
        }
        if (k > 0 && !(edges[k - 1] < edges[k])) {
            throw Error("graph: edges must be sorted and unique");
        }
    }
    if (features.size() != 0 && features.rows() != n) {
        throw Error("graph: feature row count differs from node count");
    }
    if (!labels.empty()) {
        if (static_cast<int>(labels.size()) != n) {
            throw Error("graph: label count differs from node count");
        }
        if (std::any_of(labels.begin(), labels.end(), [](int l) { return l < 0; })) {
            throw Error("graph: negative label");
        }
    }
    if (!depth.empty()) {
        if (static_cast<int>(depth.size()) != n) {
            throw Error("graph: depth count differs from node count");
        }
        if (std::count(depth.begin(), depth.end(), 0) != 1) {
            throw Error("graph: exactly one node must have depth 0");
        }
    }
}

std::vector<Edge> normalize_edges(std::vector<Edge> edges) {
    std::vector<Edge> out;
    out.reserve(edges.size());
    for (auto [u, v] : edges) {
        if (u == v) {
            continue;
        }
        if (u > v) {
            std::swap(u, v);
        }
        out.emplace_back(u, v);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Graph gen_tree(int branching, int node_budget, TreeVariant variant, int feature_dim, std::uint64_t seed) {
    if (branching < 2) {
        throw Error("gen_tree: branching must be at least 2");
    }
    if (node_budget < 1) {
        throw Error("gen_tree: node budget must be at least 1");
    }
    if (feature_dim < 0) {
        throw Error("gen_tree: negative feature dimension");
    }
    Graph g;
    g.n = node_budget;
    g.depth.assign(static_cast<std::size_t>(node_budget), 0);
    // Level-order numbering: the parent of node i is (i - 1) / branching.
    std::vector<int> top_child(static_cast<std::size_t>(node_budget), -1);
    for (int i = 1; i < node_budget; ++i) {
        const int parent = (i - 1) / branching;
        g.edges.emplace_back(parent, i);
        g.depth[static_cast<std::size_t>(i)] = g.depth[static_cast<std::size_t>(parent)] + 1;
        top_child[static_cast<std::size_t>(i)] =
            parent == 0 ? i - 1 : top_child[static_cast<std::size_t>(parent)];
    }
    g.edges = normalize_edges(std::move(g.edges));

    g.labels.assign(static_cast<std::size_t>(node_budget), 0);
    for (int i = 0; i < node_budget; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (variant == TreeVariant::H) {
            g.labels[k] = i == 0 ? 0 : top_child[k] + 1;
        } else {
            g.labels[k] = std::max(0, g.depth[k] - 3);
        }
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    g.features.resize(node_budget, feature_dim);
    for (int i = 0; i < node_budget; ++i) {
        const double mean = static_cast<double>(g.labels[static_cast<std::size_t>(i)]);
        for (int f = 0; f < feature_dim; ++f) {
            g.features(i, f) = mean + normal(rng);
        }
    }
    g.validate();
    return g;
}

double homophily(const Graph& g) {
    if (static_cast<int>(g.labels.size()) != g.n) {
        throw Error("homophily: labels required");
    }
    const auto adj = g.adjacency();
    double total = 0.0;
    int counted = 0;
    int isolated = 0;
    for (int v = 0; v < g.n; ++v) {
        const auto& nbrs = adj[static_cast<std::size_t>(v)];
        if (nbrs.empty()) {
            ++isolated;
            continue;
        }
        int same = 0;
        for (int u : nbrs) {
            same += g.labels[static_cast<std::size_t>(u)] == g.labels[static_cast<std::size_t>(v)] ? 1 : 0;
        }
        total += static_cast<double>(same) / static_cast<double>(nbrs.size());
        ++counted;
    }
    if (isolated > 0) {
        warn("homophily: skipped " + std::to_string(isolated) + " isolated node(s)");
    }
    if (counted == 0) {
        throw Error("homophily: graph has no edges");
    }
    return total / counted;
}

std::vector<int> bfs_distances(const Graph& g, int source) {
    const auto adj = g.adjacency();
    std::vector<int> dist(static_cast<std::size_t>(g.n), -1);
    std::queue<int> q;
    dist[static_cast<std::size_t>(source)] = 0;
    q.push(source);
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (int w : adj[static_cast<std::size_t>(v)]) {
            if (dist[static_cast<std::size_t>(w)] < 0) {
                dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
                q.push(w);
            }
        }
    }
    return dist;
}

bool is_connected(const Graph& g) {
    if (g.n == 0) {
        return true;
    }
    const auto d = bfs_distances(g, 0);
    return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
}

namespace {

Vec betweenness(const Graph& g) {
    const auto adj = g.adjacency();
    const auto n = static_cast<std::size_t>(g.n);
    Vec cb = Vec::Zero(g.n);
    std::vector<std::vector<int>> pred(n);
    std::vector<double> sigma(n);
    std::vector<double> delta(n);
    std::vector<int> dist(n);
    for (int s = 0; s < g.n; ++s) {
        std::stack<int> order;
        for (std::size_t i = 0; i < n; ++i) {
            pred[i].clear();
            sigma[i] = 0.0;
            delta[i] = 0.0;
            dist[i] = -1;
        }
        sigma[static_cast<std::size_t>(s)] = 1.0;
        dist[static_cast<std::size_t>(s)] = 0;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            order.push(v);
            for (int w : adj[static_cast<std::size_t>(v)]) {
                const auto wi = static_cast<std::size_t>(w);
                if (dist[wi] < 0) {
                    dist[wi] = dist[static_cast<std::size_t>(v)] + 1;
                    q.push(w);
                }
                if (dist[wi] == dist[static_cast<std::size_t>(v)] + 1) {
                    sigma[wi] += sigma[static_cast<std::size_t>(v)];
                    pred[wi].push_back(v);
                }
            }
        }
        while (!order.empty()) {
            const int w = order.top();
            order.pop();
            const auto wi = static_cast<std::size_t>(w);
            for (int v : pred[wi]) {
                const auto vi = static_cast<std::size_t>(v);
                delta[vi] += sigma[vi] / sigma[wi] * (1.0 + delta[wi]);
            }
            if (w != s) {
                cb(w) += delta[wi];
            }
        }
    }
    // Every unordered pair was visited from both endpoints.
    return cb / 2.0;
}

}  // namespace

Vec centrality(const Graph& g, Centrality kind) {
    switch (kind) {
        case Centrality::Degree: {
            const auto deg = g.degrees();
            Vec out(g.n);
            for (int v = 0; v < g.n; ++v) {
                out(v) = deg[static_cast<std::size_t>(v)];
            }
            return out;
        }
        case Centrality::Betweenness:
            if (!is_connected(g)) {
                throw Error("centrality: betweenness requires a connected graph");
            }
            return betweenness(g);
        case Centrality::Closeness: {
            if (!is_connected(g)) {
                throw Error("centrality: closeness requires a connected graph");
            }
            Vec out = Vec::Zero(g.n);
            for (int v = 0; v < g.n; ++v) {
                const auto d = bfs_distances(g, v);
                double total = 0.0;
                for (int x : d) {
                    total += x;
                }
                out(v) = total > 0.0 ? (g.n - 1) / total : 0.0;
            }
            return out;
        }
    }
    return Vec();
}

int argmax_node(const Vec& scores) {
    if (scores.size() == 0) {
        throw Error("argmax_node: empty score vector");
    }
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < scores.size(); ++i) {
        if (scores(i) > scores(best)) {
            best = i;
        }
    }
    return static_cast<int>(best);
}

}  // namespace hie::graph
