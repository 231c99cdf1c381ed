#pragma once

#include <algorithm>
#include <random>
#include <set>

namespace hie::data {

template <class Rng>
std::vector<Edge> sample_non_edges(const Graph& g, std::size_t count, Rng& rng, const std::vector<Edge>& exclude) {
    const double pairs = 0.5 * static_cast<double>(g.n) * static_cast<double>(g.n - 1);
    const double available = pairs - static_cast<double>(g.edges.size()) - static_cast<double>(exclude.size());
    if (static_cast<double>(count) > available) {
        throw Error("sample_non_edges: not enough non-edges");
    }
    std::set<Edge> taken(exclude.begin(), exclude.end());
    std::uniform_int_distribution<int> node(0, g.n - 1);
    std::vector<Edge> out;
    out.reserve(count);
    while (out.size() < count) {
        int u = node(rng);
        int v = node(rng);
        if (u == v) {
            continue;
        }
        if (u > v) {
            std::swap(u, v);
        }
        if (g.has_edge(u, v) || !taken.insert({u, v}).second) {
            continue;
        }
        out.emplace_back(u, v);
    }
    return out;
}

}  // namespace hie::data
