#pragma once

// Plain-text dataset I/O, train/val/test splits and embedding files.

#include "hie/graph.hpp"
#include "hie/manifold.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hie::data {

using graph::Edge;
using graph::Graph;

/// A stack of manifold points, one per row in ambient coordinates.
struct Embedding {
    manifold::Model model = manifold::Model::Poincare;
    manifold::Curvature curvature;
    Mat coords;

    Eigen::Index n() const { return coords.rows(); }
    /// Intrinsic dimension.
    Eigen::Index dim() const;
    manifold::ManifoldPoint point(Eigen::Index i) const;
    std::vector<manifold::ManifoldPoint> points() const;
};

struct LinkRatios {
    double train = 0.75;
    double val = 0.05;
    double test = 0.20;
};

struct LinkSplit {
    std::vector<Edge> train_pos;
    std::vector<Edge> val_pos;
    std::vector<Edge> test_pos;
    std::vector<Edge> val_neg;
    std::vector<Edge> test_neg;
    LinkRatios ratios;
};

struct NodeSplitScheme {
    enum class Kind { Ratio, PerClass };
    Kind kind = Kind::Ratio;
    /// Ratio scheme fractions; must sum to 1.
    double train = 0.70;
    double val = 0.15;
    double test = 0.15;
    /// Per-class scheme: labeled training nodes per class. The remaining
    /// nodes are divided between validation and test in val:test proportion.
    int per_class = 20;
};

struct NodeSplit {
    std::vector<bool> train_mask;
    std::vector<bool> val_mask;
    std::vector<bool> test_mask;
};

/// Edge list plus optional features (CSV), labels and depths (one integer
/// per line). Empty paths are skipped.
Graph load_dataset(const std::string& edges_path, const std::string& features_path = "",
                   const std::string& labels_path = "", const std::string& depth_path = "");

/// Writes graph.edges, features.csv, labels.txt and depth.txt (when present)
/// into `dir`, creating it if needed.
void save_dataset(const Graph& g, const std::string& dir);

LinkSplit split_links(const Graph& g, const LinkRatios& ratios, std::uint64_t seed);
NodeSplit split_nodes(const Graph& g, const NodeSplitScheme& scheme, std::uint64_t seed);

/// `count` distinct node pairs (u < v) that are not edges of `g` and not in
/// `exclude`, drawn uniformly with `rng`.
template <class Rng>
std::vector<Edge> sample_non_edges(const Graph& g, std::size_t count, Rng& rng,
                                   const std::vector<Edge>& exclude = {});

void save_embedding(const Embedding& emb, const std::string& path);
Embedding load_embedding(const std::string& path);

/// Full-precision decimal text for a double (round-trips exactly).
std::string format_double(double x);

}  // namespace hie::data

#include "hie/data_impl.hpp"
