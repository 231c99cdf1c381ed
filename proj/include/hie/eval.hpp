#pragma once

// Task metrics and position diagnostics.

#include "hie/data.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hie::eval {

struct Ranking {
    double auc = 0.0;
    double ap = 0.0;
};

/// AUC from the Mann-Whitney rank statistic (ties count one half) and
/// average precision as the step-wise precision-recall sum.
Ranking ranking_metrics(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores);

enum class Average { Accuracy, F1Binary, F1Macro };

Average average_from_string(const std::string& name);
std::string to_string(Average a);

/// Labels and predictions must lie in [0, num_classes). For F1 the binary
/// positive class is 1; macro averages over all classes.
double classification_metrics(const std::vector<int>& pred, const std::vector<int>& labels,
                              const std::vector<bool>& mask, Average average, int num_classes);

struct Summary {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
};

struct HdoStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    /// HDO of the hyperbolic embedding center.
    double root = 0.0;
    std::vector<double> bin_edges;
    std::vector<long> counts;
    /// Per-node HDO.
    Vec values;
    /// Distances to the center.
    Summary hdc;
};

/// Per-node distance to the origin, to the center, and a histogram over
/// [0, max] with `bins` uniform bins.
HdoStats hdo_diagnostics(const data::Embedding& emb, int bins = 50);

/// Per-node distance to the origin.
Vec hdo(const data::Embedding& emb);

/// "bin_left,bin_right,count" rows with a header line.
std::string histogram_csv(const HdoStats& stats);

/// Linear-interpolated quantile, q in [0, 1].
double quantile(const Vec& values, double q);

/// Fraction of sampled distinct-depth pairs whose shallower node has the
/// strictly smaller HDO.
double hierarchy_accuracy(const Vec& hdo_values, const std::vector<int>& depth, int pairs, std::uint64_t seed);
double hierarchy_accuracy(const data::Embedding& emb, const std::vector<int>& depth, int pairs,
                          std::uint64_t seed);

}  // namespace hie::eval
