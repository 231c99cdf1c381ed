#include "hie/eval.hpp"

#include "hie/center.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace hie::eval {

Ranking ranking_metrics(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores) {
    if (pos_scores.empty() || neg_scores.empty()) {
        throw Error("ranking_metrics: empty score list");
    }
    struct Item {
        double score;
        bool positive;
    };
    std::vector<Item> items;
    items.reserve(pos_scores.size() + neg_scores.size());
    for (double s : pos_scores) {
        items.push_back({s, true});
    }
    for (double s : neg_scores) {
        items.push_back({s, false});
    }
    for (const Item& it : items) {
        if (std::isnan(it.score)) {
            throw Error("ranking_metrics: NaN score");
        }
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.score < b.score; });

    // Twice the rank sum of positives keeps every quantity an exact integer.
    const auto np = static_cast<double>(pos_scores.size());
    const auto nn = static_cast<double>(neg_scores.size());
    double twice_rank_sum = 0.0;
    for (std::size_t i = 0; i < items.size();) {
        std::size_t j = i;
        double pos_in_group = 0.0;
        while (j < items.size() && items[j].score == items[i].score) {
            pos_in_group += items[j].positive ? 1.0 : 0.0;
            ++j;
        }
        // Ranks i+1..j share the average (i + 1 + j) / 2.
        twice_rank_sum += pos_in_group * static_cast<double>(i + 1 + j);
        i = j;
    }
    Ranking r;
    // U = R - np(np+1)/2 counts each positive-negative win once and ties half.
    const double twice_u = twice_rank_sum - np * (np + 1.0);
    r.auc = (twice_u / 2.0) / (np * nn);

    // Average precision over distinct thresholds, highest first.
    double tp = 0.0, fp = 0.0, prev_recall = 0.0, ap = 0.0;
    for (std::size_t i = items.size(); i > 0;) {
        std::size_t j = i;
        while (j > 0 && items[j - 1].score == items[i - 1].score) {
            (items[j - 1].positive ? tp : fp) += 1.0;
            --j;
        }
        const double recall = tp / np;
        const double precision = tp / (tp + fp);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    r.ap = ap;
    return r;
}

Average average_from_string(const std::string& name) {
    if (name == "accuracy") return Average::Accuracy;
    if (name == "f1_binary") return Average::F1Binary;
    if (name == "f1_macro") return Average::F1Macro;
    throw Error("unknown metric '" + name + "'");
}

std::string to_string(Average a) {
    switch (a) {
        case Average::Accuracy: return "accuracy";
        case Average::F1Binary: return "f1_binary";
        case Average::F1Macro: return "f1_macro";
    }
    return "accuracy";
}

namespace {

double f1_for(const Eigen::MatrixXd& confusion, int cls, bool& undefined) {
    const double tp = confusion(cls, cls);
    const double predicted = confusion.col(cls).sum();
    const double actual = confusion.row(cls).sum();
    if (predicted + actual == 0.0) {
        undefined = true;
        return 0.0;
    }
    return 2.0 * tp / (predicted + actual);
}

}  // namespace

double classification_metrics(const std::vector<int>& pred, const std::vector<int>& labels,
                              const std::vector<bool>& mask, Average average, int num_classes) {
    if (pred.size() != labels.size() || mask.size() != labels.size()) {
        throw Error("classification_metrics: size mismatch");
    }
    if (num_classes < 1) {
        throw Error("classification_metrics: need at least one class");
    }
    Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(num_classes, num_classes);
    double selected = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!mask[i]) {
            continue;
        }
        if (labels[i] < 0 || labels[i] >= num_classes || pred[i] < 0 || pred[i] >= num_classes) {
            throw Error("classification_metrics: unseen label id");
        }
        confusion(labels[i], pred[i]) += 1.0;
        selected += 1.0;
    }
    if (selected == 0.0) {
        throw Error("classification_metrics: empty mask");
    }
    bool undefined = false;
    double out = 0.0;
    switch (average) {
        case Average::Accuracy: out = confusion.trace() / selected; break;
        case Average::F1Binary:
            if (num_classes != 2) {
                throw Error("classification_metrics: f1_binary needs two classes");
            }
            out = f1_for(confusion, 1, undefined);
            break;
        case Average::F1Macro: {
            double total = 0.0;
            for (int k = 0; k < num_classes; ++k) {
                total += f1_for(confusion, k, undefined);
            }
            out = total / num_classes;
            break;
        }
    }
    if (undefined) {
        warn("classification_metrics: F1 undefined for a class without support or predictions, using 0");
    }
    return out;
}

Vec hdo(const data::Embedding& emb) {
    const auto o = manifold::origin(emb.model, emb.dim(), emb.curvature);
    Vec out(emb.n());
    for (Eigen::Index i = 0; i < emb.n(); ++i) {
        out(i) = manifold::dist(o, emb.point(i));
    }
    return out;
}

HdoStats hdo_diagnostics(const data::Embedding& emb, int bins) {
    if (emb.n() == 0) {
        throw Error("hdo_diagnostics: empty embedding");
    }
    if (bins < 1) {
        throw Error("hdo_diagnostics: bins must be positive");
    }
    HdoStats s;
    s.values = hdo(emb);
    s.min = s.values.minCoeff();
    s.max = s.values.maxCoeff();
    s.mean = s.values.mean();

    center::WeightedPointSet set{emb.points(), Vec()};
    const auto c = center::hyperbolic_center(set);
    s.root = manifold::dist(manifold::origin(emb.model, emb.dim(), emb.curvature), c);

    Vec hdc(emb.n());
    for (Eigen::Index i = 0; i < emb.n(); ++i) {
        hdc(i) = manifold::dist(c, emb.point(i));
    }
    s.hdc = {hdc.minCoeff(), hdc.maxCoeff(), hdc.mean()};

    const double width = s.max > 0.0 ? s.max / bins : 1.0 / bins;
    s.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b) {
        s.bin_edges[static_cast<std::size_t>(b)] = width * b;
    }
    s.counts.assign(static_cast<std::size_t>(bins), 0);
    for (Eigen::Index i = 0; i < emb.n(); ++i) {
        auto b = static_cast<int>(s.values(i) / width);
        b = std::clamp(b, 0, bins - 1);
        ++s.counts[static_cast<std::size_t>(b)];
    }
    return s;
}

std::string histogram_csv(const HdoStats& stats) {
    std::ostringstream out;
    out << "bin_left,bin_right,count\n";
    for (std::size_t b = 0; b < stats.counts.size(); ++b) {
        out << data::format_double(stats.bin_edges[b]) << ',' << data::format_double(stats.bin_edges[b + 1]) << ','
            << stats.counts[b] << '\n';
    }
    return out.str();
}

double quantile(const Vec& values, double q) {
    if (values.size() == 0) {
        throw Error("quantile: empty input");
    }
    std::vector<double> v(values.data(), values.data() + values.size());
    std::sort(v.begin(), v.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double hierarchy_accuracy(const Vec& hdo_values, const std::vector<int>& depth, int pairs, std::uint64_t seed) {
    if (pairs < 1) {
        throw Error("hierarchy_accuracy: pairs must be positive");
    }
    if (static_cast<Eigen::Index>(depth.size()) != hdo_values.size()) {
        throw Error("hierarchy_accuracy: depth count differs from node count");
    }
    const auto [lo, hi] = std::minmax_element(depth.begin(), depth.end());
    if (depth.empty() || *lo == *hi) {
        throw Error("hierarchy_accuracy: no pair of nodes with distinct depths");
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> node(0, static_cast<int>(depth.size()) - 1);
    int correct = 0;
    for (int k = 0; k < pairs;) {
        const int a = node(rng);
        const int b = node(rng);
        const int da = depth[static_cast<std::size_t>(a)];
        const int db = depth[static_cast<std::size_t>(b)];
        if (da == db) {
            continue;
        }
        const int shallow = da < db ? a : b;
        const int deep = da < db ? b : a;
        correct += hdo_values(shallow) < hdo_values(deep) ? 1 : 0;
        ++k;
    }
    return static_cast<double>(correct) / pairs;
}

double hierarchy_accuracy(const data::Embedding& emb, const std::vector<int>& depth, int pairs,
                          std::uint64_t seed) {
    return hierarchy_accuracy(hdo(emb), depth, pairs, seed);
}

}  // namespace hie::eval
