#pragma once

// Training runs: config parsing, the epoch loop with early stopping, metric
// reports and seed sweeps.

#include "hie/data.hpp"
#include "hie/eval.hpp"
#include "hie/hie.hpp"
#include "hie/models.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hie::trainer {

enum class ModelKind { Shallow, Hnn, Hgcn };
enum class Task { Lp, Nc };

struct TrainConfig {
    ModelKind model = ModelKind::Hgcn;
    manifold::Model manifold = manifold::Model::Poincare;
    Task task = Task::Nc;
    int dim = 16;
    int layers = 2;
    double lr = 0.01;
    double weight_decay = 5e-4;
    double dropout = 0.0;
    int patience = 100;
    int max_epochs = 2000;
    std::uint64_t seed = 0;
    double kappa = -1.0;
    models::AggMode agg = models::AggMode::Degree;
    models::Activation act = models::Activation::Relu;
    method::HieConfig hie;
    models::FermiDiracParams fd;
    /// Negatives per pair for the shallow objective.
    int neg_k = 10;
    eval::Average nc_metric = eval::Average::Accuracy;
    data::LinkRatios link;
    data::NodeSplitScheme node;
    /// auto | riemannian_poincare | tangent_at_origin | euclidean
    std::string shallow_space = "auto";
    double init_scale = 1e-3;
    /// Raw features are multiplied by this before the lift onto the manifold.
    double feature_scale = 1.0;
    int hierarchy_pairs = 5000;
    double grad_clip = 10.0;
    int bins = 50;

    /// Every addressable key, in file order.
    static const std::vector<std::string>& keys();
    /// Sets one field from its text form; throws on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    std::string get(const std::string& key) const;
    /// key=value lines; '#' starts a comment.
    static TrainConfig parse(const std::string& text);
    static TrainConfig load(const std::string& path);
    std::string to_text() const;
    void validate() const;
};

std::string to_string(ModelKind m);
std::string to_string(Task t);

struct Split {
    data::LinkSplit link;
    data::NodeSplit node;
};

/// Split for the configured task, seeded by config.seed.
Split make_split(const TrainConfig& cfg, const graph::Graph& g);

struct EpochRecord {
    int epoch = 0;
    double loss = 0.0;
    double task = 0.0;
    double hyp = 0.0;
    double val = 0.0;
};

using Weights = std::map<std::string, Mat>;

struct TrainResult {
    /// Output embedding at the best validation epoch.
    data::Embedding embedding;
    /// Every trainable tensor at the best validation epoch.
    Weights weights;
    std::vector<EpochRecord> history;
    int best_epoch = 0;
    double best_val = 0.0;
};

/// Runs the epoch loop. Throws on NaN loss or divergence (loss > 1e6),
/// naming the epoch.
TrainResult train(const TrainConfig& cfg, const graph::Graph& g, const Split& split);

/// Task metrics on validation and test, HDO/HDC statistics, and hierarchy
/// accuracy when depths are known.
nlohmann::json evaluate(const TrainConfig& cfg, const graph::Graph& g, const Split& split,
                        const data::Embedding& emb, const Weights& weights);

std::string history_csv(const std::vector<EpochRecord>& history);

void save_weights(const Weights& w, const std::string& path);
Weights load_weights(const std::string& path);

/// Mean after dropping one minimum and one maximum (plain mean below three
/// values).
double trimmed_mean(std::vector<double> values);

struct SweepResult {
    std::vector<nlohmann::json> runs;
    nlohmann::json summary;
};

/// Trains and evaluates one run per seed (with its own split) and aggregates
/// every numeric metric. `jobs` > 1 runs seeds on worker threads.
SweepResult sweep(const TrainConfig& base, const graph::Graph& g, const std::vector<std::uint64_t>& seeds,
                  int jobs = 1);

}  // namespace hie::trainer
