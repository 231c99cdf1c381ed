#include "hie/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace hie::trainer {

using json = nlohmann::json;
using ad::Var;

// ---------------------------------------------------------------------------
// Config

std::string to_string(ModelKind m) {
    switch (m) {
        case ModelKind::Shallow: return "shallow";
        case ModelKind::Hnn: return "hnn";
        case ModelKind::Hgcn: return "hgcn";
    }
    return "hgcn";
}

std::string to_string(Task t) { return t == Task::Lp ? "lp" : "nc"; }

namespace {

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "shallow") return ModelKind::Shallow;
    if (s == "hnn") return ModelKind::Hnn;
    if (s == "hgcn") return ModelKind::Hgcn;
    throw Error("unknown model '" + s + "'");
}

Task task_from_string(const std::string& s) {
    if (s == "lp") return Task::Lp;
    if (s == "nc") return Task::Nc;
    throw Error("unknown task '" + s + "'");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != v.size()) {
        throw Error("config: '" + key + "' expects a number, got '" + v + "'");
    }
    return out;
}

long long to_int(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    long long out = 0;
    try {
        out = std::stoll(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != v.size()) {
        throw Error("config: '" + key + "' expects an integer, got '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw Error("config: '" + key + "' expects a boolean, got '" + v + "'");
}

std::string fmt(double x) { return data::format_double(x); }

}  // namespace

const std::vector<std::string>& TrainConfig::keys() {
    static const std::vector<std::string> k = {
        "model",          "manifold",      "task",          "dim",           "layers",
        "lr",             "weight_decay",  "dropout",       "patience",      "max_epochs",
        "seed",           "kappa",         "agg",           "act",           "hie.mode",
        "hie.space",      "hie.sigma",     "hie.lambda",    "hie.detach_weights",
        "hie.detach_center", "hie.alignment", "fd.r",        "fd.t",          "neg_k",
        "nc_metric",      "link.train",    "link.val",      "link.test",     "node.scheme",
        "node.train",     "node.val",      "node.test",     "node.per_class", "shallow_space",
        "init_scale",     "feature_scale", "hierarchy_pairs", "grad_clip",   "bins",
    };
    return k;
}

void TrainConfig::set(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    if (key == "model") model = model_kind_from_string(v);
    else if (key == "manifold") manifold = manifold::model_from_string(v);
    else if (key == "task") task = task_from_string(v);
    else if (key == "dim") dim = static_cast<int>(to_int(key, v));
    else if (key == "layers") layers = static_cast<int>(to_int(key, v));
    else if (key == "lr") lr = to_double(key, v);
    else if (key == "weight_decay") weight_decay = to_double(key, v);
    else if (key == "dropout") dropout = to_double(key, v);
    else if (key == "patience") patience = static_cast<int>(to_int(key, v));
    else if (key == "max_epochs") max_epochs = static_cast<int>(to_int(key, v));
    else if (key == "seed") {
        const long long s = to_int(key, v);
        if (s < 0) {
            throw Error("config: seed must be nonnegative");
        }
        seed = static_cast<std::uint64_t>(s);
    }
    else if (key == "kappa") kappa = to_double(key, v);
    else if (key == "agg") agg = models::agg_from_string(v);
    else if (key == "act") act = models::activation_from_string(v);
    else if (key == "hie.mode") hie.mode = method::mode_from_string(v);
    else if (key == "hie.space") hie.space = method::space_from_string(v);
    else if (key == "hie.sigma") hie.sigma = method::sigma_from_string(v);
    else if (key == "hie.lambda") hie.lambda = to_double(key, v);
    else if (key == "hie.detach_weights") hie.detach_weights = to_bool(key, v);
    else if (key == "hie.detach_center") hie.detach_center = to_bool(key, v);
    else if (key == "hie.alignment") hie.alignment = method::alignment_from_string(v);
    else if (key == "fd.r") fd.r = to_double(key, v);
    else if (key == "fd.t") fd.t = to_double(key, v);
    else if (key == "neg_k") neg_k = static_cast<int>(to_int(key, v));
    else if (key == "nc_metric") nc_metric = eval::average_from_string(v);
    else if (key == "link.train") link.train = to_double(key, v);
    else if (key == "link.val") link.val = to_double(key, v);
    else if (key == "link.test") link.test = to_double(key, v);
    else if (key == "node.scheme") {
        if (v == "ratio") node.kind = data::NodeSplitScheme::Kind::Ratio;
        else if (v == "per_class") node.kind = data::NodeSplitScheme::Kind::PerClass;
        else throw Error("config: node.scheme must be ratio or per_class");
    }
    else if (key == "node.train") node.train = to_double(key, v);
    else if (key == "node.val") node.val = to_double(key, v);
    else if (key == "node.test") node.test = to_double(key, v);
    else if (key == "node.per_class") node.per_class = static_cast<int>(to_int(key, v));
    else if (key == "shallow_space") {
        if (v != "auto" && v != "riemannian_poincare" && v != "tangent_at_origin" && v != "euclidean") {
            throw Error("config: unknown shallow_space '" + v + "'");
        }
        shallow_space = v;
    }
    else if (key == "init_scale") init_scale = to_double(key, v);
    else if (key == "feature_scale") feature_scale = to_double(key, v);
    else if (key == "hierarchy_pairs") hierarchy_pairs = static_cast<int>(to_int(key, v));
    else if (key == "grad_clip") grad_clip = to_double(key, v);
    else if (key == "bins") bins = static_cast<int>(to_int(key, v));
    else throw Error("config: unknown key '" + key + "'");
}

std::string TrainConfig::get(const std::string& key) const {
    if (key == "model") return to_string(model);
    if (key == "manifold") return std::string(manifold::to_string(manifold));
    if (key == "task") return to_string(task);
    if (key == "dim") return std::to_string(dim);
    if (key == "layers") return std::to_string(layers);
    if (key == "lr") return fmt(lr);
    if (key == "weight_decay") return fmt(weight_decay);
    if (key == "dropout") return fmt(dropout);
    if (key == "patience") return std::to_string(patience);
    if (key == "max_epochs") return std::to_string(max_epochs);
    if (key == "seed") return std::to_string(seed);
    if (key == "kappa") return fmt(kappa);
    if (key == "agg") return agg == models::AggMode::Degree ? "degree" : "attention";
    if (key == "act") return act == models::Activation::Relu ? "relu" : "identity";
    if (key == "hie.mode") return method::to_string(hie.mode);
    if (key == "hie.space") return method::to_string(hie.space);
    if (key == "hie.sigma") return method::to_string(hie.sigma);
    if (key == "hie.lambda") return fmt(hie.lambda);
    if (key == "hie.detach_weights") return hie.detach_weights ? "true" : "false";
    if (key == "hie.detach_center") return hie.detach_center ? "true" : "false";
    if (key == "hie.alignment") return method::to_string(hie.alignment);
    if (key == "fd.r") return fmt(fd.r);
    if (key == "fd.t") return fmt(fd.t);
    if (key == "neg_k") return std::to_string(neg_k);
    if (key == "nc_metric") return eval::to_string(nc_metric);
    if (key == "link.train") return fmt(link.train);
    if (key == "link.val") return fmt(link.val);
    if (key == "link.test") return fmt(link.test);
    if (key == "node.scheme") return node.kind == data::NodeSplitScheme::Kind::Ratio ? "ratio" : "per_class";
    if (key == "node.train") return fmt(node.train);
    if (key == "node.val") return fmt(node.val);
    if (key == "node.test") return fmt(node.test);
    if (key == "node.per_class") return std::to_string(node.per_class);
    if (key == "shallow_space") return shallow_space;
    if (key == "init_scale") return fmt(init_scale);
    if (key == "feature_scale") return fmt(feature_scale);
    if (key == "hierarchy_pairs") return std::to_string(hierarchy_pairs);
    if (key == "grad_clip") return fmt(grad_clip);
    if (key == "bins") return std::to_string(bins);
    throw Error("config: unknown key '" + key + "'");
}

TrainConfig TrainConfig::parse(const std::string& text) {
    TrainConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error("config line " + std::to_string(lineno) + ": expected key=value");
        }
        try {
            cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const Error& e) {
            throw Error("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

TrainConfig TrainConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open config " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string TrainConfig::to_text() const {
    std::string out;
    for (const auto& k : keys()) {
        out += k + "=" + get(k) + "\n";
    }
    return out;
}

void TrainConfig::validate() const {
    if (dim < 1) throw Error("config: dim must be positive");
    if (layers < 1) throw Error("config: layers must be positive");
    if (!(lr > 0.0)) throw Error("config: lr must be positive");
    if (weight_decay < 0.0) throw Error("config: weight_decay must be nonnegative");
    if (dropout < 0.0 || dropout >= 1.0) throw Error("config: dropout must lie in [0, 1)");
    if (patience < 1) throw Error("config: patience must be positive");
    if (max_epochs < 1) throw Error("config: max_epochs must be positive");
    if (manifold != manifold::Model::Flat && !(kappa < 0.0)) throw Error("config: kappa must be negative");
    if (hie.lambda < 0.0) throw Error("config: hie.lambda must be nonnegative");
    if (!(fd.t > 0.0)) throw Error("config: fd.t must be positive");
    if (neg_k < 1) throw Error("config: neg_k must be positive");
    if (hierarchy_pairs < 1) throw Error("config: hierarchy_pairs must be positive");
    if (bins < 1) throw Error("config: bins must be positive");
    if (model == ModelKind::Shallow && task != Task::Lp) {
        throw Error("config: the shallow model supports the lp task only");
    }
}

// ---------------------------------------------------------------------------
// Model state

namespace {

optim::ParamSpace shallow_param_space(const TrainConfig& cfg) {
    if (cfg.shallow_space == "riemannian_poincare") return optim::ParamSpace::RiemannianPoincare;
    if (cfg.shallow_space == "tangent_at_origin") return optim::ParamSpace::TangentAtOrigin;
    if (cfg.shallow_space == "euclidean") return optim::ParamSpace::Euclidean;
    switch (cfg.manifold) {
        case manifold::Model::Poincare: return optim::ParamSpace::RiemannianPoincare;
        case manifold::Model::Lorentz: return optim::ParamSpace::TangentAtOrigin;
        case manifold::Model::Flat: return optim::ParamSpace::Euclidean;
    }
    return optim::ParamSpace::Euclidean;
}

struct Model {
    TrainConfig cfg;
    geo::Space space;
    models::ShallowEmbedding shallow;
    std::vector<models::HypLayer> layers;
    models::Decoder decoder;
    models::AggGraph agg;
    Mat features;
    bool has_decoder = false;

    Model(const TrainConfig& c, const graph::Graph& g, std::mt19937_64& rng) : cfg(c) {
        space = {cfg.manifold, manifold::Curvature(cfg.manifold == manifold::Model::Flat ? -1.0 : cfg.kappa)};
        if (cfg.model == ModelKind::Shallow) {
            shallow = models::make_shallow(g.n, cfg.dim, space, shallow_param_space(cfg), rng, cfg.init_scale);
        } else {
            features = g.features.size() != 0 ? Mat(g.features) : Mat(Mat::Identity(g.n, g.n));
            features *= cfg.feature_scale;
            int d_in = static_cast<int>(features.cols());
            for (int l = 0; l < cfg.layers; ++l) {
                layers.push_back(models::make_layer(d_in, cfg.dim, space.curvature, space.curvature, cfg.act, rng,
                                                    "layer" + std::to_string(l)));
                d_in = cfg.dim;
            }
            if (cfg.model == ModelKind::Hgcn) {
                agg = models::make_agg_graph(g);
            }
        }
        if (cfg.task == Task::Nc) {
            decoder = models::make_decoder(cfg.dim, std::max(1, g.num_classes()), rng);
            has_decoder = true;
        }
    }

    std::vector<optim::Parameter*> params() {
        std::vector<optim::Parameter*> out;
        if (cfg.model == ModelKind::Shallow) {
            out.push_back(&shallow.table);
        }
        for (auto& l : layers) {
            out.push_back(&l.W);
            out.push_back(&l.b);
            if (cfg.model == ModelKind::Hgcn && cfg.agg == models::AggMode::Attention) {
                out.push_back(&l.att);
            }
        }
        if (has_decoder) {
            out.push_back(&decoder.A);
            out.push_back(&decoder.c);
        }
        return out;
    }

    /// Raw embedding Z on the tape.
    Var forward(ad::Tape& tape, const models::Dropout& drop) {
        if (cfg.model == ModelKind::Shallow) {
            return shallow.decode(tape);
        }
        for (auto& l : layers) {
            models::bind_layer(tape, l);
        }
        const Var x = models::lift_features(space, tape.constant(features));
        if (cfg.model == ModelKind::Hnn) {
            return models::hnn_forward(space.model, layers, x, drop);
        }
        return models::hgcn_forward(space.model, layers, agg, cfg.agg, x, drop);
    }
};

Weights snapshot(const std::vector<optim::Parameter*>& ps) {
    Weights w;
    for (const auto* p : ps) {
        w[p->name] = p->value;
    }
    return w;
}

void restore(const std::vector<optim::Parameter*>& ps, const Weights& w) {
    for (auto* p : ps) {
        p->value = w.at(p->name);
    }
}

/// -d^2 per pair: higher means more likely an edge (monotone in the
/// Fermi-Dirac probability without its saturation ties).
std::vector<double> pair_scores(const data::Embedding& emb, const std::vector<graph::Edge>& pairs) {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& [u, v] : pairs) {
        const double d = manifold::dist(emb.point(u), emb.point(v));
        out.push_back(-d * d);
    }
    return out;
}

std::vector<int> argmax_rows(const Mat& logits) {
    std::vector<int> out(static_cast<std::size_t>(logits.rows()));
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        Eigen::Index best = 0;
        logits.row(i).maxCoeff(&best);
        out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
}

Mat decode_logits(const geo::Space& s, const data::Embedding& emb, const Weights& w) {
    ad::Tape tape;
    const Var logits = models::nc_decode(s, tape.constant(emb.coords), tape.constant(w.at("decoder.A")),
                                         tape.constant(w.at("decoder.c")));
    return logits.value();
}

double val_metric(const TrainConfig& cfg, const graph::Graph& g, const Split& split, const geo::Space& s,
                  const data::Embedding& emb, const Weights& w) {
    if (cfg.task == Task::Lp) {
        return eval::ranking_metrics(pair_scores(emb, split.link.val_pos), pair_scores(emb, split.link.val_neg)).auc;
    }
    const auto pred = argmax_rows(decode_logits(s, emb, w));
    return eval::classification_metrics(pred, g.labels, split.node.val_mask, cfg.nc_metric,
                                        std::max(1, g.num_classes()));
}

data::Embedding to_embedding(const geo::Space& s, const Var& z) {
    return {s.model, s.curvature, z.value()};
}

}  // namespace

Split make_split(const TrainConfig& cfg, const graph::Graph& g) {
    Split s;
    if (cfg.task == Task::Lp) {
        s.link = data::split_links(g, cfg.link, cfg.seed);
    } else {
        s.node = data::split_nodes(g, cfg.node, cfg.seed);
    }
    return s;
}

TrainResult train(const TrainConfig& cfg, const graph::Graph& g, const Split& split) {
    cfg.validate();
    if (cfg.task == Task::Nc && static_cast<int>(g.labels.size()) != g.n) {
        throw Error("train: node classification needs labels");
    }
    if (cfg.task == Task::Nc && split.node.train_mask.size() != static_cast<std::size_t>(g.n)) {
        throw Error("train: node split does not match the graph");
    }
    if (cfg.task == Task::Lp && split.link.train_pos.empty()) {
        throw Error("train: link split has no training edges");
    }
    std::seed_seq init_seq{cfg.seed, std::uint64_t{0x1e5}};
    std::seed_seq train_seq{cfg.seed, std::uint64_t{0x7a1}};
    std::mt19937_64 init_rng(init_seq);
    std::mt19937_64 rng(train_seq);

    Model model(cfg, g, init_rng);
    auto params = model.params();
    optim::AdamConfig ac;
    ac.lr = cfg.lr;
    ac.weight_decay = cfg.weight_decay;
    ac.clip_norm = cfg.grad_clip;
    optim::Optimizer opt(ac);

    // Training graph for negative sampling and the shallow objective.
    graph::Graph train_graph;
    std::vector<std::vector<int>> train_adj;
    if (cfg.task == Task::Lp) {
        train_graph.n = g.n;
        train_graph.edges = graph::normalize_edges(split.link.train_pos);
        train_adj = train_graph.adjacency();
    }
    const models::Dropout drop{cfg.dropout, &rng};
    TrainResult result;
    result.best_val = -std::numeric_limits<double>::infinity();
    Weights best = snapshot(params);
    int since_best = 0;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        // With dropout, validation needs a clean pass. It runs first because
        // the training forward binds the parameters to the tape they update from.
        data::Embedding emb;
        if (drop.active()) {
            ad::Tape eval_tape;
            const Var ze = model.forward(eval_tape, {});
            const auto out = method::combine_loss(
                model.space, [&](const Var&) { return eval_tape.constant(0.0); }, ze, cfg.hie);
            emb = to_embedding(model.space, out.output);
        }

        ad::Tape tape;
        const Var z = model.forward(tape, drop);
        if (model.has_decoder) {
            models::bind_decoder(tape, model.decoder);
        }

        std::function<Var(const Var&)> task;
        if (cfg.task == Task::Nc) {
            task = [&](const Var& out) {
                const Var logits =
                    models::nc_decode(model.space, out, model.decoder.A.var, model.decoder.c.var);
                return models::ce_loss(logits, g.labels, split.node.train_mask);
            };
        } else if (cfg.model == ModelKind::Shallow) {
            const auto batch = models::sample_shallow_batch(g.n, train_adj, split.link.train_pos, cfg.neg_k, rng);
            task = [&, batch](const Var& out) { return models::shallow_loss(model.space, out, batch); };
        } else {
            // Training negatives are non-edges of the full graph, so they never
            // hit validation or test positives.
            const auto negs = data::sample_non_edges(g, split.link.train_pos.size(), rng);
            task = [&, negs](const Var& out) {
                return models::lp_loss(model.space, out, split.link.train_pos, negs, cfg.fd);
            };
        }
        const method::Combined comb = method::combine_loss(model.space, task, z, cfg.hie);
        const double loss = comb.total.scalar();
        if (std::isnan(loss)) {
            throw Error("NaN loss at epoch " + std::to_string(epoch));
        }
        if (loss > 1e6 || std::isinf(loss)) {
            throw Error("loss diverged at epoch " + std::to_string(epoch));
        }

        // Validation on the current parameters, before the update.
        const Weights current = snapshot(params);
        if (!drop.active()) {
            emb = to_embedding(model.space, comb.output);
        }
        const double val = val_metric(cfg, g, split, model.space, emb, current);

        EpochRecord rec{epoch, loss, comb.task.scalar(), comb.hyp.scalar(), val};
        result.history.push_back(rec);
        if (val > result.best_val) {
            result.best_val = val;
            result.best_epoch = epoch;
            result.embedding = emb;
            best = current;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }

        tape.backward(comb.total);
        opt.step(params, tape);
    }
    result.weights = best;
    return result;
}

json evaluate(const TrainConfig& cfg, const graph::Graph& g, const Split& split, const data::Embedding& emb,
              const Weights& weights) {
    json report;
    report["task"] = to_string(cfg.task);
    report["model"] = to_string(cfg.model);
    report["manifold"] = std::string(manifold::to_string(cfg.manifold));
    report["dim"] = cfg.dim;
    report["seed"] = cfg.seed;
    report["hie"] = method::to_string(cfg.hie.mode);

    json metrics = json::object();
    const geo::Space s{emb.model, emb.curvature};
    if (cfg.task == Task::Lp) {
        const auto val = eval::ranking_metrics(pair_scores(emb, split.link.val_pos), pair_scores(emb, split.link.val_neg));
        const auto test =
            eval::ranking_metrics(pair_scores(emb, split.link.test_pos), pair_scores(emb, split.link.test_neg));
        metrics["val_auc"] = val.auc;
        metrics["val_ap"] = val.ap;
        metrics["auc"] = test.auc;
        metrics["ap"] = test.ap;
    } else {
        const auto pred = argmax_rows(decode_logits(s, emb, weights));
        const int classes = std::max(1, g.num_classes());
        const std::string name = eval::to_string(cfg.nc_metric);
        metrics["val_" + name] =
            eval::classification_metrics(pred, g.labels, split.node.val_mask, cfg.nc_metric, classes);
        metrics[name] = eval::classification_metrics(pred, g.labels, split.node.test_mask, cfg.nc_metric, classes);
    }

    const auto stats = eval::hdo_diagnostics(emb, cfg.bins);
    if (static_cast<int>(g.depth.size()) == g.n && g.n > 1) {
        metrics["hierarchy_accuracy"] = eval::hierarchy_accuracy(stats.values, g.depth, cfg.hierarchy_pairs, cfg.seed);
    }
    report["metrics"] = metrics;
    report["hdo_stats"] = {{"min", stats.min}, {"max", stats.max}, {"mean", stats.mean}, {"root", stats.root}};
    report["hdc_stats"] = {{"min", stats.hdc.min}, {"max", stats.hdc.max}, {"mean", stats.hdc.mean}};
    report["hdo_quantiles"] = {{"p10", eval::quantile(stats.values, 0.10)},
                               {"p25", eval::quantile(stats.values, 0.25)},
                               {"p50", eval::quantile(stats.values, 0.50)}};
    return report;
}

std::string history_csv(const std::vector<EpochRecord>& history) {
    std::string out = "epoch,loss,task,hyp,val\n";
    for (const auto& r : history) {
        out += std::to_string(r.epoch) + "," + fmt(r.loss) + "," + fmt(r.task) + "," + fmt(r.hyp) + "," + fmt(r.val) +
               "\n";
    }
    return out;
}

void save_weights(const Weights& w, const std::string& path) {
    json j = json::object();
    for (const auto& [name, m] : w) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index k = 0; k < m.cols(); ++k) {
                row.push_back(m(i, k));
            }
            rows.push_back(row);
        }
        j[name] = rows;
    }
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path);
    }
    out << j.dump(1) << '\n';
}

Weights load_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(path + ": " + e.what());
    }
    Weights w;
    for (const auto& [name, rows] : j.items()) {
        const auto r = static_cast<Eigen::Index>(rows.size());
        const auto c = r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
        Mat m(r, c);
        for (Eigen::Index i = 0; i < r; ++i) {
            if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != c) {
                throw Error(path + ": ragged matrix '" + name + "'");
            }
            for (Eigen::Index k = 0; k < c; ++k) {
                m(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>();
            }
        }
        w[name] = m;
    }
    return w;
}

double trimmed_mean(std::vector<double> values) {
    if (values.empty()) {
        throw Error("trimmed_mean: no values");
    }
    std::sort(values.begin(), values.end());
    std::size_t lo = 0, hi = values.size();
    if (values.size() >= 3) {
        ++lo;
        --hi;
    }
    double total = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        total += values[i];
    }
    return total / static_cast<double>(hi - lo);
}

SweepResult sweep(const TrainConfig& base, const graph::Graph& g, const std::vector<std::uint64_t>& seeds, int jobs) {
    if (seeds.empty()) {
        throw Error("sweep: no seeds");
    }
    std::vector<json> runs(seeds.size());
    std::vector<std::string> errors(seeds.size());
    auto run_one = [&](std::size_t i) {
        try {
            TrainConfig cfg = base;
            cfg.seed = seeds[i];
            const Split split = make_split(cfg, g);
            const TrainResult r = train(cfg, g, split);
            json rep = evaluate(cfg, g, split, r.embedding, r.weights);
            rep["best_epoch"] = r.best_epoch;
            runs[i] = rep;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    };
    const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, static_cast<int>(seeds.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            run_one(i);
        }
    } else {
        std::mutex mu;
        std::size_t next = 0;
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i = 0;
                    {
                        std::lock_guard<std::mutex> lock(mu);
                        if (next >= seeds.size()) {
                            return;
                        }
                        i = next++;
                    }
                    run_one(i);
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (!errors[i].empty()) {
            throw Error("sweep: seed " + std::to_string(seeds[i]) + ": " + errors[i]);
        }
    }

    SweepResult out;
    out.runs = runs;
    std::map<std::string, std::vector<double>> values;
    for (const auto& r : runs) {
        for (const auto& [k, v] : r["metrics"].items()) {
            values["metrics." + k].push_back(v.get<double>());
        }
        for (const auto& [k, v] : r["hdo_stats"].items()) {
            values["hdo_stats." + k].push_back(v.get<double>());
        }
    }
    json summary = json::object();
    for (const auto& [k, v] : values) {
        double mean = 0.0;
        for (double x : v) {
            mean += x;
        }
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) {
            var += (x - mean) * (x - mean);
        }
        summary[k] = {{"mean", mean},
                      {"std", v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0},
                      {"trimmed_mean", trimmed_mean(v)},
                      {"runs", v.size()}};
    }
    out.summary = summary;
    return out;
}

}  // namespace hie::trainer
