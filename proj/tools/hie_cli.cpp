// Command-line entry point: gen-tree, train, eval, probe, gradcheck, sweep.

#include "hie/gradcheck_suite.hpp"
#include "hie/trainer.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace hie;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << text;
}

graph::Graph load_graph_dir(const fs::path& dir) {
    auto opt = [&](const char* name) {
        const fs::path p = dir / name;
        return fs::exists(p) ? p.string() : std::string();
    };
    const fs::path edges = dir / "graph.edges";
    if (!fs::exists(edges)) {
        throw Error("missing " + edges.string());
    }
    return data::load_dataset(edges.string(), opt("features.csv"), opt("labels.txt"), opt("depth.txt"));
}

/// One --<key> flag per config key; values given on the command line win
/// over the config file.
struct ConfigFlags {
    std::string config_path;
    std::map<std::string, std::string> values;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
        for (const auto& key : trainer::TrainConfig::keys()) {
            const trainer::TrainConfig defaults;
            app->add_option("--" + key, values[key], "config key " + key + " (default " + defaults.get(key) + ")");
        }
    }

    trainer::TrainConfig resolve(CLI::App* app) const {
        trainer::TrainConfig cfg = config_path.empty() ? trainer::TrainConfig{} : trainer::TrainConfig::load(config_path);
        for (const auto& [key, value] : values) {
            if (app->count("--" + key) > 0) {
                cfg.set(key, value);
            }
        }
        cfg.validate();
        return cfg;
    }
};

int cmd_gen_tree(const std::string& variant, const std::string& out, int branching, int nodes, int feature_dim,
                 std::uint64_t seed) {
    graph::TreeVariant v;
    if (variant == "H") {
        v = graph::TreeVariant::H;
    } else if (variant == "L") {
        v = graph::TreeVariant::L;
    } else {
        throw Error("--variant must be H or L");
    }
    const graph::Graph g = graph::gen_tree(branching, nodes, v, feature_dim, seed);
    data::save_dataset(g, out);
    const int max_depth = *std::max_element(g.depth.begin(), g.depth.end());
    json summary = {{"nodes", g.n},
                    {"edges", g.edges.size()},
                    {"classes", g.num_classes()},
                    {"max_depth", max_depth},
                    {"homophily", graph::homophily(g)}};
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int cmd_train(const trainer::TrainConfig& cfg, const std::string& data_dir, const std::string& out) {
    const graph::Graph g = load_graph_dir(data_dir);
    const auto split = trainer::make_split(cfg, g);
    const auto result = trainer::train(cfg, g, split);
    json report = trainer::evaluate(cfg, g, split, result.embedding, result.weights);
    report["best_epoch"] = result.best_epoch;
    report["epochs_run"] = result.history.size();
    fs::create_directories(out);
    const fs::path root(out);
    data::save_embedding(result.embedding, (root / "embedding.txt").string());
    trainer::save_weights(result.weights, (root / "weights.json").string());
    write_text(root / "history.csv", trainer::history_csv(result.history));
    write_text(root / "config.cfg", cfg.to_text());
    write_text(root / "metrics.json", report.dump(2) + "\n");
    std::cout << report.dump(2) << '\n';
    return 0;
}

int cmd_eval(const std::string& run_dir, const std::string& data_dir, const std::string& out) {
    const fs::path root(run_dir);
    const auto cfg = trainer::TrainConfig::load((root / "config.cfg").string());
    const graph::Graph g = load_graph_dir(data_dir);
    const auto split = trainer::make_split(cfg, g);
    const auto emb = data::load_embedding((root / "embedding.txt").string());
    if (emb.n() != g.n) {
        throw Error("embedding has " + std::to_string(emb.n()) + " rows for a graph of " + std::to_string(g.n) +
                    " nodes");
    }
    const auto weights = trainer::load_weights((root / "weights.json").string());
    const json report = trainer::evaluate(cfg, g, split, emb, weights);
    if (!out.empty()) {
        write_text(out, report.dump(2) + "\n");
    }
    std::cout << report.dump(2) << '\n';
    return 0;
}

int cmd_probe(const std::string& embedding, const std::string& depth_path, int bins, int pairs,
              std::uint64_t seed, const std::string& histogram) {
    const auto emb = data::load_embedding(embedding);
    const auto stats = eval::hdo_diagnostics(emb, bins);
    json out = {{"min", stats.min},
                {"max", stats.max},
                {"mean", stats.mean},
                {"root", stats.root},
                {"hdc", {{"min", stats.hdc.min}, {"max", stats.hdc.max}, {"mean", stats.hdc.mean}}}};
    if (!depth_path.empty()) {
        std::ifstream in(depth_path);
        if (!in) {
            throw Error("cannot open " + depth_path);
        }
        std::vector<int> depth;
        int d = 0;
        while (in >> d) {
            depth.push_back(d);
        }
        out["hierarchy_accuracy"] = eval::hierarchy_accuracy(stats.values, depth, pairs, seed);
    }
    if (!histogram.empty()) {
        write_text(histogram, eval::histogram_csv(stats));
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_gradcheck(std::uint64_t seed, double loss_tol, double layer_tol) {
    const auto cases = checks::run_gradient_suite(seed, loss_tol, layer_tol);
    bool ok = true;
    for (const auto& c : cases) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " max_rel=" << c.max_rel_error
                  << " tol=" << c.tolerance << " entries=" << c.checked << '\n';
        ok = ok && c.passed;
    }
    return ok ? 0 : 1;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto dash = tok.find('-');
        try {
            if (dash != std::string::npos && dash > 0) {
                const auto lo = std::stoull(tok.substr(0, dash));
                const auto hi = std::stoull(tok.substr(dash + 1));
                for (auto s = lo; s <= hi; ++s) {
                    seeds.push_back(s);
                }
            } else {
                seeds.push_back(std::stoull(tok));
            }
        } catch (const std::exception&) {
            throw Error("bad seed list '" + text + "'");
        }
    }
    if (seeds.empty()) {
        throw Error("empty seed list");
    }
    return seeds;
}

int cmd_sweep(const trainer::TrainConfig& cfg, const std::string& data_dir, const std::string& seeds_text, int jobs,
              const std::string& out) {
    const graph::Graph g = load_graph_dir(data_dir);
    const auto res = trainer::sweep(cfg, g, parse_seeds(seeds_text), jobs);
    json report = {{"config", cfg.to_text()}, {"runs", res.runs}, {"summary", res.summary}};
    if (!out.empty()) {
        write_text(out, report.dump(2) + "\n");
    }
    std::cout << res.summary.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hyperbolic hierarchy-informed embedding toolkit"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen-tree", "Generate a synthetic TREE-L / TREE-H dataset");
    std::string variant = "H", gen_out;
    int branching = 3, nodes = 1093, feature_dim = 32;
    std::uint64_t gen_seed = 0;
    gen->add_option("--variant", variant, "H (subtree classes) or L (level classes)")->check(CLI::IsMember({"H", "L"}));
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--branching", branching, "children per node");
    gen->add_option("--nodes", nodes, "node budget");
    gen->add_option("--feature-dim", feature_dim, "feature dimension");
    gen->add_option("--seed", gen_seed, "feature seed");

    auto* tr = app.add_subcommand("train", "Train one model and write its artifacts");
    ConfigFlags train_flags;
    std::string train_data, train_out = "run";
    train_flags.attach(tr);
    tr->add_option("--data", train_data, "dataset directory")->required()->check(CLI::ExistingDirectory);
    tr->add_option("--out", train_out, "run directory");

    auto* ev = app.add_subcommand("eval", "Recompute metrics from a run directory");
    std::string eval_run, eval_data, eval_out;
    ev->add_option("--run", eval_run, "run directory")->required()->check(CLI::ExistingDirectory);
    ev->add_option("--data", eval_data, "dataset directory")->required()->check(CLI::ExistingDirectory);
    ev->add_option("--out", eval_out, "write the report here as well");

    auto* pr = app.add_subcommand("probe", "HDO/HDC statistics and hierarchy accuracy of an embedding file");
    std::string probe_emb, probe_depth, probe_hist;
    int probe_bins = 50, probe_pairs = 5000;
    std::uint64_t probe_seed = 0;
    pr->add_option("--embedding", probe_emb, "embedding file")->required()->check(CLI::ExistingFile);
    pr->add_option("--depth", probe_depth, "depth file for hierarchy accuracy")->check(CLI::ExistingFile);
    pr->add_option("--bins", probe_bins, "histogram bins");
    pr->add_option("--pairs", probe_pairs, "sampled node pairs");
    pr->add_option("--seed", probe_seed, "pair sampling seed");
    pr->add_option("--histogram", probe_hist, "write the HDO histogram CSV here");

    auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of every loss and layer");
    std::uint64_t gc_seed = 7;
    double loss_tol = 1e-4, layer_tol = 1e-3;
    gc->add_option("--seed", gc_seed, "instance seed");
    gc->add_option("--loss-tol", loss_tol, "relative tolerance for losses");
    gc->add_option("--layer-tol", layer_tol, "relative tolerance for layers");

    auto* sw = app.add_subcommand("sweep", "Train over a seed grid and aggregate with a trimmed mean");
    ConfigFlags sweep_flags;
    std::string sweep_data, sweep_seeds = "0-4", sweep_out;
    int jobs = 1;
    sweep_flags.attach(sw);
    sw->add_option("--data", sweep_data, "dataset directory")->required()->check(CLI::ExistingDirectory);
    sw->add_option("--seeds", sweep_seeds, "comma list or ranges, e.g. 0-4,9");
    sw->add_option("--jobs", jobs, "worker threads");
    sw->add_option("--out", sweep_out, "write runs and summary JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (gen->parsed()) {
            return cmd_gen_tree(variant, gen_out, branching, nodes, feature_dim, gen_seed);
        }
        if (tr->parsed()) {
            return cmd_train(train_flags.resolve(tr), train_data, train_out);
        }
        if (ev->parsed()) {
            return cmd_eval(eval_run, eval_data, eval_out);
        }
        if (pr->parsed()) {
            return cmd_probe(probe_emb, probe_depth, probe_bins, probe_pairs, probe_seed, probe_hist);
        }
        if (gc->parsed()) {
            return cmd_gradcheck(gc_seed, loss_tol, layer_tol);
        }
        if (sw->parsed()) {
            return cmd_sweep(sweep_flags.resolve(sw), sweep_data, sweep_seeds, jobs, sweep_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
