#include "hie/data.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace hie::data {

namespace fs = std::filesystem;

Eigen::Index Embedding::dim() const {
    return model == manifold::Model::Lorentz ? coords.cols() - 1 : coords.cols();
}

manifold::ManifoldPoint Embedding::point(Eigen::Index i) const {
    return {model, coords.row(i).transpose(), curvature};
}

std::vector<manifold::ManifoldPoint> Embedding::points() const {
    std::vector<manifold::ManifoldPoint> out;
    out.reserve(static_cast<std::size_t>(n()));
    for (Eigen::Index i = 0; i < n(); ++i) {
        out.push_back(point(i));
    }
    return out;
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path);
    }
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path);
    }
    return out;
}

[[noreturn]] void malformed(const std::string& path, std::size_t line, const std::string& why) {
    throw Error(path + ":" + std::to_string(line) + ": " + why);
}

bool blank(const std::string& s) {
    return s.find_first_not_of(" \t\r") == std::string::npos;
}

std::vector<int> read_int_lines(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<int> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) {
            continue;
        }
        std::istringstream ss(line);
        int v = 0;
        std::string rest;
        if (!(ss >> v) || (ss >> rest)) {
            malformed(path, lineno, "expected one integer");
        }
        out.push_back(v);
    }
    return out;
}

double parse_double(const std::string& tok, const std::string& path, std::size_t lineno) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = first + tok.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        malformed(path, lineno, "bad number '" + tok + "'");
    }
    return v;
}

std::vector<double> split_numbers(const std::string& line, char sep, const std::string& path,
                                  std::size_t lineno) {
    std::vector<double> out;
    std::string tok;
    std::istringstream ss(line);
    if (sep == ' ') {
        while (ss >> tok) {
            out.push_back(parse_double(tok, path, lineno));
        }
    } else {
        while (std::getline(ss, tok, sep)) {
            const auto b = tok.find_first_not_of(" \t\r");
            const auto e = tok.find_last_not_of(" \t\r");
            if (b == std::string::npos) {
                malformed(path, lineno, "empty field");
            }
            out.push_back(parse_double(tok.substr(b, e - b + 1), path, lineno));
        }
    }
    return out;
}

}  // namespace

Graph load_dataset(const std::string& edges_path, const std::string& features_path,
                   const std::string& labels_path, const std::string& depth_path) {
    Graph g;
    std::vector<Edge> edges;
    int max_id = -1;
    {
        std::ifstream in = open_in(edges_path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (blank(line) || line[line.find_first_not_of(" \t")] == '#') {
                continue;
            }
            std::istringstream ss(line);
            long long u = 0, v = 0;
            std::string rest;
            if (!(ss >> u >> v) || (ss >> rest)) {
                malformed(edges_path, lineno, "expected 'u v'");
            }
            if (u < 0 || v < 0 || u > 100000000 || v > 100000000) {
                malformed(edges_path, lineno, "node id out of range");
            }
            edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
            max_id = std::max({max_id, static_cast<int>(u), static_cast<int>(v)});
        }
    }
    g.n = max_id + 1;

    if (!labels_path.empty()) {
        g.labels = read_int_lines(labels_path);
        if (static_cast<int>(g.labels.size()) < g.n) {
            throw Error(edges_path + ": node id " + std::to_string(max_id) + " has no label (dangling node)");
        }
        g.n = static_cast<int>(g.labels.size());
    }
    if (!features_path.empty()) {
        std::ifstream in = open_in(features_path);
        std::vector<std::vector<double>> rows;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (blank(line)) {
                continue;
            }
            rows.push_back(split_numbers(line, ',', features_path, lineno));
            if (rows.back().size() != rows.front().size()) {
                malformed(features_path, lineno, "inconsistent column count");
            }
        }
        if (static_cast<int>(rows.size()) != g.n) {
            throw Error(features_path + ": " + std::to_string(rows.size()) + " feature rows for " +
                        std::to_string(g.n) + " nodes");
        }
        const auto f = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
        g.features.resize(g.n, f);
        for (int i = 0; i < g.n; ++i) {
            for (Eigen::Index j = 0; j < f; ++j) {
                g.features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            }
        }
    }
    if (!depth_path.empty()) {
        g.depth = read_int_lines(depth_path);
        if (static_cast<int>(g.depth.size()) != g.n) {
            throw Error(depth_path + ": depth count differs from node count");
        }
    }
    g.edges = graph::normalize_edges(std::move(edges));
    g.validate();
    return g;
}

void save_dataset(const Graph& g, const std::string& dir) {
    fs::create_directories(dir);
    const fs::path root(dir);
    {
        std::ofstream out = open_out((root / "graph.edges").string());
        for (const auto& [u, v] : g.edges) {
            out << u << ' ' << v << '\n';
        }
    }
    if (g.features.size() != 0) {
        std::ofstream out = open_out((root / "features.csv").string());
        for (Eigen::Index i = 0; i < g.features.rows(); ++i) {
            for (Eigen::Index j = 0; j < g.features.cols(); ++j) {
                out << (j ? "," : "") << format_double(g.features(i, j));
            }
            out << '\n';
        }
    }
    if (!g.labels.empty()) {
        std::ofstream out = open_out((root / "labels.txt").string());
        for (int l : g.labels) {
            out << l << '\n';
        }
    }
    if (!g.depth.empty()) {
        std::ofstream out = open_out((root / "depth.txt").string());
        for (int d : g.depth) {
            out << d << '\n';
        }
    }
}

LinkSplit split_links(const Graph& g, const LinkRatios& ratios, std::uint64_t seed) {
    if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 ||
        std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
        throw Error("split_links: ratios must be nonnegative and sum to 1");
    }
    const std::size_t m = g.edges.size();
    const auto n_val = static_cast<std::size_t>(std::floor(ratios.val * static_cast<double>(m) + 1e-9));
    const auto n_test = static_cast<std::size_t>(std::floor(ratios.test * static_cast<double>(m) + 1e-9));
    if (n_val == 0 || n_test == 0 || n_val + n_test >= m) {
        throw Error("split_links: ratios yield an empty split");
    }
    std::mt19937_64 rng(seed);
    std::vector<Edge> shuffled = g.edges;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);

    LinkSplit s;
    s.ratios = ratios;
    s.val_pos.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_val));
    s.test_pos.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_val),
                      shuffled.begin() + static_cast<std::ptrdiff_t>(n_val + n_test));
    s.train_pos.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_val + n_test), shuffled.end());
    s.val_neg = sample_non_edges(g, n_val, rng);
    s.test_neg = sample_non_edges(g, n_test, rng, s.val_neg);
    return s;
}

NodeSplit split_nodes(const Graph& g, const NodeSplitScheme& scheme, std::uint64_t seed) {
    if (static_cast<int>(g.labels.size()) != g.n) {
        throw Error("split_nodes: labels required");
    }
    std::mt19937_64 rng(seed);
    std::vector<int> order(static_cast<std::size_t>(g.n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    NodeSplit s;
    s.train_mask.assign(static_cast<std::size_t>(g.n), false);
    s.val_mask.assign(static_cast<std::size_t>(g.n), false);
    s.test_mask.assign(static_cast<std::size_t>(g.n), false);

    if (scheme.kind == NodeSplitScheme::Kind::Ratio) {
        if (scheme.train < 0 || scheme.val < 0 || scheme.test < 0 ||
            std::abs(scheme.train + scheme.val + scheme.test - 1.0) > 1e-9) {
            throw Error("split_nodes: ratios must be nonnegative and sum to 1");
        }
        const auto n = static_cast<double>(g.n);
        const auto n_val = static_cast<std::size_t>(std::floor(scheme.val * n + 1e-9));
        const auto n_test = static_cast<std::size_t>(std::floor(scheme.test * n + 1e-9));
        if (n_val == 0 || n_test == 0 || n_val + n_test >= order.size()) {
            throw Error("split_nodes: ratios yield an empty split");
        }
        for (std::size_t k = 0; k < order.size(); ++k) {
            const auto v = static_cast<std::size_t>(order[k]);
            if (k < n_val) {
                s.val_mask[v] = true;
            } else if (k < n_val + n_test) {
                s.test_mask[v] = true;
            } else {
                s.train_mask[v] = true;
            }
        }
        return s;
    }

    if (scheme.per_class < 1) {
        throw Error("split_nodes: per_class must be positive");
    }
    std::vector<int> taken(static_cast<std::size_t>(g.num_classes()), 0);
    std::vector<int> rest;
    for (int v : order) {
        int& t = taken[static_cast<std::size_t>(g.labels[static_cast<std::size_t>(v)])];
        if (t < scheme.per_class) {
            ++t;
            s.train_mask[static_cast<std::size_t>(v)] = true;
        } else {
            rest.push_back(v);
        }
    }
    for (std::size_t k = 0; k < taken.size(); ++k) {
        if (taken[k] > 0 && taken[k] < scheme.per_class) {
            throw Error("split_nodes: class " + std::to_string(k) + " has fewer than " +
                        std::to_string(scheme.per_class) + " nodes");
        }
    }
    const double vt = scheme.val + scheme.test;
    const double val_share = vt > 0 ? scheme.val / vt : 0.5;
    const auto n_val = static_cast<std::size_t>(std::floor(val_share * static_cast<double>(rest.size()) + 1e-9));
    for (std::size_t k = 0; k < rest.size(); ++k) {
        (k < n_val ? s.val_mask : s.test_mask)[static_cast<std::size_t>(rest[k])] = true;
    }
    return s;
}

void save_embedding(const Embedding& emb, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "model=" << manifold::to_string(emb.model) << " kappa=" << format_double(emb.curvature.kappa())
        << " dim=" << emb.dim() << " n=" << emb.n() << '\n';
    for (Eigen::Index i = 0; i < emb.n(); ++i) {
        for (Eigen::Index j = 0; j < emb.coords.cols(); ++j) {
            out << (j ? " " : "") << format_double(emb.coords(i, j));
        }
        out << '\n';
    }
    if (!out) {
        throw Error("failed writing " + path);
    }
}

Embedding load_embedding(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string header;
    if (!std::getline(in, header)) {
        throw Error(path + ": missing header");
    }
    std::istringstream hs(header);
    std::string tok;
    std::string model_name;
    double kappa = 0.0;
    long long dim = -1, n = -1;
    bool have_kappa = false;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) {
            malformed(path, 1, "bad header token '" + tok + "'");
        }
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "model") {
            model_name = val;
        } else if (key == "kappa") {
            kappa = parse_double(val, path, 1);
            have_kappa = true;
        } else if (key == "dim") {
            dim = static_cast<long long>(parse_double(val, path, 1));
        } else if (key == "n") {
            n = static_cast<long long>(parse_double(val, path, 1));
        } else {
            malformed(path, 1, "unknown header key '" + key + "'");
        }
    }
    if (model_name.empty() || !have_kappa || dim < 1 || n < 0) {
        malformed(path, 1, "header needs model, kappa, dim and n");
    }
    Embedding emb;
    emb.model = manifold::model_from_string(model_name);
    if (emb.model != manifold::Model::Flat && !(kappa < 0.0)) {
        malformed(path, 1, "hyperbolic models need kappa < 0");
    }
    emb.curvature = manifold::Curvature(kappa);
    const auto cols = emb.model == manifold::Model::Lorentz ? dim + 1 : dim;
    emb.coords.resize(n, cols);
    std::string line;
    std::size_t lineno = 1;
    long long row = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) {
            continue;
        }
        if (row >= n) {
            malformed(path, lineno, "more rows than n");
        }
        const auto values = split_numbers(line, ' ', path, lineno);
        if (static_cast<long long>(values.size()) != cols) {
            malformed(path, lineno, "expected " + std::to_string(cols) + " coordinates");
        }
        for (long long j = 0; j < cols; ++j) {
            emb.coords(row, j) = values[static_cast<std::size_t>(j)];
        }
        ++row;
    }
    if (row != n) {
        throw Error(path + ": expected " + std::to_string(n) + " rows, found " + std::to_string(row));
    }
    int fixed = 0;
    for (Eigen::Index i = 0; i < emb.n(); ++i) {
        const auto p = emb.point(i);
        try {
            manifold::check_on_manifold(p, 1e-7);
        } catch (const Error&) {
            emb.coords.row(i) = manifold::project(p).coords.transpose();
            ++fixed;
        }
    }
    if (fixed > 0) {
        warn(path + ": projected " + std::to_string(fixed) + " point(s) back onto the manifold");
    }
    return emb;
}

}  // namespace hie::data
