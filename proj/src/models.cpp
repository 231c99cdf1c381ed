#include "hie/models.hpp"

#include <cmath>
#include <string>

namespace hie::models {

Activation activation_from_string(const std::string& name) {
    if (name == "relu") return Activation::Relu;
    if (name == "identity") return Activation::Identity;
    throw Error("unknown activation '" + name + "'");
}

AggMode agg_from_string(const std::string& name) {
    if (name == "degree") return AggMode::Degree;
    if (name == "attention") return AggMode::Attention;
    throw Error("unknown aggregation '" + name + "'");
}

double fermi_dirac(double d_sq, const FermiDiracParams& p) {
    if (!(p.t > 0.0)) {
        throw Error("fermi_dirac: t must be positive");
    }
    return 1.0 / (std::exp((d_sq - p.r) / p.t) + 1.0);
}

Var fermi_dirac(const Var& d_sq, const FermiDiracParams& p) {
    if (!(p.t > 0.0)) {
        throw Error("fermi_dirac: t must be positive");
    }
    return ad::sigmoid(scale(shift(d_sq, -p.r), -1.0 / p.t));
}

// ---------------------------------------------------------------------------
// Shallow embedding

Var ShallowEmbedding::decode(ad::Tape& tape) {
    const Var raw = optim::bind(tape, table);
    if (table.space == optim::ParamSpace::TangentAtOrigin) {
        return geo::expmap0(space, raw);
    }
    return raw;
}

ShallowEmbedding make_shallow(int n, int dim, const Space& space, optim::ParamSpace param_space,
                              std::mt19937_64& rng, double init_scale) {
    if (param_space == optim::ParamSpace::RiemannianPoincare && space.model != manifold::Model::Poincare) {
        throw Error("make_shallow: riemannian_poincare parameters need the Poincare model");
    }
    if (param_space == optim::ParamSpace::Euclidean && space.model == manifold::Model::Lorentz) {
        throw Error("make_shallow: Lorentz points need tangent_at_origin parameters");
    }
    ShallowEmbedding e;
    e.space = space;
    e.table.name = "embedding";
    e.table.space = param_space;
    e.table.c = space.c();
    e.table.decay = false;
    std::uniform_real_distribution<double> u(-init_scale, init_scale);
    e.table.value.resize(n, dim);
    for (Eigen::Index i = 0; i < e.table.value.size(); ++i) {
        e.table.value(i) = u(rng);
    }
    return e;
}

ShallowBatch sample_shallow_batch(int n, const std::vector<std::vector<int>>& adjacency,
                                  const std::vector<Edge>& edges, int k, std::mt19937_64& rng) {
    if (k < 1) {
        throw Error("shallow_loss: k must be at least 1");
    }
    if (edges.empty()) {
        throw Error("shallow_loss: no training edges");
    }
    ShallowBatch b;
    b.k = k;
    std::uniform_int_distribution<int> node(0, n - 1);
    int skipped = 0;
    auto add_pair = [&](int i, int j) {
        const auto& nbrs = adjacency[static_cast<std::size_t>(i)];
        if (static_cast<int>(nbrs.size()) + 1 >= n) {
            ++skipped;
            return;
        }
        b.anchor.push_back(i);
        b.positive.push_back(j);
        for (int s = 0; s < k;) {
            const int cand = node(rng);
            if (cand == i || std::binary_search(nbrs.begin(), nbrs.end(), cand)) {
                continue;
            }
            b.negatives.push_back(cand);
            ++s;
        }
    };
    for (const auto& [u, v] : edges) {
        add_pair(u, v);
        add_pair(v, u);
    }
    if (skipped > 0) {
        warn("shallow_loss: skipped " + std::to_string(skipped) + " pair(s) without valid negatives");
    }
    if (b.anchor.empty()) {
        throw Error("shallow_loss: no pair has valid negatives");
    }
    return b;
}

Var shallow_loss(const Space& s, const Var& points, const ShallowBatch& batch) {
    if (batch.anchor.empty() || batch.k < 1) {
        throw Error("shallow_loss: empty batch");
    }
    const std::size_t E = batch.anchor.size();
    const Var xi = ad::gather_rows(points, batch.anchor);
    const Var d_pos = geo::dist(s, xi, ad::gather_rows(points, batch.positive));
    // Logits of the denominator: the self term (distance 0) then each negative.
    Var logits = points.tape()->constant(Mat::Zero(static_cast<Eigen::Index>(E), 1));
    std::vector<int> slot(E);
    for (int k = 0; k < batch.k; ++k) {
        for (std::size_t e = 0; e < E; ++e) {
            slot[e] = batch.negatives[e * static_cast<std::size_t>(batch.k) + static_cast<std::size_t>(k)];
        }
        logits = ad::concat_cols(logits, neg(geo::dist(s, xi, ad::gather_rows(points, slot))));
    }
    // log sum exp of the row equals -log_softmax of the zero self logit.
    const Var lse = neg(ad::slice_cols(ad::log_softmax_rows(logits), 0, 1));
    return ad::mean(add(d_pos, lse));
}

Var pair_sqdist(const Space& s, const Var& points, const std::vector<Edge>& pairs) {
    std::vector<int> a(pairs.size()), b(pairs.size());
    for (std::size_t e = 0; e < pairs.size(); ++e) {
        a[e] = pairs[e].first;
        b[e] = pairs[e].second;
    }
    return ad::square(geo::dist(s, ad::gather_rows(points, a), ad::gather_rows(points, b)));
}

Var lp_loss(const Space& s, const Var& points, const std::vector<Edge>& pos, const std::vector<Edge>& neg_edges,
            const FermiDiracParams& fd) {
    if (pos.empty() || neg_edges.empty()) {
        throw Error("lp_loss: empty edge list");
    }
    if (!(fd.t > 0.0)) {
        throw Error("lp_loss: t must be positive");
    }
    // With s = (d^2 - r) / t: -log p = softplus(s) and -log(1 - p) = softplus(-s).
    const Var sp = scale(shift(pair_sqdist(s, points, pos), -fd.r), 1.0 / fd.t);
    const Var sn = scale(shift(pair_sqdist(s, points, neg_edges), -fd.r), 1.0 / fd.t);
    return add(ad::mean(ad::softplus(sp)), ad::mean(ad::softplus(neg(sn))));
}

// ---------------------------------------------------------------------------
// Hyperbolic layers

HypLayer make_layer(int d_in, int d_out, manifold::Curvature k_in, manifold::Curvature k_out, Activation act,
                    std::mt19937_64& rng, const std::string& name) {
    if (d_in < 1 || d_out < 1) {
        throw Error("make_layer: dimensions must be positive");
    }
    HypLayer l;
    const double bound = std::sqrt(6.0 / (d_in + d_out));
    std::uniform_real_distribution<double> u(-bound, bound);
    l.W = {name + ".W", Mat(d_out, d_in), optim::ParamSpace::Euclidean};
    for (Eigen::Index i = 0; i < l.W.value.size(); ++i) {
        l.W.value(i) = u(rng);
    }
    l.b = {name + ".b", Mat::Zero(1, d_out), optim::ParamSpace::TangentAtOrigin};
    l.b.decay = false;
    std::uniform_real_distribution<double> ua(-0.1, 0.1);
    l.att = {name + ".att", Mat(2 * d_out, 1), optim::ParamSpace::Euclidean};
    for (Eigen::Index i = 0; i < l.att.value.size(); ++i) {
        l.att.value(i) = ua(rng);
    }
    l.k_in = k_in;
    l.k_out = k_out;
    l.act = act;
    return l;
}

void bind_layer(ad::Tape& tape, HypLayer& layer) {
    optim::bind(tape, layer.W);
    optim::bind(tape, layer.b);
    optim::bind(tape, layer.att);
}

namespace {

Var apply_dropout(const Var& v, const Dropout& drop) {
    if (!drop.active()) {
        return v;
    }
    std::bernoulli_distribution keep(1.0 - drop.rate);
    Mat mask(v.rows(), v.cols());
    for (Eigen::Index i = 0; i < mask.size(); ++i) {
        mask(i) = keep(*drop.rng) ? 1.0 / (1.0 - drop.rate) : 0.0;
    }
    return mul(v, v.tape()->constant(std::move(mask)));
}

Var activate(const Var& v, Activation act) { return act == Activation::Relu ? ad::relu(v) : v; }

Space with_curvature(manifold::Model model, manifold::Curvature k) { return Space{model, k}; }

void require_bound(const HypLayer& l) {
    if (!l.W.var.valid() || !l.b.var.valid()) {
        throw Error("layer '" + l.W.name + "' is not bound to a tape");
    }
}

}  // namespace

Var hyp_linear(const Space& s, const Var& W, const Var& b, const Var& x, const Dropout& drop) {
    const Index d_in = s.intrinsic(x.cols());
    if (W.cols() != d_in) {
        throw Error("hyp_linear: W has " + std::to_string(W.cols()) + " columns for input dimension " +
                    std::to_string(d_in));
    }
    if (b.rows() != 1 || b.cols() != W.rows()) {
        throw Error("hyp_linear: bias must be 1 x d_out");
    }
    const Var t = apply_dropout(geo::logmap0(s, x), drop);
    const Var h = geo::expmap0(s, ad::matmul(t, ad::transpose(W)));
    return geo::proj(s, geo::bias_add(s, h, b));
}

Var hyp_activation(const Space& in, const Space& out, const Var& x, Activation act) {
    if (in.model != out.model) {
        throw Error("hyp_activation: model mismatch");
    }
    return geo::expmap0(out, activate(geo::logmap0(in, x), act));
}

Var hnn_forward(manifold::Model model, std::vector<HypLayer>& layers, const Var& x, const Dropout& drop) {
    Var h = x;
    for (HypLayer& l : layers) {
        require_bound(l);
        const Space in = with_curvature(model, l.k_in);
        const Space out = with_curvature(model, l.k_out);
        h = hyp_activation(in, out, hyp_linear(in, l.W.var, l.b.var, h, drop), l.act);
    }
    return h;
}

AggGraph make_agg_graph(const graph::Graph& g) {
    AggGraph a;
    a.n = g.n;
    const auto deg = g.degrees();
    std::vector<Eigen::Triplet<double>> trip;
    auto dt = [&](int v) { return static_cast<double>(deg[static_cast<std::size_t>(v)] + 1); };
    for (int v = 0; v < g.n; ++v) {
        a.src.push_back(v);
        a.dst.push_back(v);
        trip.emplace_back(v, v, 1.0 / dt(v));
    }
    for (const auto& [u, v] : g.edges) {
        const double w = 1.0 / std::sqrt(dt(u) * dt(v));
        a.src.push_back(u);
        a.dst.push_back(v);
        a.src.push_back(v);
        a.dst.push_back(u);
        trip.emplace_back(u, v, w);
        trip.emplace_back(v, u, w);
    }
    a.degree.resize(g.n, g.n);
    a.degree.setFromTriplets(trip.begin(), trip.end());
    return a;
}

Var attention_weights(const Space& s, const AggGraph& g, const Var& x, const Var& att) {
    const Var t = geo::logmap0(s, x);
    if (att.rows() != 2 * t.cols() || att.cols() != 1) {
        throw Error("attention_weights: scorer must be 2d x 1");
    }
    const Var pairs = ad::concat_cols(ad::gather_rows(t, g.src), ad::gather_rows(t, g.dst));
    return ad::segment_softmax(ad::matmul(pairs, att), g.src, g.n);
}

ad::SparseMat agg_weights(const AggGraph& g, AggMode mode, const Space& s, const Mat& emb, const Mat& att) {
    if (mode == AggMode::Degree) {
        return g.degree;
    }
    ad::Tape tape;
    const Var w = attention_weights(s, g, tape.constant(emb), tape.constant(att));
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t e = 0; e < g.src.size(); ++e) {
        trip.emplace_back(g.src[e], g.dst[e], w.value()(static_cast<Index>(e), 0));
    }
    ad::SparseMat out(g.n, g.n);
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

Var hyp_aggregate(const Space& s, const Var& x, const ad::SparseMat& weights) {
    if (weights.rows() != x.rows() || weights.cols() != x.rows()) {
        throw Error("hyp_aggregate: weight matrix shape mismatch");
    }
    return geo::expmap0(s, ad::spmm(weights, geo::logmap0(s, x)));
}

Var hyp_aggregate(const Space& s, const Var& x, const AggGraph& g, const Var& edge_weights) {
    const Var t = geo::logmap0(s, x);
    const Var msg = mul(edge_weights, ad::gather_rows(t, g.dst));
    return geo::expmap0(s, ad::scatter_add_rows(msg, g.src, g.n));
}

Var lift_features(const Space& s, const Var& features) { return geo::expmap0(s, features); }

Var hgcn_forward(manifold::Model model, std::vector<HypLayer>& layers, const AggGraph& g, AggMode mode,
                 const Var& x, const Dropout& drop) {
    if (x.rows() != g.n) {
        throw Error("hgcn_forward: feature rows differ from node count");
    }
    Var h = x;
    for (HypLayer& l : layers) {
        require_bound(l);
        const Space in = with_curvature(model, l.k_in);
        const Space out = with_curvature(model, l.k_out);
        const Var lin = hyp_linear(in, l.W.var, l.b.var, h, drop);
        const Var agg = mode == AggMode::Degree
                            ? hyp_aggregate(in, lin, g.degree)
                            : hyp_aggregate(in, lin, g, attention_weights(in, g, lin, l.att.var));
        h = hyp_activation(in, out, agg, l.act);
    }
    return h;
}

// ---------------------------------------------------------------------------
// Node decoder

Decoder make_decoder(int d, int classes, std::mt19937_64& rng) {
    if (d < 1 || classes < 1) {
        throw Error("make_decoder: dimensions must be positive");
    }
    Decoder dec;
    const double bound = std::sqrt(6.0 / (d + classes));
    std::uniform_real_distribution<double> u(-bound, bound);
    dec.A = {"decoder.A", Mat(d, classes), optim::ParamSpace::Euclidean};
    for (Eigen::Index i = 0; i < dec.A.value.size(); ++i) {
        dec.A.value(i) = u(rng);
    }
    dec.c = {"decoder.c", Mat::Zero(1, classes), optim::ParamSpace::Euclidean};
    dec.c.decay = false;
    return dec;
}

void bind_decoder(ad::Tape& tape, Decoder& dec) {
    optim::bind(tape, dec.A);
    optim::bind(tape, dec.c);
}

Var nc_decode(const Space& s, const Var& z, const Var& A, const Var& c) {
    const Var t = geo::logmap0(s, z);
    if (A.rows() != t.cols()) {
        throw Error("nc_decode: decoder input dimension differs from embedding dimension");
    }
    return add(ad::matmul(t, A), c);
}

Var ce_loss(const Var& logits, const std::vector<int>& labels, const std::vector<bool>& mask) {
    if (static_cast<Index>(labels.size()) != logits.rows() || mask.size() != labels.size()) {
        throw Error("ce_loss: label or mask size differs from logit rows");
    }
    std::vector<int> rows;
    Mat onehot;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (mask[i]) {
            rows.push_back(static_cast<int>(i));
        }
    }
    if (rows.empty()) {
        throw Error("ce_loss: empty mask");
    }
    onehot = Mat::Zero(static_cast<Index>(rows.size()), logits.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const int y = labels[static_cast<std::size_t>(rows[k])];
        if (y < 0 || y >= logits.cols()) {
            throw Error("ce_loss: label out of range");
        }
        onehot(static_cast<Index>(k), y) = 1.0;
    }
    const Var logp = ad::log_softmax_rows(ad::gather_rows(logits, rows));
    return scale(ad::sum(mul(logp, logits.tape()->constant(std::move(onehot)))),
                 -1.0 / static_cast<double>(rows.size()));
}

}  // namespace hie::models
