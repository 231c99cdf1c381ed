#pragma once

// Shallow embeddings, hyperbolic feed-forward and graph-convolution layers,
// and the link / node decoders with their losses. Every function works on
// row-batched Vars: one row per node.

#include "hie/geometry.hpp"
#include "hie/graph.hpp"
#include "hie/optim.hpp"

#include <random>
#include <span>
#include <vector>

namespace hie::models {

using ad::Index;
using ad::Var;
using geo::Space;
using graph::Edge;

enum class Activation { Relu, Identity };
enum class AggMode { Degree, Attention };

Activation activation_from_string(const std::string& name);
AggMode agg_from_string(const std::string& name);

struct FermiDiracParams {
    double r = 2.0;
    double t = 1.0;
};

/// 1 / (exp((d_sq - r) / t) + 1).
double fermi_dirac(double d_sq, const FermiDiracParams& p);
Var fermi_dirac(const Var& d_sq, const FermiDiracParams& p);

// ---------------------------------------------------------------------------
// Shallow embedding

struct ShallowEmbedding {
    optim::Parameter table;
    Space space;

    /// Binds the table to `tape` and returns the n x ambient points.
    Var decode(ad::Tape& tape);
};

/// Small uniform initialization near the origin.
ShallowEmbedding make_shallow(int n, int dim, const Space& space, optim::ParamSpace param_space,
                              std::mt19937_64& rng, double init_scale = 1e-3);

/// Directed training pairs with k sampled negatives each (row-major, k per pair).
struct ShallowBatch {
    std::vector<int> anchor;
    std::vector<int> positive;
    std::vector<int> negatives;
    int k = 0;
};

/// Each undirected edge yields both directions. Negatives are uniform over
/// nodes that are neither the anchor nor one of its neighbors; pairs whose
/// anchor has no such node are skipped with a warning.
ShallowBatch sample_shallow_batch(int n, const std::vector<std::vector<int>>& adjacency,
                                  const std::vector<Edge>& edges, int k, std::mt19937_64& rng);

/// Mean over pairs of -log(exp(-d(i,j)) / (exp(-d(i,i)) + sum_k exp(-d(i,n_k)))).
Var shallow_loss(const Space& s, const Var& points, const ShallowBatch& batch);

/// Squared distances for each pair, E x 1.
Var pair_sqdist(const Space& s, const Var& points, const std::vector<Edge>& pairs);

/// Binary cross-entropy of the Fermi-Dirac probabilities:
/// mean(-log p(pos)) + mean(-log(1 - p(neg))).
Var lp_loss(const Space& s, const Var& points, const std::vector<Edge>& pos, const std::vector<Edge>& neg,
            const FermiDiracParams& fd);

// ---------------------------------------------------------------------------
// Hyperbolic layers

struct HypLayer {
    /// d_out x d_in
    optim::Parameter W;
    /// 1 x d_out, tangent vector at the origin.
    optim::Parameter b;
    /// 2 d_out x 1 attention scorer (HGCN attention mode only).
    optim::Parameter att;
    manifold::Curvature k_in;
    manifold::Curvature k_out;
    Activation act = Activation::Relu;

    int d_in() const { return static_cast<int>(W.value.cols()); }
    int d_out() const { return static_cast<int>(W.value.rows()); }
};

/// Glorot-uniform W, zero b, and a small random attention vector.
HypLayer make_layer(int d_in, int d_out, manifold::Curvature k_in, manifold::Curvature k_out, Activation act,
                    std::mt19937_64& rng, const std::string& name);

/// Binds W, b and att to the tape.
void bind_layer(ad::Tape& tape, HypLayer& layer);

/// Optional inverted dropout on tangent coordinates.
struct Dropout {
    double rate = 0.0;
    std::mt19937_64* rng = nullptr;

    bool active() const { return rate > 0.0 && rng != nullptr; }
};

/// exp_o(W log_o x) followed by the bias step exp_h(PT_{o->h} b). `W` is
/// d_out x d_in and `b` is 1 x d_out.
Var hyp_linear(const Space& s, const Var& W, const Var& b, const Var& x, const Dropout& drop = {});
/// exp_o^{out}(sigma(log_o^{in}(x))).
Var hyp_activation(const Space& in, const Space& out, const Var& x, Activation act);

/// Applies bound layers: linear then activation, threading curvatures.
Var hnn_forward(manifold::Model model, std::vector<HypLayer>& layers, const Var& x, const Dropout& drop = {});

/// Self-loop augmented edge structure used by aggregation.
struct AggGraph {
    int n = 0;
    /// Directed edges in both directions plus one self-loop per node.
    std::vector<int> src;
    std::vector<int> dst;
    /// 1 / sqrt(d~_i d~_j) weights.
    ad::SparseMat degree;
};

AggGraph make_agg_graph(const graph::Graph& g);

/// Attention logits of a bound layer: MLP([log_o x_i || log_o x_j]) per edge.
Var attention_weights(const Space& s, const AggGraph& g, const Var& x, const Var& att);

/// Aggregation weights as a sparse matrix (forward values only).
ad::SparseMat agg_weights(const AggGraph& g, AggMode mode, const Space& s, const Mat& emb, const Mat& att);

/// exp_o(sum_j a_ij log_o x_j) with constant weights.
Var hyp_aggregate(const Space& s, const Var& x, const ad::SparseMat& weights);
/// Same with per-edge differentiable weights aligned with g.src / g.dst.
Var hyp_aggregate(const Space& s, const Var& x, const AggGraph& g, const Var& edge_weights);

/// Lifts raw features with exp_o at the first layer's input curvature.
Var lift_features(const Space& s, const Var& features);

/// Linear, aggregate, activate per bound layer; `x` is already on the manifold.
Var hgcn_forward(manifold::Model model, std::vector<HypLayer>& layers, const AggGraph& g, AggMode mode,
                 const Var& x, const Dropout& drop = {});

// ---------------------------------------------------------------------------
// Node decoder

struct Decoder {
    /// d x C
    optim::Parameter A;
    /// 1 x C
    optim::Parameter c;
};

Decoder make_decoder(int d, int classes, std::mt19937_64& rng);
void bind_decoder(ad::Tape& tape, Decoder& dec);

/// log_o(z) A + c.
Var nc_decode(const Space& s, const Var& z, const Var& A, const Var& c);

/// Mean negative log-likelihood over rows with mask set.
Var ce_loss(const Var& logits, const std::vector<int>& labels, const std::vector<bool>& mask);

}  // namespace hie::models
