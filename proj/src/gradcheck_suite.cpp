#include "hie/gradcheck_suite.hpp"

#include "hie/hie.hpp"
#include "hie/models.hpp"

#include <random>

namespace hie::checks {

namespace {

using ad::Tape;
using ad::Var;
using geo::Space;
using manifold::Curvature;
using manifold::Model;

Mat uniform(Eigen::Index r, Eigen::Index c, double scale, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Mat m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m(i) = u(rng);
    }
    return m;
}

/// Points are parameterized by origin tangent vectors so every model can be
/// perturbed freely.
Var points_from(const Space& s, const Var& t) { return geo::expmap0(s, t); }

graph::Graph small_tree(int n) {
    graph::Graph g;
    g.n = n;
    for (int i = 1; i < n; ++i) {
        g.edges.emplace_back((i - 1) / 2, i);
    }
    g.edges = graph::normalize_edges(g.edges);
    return g;
}

GradCase run(const std::string& name, double tol, const ad::ScalarFunction& f, const std::vector<Mat>& inputs) {
    const auto rep = ad::grad_check(f, inputs, 1e-5, tol, 1e-4);
    return {name, tol, rep.max_rel_error, rep.checked, rep.passed()};
}

}  // namespace

std::vector<GradCase> run_gradient_suite(std::uint64_t seed, double loss_tol, double layer_tol) {
    std::mt19937_64 rng(seed);
    std::vector<GradCase> out;
    const Space spaces[] = {{Model::Poincare, Curvature(-1.0)}, {Model::Lorentz, Curvature(-0.7)}};

    for (const Space& s : spaces) {
        const std::string tag = std::string(manifold::to_string(s.model));

        // Shallow objective on a 6-node toy.
        {
            const graph::Graph g = small_tree(6);
            std::mt19937_64 r2(seed + 1);
            const auto batch = models::sample_shallow_batch(g.n, g.adjacency(), g.edges, 2, r2);
            out.push_back(run("shallow_loss/" + tag, loss_tol,
                              [s, batch](Tape&, std::span<const Var> in) {
                                  return models::shallow_loss(s, points_from(s, in[0]), batch);
                              },
                              {uniform(6, 3, 0.6, rng)}));
        }
        // Fermi-Dirac BCE on an 8-node toy.
        {
            const std::vector<graph::Edge> pos = {{0, 1}, {1, 2}, {2, 3}, {4, 5}};
            const std::vector<graph::Edge> neg = {{0, 7}, {3, 6}, {1, 5}, {2, 4}};
            out.push_back(run("lp_loss/" + tag, loss_tol,
                              [s, pos, neg](Tape&, std::span<const Var> in) {
                                  return models::lp_loss(s, points_from(s, in[0]), pos, neg, {2.0, 1.0});
                              },
                              {uniform(8, 3, 0.8, rng)}));
        }
        // Cross-entropy through the tangent decoder.
        {
            const std::vector<int> labels = {0, 1, 2, 1, 0};
            const std::vector<bool> mask = {true, true, false, true, true};
            out.push_back(run("ce_loss/" + tag, loss_tol,
                              [s, labels, mask](Tape&, std::span<const Var> in) {
                                  const Var logits = models::nc_decode(s, points_from(s, in[0]), in[1], in[2]);
                                  return models::ce_loss(logits, labels, mask);
                              },
                              {uniform(5, 3, 0.8, rng), uniform(3, 3, 1.0, rng), uniform(1, 3, 0.5, rng)}));
        }
        // HIE terms: hyperbolic and tangent stretching, opposite, stretch-only.
        // Each runs with free weights (plain FD) and with detached weights,
        // where the FD reference freezes w at its base value.
        struct HieCase {
            const char* name;
            method::Mode mode;
            method::HieSpace space;
            method::Sigma sigma;
            bool detach_center;
        };
        const HieCase hie_cases[] = {
            {"hie_full_hyperbolic", method::Mode::Full, method::HieSpace::Hyperbolic, method::Sigma::Tanh, false},
            {"hie_full_hyperbolic_identity", method::Mode::Full, method::HieSpace::Hyperbolic,
             method::Sigma::Identity, false},
            {"hie_full_tangent", method::Mode::Full, method::HieSpace::Tangent, method::Sigma::Tanh, false},
            {"hie_opposite", method::Mode::Opposite, method::HieSpace::Hyperbolic, method::Sigma::Tanh, false},
            {"hie_stretch_only", method::Mode::StretchOnly, method::HieSpace::Hyperbolic, method::Sigma::Tanh, false},
        };
        for (const HieCase& hc : hie_cases) {
            method::HieConfig cfg;
            cfg.mode = hc.mode;
            cfg.space = hc.space;
            cfg.sigma = hc.sigma;
            cfg.detach_center = hc.detach_center;
            const Mat base = uniform(7, 3, 0.5, rng);
            auto loss = [s](method::HieConfig c) {
                return [s, c](Tape&, std::span<const Var> in) {
                    return method::hie_loss(s, points_from(s, in[0]), c);
                };
            };
            cfg.detach_weights = false;
            out.push_back(run(std::string(hc.name) + "/free_w/" + tag, loss_tol, loss(cfg), {base}));

            cfg.detach_weights = true;
            const bool align = hc.mode == method::Mode::Full;
            const double sign = hc.mode == method::Mode::Opposite ? 1.0 : -1.0;
            Mat w0;
            {
                Tape t;
                w0 = method::node_levels(s, points_from(s, t.constant(base)), cfg, align).value();
            }
            auto frozen = [s, cfg, align, sign, w0](Tape& tape, std::span<const Var> in) {
                const Var lv = method::node_levels(s, points_from(s, in[0]), cfg, align);
                const Var z = scale(ad::mean(mul(tape.constant(w0), lv)), sign);
                return cfg.sigma == method::Sigma::Tanh ? ad::tanh(z) : z;
            };
            const std::vector<Mat> inputs = {base};
            const auto rep = ad::grad_check(loss(cfg), frozen, inputs, 1e-5, loss_tol, 1e-4);
            out.push_back({std::string(hc.name) + "/" + tag, loss_tol, rep.max_rel_error, rep.checked, rep.passed()});
        }
        // Whole-mode combination with a CE task.
        {
            method::HieConfig cfg;
            cfg.mode = method::Mode::Full;
            cfg.alignment = method::Alignment::Whole;
            cfg.lambda = 0.5;
            cfg.detach_weights = false;
            const std::vector<int> labels = {0, 1, 0, 1, 1, 0};
            const std::vector<bool> mask(6, true);
            out.push_back(run("combine_whole/" + tag, loss_tol,
                              [s, cfg, labels, mask](Tape&, std::span<const Var> in) {
                                  const Var A = in[1];
                                  const Var c = in[2];
                                  auto task = [&](const Var& z) {
                                      return models::ce_loss(models::nc_decode(s, z, A, c), labels, mask);
                                  };
                                  return method::combine_loss(s, task, points_from(s, in[0]), cfg).total;
                              },
                              {uniform(6, 3, 0.5, rng), uniform(3, 2, 1.0, rng), uniform(1, 2, 0.5, rng)}));
        }
        // Two feed-forward layers with distinct curvatures.
        {
            const Mat R = uniform(5, s.ambient(3), 1.0, rng);
            out.push_back(run("hnn_layers/" + tag, layer_tol,
                              [s, R](Tape& tape, std::span<const Var> in) {
                                  const Space s1{s.model, Curvature(-1.3)};
                                  Var h = points_from(s, in[0]);
                                  h = models::hyp_activation(s, s1, models::hyp_linear(s, in[1], in[2], h),
                                                             models::Activation::Relu);
                                  h = models::hyp_activation(s1, s, models::hyp_linear(s1, in[3], in[4], h),
                                                             models::Activation::Identity);
                                  return ad::sum(mul(h, tape.constant(R)));
                              },
                              {uniform(5, 4, 0.7, rng), uniform(4, 4, 0.6, rng), uniform(1, 4, 0.2, rng),
                               uniform(3, 4, 0.6, rng), uniform(1, 3, 0.2, rng)}));
        }
        // Graph convolution layers on a 12-node tree with a CE loss.
        for (const auto mode : {models::AggMode::Degree, models::AggMode::Attention}) {
            const graph::Graph g = small_tree(12);
            const auto agg = models::make_agg_graph(g);
            std::vector<int> labels(12);
            for (int i = 0; i < 12; ++i) {
                labels[static_cast<std::size_t>(i)] = i % 3;
            }
            const std::vector<bool> mask(12, true);
            const std::string mname = mode == models::AggMode::Degree ? "degree" : "attention";
            out.push_back(run("hgcn_layers_" + mname + "/" + tag, layer_tol,
                              [s, agg, mode, labels, mask](Tape&, std::span<const Var> in) {
                                  Var h = models::lift_features(s, in[0]);
                                  for (int l = 0; l < 2; ++l) {
                                      const Var W = in[static_cast<std::size_t>(1 + 3 * l)];
                                      const Var b = in[static_cast<std::size_t>(2 + 3 * l)];
                                      const Var att = in[static_cast<std::size_t>(3 + 3 * l)];
                                      const Var lin = models::hyp_linear(s, W, b, h);
                                      const Var a = mode == models::AggMode::Degree
                                                        ? models::hyp_aggregate(s, lin, agg.degree)
                                                        : models::hyp_aggregate(
                                                              s, lin, agg, models::attention_weights(s, agg, lin, att));
                                      h = models::hyp_activation(s, s, a, models::Activation::Identity);
                                  }
                                  const Var logits = models::nc_decode(s, h, in[7], in[8]);
                                  return models::ce_loss(logits, labels, mask);
                              },
                              {uniform(12, 4, 0.8, rng), uniform(3, 4, 0.7, rng), uniform(1, 3, 0.2, rng),
                               uniform(6, 1, 0.5, rng), uniform(3, 3, 0.7, rng), uniform(1, 3, 0.2, rng),
                               uniform(6, 1, 0.5, rng), uniform(3, 3, 1.0, rng), uniform(1, 3, 0.3, rng)}));
        }
    }
    return out;
}

}  // namespace hie::checks
