#include "hie/center.hpp"
#include "hie/data.hpp"
#include "hie/eval.hpp"
#include "hie/gradcheck_suite.hpp"
#include "hie/trainer.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace hie;
using manifold::Curvature;
using manifold::ManifoldPoint;

namespace {

ManifoldPoint point(const std::string& model, const Vec& x, double kappa) {
    return manifold::make_point(manifold::model_from_string(model), x, Curvature(kappa));
}

std::vector<ManifoldPoint> rows(const std::string& model, const Mat& x, double kappa) {
    std::vector<ManifoldPoint> out;
    out.reserve(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) out.push_back(point(model, x.row(i).transpose(), kappa));
    return out;
}

trainer::TrainConfig make_config(const std::map<std::string, std::string>& options) {
    trainer::TrainConfig cfg;
    for (const auto& [k, v] : options) cfg.set(k, v);
    cfg.validate();
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hyperbolic embeddings with hierarchy-informed regularization";

    py::register_exception<Error>(m, "HieError", PyExc_ValueError);

    py::class_<graph::Graph>(m, "Graph")
        .def(py::init([](int n, std::vector<graph::Edge> edges, Mat features, std::vector<int> labels,
                         std::vector<int> depth) {
                 graph::Graph g;
                 g.n = n;
                 g.edges = graph::normalize_edges(std::move(edges));
                 g.features = std::move(features);
                 g.labels = std::move(labels);
                 g.depth = std::move(depth);
                 g.validate();
                 return g;
             }),
             py::arg("n"), py::arg("edges"), py::arg("features") = Mat(), py::arg("labels") = std::vector<int>(),
             py::arg("depth") = std::vector<int>())
        .def_readonly("n", &graph::Graph::n)
        .def_readonly("edges", &graph::Graph::edges)
        .def_readonly("features", &graph::Graph::features)
        .def_readonly("labels", &graph::Graph::labels)
        .def_readonly("depth", &graph::Graph::depth)
        .def("num_classes", &graph::Graph::num_classes)
        .def("__repr__", [](const graph::Graph& g) {
            return "<Graph n=" + std::to_string(g.n) + " edges=" + std::to_string(g.edges.size()) + ">";
        });

    m.def(
        "gen_tree",
        [](int branching, int nodes, const std::string& variant, int feature_dim, std::uint64_t seed) {
            if (variant != "H" && variant != "L") throw Error("variant must be H or L");
            return graph::gen_tree(branching, nodes, variant == "H" ? graph::TreeVariant::H : graph::TreeVariant::L,
                                   feature_dim, seed);
        },
        py::arg("branching") = 3, py::arg("nodes") = 1093, py::arg("variant") = "H", py::arg("feature_dim") = 32,
        py::arg("seed") = 0);
    m.def("homophily", &graph::homophily);
    m.def("load_dataset", &data::load_dataset, py::arg("edges"), py::arg("features") = "", py::arg("labels") = "",
          py::arg("depth") = "");
    m.def("save_dataset", &data::save_dataset);

    m.def(
        "dist", [](const std::string& model, const Vec& x, const Vec& y, double kappa) {
            return manifold::dist(point(model, x, kappa), point(model, y, kappa));
        },
        py::arg("model"), py::arg("x"), py::arg("y"), py::arg("kappa") = -1.0);
    m.def(
        "expmap", [](const std::string& model, const Vec& x, const Vec& v, double kappa) {
            return manifold::exp_map({point(model, x, kappa), v}).coords;
        },
        py::arg("model"), py::arg("x"), py::arg("v"), py::arg("kappa") = -1.0);
    m.def(
        "logmap", [](const std::string& model, const Vec& x, const Vec& y, double kappa) {
            return manifold::log_map(point(model, x, kappa), point(model, y, kappa)).vec;
        },
        py::arg("model"), py::arg("x"), py::arg("y"), py::arg("kappa") = -1.0);
    m.def(
        "convert", [](const std::string& model, const Vec& x, double kappa) {
            return manifold::model_convert(point(model, x, kappa)).coords;
        },
        py::arg("model"), py::arg("x"), py::arg("kappa") = -1.0);
    m.def(
        "origin", [](const std::string& model, Eigen::Index dim, double kappa) {
            return manifold::origin(manifold::model_from_string(model), dim, Curvature(kappa)).coords;
        },
        py::arg("model"), py::arg("dim"), py::arg("kappa") = -1.0);
    m.def(
        "hyperbolic_center",
        [](const std::string& model, const Mat& points, const Vec& weights, double kappa) {
            return center::hyperbolic_center({rows(model, points, kappa), weights}).coords;
        },
        py::arg("model"), py::arg("points"), py::arg("weights") = Vec(), py::arg("kappa") = -1.0);
    m.def(
        "align_root",
        [](const std::string& model, const Mat& points, double kappa) {
            const auto pts = rows(model, points, kappa);
            const auto moved = center::align_root(pts, center::hyperbolic_center({pts, {}}));
            Mat out(points.rows(), points.cols());
            for (std::size_t i = 0; i < moved.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = moved[i].coords;
            return out;
        },
        py::arg("model"), py::arg("points"), py::arg("kappa") = -1.0);

    m.def(
        "ranking_metrics",
        [](const std::vector<double>& pos, const std::vector<double>& neg) {
            const auto r = eval::ranking_metrics(pos, neg);
            return py::make_tuple(r.auc, r.ap);
        },
        py::arg("pos"), py::arg("neg"));

    m.def(
        "_train",
        [](const std::map<std::string, std::string>& options, const graph::Graph& g) {
            const trainer::TrainConfig cfg = make_config(options);
            trainer::TrainResult r;
            nlohmann::json report;
            {
                py::gil_scoped_release release;
                const trainer::Split split = trainer::make_split(cfg, g);
                r = trainer::train(cfg, g, split);
                report = trainer::evaluate(cfg, g, split, r.embedding, r.weights);
            }
            py::list history;
            for (const auto& e : r.history) {
                history.append(py::dict(py::arg("epoch") = e.epoch, py::arg("loss") = e.loss, py::arg("task") = e.task,
                                        py::arg("hyp") = e.hyp, py::arg("val") = e.val));
            }
            return py::make_tuple(report.dump(), r.embedding.coords, history);
        },
        py::arg("options"), py::arg("graph"));

    m.def("config_keys", &trainer::TrainConfig::keys);

    m.def(
        "gradcheck",
        [](std::uint64_t seed) {
            py::list out;
            for (const auto& c : checks::run_gradient_suite(seed)) {
                out.append(py::dict(py::arg("name") = c.name, py::arg("tolerance") = c.tolerance,
                                    py::arg("max_rel_error") = c.max_rel_error, py::arg("checked") = c.checked,
                                    py::arg("passed") = c.passed));
            }
            return out;
        },
        py::arg("seed") = 7);
}
