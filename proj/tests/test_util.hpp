#pragma once

// Random sampling helpers shared by the unit and acceptance tests.

#include "hie/manifold.hpp"

#include <random>

namespace hie::testing {

using manifold::Curvature;
using manifold::ManifoldPoint;
using manifold::Model;
using manifold::TangentVector;

inline Vec gaussian(Eigen::Index n, std::mt19937_64& rng, double sd = 1.0) {
    std::normal_distribution<double> g(0.0, sd);
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = g(rng);
    }
    return v;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Tangent vector at the origin in the model's ambient coordinates.
inline TangentVector origin_tangent(Model model, Eigen::Index dim, Curvature k, const Vec& v) {
    TangentVector t{manifold::origin(model, dim, k), Vec()};
    if (model == Model::Lorentz) {
        t.vec = Vec::Zero(dim + 1);
        t.vec.tail(dim) = v;
    } else {
        t.vec = v;
    }
    return t;
}

/// Point whose distance to the origin is uniform in [0, max_hdo].
inline ManifoldPoint random_point(Model model, Eigen::Index dim, Curvature k, std::mt19937_64& rng,
                                  double max_hdo = 3.0) {
    Vec dir = gaussian(dim, rng);
    dir.normalize();
    const double r = uniform(rng, 0.0, max_hdo);
    // Riemannian norm at the origin is lambda_o |v| = 2|v| in the ball.
    const double scale = model == Model::Poincare ? r / 2.0 : r;
    return manifold::exp_map(origin_tangent(model, dim, k, dir * scale));
}

/// Tangent vector at x with Riemannian norm uniform in [0, max_norm].
inline TangentVector random_tangent(const ManifoldPoint& x, std::mt19937_64& rng, double max_norm = 2.0) {
    const Eigen::Index dim = x.dim();
    Vec dir = gaussian(dim, rng);
    dir.normalize();
    const double r = uniform(rng, 0.0, max_norm);
    const double scale = x.model == Model::Poincare ? r / 2.0 : r;
    const TangentVector at_o = origin_tangent(x.model, dim, x.curvature, dir * scale);
    return manifold::parallel_transport(at_o, x);
}

}  // namespace hie::testing
