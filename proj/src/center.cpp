#include "hie/center.hpp"

#include <cmath>

namespace hie::center {

namespace {

void require_uniform(const WeightedPointSet& set, const char* op) {
    if (set.points.empty()) {
        throw Error(std::string(op) + ": empty point set");
    }
    const ManifoldPoint& first = set.points.front();
    for (const ManifoldPoint& p : set.points) {
        if (p.model != first.model || p.curvature != first.curvature ||
            p.coords.size() != first.coords.size()) {
            throw Error(std::string(op) + ": points differ in model, curvature or dimension");
        }
    }
}

Vec check_weights(const Vec& w, std::size_t n, const char* op) {
    if (w.size() == 0) {
        return Vec::Ones(static_cast<Eigen::Index>(n));
    }
    if (w.size() != static_cast<Eigen::Index>(n)) {
        throw Error(std::string(op) + ": weight count differs from point count");
    }
    if ((w.array() < 0.0).any()) {
        throw Error(std::string(op) + ": weights must be nonnegative");
    }
    if (!(w.sum() > 0.0)) {
        throw Error(std::string(op) + ": weights must have a positive sum");
    }
    return w;
}

}  // namespace

Vec WeightedPointSet::resolved_weights() const {
    return check_weights(weights, points.size(), "WeightedPointSet");
}

ManifoldPoint gyromidpoint(const WeightedPointSet& set) {
    require_uniform(set, "gyromidpoint");
    const ManifoldPoint& first = set.points.front();
    if (first.model != manifold::Model::Poincare) {
        throw Error("gyromidpoint: expects Poincare points");
    }
    const Vec w = check_weights(set.weights, set.points.size(), "gyromidpoint");
    const double kappa = first.curvature.kappa();
    Vec num = Vec::Zero(first.coords.size());
    double den = 0.0;
    for (std::size_t i = 0; i < set.points.size(); ++i) {
        const Vec& z = set.points[i].coords;
        const double lam = 2.0 / (1.0 + kappa * z.squaredNorm());
        num += w(static_cast<Eigen::Index>(i)) * lam * z;
        den += w(static_cast<Eigen::Index>(i)) * (lam - 1.0);
    }
    return manifold::mobius_scalar(0.5, {manifold::Model::Poincare, num / den, first.curvature});
}

ManifoldPoint lorentz_centroid(const WeightedPointSet& set) {
    require_uniform(set, "lorentz_centroid");
    const ManifoldPoint& first = set.points.front();
    if (first.model != manifold::Model::Lorentz) {
        throw Error("lorentz_centroid: expects Lorentz points");
    }
    const Vec w = check_weights(set.weights, set.points.size(), "lorentz_centroid");
    Vec total = Vec::Zero(first.coords.size());
    for (std::size_t i = 0; i < set.points.size(); ++i) {
        total += w(static_cast<Eigen::Index>(i)) * set.points[i].coords;
    }
    const double sq = std::abs(manifold::minkowski_inner(total, total));
    if (sq < 1e-300) {
        throw Error("lorentz_centroid: degenerate weighted sum");
    }
    const double sc = std::sqrt(first.curvature.c());
    return manifold::project({manifold::Model::Lorentz, total / (sc * std::sqrt(sq)), first.curvature});
}

ManifoldPoint hyperbolic_center(const WeightedPointSet& set) {
    require_uniform(set, "hyperbolic_center");
    switch (set.points.front().model) {
        case manifold::Model::Poincare: return gyromidpoint(set);
        case manifold::Model::Lorentz: return lorentz_centroid(set);
        case manifold::Model::Flat: {
            std::vector<Vec> coords;
            coords.reserve(set.points.size());
            for (const ManifoldPoint& p : set.points) {
                coords.push_back(p.coords);
            }
            return {manifold::Model::Flat, tangent_mean(coords, set.weights), set.points.front().curvature};
        }
    }
    return set.points.front();
}

Vec tangent_mean(const std::vector<Vec>& vectors, const Vec& weights) {
    if (vectors.empty()) {
        throw Error("tangent_mean: empty set");
    }
    const Vec w = check_weights(weights, vectors.size(), "tangent_mean");
    Vec total = Vec::Zero(vectors.front().size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != total.size()) {
            throw Error("tangent_mean: dimension mismatch");
        }
        total += w(static_cast<Eigen::Index>(i)) * vectors[i];
    }
    return total / w.sum();
}

std::vector<ManifoldPoint> align_root(const std::vector<ManifoldPoint>& embedding,
                                      const ManifoldPoint& center) {
    std::vector<ManifoldPoint> out;
    out.reserve(embedding.size());
    for (const ManifoldPoint& z : embedding) {
        if (z.model != center.model) {
            throw Error("align_root: model mismatch between embedding and center");
        }
        switch (z.model) {
            case manifold::Model::Poincare:
                out.push_back(manifold::mobius_add(z, manifold::mobius_neg(center)));
                break;
            case manifold::Model::Lorentz: {
                const manifold::ManifoldPoint o =
                    manifold::origin(manifold::Model::Lorentz, z.dim(), z.curvature);
                const auto moved = manifold::parallel_transport(manifold::log_map(center, z), o);
                // Clean the time coordinate, which is zero at the origin up to rounding.
                manifold::TangentVector at_origin = moved;
                at_origin.vec(0) = 0.0;
                out.push_back(manifold::exp_map(at_origin));
                break;
            }
            case manifold::Model::Flat:
                out.push_back({z.model, z.coords - center.coords, z.curvature});
                break;
        }
    }
    return out;
}

std::vector<Vec> align_root(const std::vector<Vec>& tangent, const Vec& center) {
    std::vector<Vec> out;
    out.reserve(tangent.size());
    for (const Vec& v : tangent) {
        if (v.size() != center.size()) {
            throw Error("align_root: dimension mismatch");
        }
        out.push_back(v - center);
    }
    return out;
}

double sqdist_objective(const WeightedPointSet& set, const ManifoldPoint& candidate, Metric metric) {
    require_uniform(set, "sqdist_objective");
    const Vec w = set.resolved_weights();
    double total = 0.0;
    for (std::size_t i = 0; i < set.points.size(); ++i) {
        const ManifoldPoint& z = set.points[i];
        double m2 = 0.0;
        switch (metric) {
            case Metric::Geodesic: {
                const double d = manifold::dist(z, candidate);
                m2 = d * d;
                break;
            }
            case Metric::LorentzianSq: {
                if (z.model != manifold::Model::Lorentz || candidate.model != manifold::Model::Lorentz) {
                    throw Error("sqdist_objective: lorentzian_sq needs Lorentz points");
                }
                m2 = 2.0 / z.curvature.kappa() - 2.0 * manifold::minkowski_inner(z.coords, candidate.coords);
                break;
            }
            case Metric::TangentEuclidean:
                if (z.coords.size() != candidate.coords.size()) {
                    throw Error("sqdist_objective: dimension mismatch");
                }
                m2 = (z.coords - candidate.coords).squaredNorm();
                break;
        }
        total += w(static_cast<Eigen::Index>(i)) * m2;
    }
    return total;
}

double sqdist_objective(const std::vector<Vec>& tangent, const Vec& weights, const Vec& candidate) {
    const Vec w = check_weights(weights, tangent.size(), "sqdist_objective");
    double total = 0.0;
    for (std::size_t i = 0; i < tangent.size(); ++i) {
        total += w(static_cast<Eigen::Index>(i)) * (tangent[i] - candidate).squaredNorm();
    }
    return total;
}

}  // namespace hie::center
