#pragma once

// Hyperbolic embedding centers and root alignment on plain point sets.

#include "hie/manifold.hpp"

#include <vector>

namespace hie::center {

using manifold::ManifoldPoint;

struct WeightedPointSet {
    std::vector<ManifoldPoint> points;
    /// Empty means all ones.
    Vec weights;

    Vec resolved_weights() const;
};

enum class Metric {
    Geodesic,          ///< d_H(z, a)^2
    LorentzianSq,      ///< |z - a|_L^2 = 2/kappa - 2<z, a>_L
    TangentEuclidean,  ///< |z - a|^2 on raw coordinates
};

/// (1/2) (x) (sum v_i lambda_i z_i / sum v_i (lambda_i - 1)).
ManifoldPoint gyromidpoint(const WeightedPointSet& set);
/// sum v_i z_i / (sqrt(|kappa|) |<s, s>_L|^{1/2}).
ManifoldPoint lorentz_centroid(const WeightedPointSet& set);
/// Dispatches on the model of the set (Flat uses the arithmetic mean).
ManifoldPoint hyperbolic_center(const WeightedPointSet& set);

Vec tangent_mean(const std::vector<Vec>& vectors, const Vec& weights = Vec());

/// Moves `center` to the origin for every point.
std::vector<ManifoldPoint> align_root(const std::vector<ManifoldPoint>& embedding,
                                      const ManifoldPoint& center);
std::vector<Vec> align_root(const std::vector<Vec>& tangent, const Vec& center);

double sqdist_objective(const WeightedPointSet& set, const ManifoldPoint& candidate, Metric metric);
double sqdist_objective(const std::vector<Vec>& tangent, const Vec& weights, const Vec& candidate);

}  // namespace hie::center
