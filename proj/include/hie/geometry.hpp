#pragma once

// Differentiable, row-batched manifold kernels. Each row of a Var is one
// point (ambient coordinates) or one tangent vector. Tangent vectors at the
// origin are stored in intrinsic coordinates (d columns) for every model;
// for Lorentz that drops the zero time component.

#include "hie/autodiff.hpp"
#include "hie/manifold.hpp"

namespace hie::geo {

using ad::Index;
using ad::Var;
using manifold::Curvature;
using manifold::Model;

struct Space {
    Model model = Model::Poincare;
    Curvature curvature;

    double c() const { return curvature.c(); }
    Index ambient(Index dim) const { return model == Model::Lorentz ? dim + 1 : dim; }
    Index intrinsic(Index ambient_cols) const {
        return model == Model::Lorentz ? ambient_cols - 1 : ambient_cols;
    }
};

/// Origin as a 1 x ambient constant row.
Var origin_row(const Space& s, ad::Tape& tape, Index dim);

Var proj(const Space& s, const Var& x);
Var expmap0(const Space& s, const Var& v);
Var logmap0(const Space& s, const Var& x);
/// Distance of each row to the origin (HDO), n x 1.
Var dist0(const Space& s, const Var& x);
/// Row-wise distance; `y` may be a single broadcast row.
Var dist(const Space& s, const Var& x, const Var& y);

/// Poincare only.
Var mobius_add(const Space& s, const Var& x, const Var& y);
Var mobius_scalar(const Space& s, double r, const Var& x);

/// exp_x(u) with u an ambient tangent vector at x.
Var expmap(const Space& s, const Var& x, const Var& u);
/// Parallel transport of origin-tangent vectors (intrinsic coordinates) to x.
Var ptransp0(const Space& s, const Var& x, const Var& v);
/// x (+) b := exp_x(PT_{o->x}(b)).
Var bias_add(const Space& s, const Var& x, const Var& b);

/// Weighted center of the rows: gyromidpoint (Poincare), Lorentzian centroid
/// (Lorentz) or arithmetic mean (Flat). `weights` is n x 1 or empty for ones.
Var center(const Space& s, const Var& x, const Mat& weights = Mat());
/// Moves `c` (1 x ambient) to the origin: x (+) (-c) in the Poincare ball,
/// exp_o(PT_{c->o}(log_c(x))) on the hyperboloid, x - c in flat space.
Var align(const Space& s, const Var& x, const Var& c);

/// Weighted row mean of tangent vectors, 1 x d.
Var tangent_mean(const Var& v, const Mat& weights = Mat());

}  // namespace hie::geo
