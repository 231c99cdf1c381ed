#include "hie/geometry.hpp"

#include <cmath>

namespace hie::geo {

namespace {

constexpr double kNormFloor = 1e-15;
constexpr double kChordFloor = 1e-30;
// Caps sqrt(c)|v| in Lorentz exponential maps so sinh/cosh stay well scaled.
constexpr double kLorentzMaxArg = 20.0;

Var constant(const Var& like, Mat m) { return like.tape()->constant(std::move(m)); }

Var reciprocal(const Var& a) { return div(a.tape()->constant(1.0), a); }

Index time_free_cols(const Var& x) { return x.cols() - 1; }

Var spatial(const Var& x) { return ad::slice_cols(x, 1, time_free_cols(x)); }

Var time(const Var& x) { return ad::slice_cols(x, 0, 1); }

/// Row-wise Minkowski inner product; `b` may broadcast.
Var minkowski(const Var& a, const Var& b) {
    Mat sign = Mat::Ones(1, a.cols());
    sign(0, 0) = -1.0;
    return ad::row_dot(mul(a, constant(a, sign)), b);
}

Var weights_or_ones(const Var& x, const Mat& weights) {
    if (weights.size() == 0) {
        return constant(x, Mat::Ones(x.rows(), 1));
    }
    if (weights.rows() != x.rows() || weights.cols() != 1) {
        throw Error("center: weights must be an n x 1 column");
    }
    if ((weights.array() < 0.0).any() || !(weights.sum() > 0.0)) {
        throw Error("center: weights must be nonnegative with a positive sum");
    }
    return constant(x, weights);
}

void require_poincare(const Space& s, const char* op) {
    if (s.model != Model::Poincare) {
        throw Error(std::string(op) + " is defined for the Poincare ball only");
    }
}

}  // namespace

Var origin_row(const Space& s, ad::Tape& tape, Index dim) {
    Mat o = Mat::Zero(1, s.ambient(dim));
    if (s.model == Model::Lorentz) {
        o(0, 0) = 1.0 / std::sqrt(s.c());
    }
    return tape.constant(std::move(o));
}

Var proj(const Space& s, const Var& x) {
    switch (s.model) {
        case Model::Flat: return x;
        case Model::Poincare: {
            const double max_norm = (1.0 - manifold::kBallEps) / std::sqrt(s.c());
            const Var n = ad::clamp_min(ad::row_norm(x), max_norm);
            return mul(x, scale(reciprocal(n), max_norm));
        }
        case Model::Lorentz: {
            const Var xs = spatial(x);
            const Var x0 = ad::sqrt(ad::row_sqnorm(xs) + 1.0 / s.c());
            return ad::concat_cols(x0, xs);
        }
    }
    return x;
}

Var expmap0(const Space& s, const Var& v) {
    const double sc = std::sqrt(s.c());
    switch (s.model) {
        case Model::Flat: return v;
        case Model::Poincare: {
            const Var n = scale(ad::clamp_min(ad::row_norm(v), kNormFloor), sc);
            return proj(s, mul(v, div(ad::tanh(n), n)));
        }
        case Model::Lorentz: {
            const Var t = scale(ad::clamp_min(ad::row_norm(v), kNormFloor), sc);
            const Var xs = mul(v, div(ad::sinh(ad::clamp_max(t, kLorentzMaxArg)), t));
            return proj(s, ad::concat_cols(constant(v, Mat::Zero(v.rows(), 1)), xs));
        }
    }
    return v;
}

Var logmap0(const Space& s, const Var& x) {
    const double sc = std::sqrt(s.c());
    switch (s.model) {
        case Model::Flat: return x;
        case Model::Poincare: {
            const Var n = scale(ad::clamp_min(ad::row_norm(x), kNormFloor), sc);
            return mul(x, div(ad::artanh(ad::clamp_max(n, manifold::kArtanhMax)), n));
        }
        case Model::Lorentz: {
            const Var xs = spatial(x);
            const Var n = scale(ad::clamp_min(ad::row_norm(xs), kNormFloor), sc);
            return mul(xs, div(ad::asinh(n), n));
        }
    }
    return x;
}

Var dist0(const Space& s, const Var& x) {
    const double sc = std::sqrt(s.c());
    switch (s.model) {
        case Model::Flat: return ad::row_norm(x);
        case Model::Poincare:
            return scale(ad::artanh(ad::clamp_max(scale(ad::row_norm(x), sc), manifold::kArtanhMax)),
                         2.0 / sc);
        case Model::Lorentz: return scale(ad::asinh(scale(ad::row_norm(spatial(x)), sc)), 1.0 / sc);
    }
    return x;
}

Var dist(const Space& s, const Var& x, const Var& y) {
    const double sc = std::sqrt(s.c());
    switch (s.model) {
        case Model::Flat: return ad::row_norm(sub(x, y));
        case Model::Poincare: {
            const Var u = mobius_add(s, neg(x), y);
            return scale(ad::artanh(ad::clamp_max(scale(ad::row_norm(u), sc), manifold::kArtanhMax)),
                         2.0 / sc);
        }
        case Model::Lorentz: {
            const Var diff = sub(x, y);
            const Var chord = ad::sqrt(ad::clamp_min(minkowski(diff, diff), kChordFloor));
            return scale(ad::asinh(scale(chord, sc / 2.0)), 2.0 / sc);
        }
    }
    return x;
}

Var mobius_add(const Space& s, const Var& x, const Var& y) {
    require_poincare(s, "mobius_add");
    const double c = s.c();
    const Var xy = ad::row_dot(x, y);
    const Var x2 = ad::row_sqnorm(x);
    const Var y2 = ad::row_sqnorm(y);
    const Var coef_x = 1.0 + scale(xy, 2.0 * c) + scale(y2, c);
    const Var coef_y = 1.0 - scale(x2, c);
    const Var den = 1.0 + scale(xy, 2.0 * c) + scale(mul(x2, y2), c * c);
    const Var num = add(mul(coef_x, x), mul(coef_y, y));
    return div(num, ad::clamp_min(den, 1e-15));
}

Var mobius_scalar(const Space& s, double r, const Var& x) {
    require_poincare(s, "mobius_scalar");
    const double sc = std::sqrt(s.c());
    const Var n = scale(ad::clamp_min(ad::row_norm(x), kNormFloor), sc);
    const Var t = ad::tanh(scale(ad::artanh(ad::clamp_max(n, manifold::kArtanhMax)), r));
    return proj(s, mul(x, div(t, n)));
}

Var expmap(const Space& s, const Var& x, const Var& u) {
    const double c = s.c();
    const double sc = std::sqrt(c);
    switch (s.model) {
        case Model::Flat: return add(x, u);
        case Model::Poincare: {
            const Var lam = scale(reciprocal(1.0 - scale(ad::row_sqnorm(x), c)), 2.0);
            const Var n = scale(ad::clamp_min(ad::row_norm(u), kNormFloor), sc);
            const Var step = mul(u, div(ad::tanh(scale(mul(lam, n), 0.5)), n));
            return proj(s, mobius_add(s, x, step));
        }
        case Model::Lorentz: {
            const Var t = scale(ad::sqrt(ad::clamp_min(minkowski(u, u), kChordFloor)), sc);
            const Var tc = ad::clamp_max(t, kLorentzMaxArg);
            return proj(s, add(mul(ad::cosh(tc), x), mul(u, div(ad::sinh(tc), t))));
        }
    }
    return x;
}

Var ptransp0(const Space& s, const Var& x, const Var& v) {
    const double c = s.c();
    switch (s.model) {
        case Model::Flat: return v;
        case Model::Poincare:
            // lambda_o / lambda_x * gyr[x, 0] v = (1 - c|x|^2) v
            return mul(1.0 - scale(ad::row_sqnorm(x), c), v);
        case Model::Lorentz: {
            const double sc = std::sqrt(c);
            const Var amb = ad::concat_cols(constant(v, Mat::Zero(v.rows(), 1)), v);
            const Var xv = ad::row_dot(spatial(x), v);
            const Var coef = div(scale(xv, c), 1.0 + scale(time(x), sc));
            const Var o = origin_row(s, *x.tape(), time_free_cols(x));
            return add(amb, mul(coef, add(x, o)));
        }
    }
    return v;
}

Var bias_add(const Space& s, const Var& x, const Var& b) { return expmap(s, x, ptransp0(s, x, b)); }

Var center(const Space& s, const Var& x, const Mat& weights) {
    const Var w = weights_or_ones(x, weights);
    const double c = s.c();
    switch (s.model) {
        case Model::Flat: return div(ad::col_sum(mul(w, x)), ad::sum(w));
        case Model::Poincare: {
            const Var lam = scale(reciprocal(1.0 - scale(ad::row_sqnorm(x), c)), 2.0);
            const Var num = ad::col_sum(mul(mul(w, lam), x));
            const Var den = ad::sum(mul(w, lam - 1.0));
            return mobius_scalar(s, 0.5, div(num, den));
        }
        case Model::Lorentz: {
            const Var total = ad::col_sum(mul(w, x));
            const Var norm = ad::sqrt(ad::clamp_min(neg(minkowski(total, total)), kChordFloor));
            return proj(s, div(total, scale(norm, std::sqrt(c))));
        }
    }
    return x;
}

Var align(const Space& s, const Var& x, const Var& c) {
    switch (s.model) {
        case Model::Flat: return sub(x, c);
        case Model::Poincare: return proj(s, mobius_add(s, x, neg(c)));
        case Model::Lorentz: {
            const double k = s.c();
            const double sc = std::sqrt(k);
            const Var diff = sub(x, c);
            const Var chord2 = ad::clamp_min(minkowski(diff, diff), kChordFloor);
            const Var u = sub(diff, mul(scale(chord2, k / 2.0), c));
            const Var t = scale(ad::asinh(scale(ad::sqrt(chord2), sc / 2.0)), 2.0);
            const Var logv = mul(u, div(t, ad::sinh(t)));
            // PT_{c->o}(v) = v - sqrt(k) v_0 / (1 + sqrt(k) c_0) (c + o)
            const Var coef = div(scale(time(logv), -sc), 1.0 + scale(time(c), sc));
            const Var o = origin_row(s, *x.tape(), time_free_cols(x));
            const Var moved = add(logv, mul(coef, add(c, o)));
            return expmap0(s, spatial(moved));
        }
    }
    return x;
}

Var tangent_mean(const Var& v, const Mat& weights) {
    const Var w = weights_or_ones(v, weights);
    return div(ad::col_sum(mul(w, v)), ad::sum(w));
}

}  // namespace hie::geo
