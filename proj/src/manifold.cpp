#include "hie/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hie::manifold {

namespace {

void require_hyperbolic(const ManifoldPoint& x, const char* op) {
    if (x.model == Model::Flat) {
        throw Error(std::string(op) + ": flat model not supported");
    }
    if (!(x.curvature.kappa() < 0.0)) {
        throw Error(std::string(op) + ": curvature must be negative");
    }
}

void require_poincare(const ManifoldPoint& x, const char* op) {
    if (x.model != Model::Poincare) {
        throw Error(std::string(op) + ": expects Poincare points");
    }
    require_hyperbolic(x, op);
}

void require_compatible(const ManifoldPoint& x, const ManifoldPoint& y, const char* op) {
    if (x.model != y.model) {
        throw Error(std::string(op) + ": model mismatch");
    }
    if (x.model != Model::Flat && x.curvature != y.curvature) {
        throw Error(std::string(op) + ": curvature mismatch");
    }
    if (x.coords.size() != y.coords.size()) {
        throw Error(std::string(op) + ": dimension mismatch");
    }
}

void require_tangent(const TangentVector& v, const char* op) {
    if (v.vec.size() != v.base.coords.size()) {
        throw Error(std::string(op) + ": tangent dimension mismatch");
    }
    if (v.base.model == Model::Lorentz) {
        const double defect = std::abs(minkowski_inner(v.base.coords, v.vec));
        const double scale = std::max(1.0, v.base.coords.norm() * v.vec.norm());
        if (defect > kTangentTol * scale) {
            throw Error(std::string(op) + ": vector is not tangent to the hyperboloid");
        }
    }
}

// Raw Poincare kernels on coordinates, kappa < 0.
Vec mobius_add_raw(const Vec& x, const Vec& y, double kappa) {
    const double xy = x.dot(y);
    const double x2 = x.squaredNorm();
    const double y2 = y.squaredNorm();
    const double num_x = 1.0 - 2.0 * kappa * xy - kappa * y2;
    const double num_y = 1.0 + kappa * x2;
    const double den = 1.0 - 2.0 * kappa * xy + kappa * kappa * x2 * y2;
    return (num_x * x + num_y * y) / std::max(den, 1e-15);
}

Vec gyration_raw(const Vec& u, const Vec& v, const Vec& w, double kappa) {
    const double u2 = u.squaredNorm();
    const double v2 = v.squaredNorm();
    const double uv = u.dot(v);
    const double uw = u.dot(w);
    const double vw = v.dot(w);
    const double k2 = kappa * kappa;
    const double a = -k2 * uw * v2 - kappa * vw + 2.0 * k2 * uv * vw;
    const double b = -k2 * vw * u2 + kappa * uw;
    const double d = 1.0 - 2.0 * kappa * uv + k2 * u2 * v2;
    return w + 2.0 * (a * u + b * v) / std::max(d, 1e-15);
}

double lambda_raw(const Vec& x, double kappa) { return 2.0 / (1.0 + kappa * x.squaredNorm()); }

Vec project_ball(const Vec& x, double c) {
    const double max_norm = (1.0 - kBallEps) / std::sqrt(c);
    const double n = x.norm();
    if (n > max_norm) {
        return x * (max_norm / n);
    }
    return x;
}

Vec project_hyperboloid(const Vec& x, double c) {
    Vec out = x;
    const auto d = x.size() - 1;
    out(0) = std::sqrt(1.0 / c + x.tail(d).squaredNorm());
    return out;
}

// sinh(t)/t with a series near zero.
double sinhc(double t) {
    if (std::abs(t) < 1e-6) {
        return 1.0 + t * t / 6.0;
    }
    return std::sinh(t) / t;
}

}  // namespace

std::string_view to_string(Model model) {
    switch (model) {
        case Model::Poincare: return "poincare";
        case Model::Lorentz: return "lorentz";
        case Model::Flat: return "flat";
    }
    return "unknown";
}

Model model_from_string(std::string_view name) {
    if (name == "poincare") return Model::Poincare;
    if (name == "lorentz") return Model::Lorentz;
    if (name == "flat") return Model::Flat;
    throw Error("unknown manifold model '" + std::string(name) + "'");
}

Eigen::Index ManifoldPoint::dim() const {
    return model == Model::Lorentz ? coords.size() - 1 : coords.size();
}

ManifoldPoint origin(Model model, Eigen::Index dim, Curvature curvature) {
    if (model == Model::Lorentz) {
        Vec coords = Vec::Zero(dim + 1);
        coords(0) = 1.0 / std::sqrt(curvature.c());
        return {model, coords, curvature};
    }
    return {model, Vec::Zero(dim), curvature};
}

ManifoldPoint make_point(Model model, Vec coords, Curvature curvature) {
    ManifoldPoint p{model, std::move(coords), curvature};
    if (model != Model::Flat) {
        require_hyperbolic(p, "make_point");
    }
    if (model == Model::Lorentz && p.coords.size() < 2) {
        throw Error("make_point: Lorentz coordinates need at least two entries");
    }
    return p;
}

double minkowski_inner(const Vec& u, const Vec& v) {
    if (u.size() != v.size()) {
        throw Error("minkowski_inner: length mismatch");
    }
    if (u.size() < 2) {
        throw Error("minkowski_inner: vectors need at least two entries");
    }
    const auto d = u.size() - 1;
    return -u(0) * v(0) + u.tail(d).dot(v.tail(d));
}

double conformal_factor(const ManifoldPoint& x) {
    require_poincare(x, "conformal_factor");
    return lambda_raw(x.coords, x.curvature.kappa());
}

ManifoldPoint mobius_add(const ManifoldPoint& x, const ManifoldPoint& y) {
    require_poincare(x, "mobius_add");
    require_compatible(x, y, "mobius_add");
    const double kappa = x.curvature.kappa();
    return {Model::Poincare, project_ball(mobius_add_raw(x.coords, y.coords, kappa), -kappa),
            x.curvature};
}

ManifoldPoint mobius_neg(const ManifoldPoint& x) {
    require_poincare(x, "mobius_neg");
    return {Model::Poincare, -x.coords, x.curvature};
}

ManifoldPoint mobius_scalar(double r, const ManifoldPoint& x) {
    require_poincare(x, "mobius_scalar");
    const double sc = std::sqrt(x.curvature.c());
    const double n = x.coords.norm();
    if (n == 0.0) {
        return x;
    }
    const double t = std::tanh(r * clamped_artanh(sc * n));
    return {Model::Poincare, project_ball(x.coords * (t / (sc * n)), x.curvature.c()),
            x.curvature};
}

Vec gyration(const ManifoldPoint& x, const ManifoldPoint& y, const Vec& v) {
    require_poincare(x, "gyration");
    require_compatible(x, y, "gyration");
    if (v.size() != x.coords.size()) {
        throw Error("gyration: dimension mismatch");
    }
    return gyration_raw(x.coords, y.coords, v, x.curvature.kappa());
}

double clamped_acosh(double x) { return std::acosh(std::max(x, kAcoshMin)); }

double clamped_artanh(double x) {
    return std::atanh(std::clamp(x, -kArtanhMax, kArtanhMax));
}

double dist(const ManifoldPoint& x, const ManifoldPoint& y) {
    require_compatible(x, y, "dist");
    switch (x.model) {
        case Model::Flat: return (x.coords - y.coords).norm();
        case Model::Poincare: {
            const double sc = std::sqrt(x.curvature.c());
            const Vec u = mobius_add_raw(-x.coords, y.coords, x.curvature.kappa());
            return 2.0 / sc * clamped_artanh(sc * u.norm());
        }
        case Model::Lorentz: {
            // acosh(-c<x,y>) rewritten through the Minkowski chord length,
            // which stays accurate for nearby points.
            const double sc = std::sqrt(x.curvature.c());
            const Vec diff = x.coords - y.coords;
            const double chord = std::sqrt(std::max(minkowski_inner(diff, diff), 0.0));
            return 2.0 / sc * std::asinh(sc * chord / 2.0);
        }
    }
    return 0.0;
}

ManifoldPoint exp_map(const TangentVector& v) {
    require_tangent(v, "exp_map");
    const ManifoldPoint& x = v.base;
    switch (x.model) {
        case Model::Flat: return {Model::Flat, x.coords + v.vec, x.curvature};
        case Model::Poincare: {
            require_hyperbolic(x, "exp_map");
            const double kappa = x.curvature.kappa();
            const double sc = std::sqrt(-kappa);
            const double n = v.vec.norm();
            if (n == 0.0) {
                return x;
            }
            const double lam = lambda_raw(x.coords, kappa);
            const Vec step = std::tanh(sc * lam * n / 2.0) * v.vec / (sc * n);
            return {Model::Poincare, project_ball(mobius_add_raw(x.coords, step, kappa), -kappa),
                    x.curvature};
        }
        case Model::Lorentz: {
            require_hyperbolic(x, "exp_map");
            const double c = x.curvature.c();
            const double n = std::sqrt(std::max(minkowski_inner(v.vec, v.vec), 0.0));
            const double t = std::sqrt(c) * n;
            return {Model::Lorentz, project_hyperboloid(std::cosh(t) * x.coords + sinhc(t) * v.vec, c),
                    x.curvature};
        }
    }
    return x;
}

TangentVector log_map(const ManifoldPoint& x, const ManifoldPoint& y) {
    require_compatible(x, y, "log_map");
    switch (x.model) {
        case Model::Flat: return {x, y.coords - x.coords};
        case Model::Poincare: {
            const double kappa = x.curvature.kappa();
            const double sc = std::sqrt(-kappa);
            const Vec u = mobius_add_raw(-x.coords, y.coords, kappa);
            const double n = u.norm();
            if (n == 0.0) {
                return {x, Vec::Zero(x.coords.size())};
            }
            const double lam = lambda_raw(x.coords, kappa);
            return {x, (2.0 / (sc * lam)) * clamped_artanh(sc * n) * u / n};
        }
        case Model::Lorentz: {
            const double c = x.curvature.c();
            const double sc = std::sqrt(c);
            const Vec diff = y.coords - x.coords;
            const double chord2 = std::max(minkowski_inner(diff, diff), 0.0);
            if (chord2 == 0.0) {
                return {x, Vec::Zero(x.coords.size())};
            }
            // u = y + c<x,y>x = (y - x) - (c/2)|y - x|_L^2 x, |u|_L = sinh(sqrt(c) d)/sqrt(c)
            const Vec u = diff - (c / 2.0) * chord2 * x.coords;
            const double t = 2.0 * std::asinh(sc * std::sqrt(chord2) / 2.0);
            return {x, u / sinhc(t)};
        }
    }
    return {x, Vec::Zero(x.coords.size())};
}

TangentVector parallel_transport(const TangentVector& v, const ManifoldPoint& y) {
    require_tangent(v, "parallel_transport");
    const ManifoldPoint& x = v.base;
    require_compatible(x, y, "parallel_transport");
    switch (x.model) {
        case Model::Flat: return {y, v.vec};
        case Model::Poincare: {
            const double kappa = x.curvature.kappa();
            const double scale = lambda_raw(x.coords, kappa) / lambda_raw(y.coords, kappa);
            return {y, scale * gyration_raw(y.coords, -x.coords, v.vec, kappa)};
        }
        case Model::Lorentz: {
            const double c = x.curvature.c();
            const double yv = minkowski_inner(y.coords, v.vec);
            const double xy = minkowski_inner(x.coords, y.coords);
            return {y, v.vec + (c * yv / (1.0 - c * xy)) * (x.coords + y.coords)};
        }
    }
    return {y, v.vec};
}

double inner(const TangentVector& u, const TangentVector& v) {
    if (u.base.model != v.base.model || u.vec.size() != v.vec.size()) {
        throw Error("inner: incompatible tangent vectors");
    }
    switch (u.base.model) {
        case Model::Flat: return u.vec.dot(v.vec);
        case Model::Poincare: {
            const double lam = lambda_raw(u.base.coords, u.base.curvature.kappa());
            return lam * lam * u.vec.dot(v.vec);
        }
        case Model::Lorentz: return minkowski_inner(u.vec, v.vec);
    }
    return 0.0;
}

double norm(const TangentVector& v) { return std::sqrt(std::max(inner(v, v), 0.0)); }

ManifoldPoint project(const ManifoldPoint& x) {
    switch (x.model) {
        case Model::Flat: return x;
        case Model::Poincare: return {x.model, project_ball(x.coords, x.curvature.c()), x.curvature};
        case Model::Lorentz:
            return {x.model, project_hyperboloid(x.coords, x.curvature.c()), x.curvature};
    }
    return x;
}

ManifoldPoint model_convert(const ManifoldPoint& x) {
    require_hyperbolic(x, "model_convert");
    const double c = x.curvature.c();
    const double sc = std::sqrt(c);
    if (x.model == Model::Poincare) {
        const double p2 = x.coords.squaredNorm();
        const double den = 1.0 - c * p2;
        Vec out(x.coords.size() + 1);
        out(0) = (1.0 + c * p2) / (sc * den);
        out.tail(x.coords.size()) = 2.0 * x.coords / den;
        return {Model::Lorentz, project_hyperboloid(out, c), x.curvature};
    }
    const auto d = x.coords.size() - 1;
    const Vec p = x.coords.tail(d) / (1.0 + sc * x.coords(0));
    return {Model::Poincare, project_ball(p, c), x.curvature};
}

void check_on_manifold(const ManifoldPoint& x, double tol) {
    switch (x.model) {
        case Model::Flat: return;
        case Model::Poincare: {
            if (x.coords.norm() >= 1.0 / std::sqrt(x.curvature.c())) {
                throw Error("point lies outside the Poincare ball");
            }
            return;
        }
        case Model::Lorentz: {
            const double defect =
                std::abs(minkowski_inner(x.coords, x.coords) - 1.0 / x.curvature.kappa());
            const double scale = std::max(1.0, x.coords.squaredNorm());
            if (defect > tol * scale || x.coords(0) <= 0.0) {
                throw Error("point violates the hyperboloid constraint");
            }
            return;
        }
    }
}

}  // namespace hie::manifold
