#pragma once

// Closed-form Riemannian operations for the Poincare ball, the Lorentz
// (hyperboloid) model and a flat Euclidean fallback.
//
// Conventions: curvature kappa < 0 and c = -kappa. A Poincare point lives in
// the open ball of radius 1/sqrt(c); a Lorentz point x in R^{d+1} satisfies
// <x,x>_L = 1/kappa with x_0 > 0. Flat points ignore curvature.

#include "hie/common.hpp"

#include <string_view>

namespace hie::manifold {

enum class Model { Poincare, Lorentz, Flat };

std::string_view to_string(Model model);
Model model_from_string(std::string_view name);

/// Norm margin kept from the Poincare boundary after projection.
inline constexpr double kBallEps = 1e-5;
inline constexpr double kAcoshMin = 1.0 + 1e-15;
inline constexpr double kArtanhMax = 1.0 - 1e-15;
/// Absolute tolerance for the Lorentz tangency check, scaled by |x||v|.
inline constexpr double kTangentTol = 1e-6;

class Curvature {
public:
    constexpr Curvature() = default;
    constexpr explicit Curvature(double kappa) : kappa_(kappa) {}

    constexpr double kappa() const { return kappa_; }
    /// Positive magnitude -kappa.
    constexpr double c() const { return -kappa_; }

    friend constexpr bool operator==(Curvature, Curvature) = default;

private:
    double kappa_ = -1.0;
};

struct ManifoldPoint {
    Model model = Model::Poincare;
    Vec coords;
    Curvature curvature;

    /// Intrinsic dimension (ambient size minus one for Lorentz).
    Eigen::Index dim() const;
};

struct TangentVector {
    ManifoldPoint base;
    Vec vec;
};

ManifoldPoint origin(Model model, Eigen::Index dim, Curvature curvature = Curvature{});
ManifoldPoint make_point(Model model, Vec coords, Curvature curvature = Curvature{});

/// -u_0 v_0 + sum_{i>=1} u_i v_i
double minkowski_inner(const Vec& u, const Vec& v);

/// lambda_x = 2 / (1 + kappa |x|^2)
double conformal_factor(const ManifoldPoint& x);

ManifoldPoint mobius_add(const ManifoldPoint& x, const ManifoldPoint& y);
ManifoldPoint mobius_neg(const ManifoldPoint& x);
/// r (x) x = tanh(r artanh(sqrt(c)|x|)) x / (sqrt(c)|x|)
ManifoldPoint mobius_scalar(double r, const ManifoldPoint& x);
/// gyr[x, y] v, evaluated with the closed linear form so v may be any vector.
Vec gyration(const ManifoldPoint& x, const ManifoldPoint& y, const Vec& v);

double dist(const ManifoldPoint& x, const ManifoldPoint& y);
ManifoldPoint exp_map(const TangentVector& v);
TangentVector log_map(const ManifoldPoint& x, const ManifoldPoint& y);
TangentVector parallel_transport(const TangentVector& v, const ManifoldPoint& y);

/// Riemannian inner product of two tangent vectors at the same base point.
double inner(const TangentVector& u, const TangentVector& v);
double norm(const TangentVector& v);

ManifoldPoint project(const ManifoldPoint& x);
/// Poincare <-> Lorentz isometry at the same curvature.
ManifoldPoint model_convert(const ManifoldPoint& x);

/// Throws if the point violates its model invariant by more than `tol`.
void check_on_manifold(const ManifoldPoint& x, double tol = 1e-9);

/// Stable scalar kernels shared with the differentiable geometry.
double clamped_acosh(double x);
double clamped_artanh(double x);

}  // namespace hie::manifold
