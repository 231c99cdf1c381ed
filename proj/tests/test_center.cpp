#include "hie/center.hpp"
#include "hie/geometry.hpp"

#include "doctest.h"
#include "test_util.hpp"

using namespace hie;
using namespace hie::center;
using manifold::Curvature;
using manifold::Model;
using hie::testing::random_point;

namespace {

std::vector<ManifoldPoint> random_set(Model m, int n, int dim, Curvature k, std::mt19937_64& rng, double max_hdo = 2.5) {
    std::vector<ManifoldPoint> out;
    for (int i = 0; i < n; ++i) {
        out.push_back(random_point(m, dim, k, rng, max_hdo));
    }
    return out;
}

Mat stack(const std::vector<ManifoldPoint>& pts) {
    Mat m(static_cast<Eigen::Index>(pts.size()), pts.front().coords.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        m.row(static_cast<Eigen::Index>(i)) = pts[i].coords.transpose();
    }
    return m;
}

}  // namespace

TEST_CASE("singleton and symmetric sets") {
    std::mt19937_64 rng(1);
    for (const Model m : {Model::Poincare, Model::Lorentz}) {
        const ManifoldPoint x = random_point(m, 3, Curvature(-1.0), rng);
        CHECK((hyperbolic_center({{x}, {}}).coords - x.coords).norm() < 1e-12);
    }
    Vec a(2);
    a << 0.4, -0.2;
    const auto p = manifold::make_point(Model::Poincare, a);
    const ManifoldPoint mid = gyromidpoint({{p, manifold::mobius_neg(p)}, {}});
    CHECK(mid.coords.norm() < 1e-15);
    const ManifoldPoint lmid =
        lorentz_centroid({{manifold::model_convert(p), manifold::model_convert(manifold::mobius_neg(p))}, {}});
    CHECK(lmid.coords.tail(2).norm() < 1e-15);
}

TEST_CASE("gyromidpoint of two points is their geodesic midpoint") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 50; ++i) {
        const auto pts = random_set(Model::Poincare, 2, 3, Curvature(-0.8), rng);
        const ManifoldPoint m = gyromidpoint({pts, {}});
        const double d = manifold::dist(pts[0], pts[1]);
        CHECK(manifold::dist(m, pts[0]) == doctest::Approx(d / 2.0).epsilon(1e-9));
        CHECK(manifold::dist(m, pts[1]) == doctest::Approx(d / 2.0).epsilon(1e-9));
    }
}

TEST_CASE("gyromidpoint is covariant under left gyrotranslation") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 30; ++i) {
        const auto pts = random_set(Model::Poincare, 7, 4, Curvature(-1.3), rng);
        const ManifoldPoint a = random_point(Model::Poincare, 4, Curvature(-1.3), rng);
        std::vector<ManifoldPoint> moved;
        for (const auto& z : pts) {
            moved.push_back(manifold::mobius_add(a, z));
        }
        const Vec expect = manifold::mobius_add(a, gyromidpoint({pts, {}})).coords;
        CHECK((gyromidpoint({moved, {}}).coords - expect).norm() < 1e-9);
    }
}

TEST_CASE("Lorentz centroid of two points is equidistant from both") {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 30; ++i) {
        const auto pts = random_set(Model::Lorentz, 2, 3, Curvature(-2.0), rng);
        const ManifoldPoint m = lorentz_centroid({pts, {}});
        manifold::check_on_manifold(m, 1e-9);
        const double d = manifold::dist(pts[0], pts[1]);
        CHECK(manifold::dist(m, pts[0]) == doctest::Approx(d / 2.0).epsilon(1e-9));
    }
}

TEST_CASE("weights: scale invariance and validation") {
    std::mt19937_64 rng(8);
    for (const Model m : {Model::Poincare, Model::Lorentz}) {
        const auto pts = random_set(m, 5, 2, Curvature(-1.0), rng);
        Vec w(5);
        w << 1.0, 2.0, 0.5, 3.0, 1.0;
        const Vec c1 = hyperbolic_center({pts, w}).coords;
        const Vec c2 = hyperbolic_center({pts, 7.5 * w}).coords;
        CHECK((c1 - c2).norm() < 1e-12);
        Vec bad = w;
        bad(0) = -1.0;
        CHECK_THROWS_AS(hyperbolic_center({pts, bad}), Error);
        CHECK_THROWS_AS(hyperbolic_center({pts, Vec::Zero(5)}), Error);
        CHECK_THROWS_AS(hyperbolic_center({pts, Vec::Ones(4)}), Error);
    }
    CHECK_THROWS_AS(hyperbolic_center({{}, {}}), Error);
}

TEST_CASE("root alignment moves the center to the origin") {
    std::mt19937_64 rng(10);
    SUBCASE("Lorentz alignment is an isometry") {
        for (int i = 0; i < 20; ++i) {
            const auto pts = random_set(Model::Lorentz, 9, 3, Curvature(-0.6), rng);
            const ManifoldPoint c = hyperbolic_center({pts, {}});
            const auto al = align_root(pts, c);
            const ManifoldPoint c2 = hyperbolic_center({al, {}});
            CHECK(c2.coords.tail(3).norm() < 1e-9);
            CHECK(manifold::dist(al[0], al[1]) == doctest::Approx(manifold::dist(pts[0], pts[1])).epsilon(1e-9));
        }
    }
    SUBCASE("Poincare collinear sets") {
        for (int i = 0; i < 20; ++i) {
            Vec dir = hie::testing::gaussian(3, rng);
            dir.normalize();
            std::vector<ManifoldPoint> pts;
            for (int j = 0; j < 6; ++j) {
                pts.push_back(manifold::make_point(Model::Poincare, Vec(dir * hie::testing::uniform(rng, -0.9, 0.9))));
            }
            const auto al = align_root(pts, gyromidpoint({pts, {}}));
            CHECK(gyromidpoint({al, {}}).coords.norm() < 1e-6);
        }
    }
    SUBCASE("tangent vectors") {
        std::vector<Vec> t;
        for (int j = 0; j < 8; ++j) {
            t.push_back(hie::testing::gaussian(4, rng));
        }
        CHECK(tangent_mean(align_root(t, tangent_mean(t))).norm() < 1e-12);
    }
    CHECK_THROWS_AS(align_root(random_set(Model::Poincare, 2, 2, Curvature(-1.0), rng),
                               random_point(Model::Lorentz, 2, Curvature(-1.0), rng)),
                    Error);
}

TEST_CASE("centers minimize their objectives against local perturbations") {
    std::mt19937_64 rng(12);
    SUBCASE("tangent mean") {
        std::vector<Vec> t;
        for (int j = 0; j < 10; ++j) {
            t.push_back(hie::testing::gaussian(3, rng));
        }
        const Vec m = tangent_mean(t);
        const double best = sqdist_objective(t, Vec(), m);
        for (int k = 0; k < 200; ++k) {
            CHECK(sqdist_objective(t, Vec(), Vec(m + hie::testing::gaussian(3, rng, 0.1))) > best);
        }
    }
    SUBCASE("Lorentz centroid under the squared Lorentzian distance") {
        const auto pts = random_set(Model::Lorentz, 10, 3, Curvature(-1.0), rng);
        const ManifoldPoint c = lorentz_centroid({pts, {}});
        const double best = sqdist_objective({pts, {}}, c, Metric::LorentzianSq);
        for (int k = 0; k < 200; ++k) {
            const auto tv = hie::testing::random_tangent(c, rng, 0.3);
            CHECK(sqdist_objective({pts, {}}, manifold::exp_map(tv), Metric::LorentzianSq) >= best);
        }
    }
}

TEST_CASE("differentiable centers agree with the plain versions") {
    std::mt19937_64 rng(14);
    for (const Model m : {Model::Poincare, Model::Lorentz}) {
        const auto pts = random_set(m, 6, 3, Curvature(-1.7), rng);
        const ManifoldPoint c = hyperbolic_center({pts, {}});
        ad::Tape tape;
        const geo::Space s{m, Curvature(-1.7)};
        const ad::Var x = tape.constant(stack(pts));
        const ad::Var gc = geo::center(s, x);
        CHECK((gc.value().row(0).transpose() - c.coords).norm() < 1e-12);
        const Mat al = geo::align(s, x, gc).value();
        const Mat ref = stack(align_root(pts, c));
        CHECK((al - ref).norm() < 1e-9);
    }
}
