#include "hie/autodiff.hpp"

#include "doctest.h"
#include "test_util.hpp"

#include <cmath>

using namespace hie;
using namespace hie::ad;

namespace {

Mat rand_mat(Index r, Index c, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    Mat m(r, c);
    for (Index i = 0; i < m.size(); ++i) {
        m(i) = hie::testing::uniform(rng, lo, hi);
    }
    return m;
}

void expect_fd(const ScalarFunction& f, const std::vector<Mat>& inputs, double tol = 1e-6) {
    const auto rep = grad_check(f, inputs, 1e-6, tol, 1e-6);
    INFO("max rel error " << rep.max_rel_error);
    CHECK(rep.passed());
    CHECK(rep.checked > 0);
}

}  // namespace

TEST_CASE("closed-form gradients") {
    Tape t;
    Mat xv(2, 2);
    xv << 1.0, -2.0, 3.0, 0.5;
    const Var x = t.leaf(xv);
    t.backward(sum(square(x)));
    CHECK((t.grad(x) - 2.0 * xv).norm() < 1e-15);

    Tape t2;
    const Var a = t2.leaf(Mat::Constant(1, 1, 0.3));
    const Var y = mul(exp(a), sinh(a));
    t2.backward(y);
    const double e = std::exp(0.3);
    CHECK(t2.grad(a)(0, 0) == doctest::Approx(e * std::sinh(0.3) + e * std::cosh(0.3)).epsilon(1e-14));
}

TEST_CASE("unary primitives match finite differences") {
    std::mt19937_64 rng(1);
    using Fn = Var (*)(const Var&);
    const std::pair<const char*, Fn> fns[] = {
        {"exp", ad::exp},   {"tanh", ad::tanh},       {"cosh", ad::cosh},     {"sinh", ad::sinh},
        {"asinh", ad::asinh}, {"square", ad::square}, {"sigmoid", ad::sigmoid}, {"softplus", ad::softplus},
        {"neg", ad::neg},   {"row_norm", ad::row_norm}, {"row_sqnorm", ad::row_sqnorm},
    };
    for (const auto& [name, fn] : fns) {
        INFO(name);
        const Mat r = rand_mat(3, 4, rng);
        expect_fd([fn, r](Tape& tape, std::span<const Var> in) {
            return sum(mul(fn(in[0]), tape.constant(r.col(0))));
        }, {rand_mat(3, 4, rng)});
    }
    // Domain-restricted functions.
    expect_fd([](Tape&, std::span<const Var> in) { return sum(ad::log(in[0])); }, {rand_mat(2, 3, rng, 0.5, 2.0)});
    expect_fd([](Tape&, std::span<const Var> in) { return sum(ad::sqrt(in[0])); }, {rand_mat(2, 3, rng, 0.5, 2.0)});
    expect_fd([](Tape&, std::span<const Var> in) { return sum(ad::acosh(in[0])); }, {rand_mat(2, 3, rng, 1.5, 3.0)});
    expect_fd([](Tape&, std::span<const Var> in) { return sum(ad::artanh(in[0])); }, {rand_mat(2, 3, rng, -0.8, 0.8)});
}

TEST_CASE("binary primitives broadcast and differentiate") {
    std::mt19937_64 rng(2);
    const Index shapes[][2] = {{3, 4}, {1, 4}, {3, 1}, {1, 1}};
    for (const auto& sh : shapes) {
        const std::vector<Mat> in = {rand_mat(3, 4, rng), rand_mat(sh[0], sh[1], rng, 0.5, 1.5)};
        expect_fd([](Tape&, std::span<const Var> v) { return sum(square(add(v[0], v[1]))); }, in);
        expect_fd([](Tape&, std::span<const Var> v) { return sum(square(sub(v[1], v[0]))); }, in);
        expect_fd([](Tape&, std::span<const Var> v) { return sum(mul(v[0], v[1])); }, in);
        expect_fd([](Tape&, std::span<const Var> v) { return sum(div(v[0], v[1])); }, in);
    }
    Tape t;
    CHECK_THROWS_AS(add(t.constant(Mat::Zero(2, 3)), t.constant(Mat::Zero(3, 2))), Error);
}

TEST_CASE("linear algebra, reductions and structure") {
    std::mt19937_64 rng(3);
    expect_fd([](Tape&, std::span<const Var> v) { return sum(square(matmul(v[0], transpose(v[1])))); },
              {rand_mat(3, 4, rng), rand_mat(2, 4, rng)});
    expect_fd([](Tape&, std::span<const Var> v) {
        return add(mean(mul(row_sum(v[0]), v[0])), sum(square(col_sum(v[0]))));
    }, {rand_mat(3, 2, rng)});
    expect_fd([](Tape&, std::span<const Var> v) { return sum(square(row_dot(v[0], v[1]))); },
              {rand_mat(4, 3, rng), rand_mat(4, 3, rng)});
    expect_fd([](Tape&, std::span<const Var> v) {
        return sum(square(concat_cols(slice_cols(v[0], 1, 2), v[1])));
    }, {rand_mat(3, 4, rng), rand_mat(3, 1, rng)});
    const std::vector<int> idx = {2, 0, 2, 1};
    expect_fd([idx](Tape&, std::span<const Var> v) {
        return sum(square(scatter_add_rows(gather_rows(v[0], idx), idx, 4)));
    }, {rand_mat(3, 2, rng)});

    SparseMat sp(3, 3);
    sp.insert(0, 1) = 0.5;
    sp.insert(1, 1) = 2.0;
    sp.insert(2, 0) = -1.0;
    sp.makeCompressed();
    expect_fd([sp](Tape&, std::span<const Var> v) { return sum(square(spmm(sp, v[0]))); }, {rand_mat(3, 2, rng)});
}

TEST_CASE("softmax variants") {
    std::mt19937_64 rng(4);
    Tape t;
    const Var x = t.constant(rand_mat(3, 5, rng, -3.0, 3.0));
    const Mat s = softmax_rows(x).value();
    CHECK((s.rowwise().sum() - Vec::Ones(3)).norm() < 1e-15);
    CHECK((log_softmax_rows(x).value().array().exp().matrix() - s).norm() < 1e-14);
    const Mat big = softmax_rows(t.constant(Mat::Constant(1, 2, 1000.0))).value();
    CHECK(big(0, 0) == doctest::Approx(0.5));

    const std::vector<int> seg = {0, 1, 0, 2, 1, 0};
    const Mat w = segment_softmax(t.constant(rand_mat(6, 1, rng)), seg, 3).value();
    CHECK(w(0) + w(2) + w(5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(w(1) + w(4) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(w(3) == doctest::Approx(1.0));

    const Mat r = rand_mat(3, 5, rng);
    expect_fd([r](Tape& tape, std::span<const Var> v) { return sum(mul(log_softmax_rows(v[0]), tape.constant(r))); },
              {rand_mat(3, 5, rng)});
    expect_fd([seg](Tape&, std::span<const Var> v) { return sum(square(segment_softmax(v[0], seg, 3))); },
              {rand_mat(6, 1, rng)});
}

TEST_CASE("softplus is stable") {
    Tape t;
    Mat x(1, 3);
    x << -800.0, 0.0, 800.0;
    const Mat v = softplus(t.constant(x)).value();
    CHECK(v(0, 0) == doctest::Approx(0.0));
    CHECK(v(0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(v(0, 2) == doctest::Approx(800.0));
}

TEST_CASE("clamps, relu and detach cut gradients") {
    Tape t;
    Mat xv(1, 4);
    xv << -2.0, -0.5, 0.5, 2.0;
    const Var x = t.leaf(xv);
    const Var y = add(add(clamp(x, -1.0, 1.0), relu(x)), mul(detach(x), x));
    t.backward(sum(y));
    Mat expect(1, 4);
    // clamp' + relu' + detached x
    expect << 0.0 + 0.0 - 2.0, 1.0 + 0.0 - 0.5, 1.0 + 1.0 + 0.5, 0.0 + 1.0 + 2.0;
    CHECK((t.grad(x) - expect).norm() < 1e-15);
}

TEST_CASE("tape contracts") {
    Tape t;
    const Var x = t.leaf(Mat::Ones(2, 2));
    CHECK_THROWS_AS(t.backward(x), Error);
    const Var unused = t.leaf(Mat::Ones(1, 1));
    t.backward(sum(x));
    CHECK(t.grad(unused).norm() == 0.0);

    // A non-finite gradient is reported, not propagated.
    Tape t2;
    const Var z = t2.leaf(Mat::Zero(1, 1));
    CHECK_THROWS_AS(t2.backward(sum(ad::sqrt(z))), Error);

    // Repeated backward passes reset gradients.
    Tape t3;
    const Var w = t3.leaf(Mat::Constant(1, 1, 3.0));
    const Var l = square(w);
    t3.backward(l);
    t3.backward(l);
    CHECK(t3.grad(w)(0, 0) == doctest::Approx(6.0));
}

TEST_CASE("gradient helper and grad_check detect wrong gradients") {
    Tape t;
    const Var a = t.leaf(Mat::Constant(1, 1, 2.0));
    const Var b = t.leaf(Mat::Constant(1, 1, 5.0));
    const std::vector<Var> in = {a, b};
    const auto g = gradient(mul(a, b), in);
    CHECK(g[0](0, 0) == 5.0);
    CHECK(g[1](0, 0) == 2.0);

    // Detaching makes the tape gradient disagree with plain finite differences.
    const auto rep = grad_check([](Tape&, std::span<const Var> v) { return sum(mul(detach(v[0]), v[0])); },
                                std::vector<Mat>{Mat::Constant(1, 1, 1.5)});
    CHECK_FALSE(rep.passed());
}
