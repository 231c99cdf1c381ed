#pragma once

// Reverse-mode differentiation over dense matrices.
//
// A Tape records every operation in creation order, which is already a
// topological order, so backward() is a single reverse sweep. Values are
// Eigen matrices; scalars are 1x1. Binary elementwise operations broadcast a
// 1x1, 1xd or nx1 operand against an nxd one.

#include "hie/common.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hie::ad {

using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Index = Eigen::Index;

class Tape;

/// Handle to a node on a Tape.
class Var {
public:
    Var() = default;

    const Mat& value() const;
    Index rows() const { return value().rows(); }
    Index cols() const { return value().cols(); }
    /// Value of a 1x1 node.
    double scalar() const;

    Tape* tape() const { return tape_; }
    int id() const { return id_; }
    bool valid() const { return tape_ != nullptr; }

private:
    friend class Tape;
    Var(Tape* tape, int id) : tape_(tape), id_(id) {}

    Tape* tape_ = nullptr;
    int id_ = -1;
};

class Tape {
public:
    /// Receives the upstream gradient and the node's own value, and pushes
    /// contributions to parents through accumulate().
    using Backward = std::function<void(Tape&, const Mat& upstream, const Mat& out)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var constant(Mat value);
    Var constant(double value);
    /// A differentiable input.
    Var leaf(Mat value);

    Var record(Mat value, std::vector<int> parents, const char* op, Backward backward);

    /// Reverse sweep from a 1x1 loss. Throws on a non-scalar loss or when a
    /// backward rule produces a non-finite gradient.
    void backward(const Var& loss);

    /// Gradient of the last backward() with respect to `v`; zeros if `v` did
    /// not participate.
    Mat grad(const Var& v) const;

    const Mat& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
    bool requires_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].requires_grad; }
    void accumulate(int id, const Mat& contribution);

    std::size_t size() const { return nodes_.size(); }
    /// Number of backward rules run by the last backward() call.
    std::size_t visited() const { return visited_; }

private:
    struct Node {
        Mat value;
        Mat grad;
        bool requires_grad = false;
        const char* op = "";
        std::vector<int> parents;
        Backward backward;
    };

    std::vector<Node> nodes_;
    std::size_t visited_ = 0;
    int current_ = -1;
};

// Elementwise arithmetic with broadcasting.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);
Var neg(const Var& a);
Var scale(const Var& a, double s);
Var shift(const Var& a, double s);

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);
Var operator*(double s, const Var& a);
Var operator*(const Var& a, double s);
Var operator+(const Var& a, double s);
Var operator+(double s, const Var& a);
Var operator-(const Var& a, double s);
Var operator-(double s, const Var& a);

// Linear algebra.
Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
/// Constant sparse matrix times a node.
Var spmm(const SparseMat& a, const Var& x);

// Reductions.
Var sum(const Var& a);
Var mean(const Var& a);
/// n x d -> n x 1
Var row_sum(const Var& a);
/// n x d -> 1 x d
Var col_sum(const Var& a);
/// n x d -> n x 1 Euclidean row norms.
Var row_norm(const Var& a);
Var row_sqnorm(const Var& a);
Var row_dot(const Var& a, const Var& b);

// Structural.
Var concat_cols(const Var& a, const Var& b);
Var slice_cols(const Var& a, Index start, Index count);
Var gather_rows(const Var& a, std::span<const int> index);
/// out.row(index[k]) += a.row(k); out has `rows` rows.
Var scatter_add_rows(const Var& a, std::span<const int> index, Index rows);
/// Cut the gradient path; the result is a constant copy.
Var detach(const Var& a);

// Pointwise functions.
Var clamp(const Var& a, double lo, double hi);
Var clamp_min(const Var& a, double lo);
Var clamp_max(const Var& a, double hi);
Var exp(const Var& a);
Var log(const Var& a);
Var tanh(const Var& a);
Var artanh(const Var& a);
Var cosh(const Var& a);
Var sinh(const Var& a);
Var acosh(const Var& a);
Var asinh(const Var& a);
Var sqrt(const Var& a);
Var square(const Var& a);
Var sigmoid(const Var& a);
Var relu(const Var& a);
/// log(1 + e^x), evaluated without overflow.
Var softplus(const Var& a);

// Normalizations.
Var softmax_rows(const Var& a);
Var log_softmax_rows(const Var& a);
/// Softmax of an E x 1 column within groups given by `segment` (values in
/// [0, segments)).
Var segment_softmax(const Var& a, std::span<const int> segment, Index segments);

/// Gradients of a scalar loss with respect to each input, in order.
std::vector<Mat> gradient(const Var& loss, std::span<const Var> inputs);

/// Central finite-difference comparison against the tape gradient.
struct GradCheckReport {
    struct Failure {
        std::size_t input = 0;
        Index row = 0;
        Index col = 0;
        double analytic = 0.0;
        double numeric = 0.0;
        double rel_error = 0.0;
    };
    double max_rel_error = 0.0;
    std::size_t checked = 0;
    std::vector<Failure> failures;

    bool passed() const { return failures.empty(); }
};

using ScalarFunction = std::function<Var(Tape&, std::span<const Var>)>;

/// Relative error is |a - n| / max(|a|, |n|, floor); `floor` keeps
/// coordinates whose true gradient is ~0 from dominating.
GradCheckReport grad_check(const ScalarFunction& f, std::span<const Mat> inputs, double h = 1e-5,
                           double tol_rel = 1e-4, double floor = 1e-4);
/// Tape gradient of `f` against finite differences of `reference`. Used when
/// `f` stops gradients on purpose and `reference` freezes the same quantities
/// at their base values.
GradCheckReport grad_check(const ScalarFunction& f, const ScalarFunction& reference, std::span<const Mat> inputs,
                           double h = 1e-5, double tol_rel = 1e-4, double floor = 1e-4);

}  // namespace hie::ad
