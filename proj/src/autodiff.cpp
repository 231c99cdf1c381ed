#include "hie/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hie::ad {

// ---------------------------------------------------------------------------
// Tape

const Mat& Var::value() const {
    if (!tape_) {
        throw Error("use of an unbound Var");
    }
    return tape_->value(id_);
}

double Var::scalar() const {
    const Mat& v = value();
    if (v.rows() != 1 || v.cols() != 1) {
        throw Error("Var::scalar on a non-scalar node");
    }
    return v(0, 0);
}

Var Tape::constant(Mat value) { return record(std::move(value), {}, "constant", nullptr); }

Var Tape::constant(double value) { return constant(Mat::Constant(1, 1, value)); }

Var Tape::leaf(Mat value) {
    Var v = record(std::move(value), {}, "leaf", nullptr);
    nodes_.back().requires_grad = true;
    return v;
}

Var Tape::record(Mat value, std::vector<int> parents, const char* op, Backward backward) {
    Node node;
    node.value = std::move(value);
    node.op = op;
    for (int p : parents) {
        node.requires_grad = node.requires_grad || nodes_[static_cast<std::size_t>(p)].requires_grad;
    }
    if (node.requires_grad) {
        node.backward = std::move(backward);
    }
    node.parents = std::move(parents);
    nodes_.push_back(std::move(node));
    return Var(this, static_cast<int>(nodes_.size() - 1));
}

void Tape::accumulate(int id, const Mat& contribution) {
    Node& node = nodes_[static_cast<std::size_t>(id)];
    if (!node.requires_grad) {
        return;
    }
    if (!contribution.allFinite()) {
        const char* op = current_ >= 0 ? nodes_[static_cast<std::size_t>(current_)].op : "?";
        throw Error(std::string("non-finite gradient produced by backward of '") + op + "'");
    }
    if (node.grad.size() == 0) {
        node.grad = contribution;
    } else {
        node.grad += contribution;
    }
}

void Tape::backward(const Var& loss) {
    if (loss.tape() != this) {
        throw Error("backward: loss belongs to another tape");
    }
    const Mat& v = loss.value();
    if (v.rows() != 1 || v.cols() != 1) {
        throw Error("backward: loss must be a scalar");
    }
    for (Node& n : nodes_) {
        n.grad.resize(0, 0);
    }
    visited_ = 0;
    Node& root = nodes_[static_cast<std::size_t>(loss.id())];
    if (!root.requires_grad) {
        return;
    }
    root.grad = Mat::Ones(1, 1);
    for (int i = loss.id(); i >= 0; --i) {
        Node& n = nodes_[static_cast<std::size_t>(i)];
        if (!n.backward || n.grad.size() == 0) {
            continue;
        }
        current_ = i;
        n.backward(*this, n.grad, n.value);
        ++visited_;
    }
    current_ = -1;
}

Mat Tape::grad(const Var& v) const {
    const Node& n = nodes_[static_cast<std::size_t>(v.id())];
    if (n.grad.size() == 0) {
        return Mat::Zero(n.value.rows(), n.value.cols());
    }
    return n.grad;
}

// ---------------------------------------------------------------------------
// Broadcasting helpers

namespace {

Index broadcast_dim(Index a, Index b, const char* op) {
    if (a == b) return a;
    if (a == 1) return b;
    if (b == 1) return a;
    throw Error(std::string(op) + ": incompatible shapes for broadcasting");
}

Mat expand(const Mat& m, Index rows, Index cols) {
    if (m.rows() == rows && m.cols() == cols) {
        return m;
    }
    if (m.size() == 1) {
        return Mat::Constant(rows, cols, m(0, 0));
    }
    if (m.rows() == 1) {
        return m.replicate(rows, 1);
    }
    return m.replicate(1, cols);
}

Mat reduce(const Mat& g, Index rows, Index cols) {
    if (g.rows() == rows && g.cols() == cols) {
        return g;
    }
    Mat out = g;
    if (rows == 1 && out.rows() != 1) {
        out = out.colwise().sum().eval();
    }
    if (cols == 1 && out.cols() != 1) {
        out = out.rowwise().sum().eval();
    }
    return out;
}

Tape& same_tape(const Var& a, const Var& b, const char* op) {
    if (!a.valid() || a.tape() != b.tape()) {
        throw Error(std::string(op) + ": operands belong to different tapes");
    }
    return *a.tape();
}

// Pointwise op with derivative expressed through input and output values.
template <class Forward, class Deriv>
Var unary(const Var& a, const char* op, Forward forward, Deriv deriv) {
    Tape& t = *a.tape();
    Mat out = a.value().unaryExpr(forward);
    const int ia = a.id();
    return t.record(std::move(out), {ia}, op, [ia, deriv](Tape& tape, const Mat& g, const Mat& y) {
        const Mat& x = tape.value(ia);
        Mat d(x.rows(), x.cols());
        for (Index k = 0; k < x.size(); ++k) {
            d(k) = g(k) * deriv(x(k), y(k));
        }
        tape.accumulate(ia, d);
    });
}

}  // namespace

// ---------------------------------------------------------------------------
// Arithmetic

Var add(const Var& a, const Var& b) {
    Tape& t = same_tape(a, b, "add");
    const Index r = broadcast_dim(a.rows(), b.rows(), "add");
    const Index c = broadcast_dim(a.cols(), b.cols(), "add");
    Mat out = expand(a.value(), r, c) + expand(b.value(), r, c);
    const int ia = a.id(), ib = b.id();
    return t.record(std::move(out), {ia, ib}, "add", [ia, ib](Tape& tape, const Mat& g, const Mat&) {
        const Mat& va = tape.value(ia);
        const Mat& vb = tape.value(ib);
        tape.accumulate(ia, reduce(g, va.rows(), va.cols()));
        tape.accumulate(ib, reduce(g, vb.rows(), vb.cols()));
    });
}

Var sub(const Var& a, const Var& b) {
    Tape& t = same_tape(a, b, "sub");
    const Index r = broadcast_dim(a.rows(), b.rows(), "sub");
    const Index c = broadcast_dim(a.cols(), b.cols(), "sub");
    Mat out = expand(a.value(), r, c) - expand(b.value(), r, c);
    const int ia = a.id(), ib = b.id();
    return t.record(std::move(out), {ia, ib}, "sub", [ia, ib](Tape& tape, const Mat& g, const Mat&) {
        const Mat& va = tape.value(ia);
        const Mat& vb = tape.value(ib);
        tape.accumulate(ia, reduce(g, va.rows(), va.cols()));
        tape.accumulate(ib, reduce(-g, vb.rows(), vb.cols()));
    });
}

Var mul(const Var& a, const Var& b) {
    Tape& t = same_tape(a, b, "mul");
    const Index r = broadcast_dim(a.rows(), b.rows(), "mul");
    const Index c = broadcast_dim(a.cols(), b.cols(), "mul");
    Mat out = expand(a.value(), r, c).cwiseProduct(expand(b.value(), r, c));
    const int ia = a.id(), ib = b.id();
    return t.record(std::move(out), {ia, ib}, "mul", [ia, ib](Tape& tape, const Mat& g, const Mat&) {
        const Mat& va = tape.value(ia);
        const Mat& vb = tape.value(ib);
        if (tape.requires_grad(ia)) {
            tape.accumulate(ia, reduce(g.cwiseProduct(expand(vb, g.rows(), g.cols())), va.rows(),
                                       va.cols()));
        }
        if (tape.requires_grad(ib)) {
            tape.accumulate(ib, reduce(g.cwiseProduct(expand(va, g.rows(), g.cols())), vb.rows(),
                                       vb.cols()));
        }
    });
}

Var div(const Var& a, const Var& b) {
    Tape& t = same_tape(a, b, "div");
    const Index r = broadcast_dim(a.rows(), b.rows(), "div");
    const Index c = broadcast_dim(a.cols(), b.cols(), "div");
    Mat out = expand(a.value(), r, c).cwiseQuotient(expand(b.value(), r, c));
    const int ia = a.id(), ib = b.id();
    return t.record(std::move(out), {ia, ib}, "div", [ia, ib](Tape& tape, const Mat& g, const Mat& y) {
        const Mat& va = tape.value(ia);
        const Mat& vb = tape.value(ib);
        const Mat eb = expand(vb, g.rows(), g.cols());
        if (tape.requires_grad(ia)) {
            tape.accumulate(ia, reduce(g.cwiseQuotient(eb), va.rows(), va.cols()));
        }
        if (tape.requires_grad(ib)) {
            tape.accumulate(ib, reduce(-g.cwiseProduct(y).cwiseQuotient(eb), vb.rows(), vb.cols()));
        }
    });
}

Var neg(const Var& a) { return scale(a, -1.0); }

Var scale(const Var& a, double s) {
    Tape& t = *a.tape();
    const int ia = a.id();
    return t.record(a.value() * s, {ia}, "scale",
                    [ia, s](Tape& tape, const Mat& g, const Mat&) { tape.accumulate(ia, g * s); });
}

Var shift(const Var& a, double s) {
    Tape& t = *a.tape();
    const int ia = a.id();
    Mat out = a.value().array() + s;
    return t.record(std::move(out), {ia}, "shift",
                    [ia](Tape& tape, const Mat& g, const Mat&) { tape.accumulate(ia, g); });
}

Var operator+(const Var& a, const Var& b) { return add(a, b); }
Var operator-(const Var& a, const Var& b) { return sub(a, b); }
Var operator*(const Var& a, const Var& b) { return mul(a, b); }
Var operator/(const Var& a, const Var& b) { return div(a, b); }
Var operator-(const Var& a) { return neg(a); }
Var operator*(double s, const Var& a) { return scale(a, s); }
Var operator*(const Var& a, double s) { return scale(a, s); }
Var operator+(const Var& a, double s) { return shift(a, s); }
Var operator+(double s, const Var& a) { return shift(a, s); }
Var operator-(const Var& a, double s) { return shift(a, -s); }
Var operator-(double s, const Var& a) { return shift(neg(a), s); }

// ---------------------------------------------------------------------------
// Linear algebra

Var transpose(const Var& a) {
    const int ia = a.id();
    return a.tape()->record(a.value().transpose(), {ia}, "transpose",
                            [ia](Tape& tape, const Mat& g, const Mat&) { tape.accumulate(ia, g.transpose()); });
}

Var matmul(const Var& a, const Var& b) {
    Tape& t = same_tape(a, b, "matmul");
    if (a.cols() != b.rows()) {
        throw Error("matmul: inner dimensions differ");
    }
    Mat out = a.value() * b.value();
    const int ia = a.id(), ib = b.id();
    return t.record(std::move(out), {ia, ib}, "matmul", [ia, ib](Tape& tape, const Mat& g, const Mat&) {
        if (tape.requires_grad(ia)) {
            tape.accumulate(ia, g * tape.value(ib).transpose());
        }
        if (tape.requires_grad(ib)) {
            tape.accumulate(ib, tape.value(ia).transpose() * g);
        }
    });
}

Var spmm(const SparseMat& a, const Var& x) {
    if (a.cols() != x.rows()) {
        throw Error("spmm: inner dimensions differ");
    }
    Tape& t = *x.tape();
    Mat out = a * x.value();
    const int ix = x.id();
    return t.record(std::move(out), {ix}, "spmm", [ix, a](Tape& tape, const Mat& g, const Mat&) {
        tape.accumulate(ix, Mat(a.transpose() * g));
    });
}

// ---------------------------------------------------------------------------
// Reductions

Var sum(const Var& a) {
    Tape& t = *a.tape();
    const int ia = a.id();
    return t.record(Mat::Constant(1, 1, a.value().sum()), {ia}, "sum",
                    [ia](Tape& tape, const Mat& g, const Mat&) {
                        const Mat& x = tape.value(ia);
                        tape.accumulate(ia, Mat::Constant(x.rows(), x.cols(), g(0, 0)));
                    });
}

Var mean(const Var& a) {
    if (a.value().size() == 0) {
        throw Error("mean: empty input");
    }
    return scale(sum(a), 1.0 / static_cast<double>(a.value().size()));
}

Var row_sum(const Var& a) {
    Tape& t = *a.tape();
    const int ia = a.id();
    Mat out = a.value().rowwise().sum();
    return t.record(std::move(out), {ia}, "row_sum", [ia](Tape& tape, const Mat& g, const Mat&) {
        tape.accumulate(ia, g.replicate(1, tape.value(ia).cols()));
    });
}

Var col_sum(const Var& a) {
    Tape& t = *a.tape();
    const int ia = a.id();
    Mat out = a.value().colwise().sum();
    return t.record(std::move(out), {ia}, "col_sum", [ia](Tape& tape, const Mat& g, const Mat&) {
        tape.accumulate(ia, g.replicate(tape.value(ia).rows(), 1));
    });
}

Var row_norm(const Var& a) {
    Tape& t = *a.tape();
    const int ia = a.id();
    Mat out = a.value().rowwise().norm();
    return t.record(std::move(out), {ia}, "row_norm", [ia](Tape& tape, const Mat& g, const Mat& y) {
        const Mat& x = tape.value(ia);
        Mat d = Mat::Zero(x.rows(), x.cols());
        for (Index i = 0; i < x.rows(); ++i) {
            if (y(i, 0) > 0.0) {
                d.row(i) = x.row(i) * (g(i, 0) / y(i, 0));
            }
        }
        tape.accumulate(ia, d);
    });
}

Var row_sqnorm(const Var& a) {
    Tape& t = *a.tape();
    const int ia = a.id();
    Mat out = a.value().rowwise().squaredNorm();
    return t.record(std::move(out), {ia}, "row_sqnorm", [ia](Tape& tape, const Mat& g, const Mat&) {
        const Mat& x = tape.value(ia);
        tape.accumulate(ia, Mat(2.0 * (x.array().colwise() * g.col(0).array())));
    });
}

Var row_dot(const Var& a, const Var& b) {
    Tape& t = same_tape(a, b, "row_dot");
    const Index r = broadcast_dim(a.rows(), b.rows(), "row_dot");
    if (a.cols() != b.cols()) {
        throw Error("row_dot: column count differs");
    }
    const Index c = a.cols();
    Mat out = expand(a.value(), r, c).cwiseProduct(expand(b.value(), r, c)).rowwise().sum();
    const int ia = a.id(), ib = b.id();
    return t.record(std::move(out), {ia, ib}, "row_dot", [ia, ib](Tape& tape, const Mat& g, const Mat&) {
        const Mat& va = tape.value(ia);
        const Mat& vb = tape.value(ib);
        const Index rows = g.rows();
        const Index cols = va.cols();
        if (tape.requires_grad(ia)) {
            Mat d = expand(vb, rows, cols).array().colwise() * g.col(0).array();
            tape.accumulate(ia, reduce(d, va.rows(), cols));
        }
        if (tape.requires_grad(ib)) {
            Mat d = expand(va, rows, cols).array().colwise() * g.col(0).array();
            tape.accumulate(ib, reduce(d, vb.rows(), cols));
        }
    });
}

// ---------------------------------------------------------------------------
// Structural

Var concat_cols(const Var& a, const Var& b) {
    Tape& t = same_tape(a, b, "concat_cols");
    if (a.rows() != b.rows()) {
        throw Error("concat_cols: row count differs");
    }
    Mat out(a.rows(), a.cols() + b.cols());
    out << a.value(), b.value();
    const int ia = a.id(), ib = b.id();
    const Index ca = a.cols(), cb = b.cols();
    return t.record(std::move(out), {ia, ib}, "concat_cols",
                    [ia, ib, ca, cb](Tape& tape, const Mat& g, const Mat&) {
                        tape.accumulate(ia, g.leftCols(ca));
                        tape.accumulate(ib, g.rightCols(cb));
                    });
}

Var slice_cols(const Var& a, Index start, Index count) {
    if (start < 0 || count < 0 || start + count > a.cols()) {
        throw Error("slice_cols: range out of bounds");
    }
    Tape& t = *a.tape();
    const int ia = a.id();
    Mat out = a.value().middleCols(start, count);
    return t.record(std::move(out), {ia}, "slice_cols", [ia, start, count](Tape& tape, const Mat& g, const Mat&) {
        const Mat& x = tape.value(ia);
        Mat d = Mat::Zero(x.rows(), x.cols());
        d.middleCols(start, count) = g;
        tape.accumulate(ia, d);
    });
}

Var gather_rows(const Var& a, std::span<const int> index) {
    Tape& t = *a.tape();
    const Mat& x = a.value();
    Mat out(static_cast<Index>(index.size()), x.cols());
    for (std::size_t k = 0; k < index.size(); ++k) {
        if (index[k] < 0 || index[k] >= x.rows()) {
            throw Error("gather_rows: index out of range");
        }
        out.row(static_cast<Index>(k)) = x.row(index[k]);
    }
    const int ia = a.id();
    std::vector<int> idx(index.begin(), index.end());
    return t.record(std::move(out), {ia}, "gather_rows", [ia, idx](Tape& tape, const Mat& g, const Mat&) {
        const Mat& v = tape.value(ia);
        Mat d = Mat::Zero(v.rows(), v.cols());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            d.row(idx[k]) += g.row(static_cast<Index>(k));
        }
        tape.accumulate(ia, d);
    });
}

Var scatter_add_rows(const Var& a, std::span<const int> index, Index rows) {
    Tape& t = *a.tape();
    const Mat& x = a.value();
    if (static_cast<Index>(index.size()) != x.rows()) {
        throw Error("scatter_add_rows: index length must equal row count");
    }
    Mat out = Mat::Zero(rows, x.cols());
    for (std::size_t k = 0; k < index.size(); ++k) {
        if (index[k] < 0 || index[k] >= rows) {
            throw Error("scatter_add_rows: index out of range");
        }
        out.row(index[k]) += x.row(static_cast<Index>(k));
    }
    const int ia = a.id();
    std::vector<int> idx(index.begin(), index.end());
    return t.record(std::move(out), {ia}, "scatter_add_rows", [ia, idx](Tape& tape, const Mat& g, const Mat&) {
        Mat d(static_cast<Index>(idx.size()), g.cols());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            d.row(static_cast<Index>(k)) = g.row(idx[k]);
        }
        tape.accumulate(ia, d);
    });
}

Var detach(const Var& a) { return a.tape()->constant(a.value()); }

// ---------------------------------------------------------------------------
// Pointwise

Var clamp(const Var& a, double lo, double hi) {
    return unary(
        a, "clamp", [lo, hi](double x) { return std::clamp(x, lo, hi); },
        [lo, hi](double x, double) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

Var clamp_min(const Var& a, double lo) {
    return clamp(a, lo, std::numeric_limits<double>::infinity());
}

Var clamp_max(const Var& a, double hi) {
    return clamp(a, -std::numeric_limits<double>::infinity(), hi);
}

Var exp(const Var& a) {
    return unary(
        a, "exp", [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(const Var& a) {
    return unary(
        a, "log", [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var tanh(const Var& a) {
    return unary(
        a, "tanh", [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var artanh(const Var& a) {
    return unary(
        a, "artanh", [](double x) { return std::atanh(x); },
        [](double x, double) { return 1.0 / (1.0 - x * x); });
}

Var cosh(const Var& a) {
    return unary(
        a, "cosh", [](double x) { return std::cosh(x); }, [](double x, double) { return std::sinh(x); });
}

Var sinh(const Var& a) {
    return unary(
        a, "sinh", [](double x) { return std::sinh(x); }, [](double x, double) { return std::cosh(x); });
}

Var acosh(const Var& a) {
    return unary(
        a, "acosh", [](double x) { return std::acosh(x); },
        [](double x, double) { return 1.0 / std::sqrt(x * x - 1.0); });
}

Var asinh(const Var& a) {
    return unary(
        a, "asinh", [](double x) { return std::asinh(x); },
        [](double x, double) { return 1.0 / std::sqrt(x * x + 1.0); });
}

Var softplus(const Var& a) {
    return unary(
        a, "softplus", [](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); },
        [](double x, double) { return 1.0 / (1.0 + std::exp(-x)); });
}

Var sqrt(const Var& a) {
    return unary(
        a, "sqrt", [](double x) { return std::sqrt(x); }, [](double, double y) { return 0.5 / y; });
}

Var square(const Var& a) {
    return unary(
        a, "square", [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Var sigmoid(const Var& a) {
    return unary(
        a, "sigmoid",
        [](double x) {
            if (x >= 0.0) {
                return 1.0 / (1.0 + std::exp(-x));
            }
            const double e = std::exp(x);
            return e / (1.0 + e);
        },
        [](double, double y) { return y * (1.0 - y); });
}

Var relu(const Var& a) {
    return unary(
        a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
        [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

// ---------------------------------------------------------------------------
// Normalizations

Var softmax_rows(const Var& a) {
    Tape& t = *a.tape();
    const Mat& x = a.value();
    Mat out(x.rows(), x.cols());
    for (Index i = 0; i < x.rows(); ++i) {
        const double m = x.row(i).maxCoeff();
        out.row(i) = (x.row(i).array() - m).exp();
        out.row(i) /= out.row(i).sum();
    }
    const int ia = a.id();
    return t.record(std::move(out), {ia}, "softmax_rows", [ia](Tape& tape, const Mat& g, const Mat& y) {
        const Eigen::VectorXd inner = g.cwiseProduct(y).rowwise().sum();
        Mat d = y.cwiseProduct(g - inner.replicate(1, g.cols()));
        tape.accumulate(ia, d);
    });
}

Var log_softmax_rows(const Var& a) {
    Tape& t = *a.tape();
    const Mat& x = a.value();
    Mat out(x.rows(), x.cols());
    for (Index i = 0; i < x.rows(); ++i) {
        const double m = x.row(i).maxCoeff();
        const double lse = m + std::log((x.row(i).array() - m).exp().sum());
        out.row(i) = x.row(i).array() - lse;
    }
    const int ia = a.id();
    return t.record(std::move(out), {ia}, "log_softmax_rows", [ia](Tape& tape, const Mat& g, const Mat& y) {
        const Eigen::VectorXd total = g.rowwise().sum();
        Mat d = g - (y.array().exp().colwise() * total.array()).matrix();
        tape.accumulate(ia, d);
    });
}

Var segment_softmax(const Var& a, std::span<const int> segment, Index segments) {
    const Mat& x = a.value();
    if (x.cols() != 1 || static_cast<Index>(segment.size()) != x.rows()) {
        throw Error("segment_softmax: expects an E x 1 column with one segment id per row");
    }
    Eigen::VectorXd maxv = Eigen::VectorXd::Constant(segments, -std::numeric_limits<double>::infinity());
    for (std::size_t e = 0; e < segment.size(); ++e) {
        if (segment[e] < 0 || segment[e] >= segments) {
            throw Error("segment_softmax: segment id out of range");
        }
        maxv(segment[e]) = std::max(maxv(segment[e]), x(static_cast<Index>(e), 0));
    }
    Mat out(x.rows(), 1);
    Eigen::VectorXd total = Eigen::VectorXd::Zero(segments);
    for (std::size_t e = 0; e < segment.size(); ++e) {
        out(static_cast<Index>(e), 0) = std::exp(x(static_cast<Index>(e), 0) - maxv(segment[e]));
        total(segment[e]) += out(static_cast<Index>(e), 0);
    }
    for (std::size_t e = 0; e < segment.size(); ++e) {
        out(static_cast<Index>(e), 0) /= total(segment[e]);
    }
    Tape& t = *a.tape();
    const int ia = a.id();
    std::vector<int> seg(segment.begin(), segment.end());
    return t.record(std::move(out), {ia}, "segment_softmax",
                    [ia, seg, segments](Tape& tape, const Mat& g, const Mat& y) {
                        Eigen::VectorXd inner = Eigen::VectorXd::Zero(segments);
                        for (std::size_t e = 0; e < seg.size(); ++e) {
                            inner(seg[e]) += g(static_cast<Index>(e), 0) * y(static_cast<Index>(e), 0);
                        }
                        Mat d(y.rows(), 1);
                        for (std::size_t e = 0; e < seg.size(); ++e) {
                            const auto k = static_cast<Index>(e);
                            d(k, 0) = y(k, 0) * (g(k, 0) - inner(seg[e]));
                        }
                        tape.accumulate(ia, d);
                    });
}

// ---------------------------------------------------------------------------
// Gradients

std::vector<Mat> gradient(const Var& loss, std::span<const Var> inputs) {
    Tape& t = *loss.tape();
    t.backward(loss);
    std::vector<Mat> out;
    out.reserve(inputs.size());
    for (const Var& v : inputs) {
        out.push_back(t.grad(v));
    }
    return out;
}

GradCheckReport grad_check(const ScalarFunction& f, std::span<const Mat> inputs, double h,
                           double tol_rel, double floor) {
    return grad_check(f, f, inputs, h, tol_rel, floor);
}

GradCheckReport grad_check(const ScalarFunction& f, const ScalarFunction& reference, std::span<const Mat> inputs,
                           double h, double tol_rel, double floor) {
    auto evaluate = [&](const std::vector<Mat>& values) {
        Tape tape;
        std::vector<Var> leaves;
        leaves.reserve(values.size());
        for (const Mat& m : values) {
            leaves.push_back(tape.leaf(m));
        }
        return reference(tape, leaves).scalar();
    };

    std::vector<Mat> analytic;
    {
        Tape tape;
        std::vector<Var> leaves;
        for (const Mat& m : inputs) {
            leaves.push_back(tape.leaf(m));
        }
        const Var loss = f(tape, leaves);
        analytic = gradient(loss, leaves);
    }

    GradCheckReport report;
    std::vector<Mat> values(inputs.begin(), inputs.end());
    for (std::size_t p = 0; p < values.size(); ++p) {
        for (Index r = 0; r < values[p].rows(); ++r) {
            for (Index c = 0; c < values[p].cols(); ++c) {
                const double saved = values[p](r, c);
                values[p](r, c) = saved + h;
                const double up = evaluate(values);
                values[p](r, c) = saved - h;
                const double down = evaluate(values);
                values[p](r, c) = saved;

                const double numeric = (up - down) / (2.0 * h);
                const double a = analytic[p](r, c);
                const double denom = std::max({std::abs(a), std::abs(numeric), floor});
                const double rel = std::abs(a - numeric) / denom;
                ++report.checked;
                report.max_rel_error = std::max(report.max_rel_error, rel);
                if (!(rel <= tol_rel)) {
                    report.failures.push_back({p, r, c, a, numeric, rel});
                }
            }
        }
    }
    return report;
}

}  // namespace hie::ad
