#include "hie/optim.hpp"

#include "hie/manifold.hpp"

#include <cmath>

namespace hie::optim {

ad::Var bind(ad::Tape& tape, Parameter& p) {
    p.var = tape.leaf(p.value);
    return p.var;
}

double clip_global_norm(std::vector<Mat>& g, double max_norm) {
    double sq = 0.0;
    for (const Mat& m : g) {
        sq += m.squaredNorm();
    }
    const double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double s = max_norm / norm;
        for (Mat& m : g) {
            m *= s;
        }
    }
    return norm;
}

void Optimizer::step(std::vector<Parameter*>& params, const ad::Tape& tape) {
    std::vector<Mat> grads;
    grads.reserve(params.size());
    for (Parameter* p : params) {
        if (!p->var.valid() || p->var.tape() != &tape) {
            throw Error("optimizer: parameter '" + p->name + "' is not bound to this tape");
        }
        grads.push_back(tape.grad(p->var));
    }
    step(params, std::move(grads));
}

void Optimizer::step(std::vector<Parameter*>& params, std::vector<Mat> grads) {
    if (grads.size() != params.size()) {
        throw Error("optimizer: gradient count differs from parameter count");
    }
    if (m_.empty()) {
        for (const Parameter* p : params) {
            m_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
            v_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
        }
    }
    if (m_.size() != params.size()) {
        throw Error("optimizer: parameter set changed between steps");
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
        const Parameter& p = *params[k];
        if (grads[k].rows() != p.value.rows() || grads[k].cols() != p.value.cols()) {
            throw Error("optimizer: gradient shape mismatch for '" + p.name + "'");
        }
        if (p.decay && config_.weight_decay > 0.0 && p.space != ParamSpace::RiemannianPoincare) {
            grads[k] += config_.weight_decay * p.value;
        }
    }
    last_norm_ = clip_global_norm(grads, config_.clip_norm);
    ++t_;
    const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
        Parameter& p = *params[k];
        const Mat& g = grads[k];
        if (p.space == ParamSpace::RiemannianPoincare) {
            // Riemannian gradient = Euclidean gradient / lambda_x^2, row-wise.
            const double max_norm = (1.0 - manifold::kBallEps) / std::sqrt(p.c);
            for (Eigen::Index i = 0; i < p.value.rows(); ++i) {
                const double sq = p.value.row(i).squaredNorm();
                const double s = (1.0 - p.c * sq) * (1.0 - p.c * sq) / 4.0;
                p.value.row(i) -= config_.lr * s * g.row(i);
                const double nrm = p.value.row(i).norm();
                if (nrm > max_norm) {
                    p.value.row(i) *= max_norm / nrm;
                }
            }
            continue;
        }
        m_[k] = config_.beta1 * m_[k] + (1.0 - config_.beta1) * g;
        v_[k] = config_.beta2 * v_[k] + (1.0 - config_.beta2) * g.cwiseProduct(g);
        const Mat mhat = m_[k] / bc1;
        const Mat vhat = v_[k] / bc2;
        p.value.array() -= config_.lr * mhat.array() / (vhat.array().sqrt() + config_.eps);
    }
}

}  // namespace hie::optim
