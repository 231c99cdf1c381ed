#pragma once

// Trainable parameters and their update rules.

#include "hie/autodiff.hpp"

#include <string>
#include <vector>

namespace hie::optim {

enum class ParamSpace {
    Euclidean,
    /// Euclidean coordinates read as tangent vectors at the origin.
    TangentAtOrigin,
    /// Raw Poincare ball coordinates updated by Riemannian SGD.
    RiemannianPoincare,
};

struct Parameter {
    std::string name;
    Mat value;
    ParamSpace space = ParamSpace::Euclidean;
    /// Ball curvature magnitude, used by RiemannianPoincare.
    double c = 1.0;
    /// Adds weight decay to the gradient when true.
    bool decay = true;
    /// Leaf on the current tape, set by bind().
    ad::Var var;
};

/// Puts the parameter on `tape` as a leaf and returns it.
ad::Var bind(ad::Tape& tape, Parameter& p);

struct AdamConfig {
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
    /// Global gradient norm cap; <= 0 disables clipping.
    double clip_norm = 10.0;
};

/// Adam for Euclidean and tangent parameters, Riemannian SGD with the
/// Poincare metric rescaling ((1 - c|x|^2)^2 / 4) followed by projection for
/// ball parameters.
class Optimizer {
public:
    explicit Optimizer(AdamConfig config) : config_(config) {}

    /// Reads gradients from the tape the parameters were bound to.
    void step(std::vector<Parameter*>& params, const ad::Tape& tape);
    /// Same with explicit gradients, one per parameter.
    void step(std::vector<Parameter*>& params, std::vector<Mat> grads);

    long steps() const { return t_; }
    /// Global gradient norm before clipping at the last step.
    double last_grad_norm() const { return last_norm_; }

private:
    AdamConfig config_;
    long t_ = 0;
    double last_norm_ = 0.0;
    std::vector<Mat> m_;
    std::vector<Mat> v_;
};

/// Scales `g` so the global Frobenius norm is at most `max_norm`; returns the
/// norm before scaling.
double clip_global_norm(std::vector<Mat>& g, double max_norm);

}  // namespace hie::optim
