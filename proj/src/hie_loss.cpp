#include "hie/hie.hpp"

namespace hie::method {

Mode mode_from_string(const std::string& s) {
    if (s == "off") return Mode::Off;
    if (s == "align_only") return Mode::AlignOnly;
    if (s == "stretch_only") return Mode::StretchOnly;
    if (s == "full") return Mode::Full;
    if (s == "opposite") return Mode::Opposite;
    throw Error("unknown hie mode '" + s + "'");
}

HieSpace space_from_string(const std::string& s) {
    if (s == "hyperbolic") return HieSpace::Hyperbolic;
    if (s == "tangent") return HieSpace::Tangent;
    throw Error("unknown hie space '" + s + "'");
}

Sigma sigma_from_string(const std::string& s) {
    if (s == "tanh") return Sigma::Tanh;
    if (s == "identity") return Sigma::Identity;
    throw Error("unknown sigma '" + s + "'");
}

Alignment alignment_from_string(const std::string& s) {
    if (s == "partial") return Alignment::Partial;
    if (s == "whole") return Alignment::Whole;
    throw Error("unknown alignment '" + s + "'");
}

std::string to_string(Mode m) {
    switch (m) {
        case Mode::Off: return "off";
        case Mode::AlignOnly: return "align_only";
        case Mode::StretchOnly: return "stretch_only";
        case Mode::Full: return "full";
        case Mode::Opposite: return "opposite";
    }
    return "off";
}

std::string to_string(HieSpace s) { return s == HieSpace::Tangent ? "tangent" : "hyperbolic"; }
std::string to_string(Sigma s) { return s == Sigma::Identity ? "identity" : "tanh"; }
std::string to_string(Alignment a) { return a == Alignment::Whole ? "whole" : "partial"; }

namespace {

Var zero(const Var& like) { return like.tape()->constant(0.0); }

Var maybe_detach(const Var& v, bool flag) { return flag ? ad::detach(v) : v; }

/// Centered origin tangent vectors.
Var centered_tangent(const Space& s, const Var& z, const HieConfig& cfg) {
    const Var t = geo::logmap0(s, z);
    return sub(t, maybe_detach(geo::tangent_mean(t), cfg.detach_center));
}

Var levels(const Space& s, const Var& z, const HieConfig& cfg, bool align) {
    if (cfg.space == HieSpace::Tangent) {
        return ad::row_norm(align ? centered_tangent(s, z, cfg) : geo::logmap0(s, z));
    }
    return geo::dist0(s, align ? align_embedding(s, z, cfg) : z);
}

Var squash(const Var& x, Sigma sigma) { return sigma == Sigma::Tanh ? ad::tanh(x) : x; }

Var stretch_term(const Var& lv, const HieConfig& cfg, double sign) {
    const Var w = maybe_detach(lv, cfg.detach_weights);
    return squash(scale(ad::mean(mul(w, lv)), sign), cfg.sigma);
}

}  // namespace

Var node_levels(const Space& s, const Var& z, const HieConfig& cfg, bool align) { return levels(s, z, cfg, align); }

Var align_embedding(const Space& s, const Var& z, const HieConfig& cfg) {
    if (cfg.space == HieSpace::Tangent) {
        return geo::expmap0(s, centered_tangent(s, z, cfg));
    }
    return geo::align(s, z, maybe_detach(geo::center(s, z), cfg.detach_center));
}

Var weighted_hdo(const Space& s, const Var& z, const HieConfig& cfg) {
    const Var lv = levels(s, z, cfg, false);
    return ad::mean(mul(maybe_detach(lv, cfg.detach_weights), lv));
}

Var hie_loss(const Space& s, const Var& z, const HieConfig& cfg) {
    if (z.rows() == 0) {
        throw Error("hie_loss: empty embedding");
    }
    switch (cfg.mode) {
        case Mode::Off:
        case Mode::AlignOnly: return zero(z);
        case Mode::StretchOnly: return stretch_term(levels(s, z, cfg, false), cfg, -1.0);
        case Mode::Full: return stretch_term(levels(s, z, cfg, true), cfg, -1.0);
        case Mode::Opposite: return stretch_term(levels(s, z, cfg, false), cfg, 1.0);
    }
    return zero(z);
}

Combined combine_loss(const Space& s, const std::function<Var(const Var&)>& task, const Var& z,
                      const HieConfig& cfg) {
    if (cfg.lambda < 0.0) {
        throw Error("combine_loss: lambda must be nonnegative");
    }
    Combined out;
    if (cfg.mode == Mode::Off) {
        out.output = z;
        out.task = task(z);
        out.hyp = zero(z);
        out.total = out.task;
        return out;
    }
    const bool whole = cfg.mode == Mode::AlignOnly || (cfg.mode == Mode::Full && cfg.alignment == Alignment::Whole);
    if (whole) {
        out.output = align_embedding(s, z, cfg);
        // The output is already centered, so the stretch reads it directly.
        out.hyp = cfg.mode == Mode::Full ? stretch_term(levels(s, out.output, cfg, false), cfg, -1.0) : zero(z);
    } else {
        out.output = z;
        out.hyp = hie_loss(s, z, cfg);
    }
    out.task = task(out.output);
    if (cfg.lambda == 0.0 || cfg.mode == Mode::AlignOnly) {
        out.total = out.task;
    } else {
        out.total = add(out.task, scale(out.hyp, cfg.lambda));
    }
    return out;
}

}  // namespace hie::method
