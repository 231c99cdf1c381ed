#pragma once

// Root alignment and level-aware stretching.
//
// The embedding center stands in for the root of the hidden hierarchy. It is
// moved to the origin, and nodes are then pushed outward in proportion to
// their current distance from the origin, so that distance from the origin
// tracks depth.

#include "hie/geometry.hpp"

#include <functional>
#include <string>

namespace hie::method {

using ad::Var;
using geo::Space;

enum class Mode { Off, AlignOnly, StretchOnly, Full, Opposite };
/// Hyperbolic: center and distances on the manifold. Tangent: mean and norms
/// of the origin tangent vectors.
enum class HieSpace { Hyperbolic, Tangent };
enum class Sigma { Tanh, Identity };
/// Partial: the task loss sees the raw embedding and only the HIE term is
/// aligned. Whole: the task loss and output use the aligned embedding.
enum class Alignment { Partial, Whole };

Mode mode_from_string(const std::string& s);
HieSpace space_from_string(const std::string& s);
Sigma sigma_from_string(const std::string& s);
Alignment alignment_from_string(const std::string& s);
std::string to_string(Mode m);
std::string to_string(HieSpace s);
std::string to_string(Sigma s);
std::string to_string(Alignment a);

struct HieConfig {
    Mode mode = Mode::Off;
    HieSpace space = HieSpace::Hyperbolic;
    Sigma sigma = Sigma::Tanh;
    double lambda = 0.1;
    /// Stop gradients through the level weights w_i.
    bool detach_weights = true;
    /// Stop gradients through the embedding center.
    bool detach_center = false;
    Alignment alignment = Alignment::Partial;
};

/// Embedding moved so its center sits at the origin (same representation as
/// the input).
Var align_embedding(const Space& s, const Var& z, const HieConfig& cfg);

/// Per-node level (n x 1): HDO on the manifold, or the origin tangent norm
/// in the tangent variant; `align` centers the embedding first.
Var node_levels(const Space& s, const Var& z, const HieConfig& cfg, bool align);

/// Weighted mean HDO (1/n) sum w_i d(z_i, o) with w_i = d(z_i, o), taken on
/// rows that are already in the frame to be measured.
Var weighted_hdo(const Space& s, const Var& z, const HieConfig& cfg);

/// sigma(-z_hdo) on the aligned embedding (stretch_only skips alignment,
/// opposite returns sigma(+z_hdo) on the raw embedding). Off and align_only
/// give an exact zero constant.
Var hie_loss(const Space& s, const Var& z, const HieConfig& cfg);

struct Combined {
    Var total;
    Var task;
    /// Zero constant when the mode has no stretching term.
    Var hyp;
    /// Embedding fed to the task loss and returned to the caller.
    Var output;
};

/// Orchestrates task loss plus lambda * HIE loss. `task` maps an embedding to
/// a scalar loss. With mode off or lambda 0 the total is the task node itself.
Combined combine_loss(const Space& s, const std::function<Var(const Var&)>& task, const Var& z,
                      const HieConfig& cfg);

}  // namespace hie::method
