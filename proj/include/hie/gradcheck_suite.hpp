#pragma once

// Finite-difference checks for every loss and layer on small instances.

#include <cstdint>
#include <string>
#include <vector>

namespace hie::checks {

struct GradCase {
    std::string name;
    double tolerance = 0.0;
    double max_rel_error = 0.0;
    std::size_t checked = 0;
    bool passed = false;
};

/// Losses are checked at `loss_tol`, layers at `layer_tol`.
std::vector<GradCase> run_gradient_suite(std::uint64_t seed = 7, double loss_tol = 1e-4, double layer_tol = 1e-3);

}  // namespace hie::checks
