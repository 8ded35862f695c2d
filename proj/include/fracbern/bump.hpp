#pragma once

#include <string>

namespace fracbern {

enum class BumpKind {
    lp_phi,       ///< Littlewood-Paley cutoff: 1 on |xi| <= 1, 0 on |xi| >= 2
    perturb_phi1, ///< zero-frequency perturbation: 1 on |xi| <= 1/4, 0 on |xi| >= 1/3
};

/// Smooth radial cutoff with an exact plateau and exact support.
///
/// profile(r) = S((outer - r) / (outer - inner)) with
/// S(u) = B(u) / (B(u) + B(1 - u)),  B(u) = exp(-1/u) for u > 0 and 0 otherwise.
struct BumpProfile {
    BumpKind kind = BumpKind::lp_phi;
    double inner_radius = 1.0;
    double outer_radius = 2.0;

    double operator()(double r) const;

    /// Identifier recorded in report provenance.
    static constexpr const char* transition_id = "exp-ratio-C-infinity";
};

BumpProfile make_bump(BumpKind kind);

/// Smooth step S on [0, 1]: S(u) = 0 for u <= 0, 1 for u >= 1.
double smooth_step(double u);

/// Littlewood-Paley band symbol psi(xi) = phi(xi) - phi(2 xi), as a function of |xi|.
double lp_band_symbol(double r);

std::string to_string(BumpKind kind);
BumpKind bump_kind_from_string(const std::string& name);

} // namespace fracbern
