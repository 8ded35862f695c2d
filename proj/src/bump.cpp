#include "fracbern/bump.hpp"

#include <cmath>
#include <stdexcept>

namespace fracbern {

namespace {

double edge(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

} // namespace

double smooth_step(double u) {
    if (u <= 0.0)
        return 0.0;
    if (u >= 1.0)
        return 1.0;
    const double a = edge(u);
    const double b = edge(1.0 - u);
    return a / (a + b);
}

double BumpProfile::operator()(double r) const {
    r = std::abs(r);
    if (r <= inner_radius)
        return 1.0;
    if (r >= outer_radius)
        return 0.0;
    return smooth_step((outer_radius - r) / (outer_radius - inner_radius));
}

BumpProfile make_bump(BumpKind kind) {
    switch (kind) {
    case BumpKind::lp_phi: return {kind, 1.0, 2.0};
    case BumpKind::perturb_phi1: return {kind, 0.25, 1.0 / 3.0};
    }
    throw std::invalid_argument("unknown bump kind");
}

double lp_band_symbol(double r) {
    static const BumpProfile phi = make_bump(BumpKind::lp_phi);
    return phi(r) - phi(2.0 * r);
}

std::string to_string(BumpKind kind) {
    return kind == BumpKind::lp_phi ? "lp_phi" : "perturb_phi1";
}

BumpKind bump_kind_from_string(const std::string& name) {
    if (name == "lp_phi")
        return BumpKind::lp_phi;
    if (name == "perturb_phi1")
        return BumpKind::perturb_phi1;
    throw std::invalid_argument("unknown bump kind '" + name + "'");
}

} // namespace fracbern
