#pragma once

#include <functional>
#include <limits>

#include "fracbern/quadrature.hpp"

namespace fracbern {

/// A radial Fourier symbol written in the angular variable u = 2 pi |xi|.
///
/// `tail_mass(U)` must bound  int_U^inf |amplitude(u)| u^(d-1) du  and is only
/// consulted when the support is unbounded.
struct RadialSymbol {
    RealFunction amplitude;
    double u_min = 0.0;
    double u_max = std::numeric_limits<double>::infinity();
    std::function<double(double)> tail_mass;
};

struct RadialTransformOptions {
    double abs_tol = 1e-10;
    std::size_t max_evals = 4000000;
    /// Above this many oscillation panels inside the effective support the
    /// semi-infinite integral switches to Wynn-accelerated panel sums.
    std::size_t direct_panel_limit = 256;
};

/// Inverse Fourier transform  int_{R^d} m(|xi|) exp(2 pi i xi.x) dxi  at |x| = r
/// for a radial symbol m, d in {1, 2, 3}.
///
/// The d-dimensional integral is reduced to the one-dimensional
/// Bessel-weighted integral  (2 pi)^(-d/2) r^(-nu) int m(u) J_nu(r u) u^(d/2) du,
/// nu = d/2 - 1, and integrated panel by panel between zeros of J_nu(r u).
QuadResult inverse_radial_fourier(int dim, const RadialSymbol& symbol, double r,
                                  const RadialTransformOptions& opts = {});

/// Surface area of the unit sphere in R^d.
double unit_sphere_area(int dim);

/// k-th positive zero (k >= 1) of the oscillatory factor used for dimension d:
/// cos for d = 1, J_0 for d = 2, sin for d = 3.
double oscillation_zero(int dim, std::size_t k);

} // namespace fracbern
