#pragma once

#include <span>
#include <vector>

#include "fracbern/params.hpp"
#include "fracbern/radial_transform.hpp"

namespace fracbern {

/// Kernel value p(t, x) at |x| = r with its quadrature error estimate.
struct RadialKernelValue {
    double r = 0.0;
    double value = 0.0;
    double abs_err = 0.0;

    double lower() const { return value - abs_err; }
    double upper() const { return value + abs_err; }
};

/// Largest dimension supported by the radial quadrature.
inline constexpr int kMaxKernelDim = 3;

/// Exact kernel for the Gaussian (alpha = 2) and Poisson (alpha = 1) cases.
double eval_closed_form(const FractionalParams& params, double r);

/// p(t, r) evaluated at t = 1 through p(t, x) = t^(-d/alpha) p(1, t^(-1/alpha) x).
/// Far out, where the large-|x| expansion is certified to a quarter of the
/// tolerance, the expansion is used; everywhere else the value comes from
/// eval_radial_quadrature. Throws QuadratureError when the error estimate
/// cannot be brought below `tol`.
RadialKernelValue eval_radial_numeric(const FractionalParams& params, double r, double tol);

/// Bessel-weighted radial quadrature only, without the far-field expansion.
RadialKernelValue eval_radial_quadrature(const FractionalParams& params, double r, double tol);

/// Large-|x| expansion  p(t, x) ~ sum_k a_k t^k |x|^(-d - k alpha).
/// Convergent for alpha < 1, asymptotic otherwise; identically zero at alpha = 2.
double tail_series_coefficient(double alpha, int dim, int k);
/// |a_k| without the sin(pi k alpha / 2) factor; bounds the size of term k.
double tail_series_envelope(double alpha, int dim, int k);

struct SeriesValue {
    double value = 0.0;
    double abs_err = 0.0;
    int terms = 0;
};

/// Sums the expansion until terms stop decreasing; abs_err is the size of
/// the first omitted term.
SeriesValue kernel_tail_series(const FractionalParams& params, double r, int max_terms = 80);

/// Mass of p(t, .) outside the ball of radius R, from the same expansion.
SeriesValue kernel_tail_mass(const FractionalParams& params, double R, int max_terms = 80);

struct MassEstimate {
    double value = 0.0;
    double abs_err = 0.0;
    double cutoff = 0.0;
    double tail = 0.0;
};

/// Integral of p(t, .) over R^d: radial quadrature out to a cutoff plus the
/// expansion for the remaining mass. Throws if the total error exceeds tol.
MassEstimate l1_mass(const FractionalParams& params, double tol);

struct ProbeGrid {
    std::vector<double> t;
    std::vector<double> r;
    /// Also probe r = t^(1/alpha), where the bound's two regimes meet.
    bool include_crossover = true;

    static ProbeGrid log_spaced(double t_lo, double t_hi, std::size_t nt, double r_hi, std::size_t nr,
                                double r_lo = 1e-3);
};

struct BoundReport {
    double C1_hat = 0.0;
    double worst_t = 0.0;
    double worst_r = 0.0;
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    double argmin_t = 0.0, argmin_r = 0.0;
    double argmax_t = 0.0, argmax_r = 0.0;
    std::size_t probes = 0;
};

/// Extremes of p(t, x) (t^(1/alpha) + |x|)^(d + alpha) / t over the probe grid.
/// Kernel errors widen the interval, so ratio_min/ratio_max are certified
/// bounds on the grid. Rejects alpha = 2.
BoundReport check_two_sided_bound(std::span<const FractionalParams> params_range, const ProbeGrid& grid,
                                  std::size_t workers = 1);

} // namespace fracbern
