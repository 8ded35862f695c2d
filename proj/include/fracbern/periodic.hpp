#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fracbern/grid.hpp"
#include "fracbern/params.hpp"

namespace fracbern {

enum class PeriodicMethod { fourier_series, poisson_summation, automatic };

std::string to_string(PeriodicMethod m);

/// Below this time `automatic` sums translated kernels, above it the Fourier series.
inline constexpr double kPeriodicSwitchTime = 0.5;

/// Kernel of exp(-t |grad|^alpha) on the unit torus R^d / Z^d.
/// `params.t` is ignored; the time is passed per evaluation.
struct PeriodicKernelSpec {
    FractionalParams params;
    /// Lattice truncation |n|_inf <= K; 0 picks the smallest K meeting the tolerance.
    int trunc_radius = 0;
    PeriodicMethod method = PeriodicMethod::automatic;
};

struct PeriodicValue {
    double value = 0.0;
    double abs_err = 0.0;
    /// Certified lower bound: value - abs_err for the series; for the lattice
    /// sum, the truncated sum of positive terms minus kernel errors.
    double lower = 0.0;
    int trunc_radius = 0;
    PeriodicMethod method = PeriodicMethod::fourier_series;
};

/// Fourier series  sum_n exp(-t (2 pi |n|)^alpha) cos(2 pi n.x)  over |n|_inf <= K, with the
/// tail bounded by sum_{m > K} ((2m+1)^d - (2m-1)^d) exp(-t (2 pi m)^alpha);
/// or the lattice sum  sum_n p(t, x + n)  over |n|_inf <= K plus a far-field
/// estimate of the remaining terms.
PeriodicValue periodic_kernel(const PeriodicKernelSpec& spec, double t, std::span<const double> x,
                              double tol = 1e-10);

/// Rigorous bound on the Fourier-series terms with |n|_inf > K.
double fourier_tail_bound(const FractionalParams& params, double t, int K);

/// Hurwitz zeta  sum_{j >= 0} (a + j)^(-s),  s > 1, a > 0.
double hurwitz_zeta(double s, double a);

struct LowerBoundReport {
    double c3_hat = 0.0;
    double argmin_t = 0.0;
    std::vector<double> argmin_x;
    std::vector<double> t_grid;
    std::vector<double> x_axis; ///< per-axis coordinates of the product x grid
    std::size_t probes = 0;
};

/// min over the grid of the certified lower bound of k_per(t, x) / t. Rejects alpha = 2.
LowerBoundReport estimate_c3(const FractionalParams& params, std::span<const double> t_grid,
                             std::span<const double> x_axis, std::size_t workers = 1);

/// Default grids for estimate_c3: t = 2^-k, k = 0..10; x per axis in {0, 1/16, ..., 1/2}.
std::vector<double> dyadic_times(int k_min, int k_max);
std::vector<double> default_c3_axis();

/// min over t of -log(||exp(-t |grad|^alpha) f||_q / ||f||_q) / t for mean-zero f.
double periodic_decay_rate(const GridFunction& f, const FractionalParams& params, double q,
                           std::span<const double> t_grid);

struct CounterexampleRow {
    double t = 0.0;
    double ratio = 0.0;
};

struct CounterexampleReport {
    std::vector<CounterexampleRow> rows;
    /// C in 1 - ratio ~ A exp(-C / t), fitted over the smallest resolvable decade of t.
    double fitted_C = 0.0;
    std::size_t fit_points = 0;
    double delta0 = 0.0;
    std::size_t n = 0;
};

/// Mean-zero f on the unit circle with f = 1 on |x - 1/2| <= delta0 and
/// ||f||_inf = 1, built from two smooth plateau bumps of opposite sign.
GridFunction counterexample_profile(double delta0, std::size_t n);

/// sup-norm ratio ||exp(t Delta) f||_inf / ||f||_inf for the profile above, alpha = 2, d = 1.
CounterexampleReport heat_sup_counterexample(double delta0, std::span<const double> t_grid, std::size_t n = 4096);

} // namespace fracbern
