#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "fracbern/bump.hpp"
#include "fracbern/kernel.hpp"
#include "fracbern/params.hpp"

namespace fracbern {

/// Kernel of exp(-t((2 pi |xi|)^alpha + eps phi1(xi))) and its difference
/// from the unperturbed kernel. `params.t` is ignored; times are passed per call.
struct PerturbedKernelSpec {
    FractionalParams params;
    double eps = 0.0;
    BumpProfile phi1 = make_bump(BumpKind::perturb_phi1);

    void validate() const;
};

struct KernelValue {
    double value = 0.0;
    double abs_err = 0.0;
};

/// F_eps(t, r): inverse transform of exp(-t(2 pi |xi|)^alpha)(exp(-eps t phi1(xi)) - 1).
/// The symbol vanishes for |xi| >= 1/3, so the integral is over a finite range.
KernelValue eval_F_eps(const PerturbedKernelSpec& spec, double t, double r, double tol);

/// k_eps(t, r) = p(t, r) + F_eps(t, r); the two error estimates add.
KernelValue eval_k_eps(const PerturbedKernelSpec& spec, double t, double r, double tol);

struct CertificatePoint {
    double t = 0.0;
    double r = 0.0;
    double p = 0.0, p_err = 0.0;
    double p2 = 0.0, p2_err = 0.0; ///< p(2t, r)
    double F = 0.0, F_err = 0.0;
    /// p - |F| - p_err - F_err
    double margin() const;
    double relative_margin() const { return margin() / p; }
};

struct PositivityGrids {
    std::vector<double> t{1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
    std::size_t r_points = 60;
    /// Radius range per time: [0, max(r_scale t^(1/alpha), r_floor)].
    double r_scale = 50.0;
    double r_floor = 50.0;
    /// Relative accuracy of every kernel value against the two-sided envelope.
    double rel_tol = 1e-6;

    static PositivityGrids standard() { return {}; }
    std::vector<double> radii(double alpha, double t) const;
};

struct PositivityCertificate {
    double eps = 0.0;
    std::vector<CertificatePoint> points;
    double min_margin = 0.0;
    double min_relative_margin = 0.0;
    double worst_t = 0.0, worst_r = 0.0;
    /// max |F| / (eps p(2t, .)) over the grid.
    double envelope_const = 0.0;
    /// max p(2t, .) / p(t, .) over the grid.
    double doubling_const = 0.0;
    /// Two-sided bound constant used in the far-field comparison.
    double C1 = 0.0;
    /// 2 C1^2 envelope_const eps < 1: the envelope and the two-sided bound
    /// keep |F| below p beyond the largest grid radius.
    bool tail_bound_ok = false;

    bool positive() const { return min_margin > 0.0 && tail_bound_ok; }
    nlohmann::json to_json(std::size_t worst_count = 8) const;
};

/// Kernel values p(t, r) and p(2t, r) on the certificate grid, reused across eps.
struct PositivityBaseline {
    FractionalParams params;
    PositivityGrids grids;
    std::vector<CertificatePoint> points;
    double C1 = 0.0;
};

PositivityBaseline prepare_baseline(const FractionalParams& params, const PositivityGrids& grids,
                                    std::size_t workers = 1);

PositivityCertificate certify_positivity(const PositivityBaseline& base, double eps, std::size_t workers = 1);

struct EpsSearchResult {
    double eps_star = 0.0;
    PositivityCertificate cert;
    std::size_t steps = 0;
    std::string diagnostics;
};

/// Largest eps in [0, eps_hi] found by bisection whose certificate is positive.
EpsSearchResult find_eps_star(const FractionalParams& params, const PositivityGrids& grids = {},
                              double eps_hi = 1.0, int bisection_steps = 20, std::size_t workers = 1);

struct MassValue {
    double value = 0.0;
    double abs_err = 0.0;
    double cutoff = 0.0;
};

/// Integral of |k_eps(t, .)| over R^d: quadrature to a cutoff plus
/// exp(-eps t) times the far-field mass of p.
MassValue k_eps_l1(const PerturbedKernelSpec& spec, double t, double tol);

struct BandedL1 {
    double value = 0.0;
    double abs_err = 0.0;
    /// Integral of |g| over the ball of radius `cutoff` minus every error estimate.
    double lower_bound = 0.0;
    double cutoff = 0.0;
};

/// L1 norm of g(t, .) = inverse transform of psi(xi) exp(-t (2 pi |xi|)^alpha),
/// psi(xi) = phi(xi) - phi(2 xi).
BandedL1 banded_kernel_l1(const FractionalParams& params, double t, double tol);

/// g(t, r) from banded_kernel_l1.
KernelValue eval_banded_kernel(const FractionalParams& params, double t, double r, double tol);

} // namespace fracbern
