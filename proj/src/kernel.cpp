#include "fracbern/kernel.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fracbern/parallel.hpp"

namespace fracbern {

namespace {

using std::numbers::pi;

// Below this scaled radius the expansion is never trusted, whatever its own
// error estimate says.
constexpr double kSeriesMinScaledRadius = 4.0;

void require_supported_dim(int dim) {
    if (dim > kMaxKernelDim)
        throw std::invalid_argument("kernel quadrature supports d <= 3, got d = " + std::to_string(dim));
}

// |a_k| without the sin(pi k alpha / 2) factor, as a logarithm.
double log_coefficient_envelope(double alpha, int dim, int k) {
    const double ak = alpha * k;
    return ak * std::log(2.0) + std::lgamma(0.5 * (ak + dim)) + std::lgamma(0.5 * ak + 1.0) - std::lgamma(k + 1.0) -
           (0.5 * dim + 1.0) * std::log(pi);
}

// sin(pi k alpha / 2), exactly zero when k alpha / 2 is an integer.
double series_sine(double alpha, int k) {
    const double h = 0.5 * k * alpha;
    return h == std::floor(h) ? 0.0 : std::sin(pi * h);
}

template <class TermScale>
SeriesValue sum_expansion(double alpha, int dim, int max_terms, TermScale&& scale_log) {
    SeriesValue out;
    double prev_env = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= max_terms; ++k) {
        const double env = std::exp(log_coefficient_envelope(alpha, dim, k) + scale_log(k));
        if (k > 1 && env > prev_env) {
            out.abs_err = env;
            return out;
        }
        if (env < 1e-18 * std::abs(out.value) || env == 0.0) {
            out.abs_err = env;
            return out;
        }
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        out.value += sign * series_sine(alpha, k) * env;
        out.terms = k;
        prev_env = env;
    }
    out.abs_err = prev_env;
    return out;
}

} // namespace

double eval_closed_form(const FractionalParams& params, double r) {
    params.validate();
    if (r < 0.0)
        throw std::invalid_argument("radius must be nonnegative");
    const double t = params.t;
    const double d = params.dim;
    if (params.alpha == 2.0)
        return std::pow(4.0 * pi * t, -0.5 * d) * std::exp(-r * r / (4.0 * t));
    if (params.alpha == 1.0)
        return std::tgamma(0.5 * (d + 1.0)) * std::pow(pi, -0.5 * (d + 1.0)) * t /
               std::pow(t * t + r * r, 0.5 * (d + 1.0));
    throw std::invalid_argument("closed form exists only for alpha = 1 or alpha = 2");
}

RadialKernelValue eval_radial_numeric(const FractionalParams& params, double r, double tol) {
    params.validate();
    require_supported_dim(params.dim);
    if (!(tol > 0.0))
        throw std::invalid_argument("tolerance must be positive");
    const double time_scale = std::pow(params.t, 1.0 / params.alpha);
    if (params.alpha < 2.0 && r >= kSeriesMinScaledRadius * time_scale) {
        const FractionalParams unit = params.with_time(1.0);
        const double amplitude = std::pow(params.t, -params.dim / params.alpha);
        const SeriesValue sv = kernel_tail_series(unit, r / time_scale);
        if (4.0 * amplitude * sv.abs_err <= tol)
            return {r, amplitude * sv.value, amplitude * sv.abs_err};
    }
    return eval_radial_quadrature(params, r, tol);
}

RadialKernelValue eval_radial_quadrature(const FractionalParams& params, double r, double tol) {
    params.validate();
    require_supported_dim(params.dim);
    if (!(tol > 0.0))
        throw std::invalid_argument("tolerance must be positive");
    if (!(r >= 0.0))
        throw std::invalid_argument("radius must be nonnegative");

    const double alpha = params.alpha;
    const int dim = params.dim;
    const double time_scale = std::pow(params.t, 1.0 / alpha);  // t^(1/alpha)
    const double amplitude = std::pow(params.t, -dim / alpha);   // t^(-d/alpha)
    const double s = r / time_scale;

    RadialSymbol symbol;
    symbol.amplitude = [alpha](double u) { return std::exp(-std::pow(u, alpha)); };
    symbol.tail_mass = [alpha, dim](double U) {
        return boost::math::tgamma(dim / alpha, std::pow(U, alpha)) / alpha;
    };
    RadialTransformOptions opts;
    opts.abs_tol = tol / amplitude;
    const QuadResult q = inverse_radial_fourier(dim, symbol, s, opts);

    RadialKernelValue out{r, amplitude * q.value, amplitude * q.abs_err};
    if (!q.converged || !(out.abs_err <= tol)) {
        std::ostringstream msg;
        msg << "kernel quadrature failed: alpha=" << alpha << " d=" << dim << " t=" << params.t << " r=" << r
            << " error estimate " << out.abs_err << " exceeds tolerance " << tol << " after " << q.evals
            << " evaluations";
        throw QuadratureError(msg.str());
    }
    return out;
}

double tail_series_coefficient(double alpha, int dim, int k) {
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    return sign * series_sine(alpha, k) * std::exp(log_coefficient_envelope(alpha, dim, k));
}

double tail_series_envelope(double alpha, int dim, int k) { return std::exp(log_coefficient_envelope(alpha, dim, k)); }

SeriesValue kernel_tail_series(const FractionalParams& params, double r, int max_terms) {
    params.validate();
    if (!(r > 0.0))
        throw std::invalid_argument("tail expansion needs r > 0");
    if (params.alpha == 2.0)
        return {0.0, eval_closed_form(params, r), 0};
    const double lt = std::log(params.t);
    const double lr = std::log(r);
    const double alpha = params.alpha;
    const int dim = params.dim;
    return sum_expansion(alpha, dim, max_terms,
                         [&](int k) { return k * lt - (dim + k * alpha) * lr; });
}

SeriesValue kernel_tail_mass(const FractionalParams& params, double R, int max_terms) {
    params.validate();
    if (!(R > 0.0))
        throw std::invalid_argument("tail mass needs R > 0");
    const int dim = params.dim;
    const double omega = unit_sphere_area(dim);
    if (params.alpha == 2.0) {
        const double bound =
            0.5 * omega * std::pow(pi, -0.5 * dim) * boost::math::tgamma(0.5 * dim, R * R / (4.0 * params.t));
        return {0.0, bound, 0};
    }
    const double alpha = params.alpha;
    const double lt = std::log(params.t);
    const double lR = std::log(R);
    SeriesValue s = sum_expansion(alpha, dim, max_terms, [&](int k) {
        return std::log(omega / (k * alpha)) + k * lt - k * alpha * lR;
    });
    return s;
}

MassEstimate l1_mass(const FractionalParams& params, double tol) {
    params.validate();
    require_supported_dim(params.dim);
    if (!(tol > 0.0))
        throw std::invalid_argument("tolerance must be positive");
    // Mass is scale invariant, so integrate the t = 1 profile.
    const FractionalParams unit = params.with_time(1.0);
    const int dim = params.dim;
    const double omega = unit_sphere_area(dim);

    double cutoff = 16.0;
    SeriesValue tail = kernel_tail_mass(unit, cutoff);
    while (tail.abs_err > 0.25 * tol) {
        cutoff *= 2.0;
        if (cutoff > 1e5)
            throw QuadratureError("kernel mass tail cannot be certified to tolerance " + std::to_string(tol));
        tail = kernel_tail_mass(unit, cutoff);
    }

    const double inner_tol = 0.05 * tol / (omega * std::pow(cutoff, dim));
    double propagated = 0.0;
    auto integrand = [&](double s) {
        const RadialKernelValue v = eval_radial_numeric(unit, s, inner_tol);
        return omega * std::pow(s, dim - 1) * v.value;
    };
    std::vector<double> edges{0.0, 0.5};
    for (double e = 1.0; e < cutoff; e *= 2.0)
        edges.push_back(e);
    edges.push_back(cutoff);

    double body = 0.0, body_err = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double share = 0.25 * tol * (edges[i + 1] - edges[i]) / cutoff;
        const QuadResult q = integrate_adaptive(integrand, edges[i], edges[i + 1], share);
        body += q.value;
        body_err += q.abs_err;
    }
    propagated = inner_tol * omega * std::pow(cutoff, dim) / dim;

    MassEstimate out;
    out.cutoff = cutoff;
    out.tail = tail.value;
    out.value = body + tail.value;
    out.abs_err = body_err + propagated + tail.abs_err;
    if (out.abs_err > tol)
        throw QuadratureError("kernel mass error estimate " + std::to_string(out.abs_err) + " exceeds tolerance " +
                              std::to_string(tol));
    return out;
}

ProbeGrid ProbeGrid::log_spaced(double t_lo, double t_hi, std::size_t nt, double r_hi, std::size_t nr,
                                double r_lo) {
    ProbeGrid g;
    for (std::size_t i = 0; i < nt; ++i) {
        const double f = nt == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(nt - 1);
        g.t.push_back(t_lo * std::pow(t_hi / t_lo, f));
    }
    g.r.push_back(0.0);
    for (std::size_t i = 0; i < nr; ++i) {
        const double f = nr == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(nr - 1);
        g.r.push_back(r_lo * std::pow(r_hi / r_lo, f));
    }
    return g;
}

BoundReport check_two_sided_bound(std::span<const FractionalParams> params_range, const ProbeGrid& grid,
                                  std::size_t workers) {
    if (params_range.empty() || grid.t.empty() || grid.r.empty())
        throw std::invalid_argument("two-sided bound check needs a nonempty parameter set and probe grid");

    struct Probe {
        FractionalParams params;
        double r;
        double lo = 0.0, hi = 0.0;
    };
    std::vector<Probe> probes;
    for (const auto& p : params_range) {
        p.validate();
        require_supported_dim(p.dim);
        if (p.alpha >= 2.0)
            throw std::invalid_argument(
                "the two-sided power-law bound holds only for alpha < 2; the Gaussian kernel decays "
                "faster than any power");
        for (double t : grid.t) {
            const FractionalParams pt = p.with_time(t);
            for (double r : grid.r)
                probes.push_back({pt, r});
            if (grid.include_crossover)
                probes.push_back({pt, std::pow(t, 1.0 / p.alpha)});
        }
    }

    parallel_for(probes.size(), workers, [&](std::size_t i) {
        Probe& pr = probes[i];
        const double t = pr.params.t;
        const double scale = t / std::pow(std::pow(t, 1.0 / pr.params.alpha) + pr.r, pr.params.dim + pr.params.alpha);
        const RadialKernelValue v = eval_radial_numeric(pr.params, pr.r, 1e-9 * scale);
        pr.lo = v.lower() / scale;
        pr.hi = v.upper() / scale;
    });

    BoundReport rep;
    rep.ratio_min = std::numeric_limits<double>::infinity();
    rep.ratio_max = 0.0;
    for (const Probe& pr : probes) {
        if (pr.lo < rep.ratio_min) {
            rep.ratio_min = pr.lo;
            rep.argmin_t = pr.params.t;
            rep.argmin_r = pr.r;
        }
        if (pr.hi > rep.ratio_max) {
            rep.ratio_max = pr.hi;
            rep.argmax_t = pr.params.t;
            rep.argmax_r = pr.r;
        }
    }
    rep.probes = probes.size();
    if (!(rep.ratio_min > 0.0))
        throw QuadratureError("kernel ratio lower bound is not certified positive");
    if (rep.ratio_max >= 1.0 / rep.ratio_min) {
        rep.C1_hat = rep.ratio_max;
        rep.worst_t = rep.argmax_t;
        rep.worst_r = rep.argmax_r;
    } else {
        rep.C1_hat = 1.0 / rep.ratio_min;
        rep.worst_t = rep.argmin_t;
        rep.worst_r = rep.argmin_r;
    }
    return rep;
}

} // namespace fracbern
