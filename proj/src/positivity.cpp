#include "fracbern/positivity.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fracbern/parallel.hpp"
#include "fracbern/radial_transform.hpp"

namespace fracbern {

namespace {

using std::numbers::pi;

double envelope(const FractionalParams& p, double t, double r) {
    return t / std::pow(std::pow(t, 1.0 / p.alpha) + r, p.dim + p.alpha);
}

// Sum of the radial transforms of `amplitude` over consecutive u-ranges.
KernelValue transform_pieces(int dim, const RealFunction& amplitude, std::initializer_list<double> edges, double r,
                             double tol, const char* what) {
    const std::vector<double> e(edges);
    KernelValue out;
    const double share = tol / static_cast<double>(e.size() - 1);
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
        RadialSymbol sym;
        sym.amplitude = amplitude;
        sym.u_min = e[i];
        sym.u_max = e[i + 1];
        RadialTransformOptions opts;
        opts.abs_tol = share;
        const QuadResult q = inverse_radial_fourier(dim, sym, r, opts);
        if (!q.converged) {
            std::ostringstream msg;
            msg << what << " quadrature failed at r=" << r << ": error " << q.abs_err << " exceeds " << share;
            throw QuadratureError(msg.str());
        }
        out.value += q.value;
        out.abs_err += q.abs_err;
    }
    return out;
}

constexpr double kPhi1Plateau = 2.0 * pi * 0.25;
constexpr double kPhi1Support = 2.0 * pi / 3.0;

} // namespace

void PerturbedKernelSpec::validate() const {
    params.validate();
    if (params.dim > kMaxKernelDim)
        throw std::invalid_argument("perturbed kernel supports d <= 3");
    if (!(params.alpha < 2.0))
        throw std::invalid_argument("the perturbed kernel is only studied for alpha < 2");
    if (!(eps >= 0.0))
        throw std::invalid_argument("eps must be nonnegative");
}

KernelValue eval_F_eps(const PerturbedKernelSpec& spec, double t, double r, double tol) {
    spec.validate();
    if (!(t > 0.0 && t <= 1.0))
        throw std::invalid_argument("F_eps is defined here for 0 < t <= 1");
    if (!(r >= 0.0) || !(tol > 0.0))
        throw std::invalid_argument("need r >= 0 and tol > 0");
    if (spec.eps == 0.0)
        return {};
    const double alpha = spec.params.alpha;
    const double et = spec.eps * t;
    const BumpProfile phi1 = spec.phi1;
    auto amplitude = [alpha, t, et, phi1](double u) {
        return std::exp(-t * std::pow(u, alpha)) * std::expm1(-et * phi1(u / (2.0 * pi)));
    };
    return transform_pieces(spec.params.dim, amplitude, {0.0, kPhi1Plateau, kPhi1Support}, r, tol, "F_eps");
}

KernelValue eval_k_eps(const PerturbedKernelSpec& spec, double t, double r, double tol) {
    const KernelValue F = eval_F_eps(spec, t, r, 0.5 * tol);
    const RadialKernelValue p = eval_radial_numeric(spec.params.with_time(t), r, 0.5 * tol);
    return {p.value + F.value, p.abs_err + F.abs_err};
}

double CertificatePoint::margin() const { return p - std::abs(F) - p_err - F_err; }

std::vector<double> PositivityGrids::radii(double alpha, double t) const {
    const double scale = std::pow(t, 1.0 / alpha);
    const double r_max = std::max(r_scale * scale, r_floor);
    const double r_min = 1e-2 * scale;
    std::vector<double> r{0.0};
    for (std::size_t i = 0; i < r_points; ++i) {
        const double f = r_points == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(r_points - 1);
        r.push_back(r_min * std::pow(r_max / r_min, f));
    }
    return r;
}

PositivityBaseline prepare_baseline(const FractionalParams& params, const PositivityGrids& grids,
                                    std::size_t workers) {
    params.validate();
    if (!(params.alpha < 2.0))
        throw std::invalid_argument("positivity certificates need alpha < 2");
    PositivityBaseline base{params, grids, {}, 0.0};
    for (double t : grids.t) {
        if (!(t > 0.0 && t <= 1.0))
            throw std::invalid_argument("certificate times must lie in (0, 1]");
        for (double r : grids.radii(params.alpha, t))
            base.points.push_back({t, r});
    }
    parallel_for(base.points.size(), workers, [&](std::size_t i) {
        CertificatePoint& cp = base.points[i];
        const RadialKernelValue p = eval_radial_numeric(params.with_time(cp.t), cp.r,
                                                        grids.rel_tol * envelope(params, cp.t, cp.r));
        const RadialKernelValue p2 = eval_radial_numeric(params.with_time(2.0 * cp.t), cp.r,
                                                         grids.rel_tol * envelope(params, 2.0 * cp.t, cp.r));
        cp.p = p.value;
        cp.p_err = p.abs_err;
        cp.p2 = p2.value;
        cp.p2_err = p2.abs_err;
    });

    // The two-sided constant over every time the comparison uses, out to
    // radii where the ratio has settled on its far-field limit.
    std::vector<double> times = grids.t;
    for (double t : grids.t)
        times.push_back(2.0 * t);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    ProbeGrid pg;
    pg.t = times;
    pg.r.push_back(0.0);
    for (int i = 0; i <= 120; ++i)
        pg.r.push_back(1e-3 * std::pow(1e7, i / 120.0));
    const FractionalParams one[] = {params};
    base.C1 = check_two_sided_bound(one, pg, workers).C1_hat;
    return base;
}

PositivityCertificate certify_positivity(const PositivityBaseline& base, double eps, std::size_t workers) {
    PerturbedKernelSpec spec;
    spec.params = base.params;
    spec.eps = eps;
    spec.validate();

    PositivityCertificate cert;
    cert.eps = eps;
    cert.C1 = base.C1;
    cert.points = base.points;
    parallel_for(cert.points.size(), workers, [&](std::size_t i) {
        CertificatePoint& cp = cert.points[i];
        const KernelValue F = eval_F_eps(spec, cp.t, cp.r, base.grids.rel_tol * envelope(base.params, cp.t, cp.r));
        cp.F = F.value;
        cp.F_err = F.abs_err;
    });

    cert.min_margin = std::numeric_limits<double>::infinity();
    cert.min_relative_margin = std::numeric_limits<double>::infinity();
    for (const CertificatePoint& cp : cert.points) {
        cert.min_margin = std::min(cert.min_margin, cp.margin());
        if (cp.relative_margin() < cert.min_relative_margin) {
            cert.min_relative_margin = cp.relative_margin();
            cert.worst_t = cp.t;
            cert.worst_r = cp.r;
        }
        cert.doubling_const = std::max(cert.doubling_const, (cp.p2 + cp.p2_err) / (cp.p - cp.p_err));
        if (eps > 0.0)
            cert.envelope_const =
                std::max(cert.envelope_const, (std::abs(cp.F) + cp.F_err) / (eps * (cp.p2 - cp.p2_err)));
    }
    cert.tail_bound_ok = 2.0 * cert.C1 * cert.C1 * cert.envelope_const * eps < 1.0;
    return cert;
}

nlohmann::json PositivityCertificate::to_json(std::size_t worst_count) const {
    nlohmann::json j;
    j["eps"] = eps;
    j["positive"] = positive();
    j["min_margin"] = min_margin;
    j["min_relative_margin"] = min_relative_margin;
    j["worst_point"] = {{"t", worst_t}, {"r", worst_r}};
    j["envelope_const"] = envelope_const;
    j["doubling_const"] = doubling_const;
    j["C1"] = C1;
    j["tail_bound_ok"] = tail_bound_ok;
    std::vector<double> t_grid;
    for (const auto& cp : points)
        if (t_grid.empty() || t_grid.back() != cp.t)
            t_grid.push_back(cp.t);
    j["t_grid"] = t_grid;
    j["points"] = points.size();

    std::vector<const CertificatePoint*> order;
    for (const auto& cp : points)
        order.push_back(&cp);
    const std::size_t k = std::min(worst_count, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<long>(k), order.end(),
                      [](const auto* a, const auto* b) { return a->relative_margin() < b->relative_margin(); });
    nlohmann::json worst = nlohmann::json::array();
    for (std::size_t i = 0; i < k; ++i) {
        const auto* cp = order[i];
        worst.push_back({{"t", cp->t},
                         {"r", cp->r},
                         {"p", cp->p},
                         {"p_err", cp->p_err},
                         {"F", cp->F},
                         {"F_err", cp->F_err},
                         {"margin", cp->margin()},
                         {"relative_margin", cp->relative_margin()}});
    }
    j["worst_points"] = worst;
    return j;
}

EpsSearchResult find_eps_star(const FractionalParams& params, const PositivityGrids& grids, double eps_hi,
                              int bisection_steps, std::size_t workers) {
    if (!(eps_hi > 0.0) || bisection_steps < 1)
        throw std::invalid_argument("need eps_hi > 0 and at least one bisection step");
    const PositivityBaseline base = prepare_baseline(params, grids, workers);
    EpsSearchResult res;
    PositivityCertificate hi_cert = certify_positivity(base, eps_hi, workers);
    res.steps = 1;
    if (hi_cert.positive()) {
        res.eps_star = eps_hi;
        res.cert = std::move(hi_cert);
        return res;
    }
    double lo = 0.0, hi = eps_hi;
    PositivityCertificate best = certify_positivity(base, 0.0, workers);
    for (int s = 0; s < bisection_steps; ++s) {
        const double mid = 0.5 * (lo + hi);
        PositivityCertificate c = certify_positivity(base, mid, workers);
        ++res.steps;
        if (c.positive()) {
            lo = mid;
            best = std::move(c);
        } else {
            hi = mid;
        }
    }
    res.eps_star = lo;
    res.cert = std::move(best);
    if (lo == 0.0) {
        std::ostringstream msg;
        const PositivityCertificate tiny = certify_positivity(base, hi, workers);
        msg << "no positive certificate for eps >= " << hi << ": min_margin " << tiny.min_margin
            << ", tail_bound_ok " << tiny.tail_bound_ok << "; check quadrature tolerances";
        res.diagnostics = msg.str();
    }
    return res;
}

MassValue k_eps_l1(const PerturbedKernelSpec& spec, double t, double tol) {
    spec.validate();
    if (!(tol > 0.0))
        throw std::invalid_argument("tolerance must be positive");
    const FractionalParams pt = spec.params.with_time(t);
    const int dim = pt.dim;
    const double omega = unit_sphere_area(dim);
    const double decay = std::exp(-spec.eps * t);

    // Far out k_eps = exp(-eps t) p up to a rapidly decaying remainder whose
    // symbol vanishes near the origin; stop once that remainder is negligible.
    double cutoff = 32.0;
    SeriesValue tail = kernel_tail_mass(pt, cutoff);
    for (;;) {
        const double probe_tol = 1e-3 * tol / (omega * std::pow(cutoff, dim)) + 1e-9 * envelope(pt, t, cutoff);
        const KernelValue k = eval_k_eps(spec, t, cutoff, probe_tol);
        const double p = eval_radial_numeric(pt, cutoff, probe_tol).value;
        const double remainder = std::abs(k.value - decay * p) * omega * std::pow(cutoff, dim);
        if (decay * tail.abs_err <= 0.25 * tol && remainder <= 0.05 * tol)
            break;
        cutoff *= 2.0;
        if (cutoff > 4096.0)
            throw QuadratureError("k_eps mass tail cannot be certified to tolerance");
        tail = kernel_tail_mass(pt, cutoff);
    }

    // Pointwise tolerance proportional to the two-sided envelope, whose
    // radial integral is omega B(d, alpha).
    const double envelope_mass = omega * std::beta(static_cast<double>(dim), pt.alpha);
    const double eta = 0.05 * tol / envelope_mass;
    auto integrand = [&](double s) {
        const double k = eval_k_eps(spec, t, s, eta * envelope(pt, t, s)).value;
        return omega * std::pow(s, dim - 1) * std::abs(k);
    };
    const double scale = std::min(1.0, std::pow(t, 1.0 / pt.alpha));
    std::vector<double> edges{0.0};
    for (double e = 0.5 * scale; e < cutoff; e *= 2.0)
        edges.push_back(e);
    edges.push_back(cutoff);

    MassValue out;
    out.cutoff = cutoff;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double share = 0.25 * tol / static_cast<double>(edges.size() - 1);
        const QuadResult q = integrate_adaptive(integrand, edges[i], edges[i + 1], share);
        out.value += q.value;
        out.abs_err += q.abs_err;
    }
    out.abs_err += 0.05 * tol + decay * tail.abs_err;
    out.value += decay * tail.value;
    return out;
}

KernelValue eval_banded_kernel(const FractionalParams& params, double t, double r, double tol) {
    params.validate();
    if (params.dim > kMaxKernelDim)
        throw std::invalid_argument("banded kernel supports d <= 3");
    if (!(t >= 0.0))
        throw std::invalid_argument("time must be nonnegative");
    const double alpha = params.alpha;
    auto amplitude = [alpha, t](double u) {
        const double decay = t == 0.0 ? 1.0 : std::exp(-t * std::pow(u, alpha));
        return lp_band_symbol(u / (2.0 * pi)) * decay;
    };
    return transform_pieces(params.dim, amplitude, {pi, 2.0 * pi, 4.0 * pi}, r, tol, "banded kernel");
}

BandedL1 banded_kernel_l1(const FractionalParams& params, double t, double tol) {
    params.validate();
    if (!(tol > 0.0))
        throw std::invalid_argument("tolerance must be positive");
    const int dim = params.dim;
    const double omega = unit_sphere_area(dim);
    constexpr double kMaxCutoff = 64.0;
    constexpr double kBlock = 4.0;
    // Pointwise tolerance against the radial weight, so that the propagated
    // error integrates to at most 0.05 tol over [0, kMaxCutoff].
    auto inner_tol = [&](double s) {
        return 0.05 * tol / (omega * std::pow(std::max(s, 1.0), dim - 1) * kMaxCutoff);
    };
    auto g = [&](double s) { return eval_banded_kernel(params, t, s, inner_tol(s)).value; };
    auto integrand = [&](double s) { return omega * std::pow(s, dim - 1) * std::abs(g(s)); };

    // |g| has kinks at the zeros of g; put panel edges there.
    constexpr double kStep = 0.05;
    BandedL1 out;
    double body_err = 0.0;
    double a = 0.0;
    double ga = g(0.0);
    double panel_start = 0.0;
    const double block_tol = 0.25 * tol * kBlock / kMaxCutoff;
    for (double block_end = kBlock; block_end <= kMaxCutoff; block_end += kBlock) {
        double block_sum = 0.0;
        auto close_panel = [&](double b) {
            if (b <= panel_start)
                return;
            const QuadResult q = integrate_adaptive(integrand, panel_start, b, 0.05 * block_tol);
            block_sum += q.value;
            body_err += q.abs_err;
            panel_start = b;
        };
        while (a < block_end - 1e-12) {
            const double b = std::min(a + kStep, block_end);
            const double gb = g(b);
            if ((ga < 0.0) != (gb < 0.0) && ga != 0.0 && gb != 0.0) {
                std::uintmax_t iters = 60;
                const auto root = boost::math::tools::toms748_solve(
                    g, a, b, ga, gb, boost::math::tools::eps_tolerance<double>(45), iters);
                close_panel(0.5 * (root.first + root.second));
            }
            a = b;
            ga = gb;
        }
        close_panel(block_end);
        out.value += block_sum;
        out.cutoff = block_end;
        if (block_sum <= 1e-3 * tol)
            break;
    }
    const double propagated = 0.05 * tol * out.cutoff / kMaxCutoff;
    out.abs_err = body_err + propagated;
    out.lower_bound = out.value - out.abs_err;
    return out;
}

} // namespace fracbern
