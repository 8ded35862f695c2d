#include "fracbern/radial_transform.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracbern {

namespace {

using std::numbers::pi;

const std::vector<double>& j0_zero_table() {
    static const std::vector<double> table = [] {
        std::vector<double> z(2048);
        for (std::size_t k = 0; k < z.size(); ++k)
            z[k] = boost::math::cyl_bessel_j_zero(0.0, static_cast<int>(k + 1));
        return z;
    }();
    return table;
}

double r0_prefactor(int dim) {
    switch (dim) {
    case 1: return 1.0 / pi;
    case 2: return 1.0 / (2.0 * pi);
    default: return 1.0 / (2.0 * pi * pi);
    }
}

} // namespace

double unit_sphere_area(int dim) {
    switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * pi;
    case 3: return 4.0 * pi;
    default: return 2.0 * std::pow(pi, 0.5 * dim) / std::tgamma(0.5 * dim);
    }
}

double oscillation_zero(int dim, std::size_t k) {
    switch (dim) {
    case 1: return (static_cast<double>(k) - 0.5) * pi;
    case 3: return static_cast<double>(k) * pi;
    default: {
        const auto& table = j0_zero_table();
        if (k <= table.size())
            return table[k - 1];
        // McMahon expansion; panel edges only need to sit near the zeros.
        const double beta = (static_cast<double>(k) - 0.25) * pi;
        const double b2 = beta * beta;
        return beta + 1.0 / (8.0 * beta) - 31.0 / (384.0 * beta * b2);
    }
    }
}

QuadResult inverse_radial_fourier(int dim, const RadialSymbol& symbol, double r, const RadialTransformOptions& opts) {
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("radial transforms are implemented for d <= 3, got d = " + std::to_string(dim));
    if (!(r >= 0.0))
        throw std::invalid_argument("radius must be nonnegative");
    if (!(opts.abs_tol > 0.0))
        throw std::invalid_argument("tolerance must be positive");

    const auto& m = symbol.amplitude;
    double prefactor = r0_prefactor(dim);
    RealFunction integrand;
    if (r == 0.0) {
        integrand = [&m, dim](double u) { return m(u) * (dim == 1 ? 1.0 : (dim == 2 ? u : u * u)); };
    } else if (dim == 1) {
        integrand = [&m, r](double u) { return m(u) * std::cos(r * u); };
    } else if (dim == 2) {
        integrand = [&m, r](double u) { return m(u) * u * boost::math::cyl_bessel_j(0, r * u); };
    } else {
        prefactor /= r;
        integrand = [&m, r](double u) { return m(u) * u * std::sin(r * u); };
    }
    const double tol_u = opts.abs_tol / prefactor;
    // |integrand| <= weight_scale * |m(u)| u^(d-1)
    const double weight_scale = (dim == 3 && r > 0.0) ? r : 1.0;

    QuadResult acc;
    auto add_panel = [&](double a, double b, double tol) {
        const std::size_t budget = opts.max_evals > acc.evals ? opts.max_evals - acc.evals : 0;
        QuadResult q = integrate_adaptive(integrand, a, b, tol, std::max<std::size_t>(budget, 15));
        acc.value += q.value;
        acc.abs_err += q.abs_err;
        acc.evals += q.evals;
        return q;
    };
    auto finish = [&](QuadResult q) {
        q.value *= prefactor;
        q.abs_err *= prefactor;
        q.converged = q.abs_err <= opts.abs_tol;
        return q;
    };

    // Panel edges strictly inside (lo, hi) at the oscillation zeros.
    auto panel_edges = [&](double lo, double hi) {
        std::vector<double> edges{lo};
        if (r > 0.0) {
            std::size_t k = 1;
            if (dim != 2)
                k = static_cast<std::size_t>(std::max(1.0, std::floor(lo * r / pi)));
            while (oscillation_zero(dim, k) / r <= lo)
                ++k;
            for (double z = oscillation_zero(dim, k) / r; z < hi; z = oscillation_zero(dim, ++k) / r)
                edges.push_back(z);
        }
        edges.push_back(hi);
        return edges;
    };

    const double lo = symbol.u_min;
    if (std::isfinite(symbol.u_max)) {
        const double hi = symbol.u_max;
        if (!(hi > lo))
            return {};
        auto edges = panel_edges(lo, hi);
        if (edges.size() == 2 && r == 0.0) {
            // Non-oscillatory; pre-split so the adaptive rule sees structure early.
            edges.clear();
            for (int i = 0; i <= 8; ++i)
                edges.push_back(lo + (hi - lo) * i / 8.0);
        }
        for (std::size_t i = 0; i + 1 < edges.size(); ++i)
            add_panel(edges[i], edges[i + 1], 0.5 * tol_u * (edges[i + 1] - edges[i]) / (hi - lo));
        return finish(acc);
    }

    if (!symbol.tail_mass)
        throw std::invalid_argument("semi-infinite symbol needs a tail bound");
    auto tail = [&](double u) { return weight_scale * symbol.tail_mass(u); };
    double cutoff = std::max(lo + 1.0, 1.0);
    while (tail(cutoff) > 0.25 * tol_u) {
        cutoff *= 2.0;
        if (cutoff > 1e12)
            throw QuadratureError("symbol tail does not decay below tolerance");
    }
    const double tail_err = tail(cutoff);

    const double panels_to_cutoff = r * (cutoff - lo) / pi;
    if (r == 0.0 || panels_to_cutoff <= static_cast<double>(opts.direct_panel_limit)) {
        std::vector<double> edges;
        if (r == 0.0) {
            edges.push_back(lo);
            for (double e = std::max(lo, 0.0) + 1.0; e < cutoff; e *= 2.0)
                if (e > lo)
                    edges.push_back(e);
            edges.push_back(cutoff);
        } else {
            edges = panel_edges(lo, cutoff);
        }
        const double width = cutoff - lo;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i)
            add_panel(edges[i], edges[i + 1], 0.5 * tol_u * (edges[i + 1] - edges[i]) / width);
        acc.abs_err += tail_err;
        return finish(acc);
    }

    // Many oscillations before the amplitude dies: sum panels between zeros
    // and extrapolate the partial sums.
    WynnEpsilon wynn;
    const double panel_tol = 0.02 * tol_u;
    double a = lo;
    std::size_t k = 1;
    while (oscillation_zero(dim, k) / r <= lo)
        ++k;
    double sum = 0.0;
    double quad_err = 0.0;
    for (std::size_t panel = 0;; ++panel, ++k) {
        double b = oscillation_zero(dim, k) / r;
        const bool last = b >= cutoff;
        if (last)
            b = cutoff;
        QuadResult q = add_panel(a, b, panel_tol);
        sum += q.value;
        quad_err += q.abs_err;
        if (last) {
            QuadResult out{sum, quad_err + tail_err, acc.evals, true};
            return finish(out);
        }
        const Extrapolation ext = wynn.push(sum);
        if (panel >= 8 && ext.abs_err + quad_err <= 0.5 * tol_u) {
            QuadResult out{ext.value, ext.abs_err + quad_err, acc.evals, true};
            return finish(out);
        }
        if (acc.evals > opts.max_evals) {
            QuadResult out{ext.value, ext.abs_err + quad_err, acc.evals, false};
            return finish(out);
        }
        a = b;
    }
}

} // namespace fracbern
