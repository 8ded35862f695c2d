#include "fracbern/periodic.hpp"

#include <boost/math/special_functions/bernoulli.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fracbern/kernel.hpp"
#include "fracbern/parallel.hpp"
#include "fracbern/quadrature.hpp"
#include "fracbern/radial_transform.hpp"

namespace fracbern {

namespace {

using std::numbers::pi;

constexpr double kMaxSeriesTerms = 6e7;
constexpr int kMaxLatticeRadius = 4096;

std::vector<double> reduce_to_cell(std::span<const double> x, int dim) {
    if (static_cast<int>(x.size()) != dim)
        throw std::invalid_argument("point dimension does not match the kernel dimension");
    std::vector<double> y(x.begin(), x.end());
    for (double& v : y)
        v -= std::round(v);
    return y;
}

double shell_count(int dim, long m) {
    return std::pow(2.0 * m + 1.0, dim) - std::pow(2.0 * m - 1.0, dim);
}

// Calls fn(n) for every n in [-K, K]^d.
template <class Fn>
void for_each_lattice_point(int dim, int K, Fn&& fn) {
    std::vector<long> n(static_cast<std::size_t>(dim), -K);
    for (;;) {
        fn(std::span<const long>(n));
        int a = dim - 1;
        while (a >= 0 && n[static_cast<std::size_t>(a)] == K) {
            n[static_cast<std::size_t>(a)] = -K;
            --a;
        }
        if (a < 0)
            return;
        ++n[static_cast<std::size_t>(a)];
    }
}

PeriodicValue fourier_series(const FractionalParams& params, double t, std::span<const double> x, int K, double tol) {
    const int dim = params.dim;
    if (K == 0) {
        int hi = 1;
        while (fourier_tail_bound(params, t, hi) > 0.5 * tol) {
            hi *= 2;
            if (hi > (1 << 24))
                break;
        }
        int lo = hi / 2;
        while (hi - lo > 1) {
            const int mid = (lo + hi) / 2;
            (fourier_tail_bound(params, t, mid) > 0.5 * tol ? lo : hi) = mid;
        }
        K = hi;
    }
    if (std::pow(2.0 * K + 1.0, dim) > kMaxSeriesTerms) {
        std::ostringstream msg;
        msg << "Fourier series needs |n|_inf <= " << K << " at t=" << t
            << ", beyond the term budget; use poisson_summation for small t";
        throw QuadratureError(msg.str());
    }
    double sum = 0.0, abs_sum = 0.0;
    if (dim == 1) {
        sum = 1.0;
        abs_sum = 1.0;
        for (long n = 1; n <= K; ++n) {
            const double w = std::exp(-t * std::pow(2.0 * pi * n, params.alpha));
            sum += 2.0 * w * std::cos(2.0 * pi * n * x[0]);
            abs_sum += 2.0 * w;
        }
    } else {
        for_each_lattice_point(dim, K, [&](std::span<const long> n) {
            double n2 = 0.0, phase = 0.0;
            for (std::size_t a = 0; a < n.size(); ++a) {
                n2 += static_cast<double>(n[a] * n[a]);
                phase += static_cast<double>(n[a]) * x[a];
            }
            const double w = std::exp(-t * std::pow(2.0 * pi * std::sqrt(n2), params.alpha));
            sum += w * std::cos(2.0 * pi * phase);
            abs_sum += w;
        });
    }
    PeriodicValue out;
    out.value = sum;
    out.abs_err = fourier_tail_bound(params, t, K) + 8.0 * std::numeric_limits<double>::epsilon() * abs_sum;
    out.lower = out.value - out.abs_err;
    out.trunc_radius = K;
    out.method = PeriodicMethod::fourier_series;
    return out;
}

// Integral of |y|^(-s) over the complement of the box x + [-h, h]^d, which contains 0.
double box_complement_integral(int dim, double s, std::span<const double> x, double h) {
    if (dim == 1)
        return (std::pow(h + x[0], 1.0 - s) + std::pow(h - x[0], 1.0 - s)) / (s - 1.0);
    if (dim == 2) {
        auto rho = [&](double th) {
            const double c = std::cos(th), sn = std::sin(th);
            double r = std::numeric_limits<double>::infinity();
            if (c > 0.0)
                r = std::min(r, (h + x[0]) / c);
            if (c < 0.0)
                r = std::min(r, (h - x[0]) / -c);
            if (sn > 0.0)
                r = std::min(r, (h + x[1]) / sn);
            if (sn < 0.0)
                r = std::min(r, (h - x[1]) / -sn);
            return r;
        };
        // rho is smooth between the corner directions.
        std::vector<double> edges{0.0};
        for (double cx : {x[0] + h, x[0] - h})
            for (double cy : {x[1] + h, x[1] - h}) {
                const double a = std::atan2(cy, cx);
                edges.push_back(a < 0.0 ? a + 2.0 * pi : a);
            }
        edges.push_back(2.0 * pi);
        std::sort(edges.begin(), edges.end());
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i)
            if (edges[i + 1] > edges[i])
                total += integrate_adaptive([&](double th) { return std::pow(rho(th), 2.0 - s); }, edges[i],
                                            edges[i + 1], 1e-14)
                             .value;
        return total / (s - 2.0);
    }
    // Ball of equal volume; the caller widens the error bar accordingly.
    const double radius = h * std::pow(std::pow(2.0, dim) / (unit_sphere_area(dim) / dim), 1.0 / dim);
    return unit_sphere_area(dim) * std::pow(radius, dim - s) / (s - dim);
}

// Estimate of sum over |n|_inf > K of p(t, x + n) from the far-field expansion.
struct TailEstimate {
    double value = 0.0;
    double abs_err = 0.0;
};

TailEstimate lattice_tail(const FractionalParams& params, double t, std::span<const double> x, int K) {
    const int dim = params.dim;
    const double h = K + 0.5;
    TailEstimate out;
    if (params.alpha == 2.0) {
        // Shell m lies at distance >= m - 1/2 from x and p decreases radially.
        const FractionalParams pt = params.with_time(t);
        for (long m = K + 1;; ++m) {
            const double term = shell_count(dim, m) * eval_closed_form(pt, m - 0.5);
            out.abs_err += term;
            if (term < 1e-3 * out.abs_err || term == 0.0 || m > K + 10000)
                break;
        }
        return out;
    }
    const double alpha = params.alpha;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 80; ++k) {
        const double s = dim + k * alpha;
        double lattice_sum;
        double model_err = 0.0;
        if (dim == 1) {
            lattice_sum = hurwitz_zeta(s, K + 1 + x[0]) + hurwitz_zeta(s, K + 1 - x[0]);
        } else {
            // Midpoint rule over unit cells: sum f = int f - (1/24) int Laplacian f + O(h^-4),
            // with Laplacian |y|^-s = s (s + 2 - d) |y|^(-s-2).
            const double correction = s * (s + 2.0 - dim) / 24.0 * box_complement_integral(dim, s + 2.0, x, h);
            lattice_sum = box_complement_integral(dim, s, x, h) - correction;
            model_err = std::abs(correction) * (s + 2.0) * (s + 4.0) / (8.0 * h * h);
            if (dim > 2)
                model_err += std::abs(lattice_sum);
        }
        const double coef = tail_series_coefficient(alpha, dim, k);
        const double envelope_term = tail_series_envelope(alpha, dim, k) * std::pow(t, k) * lattice_sum;
        if (envelope_term > prev || envelope_term < 1e-17 * std::abs(out.value)) {
            out.abs_err += envelope_term;
            break;
        }
        out.value += coef * std::pow(t, k) * lattice_sum;
        out.abs_err += std::abs(coef) * std::pow(t, k) * model_err;
        prev = envelope_term;
    }
    return out;
}

PeriodicValue poisson_sum(const FractionalParams& params, double t, std::span<const double> x, int K, double tol) {
    const int dim = params.dim;
    if (dim > kMaxKernelDim)
        throw std::invalid_argument("lattice sums need the whole-space kernel, d <= 3");
    const double scale = std::pow(t, 1.0 / params.alpha);
    const bool automatic = K == 0;
    if (automatic)
        K = std::max(4, static_cast<int>(std::ceil(6.0 * scale)));
    TailEstimate tail = lattice_tail(params, t, x, K);
    while (automatic && tail.abs_err > 0.5 * tol) {
        K *= 2;
        if (K > kMaxLatticeRadius || std::pow(2.0 * K + 1.0, dim) > 1e6) {
            std::ostringstream msg;
            msg << "lattice sum cannot reach tolerance " << tol << " at t=" << t << "; far-field error "
                << tail.abs_err;
            throw QuadratureError(msg.str());
        }
        tail = lattice_tail(params, t, x, K);
    }

    const double count = std::pow(2.0 * K + 1.0, dim);
    const double per_term = 0.25 * tol / count;
    const FractionalParams pt = params.with_time(t);
    double sum = 0.0, err = 0.0;
    for_each_lattice_point(dim, K, [&](std::span<const long> n) {
        double r2 = 0.0;
        for (std::size_t a = 0; a < n.size(); ++a) {
            const double y = x[a] + static_cast<double>(n[a]);
            r2 += y * y;
        }
        const double r = std::sqrt(r2);
        // Never ask a single kernel value for more than ~1e-11 relative accuracy.
        const double floor = 1e-11 * t / std::pow(scale + r, dim + params.alpha);
        const RadialKernelValue v = eval_radial_numeric(pt, r, std::max(per_term, floor));
        sum += v.value;
        err += v.abs_err;
    });
    PeriodicValue out;
    out.value = sum + tail.value;
    out.abs_err = err + tail.abs_err;
    out.lower = sum - err;
    out.trunc_radius = K;
    out.method = PeriodicMethod::poisson_summation;
    return out;
}

} // namespace

std::string to_string(PeriodicMethod m) {
    switch (m) {
    case PeriodicMethod::fourier_series: return "fourier_series";
    case PeriodicMethod::poisson_summation: return "poisson_summation";
    case PeriodicMethod::automatic: return "automatic";
    }
    return "automatic";
}

double fourier_tail_bound(const FractionalParams& params, double t, int K) {
    double sum = 0.0, prev = 0.0;
    for (long m = K + 1;; ++m) {
        const double term = shell_count(params.dim, m) * std::exp(-t * std::pow(2.0 * pi * m, params.alpha));
        sum += term;
        if (term == 0.0 || (term < prev && term < 1e-17 * sum))
            break;
        prev = term;
    }
    return sum;
}

double hurwitz_zeta(double s, double a) {
    if (!(s > 1.0) || !(a > 0.0))
        throw std::invalid_argument("Hurwitz zeta needs s > 1 and a > 0");
    // Euler-Maclaurin after shifting the argument past 10.
    constexpr int kShift = 10;
    double sum = 0.0;
    for (int j = 0; j < kShift; ++j)
        sum += std::pow(a + j, -s);
    const double b = a + kShift;
    sum += std::pow(b, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(b, -s);
    double rising = s;          // s (s+1) ... (s+2k-2)
    double power = std::pow(b, -s - 1.0);
    double factorial = 2.0;     // (2k)!
    for (int k = 1; k <= 12; ++k) {
        const double term = boost::math::bernoulli_b2n<double>(k) / factorial * rising * power;
        sum += term;
        if (std::abs(term) < 1e-18 * sum)
            break;
        rising *= (s + 2 * k - 1) * (s + 2 * k);
        power /= b * b;
        factorial *= (2 * k + 1) * (2 * k + 2);
    }
    return sum;
}

PeriodicValue periodic_kernel(const PeriodicKernelSpec& spec, double t, std::span<const double> x, double tol) {
    spec.params.validate();
    if (!(t > 0.0))
        throw std::invalid_argument("time must be positive");
    if (!(tol > 0.0))
        throw std::invalid_argument("tolerance must be positive");
    if (spec.trunc_radius < 0)
        throw std::invalid_argument("truncation radius must be nonnegative");
    const std::vector<double> y = reduce_to_cell(x, spec.params.dim);
    PeriodicMethod m = spec.method;
    if (m == PeriodicMethod::automatic)
        m = t >= kPeriodicSwitchTime ? PeriodicMethod::fourier_series : PeriodicMethod::poisson_summation;
    if (m == PeriodicMethod::fourier_series)
        return fourier_series(spec.params, t, y, spec.trunc_radius, tol);
    return poisson_sum(spec.params, t, y, spec.trunc_radius, tol);
}

std::vector<double> dyadic_times(int k_min, int k_max) {
    std::vector<double> t;
    for (int k = k_min; k <= k_max; ++k)
        t.push_back(std::ldexp(1.0, -k));
    return t;
}

std::vector<double> default_c3_axis() {
    std::vector<double> x;
    for (int i = 0; i <= 8; ++i)
        x.push_back(i / 16.0);
    return x;
}

LowerBoundReport estimate_c3(const FractionalParams& params, std::span<const double> t_grid,
                             std::span<const double> x_axis, std::size_t workers) {
    params.validate();
    if (params.alpha >= 2.0)
        throw std::invalid_argument("c3 lower bound is only available for alpha < 2; the periodic heat kernel "
                                    "is exponentially small away from the lattice");
    if (t_grid.empty() || x_axis.empty())
        throw std::invalid_argument("estimate_c3 needs nonempty grids");
    for (double t : t_grid)
        if (!(t > 0.0 && t <= 1.0))
            throw std::invalid_argument("c3 times must lie in (0, 1]");

    const int dim = params.dim;
    std::vector<std::vector<double>> points;
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a)
        total *= x_axis.size();
    for (std::size_t i = 0; i < total; ++i) {
        std::vector<double> p(static_cast<std::size_t>(dim));
        std::size_t rem = i;
        for (int a = dim - 1; a >= 0; --a) {
            p[static_cast<std::size_t>(a)] = x_axis[rem % x_axis.size()];
            rem /= x_axis.size();
        }
        points.push_back(std::move(p));
    }

    struct Cell {
        double t;
        std::size_t point;
        double ratio = 0.0;
    };
    std::vector<Cell> cells;
    for (double t : t_grid)
        for (std::size_t i = 0; i < points.size(); ++i)
            cells.push_back({t, i});
    PeriodicKernelSpec spec{params, 0, PeriodicMethod::automatic};
    parallel_for(cells.size(), workers, [&](std::size_t i) {
        Cell& c = cells[i];
        // Relative accuracy is all a lower bound needs.
        const double tol = 1e-6 * c.t;
        const PeriodicValue v = periodic_kernel(spec, c.t, points[c.point], tol);
        c.ratio = v.lower / c.t;
    });

    LowerBoundReport rep;
    rep.t_grid.assign(t_grid.begin(), t_grid.end());
    rep.x_axis.assign(x_axis.begin(), x_axis.end());
    rep.probes = cells.size();
    rep.c3_hat = std::numeric_limits<double>::infinity();
    for (const Cell& c : cells)
        if (c.ratio < rep.c3_hat) {
            rep.c3_hat = c.ratio;
            rep.argmin_t = c.t;
            rep.argmin_x = points[c.point];
        }
    if (!(rep.c3_hat > 0.0)) {
        std::ostringstream msg;
        msg << "periodic kernel lower bound is not positive at t=" << rep.argmin_t
            << "; evaluation tolerances are too loose";
        throw QuadratureError(msg.str());
    }
    return rep;
}

double periodic_decay_rate(const GridFunction& f, const FractionalParams& params, double q,
                           std::span<const double> t_grid) {
    params.validate();
    if (t_grid.empty())
        throw std::invalid_argument("decay rate needs a nonempty time grid");
    const double norm2 = lebesgue_norm(f, 2.0);
    const Complex mean = forward_dft(f)[0] * std::pow(f.box_len(), f.dim());
    if (!(std::abs(mean) < 1e-12 * norm2))
        throw std::invalid_argument("decay rate needs a mean-zero function");
    const double base = lebesgue_norm(f, q);
    double rate = std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        const double nt = lebesgue_norm(apply_multiplier(f, heat_semigroup(params.alpha, t)), q);
        rate = std::min(rate, -std::log(nt / base) / t);
    }
    return rate;
}

GridFunction counterexample_profile(double delta0, std::size_t n) {
    constexpr double kOuter = 0.25;
    if (!(delta0 > 0.0 && delta0 < kOuter))
        throw std::invalid_argument("plateau radius must lie in (0, 1/4) to leave room for the compensating bump");
    if (n < 64)
        throw std::invalid_argument("counterexample grid needs at least 64 samples");
    BumpProfile plateau;
    plateau.inner_radius = delta0;
    plateau.outer_radius = kOuter;
    std::vector<Complex> vals(n);
    const long half = static_cast<long>(n / 2);
    for (std::size_t j = 0; j < n; ++j) {
        const long jl = static_cast<long>(j);
        // Integer sample distances to the plateau centre 1/2 and to 0, so the
        // two bumps are exact mirror images and the mean vanishes exactly.
        const double to_centre = static_cast<double>(std::labs(jl - half)) / static_cast<double>(n);
        const double to_origin =
            static_cast<double>(std::min(jl, static_cast<long>(n) - jl)) / static_cast<double>(n);
        vals[j] = plateau(to_centre) - plateau(to_origin);
    }
    return {1, 1.0, n, std::move(vals), true};
}

CounterexampleReport heat_sup_counterexample(double delta0, std::span<const double> t_grid, std::size_t n) {
    const GridFunction f = counterexample_profile(delta0, n);
    const double base = lebesgue_norm(f, kInfNorm);
    CounterexampleReport rep;
    rep.delta0 = delta0;
    rep.n = n;
    for (double t : t_grid) {
        if (!(t > 0.0))
            throw std::invalid_argument("times must be positive");
        const GridFunction u = apply_multiplier(f, heat_semigroup(2.0, t));
        rep.rows.push_back({t, lebesgue_norm(u, kInfNorm) / base});
    }

    // log(1 - ratio) = log A - C / t on the smallest decade of resolvable t.
    std::vector<CounterexampleRow> usable;
    for (const auto& row : rep.rows)
        if (1.0 - row.ratio > 1e-12)
            usable.push_back(row);
    std::sort(usable.begin(), usable.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    if (!usable.empty()) {
        const double t_lo = usable.front().t;
        std::vector<CounterexampleRow> fit;
        for (const auto& row : usable)
            if (row.t <= 10.0 * t_lo)
                fit.push_back(row);
        if (fit.size() >= 2) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (const auto& row : fit) {
                const double xv = 1.0 / row.t, yv = std::log(1.0 - row.ratio);
                sx += xv;
                sy += yv;
                sxx += xv * xv;
                sxy += xv * yv;
            }
            const double m = static_cast<double>(fit.size());
            const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
            rep.fitted_C = -slope;
            rep.fit_points = fit.size();
        }
    }
    return rep;
}

} // namespace fracbern
