#include "fracbern/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fracbern/parallel.hpp"

namespace fracbern {

namespace {

using std::numbers::pi;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Score {
    double value = kInf;
    double t = 0.0;
};

void require_pairing_exponent(double q) {
    if (!(q > 1.0) || q == kInfNorm)
        throw std::invalid_argument("pairing-based constants need 1 < q < inf");
}

// Riemann sum of |u|^q.
double power_sum(const GridFunction& u, double q) {
    double s = 0.0;
    for (const auto& v : u.values())
        s += std::pow(std::abs(v), q);
    return s * u.cell_volume();
}

template <class Objective>
ConstantEstimate run_estimator(ConstantEstimate est, bool minimize, const EstimatorOptions& opts,
                               Objective&& objective) {
    const EnsembleSpec& ens = est.ensemble;
    ens.validate();
    std::vector<Score> scores(ens.n_samples);
    parallel_for(ens.n_samples, opts.workers,
                 [&](std::size_t i) { scores[i] = objective(sample_band_limited(ens, i)); });

    auto better = [minimize](double a, double b) { return minimize ? a < b : a > b; };
    bool found = false;
    Score best;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i].value))
            continue; // degenerate member
        if (!found || better(scores[i].value, best.value)) {
            best = scores[i];
            est.witness_index = i;
            found = true;
        }
    }
    if (!found)
        throw std::runtime_error("every ensemble member is degenerate for " + to_string(est.quantity));
    est.ensemble_value = best.value;

    if (opts.refine) {
        ModeCoefficients mc = draw_coefficients(ens, est.witness_index);
        double rms = 0.0;
        for (const auto& c : mc.coeffs)
            rms += std::norm(c);
        const double step = opts.refine_step * std::sqrt(rms / static_cast<double>(mc.coeffs.size()));
        for (std::size_t j = 0; j < mc.coeffs.size(); ++j) {
            for (const Complex dir : {Complex(1, 0), Complex(0, 1)}) {
                for (const double sign : {1.0, -1.0}) {
                    ModeCoefficients trial = mc;
                    trial.coeffs[j] += sign * step * dir;
                    const Score s = objective(synthesize(ens, trial));
                    // Round-off level changes are not improvements.
                    const double margin = 1e-12 * std::abs(best.value);
                    if (std::isfinite(s.value) && better(s.value, minimize ? best.value - margin : best.value + margin)) {
                        best = s;
                        mc = std::move(trial);
                        est.refined = true;
                    }
                }
            }
        }
    }
    est.value = best.value;
    est.witness_t = best.t;
    return est;
}

ConstantEstimate blank(Quantity quantity, const FractionalParams& params, double q, double N,
                       const EnsembleSpec& ens) {
    params.validate();
    ens.validate();
    if (ens.dim != params.dim)
        throw std::invalid_argument("ensemble dimension does not match the parameters");
    ConstantEstimate est;
    est.quantity = quantity;
    est.alpha = params.alpha;
    est.dim = params.dim;
    est.q = q;
    est.N = N;
    est.ensemble = ens;
    return est;
}

} // namespace

std::string to_string(Quantity q) {
    switch (q) {
    case Quantity::decay_c: return "decay_c";
    case Quantity::bernstein_c: return "bernstein_c";
    case Quantity::poincare_c: return "poincare_c";
    case Quantity::maximal_C: return "maximal_C";
    }
    return "unknown";
}

std::string ConstantEstimate::witness() const {
    std::ostringstream s;
    s << "member=" << witness_index;
    if (quantity == Quantity::decay_c || quantity == Quantity::maximal_C) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", witness_t);
        s << ";t=" << buf;
    }
    if (refined)
        s << ";refined";
    return s.str();
}

std::vector<double> default_decay_times() {
    std::vector<double> t;
    for (int k = 0; k <= 12; ++k)
        t.push_back(std::ldexp(1.0, -k));
    return t;
}

double decay_rate(const GridFunction& f, double N, double alpha, double q, std::span<const double> t_grid,
                  double ratio_floor, double* argmin_t) {
    if (t_grid.empty())
        throw std::invalid_argument("decay rate needs a nonempty time grid");
    const GridFunction g = lp_project(f, N, LpKind::band);
    const double base = lebesgue_norm(g, q);
    if (!(base > 0.0))
        return kInf;
    const double scale = std::pow(N, alpha);
    double best = kInf;
    for (double t : t_grid) {
        if (!(t > 0.0))
            throw std::invalid_argument("decay times must be positive");
        const double ratio = lebesgue_norm(apply_multiplier(g, heat_semigroup(alpha, t)), q) / base;
        if (ratio < ratio_floor)
            continue;
        const double rate = -std::log(ratio) / (t * scale);
        if (rate < best) {
            best = rate;
            if (argmin_t)
                *argmin_t = t;
        }
    }
    return best;
}

double bernstein_ratio(const GridFunction& f, double N, double alpha, double q, LpKind projection) {
    require_pairing_exponent(q);
    const GridFunction g = lp_project(f, N, projection);
    const double mass = power_sum(g, q);
    if (!(mass > 0.0))
        return kInf;
    return fractional_pairing(g, alpha, q) / (std::pow(N, alpha) * mass);
}

double poincare_ratio(const GridFunction& f, double alpha, double q) {
    require_pairing_exponent(q);
    const double norm2 = lebesgue_norm(f, 2.0);
    const Complex mean = forward_dft(f)[0];
    if (!(std::abs(mean) * std::pow(f.box_len(), f.dim()) < 1e-12 * norm2))
        throw std::invalid_argument("Poincare constants need mean-zero functions");
    const double mass = power_sum(f, q);
    if (!(mass > 0.0))
        return kInf;
    return fractional_pairing(f, alpha, q) / mass;
}

double maximal_ratio(const GridFunction& f, double alpha, std::span<const double> t_grid, double* argmax_t) {
    const GridFunction M = maximal_function(f);
    double best = 0.0;
    for (double t : t_grid) {
        const GridFunction u = apply_multiplier(f, heat_semigroup(alpha, t));
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double m = M.real(i);
            if (m == 0.0)
                continue;
            const double r = std::abs(u.values()[i]) / m;
            if (r > best) {
                best = r;
                if (argmax_t)
                    *argmax_t = t;
            }
        }
    }
    return best;
}

ConstantEstimate estimate_decay_constant(const FractionalParams& params, double q, double N,
                                         const EnsembleSpec& ensemble, std::span<const double> t_grid,
                                         const EstimatorOptions& opts) {
    if (!(q >= 1.0))
        throw std::invalid_argument("decay constants need q >= 1");
    ConstantEstimate est = blank(Quantity::decay_c, params, q, N, ensemble);
    const std::vector<double> times(t_grid.begin(), t_grid.end());
    return run_estimator(est, true, opts, [&](const GridFunction& f) {
        Score s;
        s.value = decay_rate(f, N, params.alpha, q, times, opts.ratio_floor, &s.t);
        return s;
    });
}

ConstantEstimate estimate_bernstein_constant(const FractionalParams& params, double q, double N,
                                             const EnsembleSpec& ensemble, const EstimatorOptions& opts) {
    require_pairing_exponent(q);
    ConstantEstimate est = blank(Quantity::bernstein_c, params, q, N, ensemble);
    return run_estimator(est, true, opts, [&](const GridFunction& f) {
        return Score{bernstein_ratio(f, N, params.alpha, q, opts.projection), 0.0};
    });
}

ConstantEstimate estimate_poincare_constant(const FractionalParams& params, double q, const EnsembleSpec& ensemble,
                                            const EstimatorOptions& opts) {
    require_pairing_exponent(q);
    ConstantEstimate est = blank(Quantity::poincare_c, params, q, 0.0, ensemble);
    return run_estimator(est, true, opts,
                         [&](const GridFunction& f) { return Score{poincare_ratio(f, params.alpha, q), 0.0}; });
}

ConstantEstimate maximal_domination_constant(const FractionalParams& params, const EnsembleSpec& ensemble,
                                             std::span<const double> t_grid, const EstimatorOptions& opts) {
    ConstantEstimate est = blank(Quantity::maximal_C, params, 0.0, 0.0, ensemble);
    const std::vector<double> times(t_grid.begin(), t_grid.end());
    return run_estimator(est, false, opts, [&](const GridFunction& f) {
        Score s;
        s.value = maximal_ratio(f, params.alpha, times, &s.t);
        return s;
    });
}

std::vector<double> default_h_sequence(double N, double alpha) {
    const double unit = std::pow(2.0 * pi * 2.0 * N, -alpha);
    return {1e-2 * unit, 5e-3 * unit, 2.5e-3 * unit};
}

DerivativeCheck check_derivative_identity(const GridFunction& f, double N, const FractionalParams& params, double q,
                                          std::span<const double> h_sequence) {
    require_pairing_exponent(q);
    params.validate();
    if (h_sequence.size() < 3)
        throw std::invalid_argument("derivative check needs three step sizes");
    const GridFunction g = lp_project(f, N, LpKind::band);
    DerivativeCheck out;
    out.pairing = fractional_pairing(g, params.alpha, q);
    const double F0 = power_sum(g, q);
    std::vector<double> D;
    for (double h : h_sequence) {
        if (!(h > 0.0))
            throw std::invalid_argument("step sizes must be positive");
        const double Fh = power_sum(apply_multiplier(g, heat_semigroup(params.alpha, h)), q);
        D.push_back((Fh - F0) / h);
        out.raw_residuals.push_back(std::abs(D.back() + q * out.pairing));
    }
    const auto& h = h_sequence;
    // Eliminate the O(h) term, then the O(h^2) term.
    const double D1a = (D[1] * h[0] - D[0] * h[1]) / (h[0] - h[1]);
    const double D1b = (D[2] * h[1] - D[1] * h[2]) / (h[1] - h[2]);
    const double wa = h[0] * h[1], wb = h[1] * h[2];
    out.derivative = (D1b * wa - D1a * wb) / (wa - wb);
    out.residual = std::abs(out.derivative + q * out.pairing);
    return out;
}

std::string to_string(ProfileModel m) {
    return m == ProfileModel::constant_in_q ? "constant_in_q" : "q_minus_1_over_q2";
}

double profile_shape(ProfileModel m, double q) {
    if (m == ProfileModel::constant_in_q)
        return 1.0;
    if (q == kInfNorm)
        return 0.0;
    return (q - 1.0) / (q * q);
}

ProfileFit fit_q_profile(std::span<const ConstantEstimate> estimates, ProfileModel model) {
    std::set<double> qs;
    for (const auto& e : estimates)
        qs.insert(e.q);
    if (qs.size() < 4)
        throw std::invalid_argument("profile fit needs at least four distinct q values");
    double num = 0.0, den = 0.0;
    for (const auto& e : estimates) {
        const double g = profile_shape(model, e.q);
        num += g * e.value;
        den += g * g;
    }
    ProfileFit fit;
    fit.model = model;
    fit.kappa = den > 0.0 ? num / den : 0.0;
    fit.envelope_kappa = kInf;
    for (const auto& e : estimates) {
        const double g = profile_shape(model, e.q);
        fit.residual = std::max(fit.residual, std::abs(fit.kappa * g - e.value) / std::abs(e.value));
        if (g > 0.0)
            fit.envelope_kappa = std::min(fit.envelope_kappa, e.value / g);
    }
    return fit;
}

} // namespace fracbern
