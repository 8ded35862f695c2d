// Acceptance run: one PASS/FAIL line per criterion.
//
// Exit status counts failures outside kKnownUnattainable. Criteria listed there
// are still evaluated in full and still print FAIL when they fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fracbern/ensemble.hpp"
#include "fracbern/inequality.hpp"
#include "fracbern/kernel.hpp"
#include "fracbern/parallel.hpp"
#include "fracbern/periodic.hpp"
#include "fracbern/positivity.hpp"
#include "fracbern/report.hpp"
#include "fracbern/sweep.hpp"

using namespace fracbern;
using std::numbers::pi;

namespace {

// Tolerances and budgets, one block per criterion.
constexpr double kOracleAbsTol = 1e-8;        // 1
constexpr double kOracleSeconds = 10.0;
constexpr double kMassTol = 1e-6;             // 2
constexpr double kMassSeconds = 30.0;
constexpr double kCauchyExtremeTol = 1e-4;    // 3
constexpr double kEpsMassTol = 2e-6;          // 4
constexpr double kEpsSeconds = 300.0;
constexpr double kPeriodicAgreeTol = 1e-8;    // 6
constexpr double kUniformityRatio = 0.2;      // 7
constexpr double kCollapseRatio = 0.5;
constexpr double kDecaySeconds = 600.0;
constexpr double kDerivativeRelTol = 1e-4;    // 8
constexpr double kFloorTol = 1e-10;           // 9
constexpr double kSupRatioTarget = 1.0 - 1e-3; // 10
constexpr double kMaximalStability = 0.10;    // 11

constexpr std::uint64_t kSeed = 20240601;

const std::set<int> kKnownUnattainable = {7, 10};

struct Outcome {
    bool pass = false;
    std::string detail;
};

int g_unexpected = 0;

void run(int id, const char* title, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool known = kKnownUnattainable.count(id) > 0;
    std::printf("[%s] criterion %2d %-28s %.1fs  %s%s\n", o.pass ? "PASS" : "FAIL", id, title, secs,
                o.detail.c_str(), !o.pass && known ? "  (known unattainable, not counted)" : "");
    std::fflush(stdout);
    if (!o.pass && !known)
        ++g_unexpected;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double poisson_exact(int d, double t, double r) {
    const double s = t * t + r * r;
    return d == 1 ? t / (pi * s) : t / (2.0 * pi * std::pow(s, 1.5));
}

double gauss_exact(int d, double t, double r) {
    return std::pow(4.0 * pi * t, -0.5 * d) * std::exp(-r * r / (4.0 * t));
}

EnsembleSpec ensemble(double A1, double A2, std::size_t members, std::size_t n, std::uint64_t seed = kSeed) {
    EnsembleSpec e;
    e.annulus = {A1, A2};
    e.n_samples = members;
    e.n = n;
    e.seed = seed;
    return e;
}

Outcome kernel_oracles() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::size_t probes = 0;
    for (int d : {1, 2}) {
        for (int i = 0; i < 5; ++i) {
            const double t = 0.05 * std::pow(100.0, i / 4.0);
            for (int j = 0; j < 10; ++j) {
                const double r = j == 0 ? 0.0 : 0.02 * std::pow(500.0, (j - 1) / 8.0);
                const double e1 = std::abs(eval_radial_numeric(FractionalParams(1.0, d, t), r, 1e-10).value -
                                           poisson_exact(d, t, r));
                const double e2 = std::abs(eval_radial_numeric(FractionalParams(2.0, d, t), r, 1e-10).value -
                                           gauss_exact(d, t, r));
                worst = std::max({worst, e1, e2});
                probes += 2;
            }
        }
    }
    const double secs = seconds_since(t0);
    return {worst < kOracleAbsTol && secs < kOracleSeconds,
            std::to_string(probes) + " probes, max abs err " + fmt("%.2e", worst) + ", " + fmt("%.2fs", secs)};
}

Outcome normalization() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (double alpha : {0.5, 1.0, 1.5})
        for (int d : {1, 2})
            for (double t : {0.1, 1.0})
                worst = std::max(worst, std::abs(l1_mass(FractionalParams(alpha, d, t), 1e-7).value - 1.0));
    const double secs = seconds_since(t0);
    return {worst <= kMassTol && secs < kMassSeconds, "max |mass - 1| " + fmt("%.2e", worst)};
}

Outcome two_sided() {
    ProbeGrid grid = ProbeGrid::log_spaced(1e-3, 1e2, 11, 1e4, 141);
    const FractionalParams cauchy(1.0, 1);
    const BoundReport c = check_two_sided_bound(std::span(&cauchy, 1), grid, default_worker_count());
    const bool cauchy_ok =
        std::abs(c.ratio_min - 1.0 / pi) < kCauchyExtremeTol && std::abs(c.ratio_max - 2.0 / pi) < kCauchyExtremeTol;
    std::ostringstream s;
    s << "alpha=1: [" << fmt("%.8f", c.ratio_min) << ", " << fmt("%.8f", c.ratio_max) << "]";
    bool others = true;
    for (double alpha : {0.5, 1.5}) {
        const FractionalParams p(alpha, 1);
        const BoundReport r = check_two_sided_bound(std::span(&p, 1), grid, default_worker_count());
        others = others && r.ratio_min > 0.0 && std::isfinite(r.ratio_max);
        s << "; alpha=" << alpha << ": [" << fmt("%.5f", r.ratio_min) << ", " << fmt("%.5f", r.ratio_max) << "]";
    }
    return {cauchy_ok && others, s.str()};
}

Outcome positivity_threshold() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::ostringstream s;
    const std::pair<double, int> cases[] = {{0.5, 1}, {1.0, 1}, {1.5, 1}, {1.0, 2}};
    for (const auto& [alpha, d] : cases) {
        const EpsSearchResult res =
            find_eps_star(FractionalParams(alpha, d), PositivityGrids::standard(), 1.0, 20, default_worker_count());
        double worst = 0.0;
        if (res.eps_star > 0.0) {
            PerturbedKernelSpec spec{FractionalParams(alpha, d), res.eps_star};
            for (double t : {0.25, 0.5, 1.0})
                worst = std::max(worst, std::abs(k_eps_l1(spec, t, 1e-7).value - std::exp(-res.eps_star * t)));
        }
        const bool cell = res.eps_star > 0.0 && res.cert.positive() && worst <= kEpsMassTol;
        ok = ok && cell;
        s << "(" << alpha << "," << d << "): eps*=" << fmt("%.6g", res.eps_star)
          << " margin=" << fmt("%.3g", res.cert.min_margin) << " mass err=" << fmt("%.1e", worst) << "; ";
    }
    const double secs = seconds_since(t0);
    s << fmt("%.1fs", secs);
    return {ok && secs < kEpsSeconds, s.str()};
}

Outcome banded_disproof() {
    bool ok = true;
    std::ostringstream s;
    for (int d : {1, 2}) {
        for (double t : {0.0, 0.01}) {
            const BandedL1 b = banded_kernel_l1(FractionalParams(1.0, d), t, 1e-5);
            ok = ok && b.lower_bound > 1.0;
            s << "d=" << d << ",t=" << t << ": " << fmt("%.6f", b.value) << " (certified >= " << fmt("%.6f", b.lower_bound)
              << "); ";
        }
    }
    return {ok, s.str()};
}

Outcome periodic_cross() {
    double worst = 0.0;
    for (double alpha : {1.0, 2.0}) {
        for (int i = 0; i < 10; ++i) {
            const double t = 0.01 * std::pow(1000.0, i / 9.0);
            for (int j = 0; j < 5; ++j) {
                const double x[] = {j / 8.0};
                PeriodicKernelSpec fs{FractionalParams(alpha, 1), 0, PeriodicMethod::fourier_series};
                PeriodicKernelSpec ps{FractionalParams(alpha, 1), 0, PeriodicMethod::poisson_summation};
                worst = std::max(worst, std::abs(periodic_kernel(fs, t, x, 1e-10).value -
                                                 periodic_kernel(ps, t, x, 1e-10).value));
            }
        }
    }
    bool ok = worst <= kPeriodicAgreeTol;
    std::ostringstream s;
    s << "100 probes, max |series - lattice| " << fmt("%.2e", worst) << "; c3:";
    const auto times = dyadic_times(0, 10);
    const auto axis = default_c3_axis();
    for (int d : {1, 2}) {
        for (double alpha : {0.5, 1.0, 1.5}) {
            const LowerBoundReport r = estimate_c3(FractionalParams(alpha, d), times, axis, default_worker_count());
            ok = ok && r.c3_hat > 0.0;
            s << " (" << alpha << "," << d << ")=" << fmt("%.4f", r.c3_hat);
        }
    }
    return {ok, s.str()};
}

Outcome decay_uniformity() {
    const auto t0 = std::chrono::steady_clock::now();
    const double N = 4.0;
    const EnsembleSpec e = ensemble(N / 2, 2 * N, 64, 128);
    EstimatorOptions opts;
    opts.workers = default_worker_count();
    const auto times = default_decay_times();
    auto c = [&](double alpha, double q) {
        return estimate_decay_constant(FractionalParams(alpha, 1), q, N, e, times, opts).value;
    };
    std::ostringstream s;
    bool ok = true;

    const double c2 = c(1.0, 2.0);
    double cmin = c2;
    bool positive = true;
    s << "alpha=1:";
    for (double q : {1.0, 1.5, 2.0, 4.0, 8.0, kInfNorm}) {
        const double v = q == 2.0 ? c2 : c(1.0, q);
        positive = positive && v > 0.0;
        cmin = std::min(cmin, v);
        s << " " << (std::isinf(q) ? std::string("inf") : fmt("%g", q)) << "->" << fmt("%.3f", v);
    }
    ok = ok && positive && cmin >= kUniformityRatio * c2 && c2 >= std::pow(pi, 1.0);

    const double g2 = c(2.0, 2.0), g125 = c(2.0, 1.25), g8 = c(2.0, 8.0);
    const bool floor2 = g2 >= pi * pi;
    const bool collapse = g125 < kCollapseRatio * g2 && g8 < kCollapseRatio * g2;
    ok = ok && floor2 && collapse;
    s << "; alpha=2: c(2)=" << fmt("%.3f", g2) << " c(1.25)=" << fmt("%.3f", g125) << " c(8)=" << fmt("%.3f", g8)
      << (collapse ? "" : " [no endpoint collapse]");
    const double secs = seconds_since(t0);
    s << "; " << fmt("%.1fs", secs);
    return {ok && secs < kDecaySeconds, s.str()};
}

Outcome derivative_identity() {
    const EnsembleSpec e = ensemble(2.0, 8.0, 20, 256);
    double worst = 0.0;
    for (double alpha : {1.0, 2.0}) {
        const auto h = default_h_sequence(4.0, alpha);
        for (double q : {1.5, 2.0, 3.0, 4.0}) {
            for (std::size_t i = 0; i < e.n_samples; ++i) {
                const DerivativeCheck d =
                    check_derivative_identity(sample_band_limited(e, i), 4.0, FractionalParams(alpha, 1), q, h);
                worst = std::max(worst, d.residual / (q * std::abs(d.pairing)));
            }
        }
    }
    return {worst < kDerivativeRelTol, "160 checks, max residual / (q |pairing|) " + fmt("%.2e", worst)};
}

Outcome bernstein_poincare() {
    bool ok = true;
    double worst_floor = 0.0;
    std::ostringstream s;
    const double N = 4.0;
    // Lowest lattice frequency with psi(k/N) > 0 in the band ensemble.
    const double k_low = 3.0;
    const GridFunction low_mode = GridFunction::sample(1, 1.0, 256, [&](std::span<const double> x) {
        return std::cos(2.0 * pi * k_low * x[0]);
    });
    const GridFunction unit_mode =
        GridFunction::sample(1, 1.0, 256, [](std::span<const double> x) { return std::cos(2.0 * pi * x[0]); });
    double min_b = INFINITY, min_p = INFINITY;
    for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
        const FractionalParams p(alpha, 1);
        const double b_floor = std::pow(2.0 * pi * k_low, alpha) / std::pow(N, alpha);
        const double p_floor = std::pow(2.0 * pi, alpha);
        worst_floor = std::max(worst_floor, std::abs(bernstein_ratio(low_mode, N, alpha, 2.0) / b_floor - 1.0));
        worst_floor = std::max(worst_floor, std::abs(poincare_ratio(unit_mode, alpha, 2.0) / p_floor - 1.0));
        for (double q : {1.5, 2.0, 3.0, 4.0}) {
            const double b = estimate_bernstein_constant(p, q, N, ensemble(N / 2, 2 * N, 16, 256)).value;
            const double c = estimate_poincare_constant(p, q, ensemble(1.0, 4.0, 16, 128)).value;
            min_b = std::min(min_b, b);
            min_p = std::min(min_p, c);
            ok = ok && b > 0.0 && c > 0.0;
            if (q == 2.0)
                ok = ok && b >= b_floor * (1 - kFloorTol) && c >= p_floor * (1 - kFloorTol);
        }
    }
    ok = ok && worst_floor <= kFloorTol;
    s << "min bernstein " << fmt("%.4f", min_b) << ", min poincare " << fmt("%.4f", min_p)
      << ", single-mode floor rel err " << fmt("%.1e", worst_floor);
    return {ok, s.str()};
}

Outcome counterexample() {
    const double t01[] = {0.01};
    const double ratio = heat_sup_counterexample(0.1, t01, 4096).rows.at(0).ratio;
    const auto times = dyadic_times(4, 10);
    const CounterexampleReport rep = heat_sup_counterexample(0.1, times, 4096);
    const bool ok = ratio > kSupRatioTarget && rep.fitted_C > 0.0;
    return {ok, "ratio(t=0.01)=" + fmt("%.6f", ratio) + " (target > 0.999), fitted exponent C=" +
                    fmt("%.4g", rep.fitted_C) + " over " + std::to_string(rep.fit_points) + " points"};
}

Outcome maximal_stability() {
    bool ok = true;
    std::ostringstream s;
    std::vector<double> times{0.0};
    for (double t : default_decay_times())
        times.push_back(t);
    EstimatorOptions opts;
    opts.workers = default_worker_count();
    for (double alpha : {1.0, 1.5}) {
        const double coarse =
            maximal_domination_constant(FractionalParams(alpha, 1), ensemble(1.0, 4.0, 32, 128), times, opts).value;
        const double fine =
            maximal_domination_constant(FractionalParams(alpha, 1), ensemble(1.0, 4.0, 32, 256), times, opts).value;
        const double rel = std::abs(fine - coarse) / coarse;
        ok = ok && std::isfinite(coarse) && std::isfinite(fine) && rel <= kMaximalStability;
        s << "alpha=" << alpha << ": " << fmt("%.6f", coarse) << " -> " << fmt("%.6f", fine) << " (" << fmt("%.1e", rel)
          << "); ";
    }
    return {ok, s.str()};
}

Outcome reproducibility() {
    const auto configs = load_sweep_document(std::string(FRACBERN_TEST_DATA) + "/golden_sweep.json");
    auto text = [&](std::size_t workers) {
        std::ostringstream s;
        write_csv(s, run_sweeps(configs, workers).table);
        return s.str();
    };
    const std::string a = text(1), b = text(1), c = text(4);
    return {a == b && a == c, std::to_string(a.size()) + " bytes, runs equal: " + (a == b ? "yes" : "no") +
                                  ", workers 1 vs 4 equal: " + (a == c ? "yes" : "no")};
}

} // namespace

int main() {
    std::printf("fracbern %s acceptance, workers=%zu\n", kToolVersion, default_worker_count());
    run(1, "kernel oracles", kernel_oracles);
    run(2, "normalization", normalization);
    run(3, "two-sided bound", two_sided);
    run(4, "positivity threshold", positivity_threshold);
    run(5, "banded L1 exceeds one", banded_disproof);
    run(6, "periodic cross-validation", periodic_cross);
    run(7, "decay q-uniformity", decay_uniformity);
    run(8, "derivative identity", derivative_identity);
    run(9, "bernstein/poincare", bernstein_poincare);
    run(10, "sup-norm counterexample", counterexample);
    run(11, "maximal domination", maximal_stability);
    run(12, "reproducibility", reproducibility);
    std::printf("unexpected failures: %d\n", g_unexpected);
    return g_unexpected == 0 ? 0 : 1;
}
