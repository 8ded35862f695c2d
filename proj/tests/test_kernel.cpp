#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "fracbern/kernel.hpp"
#include "fracbern/quadrature.hpp"
#include "fracbern/radial_transform.hpp"

using namespace fracbern;
using std::numbers::pi;

namespace {

double poisson(int d, double t, double r) {
    const double s = t * t + r * r;
    switch (d) {
    case 1: return t / (pi * s);
    case 2: return t / (2.0 * pi * std::pow(s, 1.5));
    default: return t / (pi * pi * s * s);
    }
}

double gauss(int d, double t, double r) { return std::pow(4.0 * pi * t, -0.5 * d) * std::exp(-r * r / (4.0 * t)); }

// (1/pi) int_0^inf exp(-t u^alpha) cos(r u) du by double-exponential Fourier quadrature.
double ooura_1d(double alpha, double t, double r) {
    boost::math::quadrature::ooura_fourier_cos<double> integrator;
    auto f = [&](double u) { return std::exp(-t * std::pow(u, alpha)); };
    return integrator.integrate(f, r).first / pi;
}

} // namespace

TEST_CASE("gauss-kronrod is exact on low-degree polynomials") {
    const QuadResult r = gauss_kronrod15([](double x) { return std::pow(x, 13) - 3 * x * x; }, 0.0, 2.0);
    CHECK(r.value == Catch::Approx(std::pow(2.0, 14) / 14.0 - 8.0).epsilon(1e-14));
}

TEST_CASE("adaptive quadrature handles an endpoint singularity") {
    const QuadResult r = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10);
    CHECK(r.converged);
    CHECK(std::abs(r.value - 2.0) < 1e-9);
}

TEST_CASE("adaptive quadrature reports an exhausted budget") {
    const QuadResult r = integrate_adaptive([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, 1e-14, 300);
    CHECK_FALSE(r.converged);
}

TEST_CASE("wynn epsilon sums the alternating harmonic series") {
    std::vector<double> partial;
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
        s += (k % 2 ? 1.0 : -1.0) / k;
        partial.push_back(s);
    }
    CHECK(std::abs(wynn_limit(partial) - std::log(2.0)) < 1e-12);
}

TEST_CASE("radial transform: unit sphere areas") {
    CHECK(unit_sphere_area(1) == Catch::Approx(2.0));
    CHECK(unit_sphere_area(2) == Catch::Approx(2.0 * pi));
    CHECK(unit_sphere_area(3) == Catch::Approx(4.0 * pi));
}

TEST_CASE("numeric kernel matches the Poisson and Gaussian kernels") {
    for (int d : {1, 2, 3}) {
        for (double t : {0.05, 1.0, 7.0}) {
            for (double r : {0.0, 0.3, 2.0, 40.0}) {
                const auto p1 = eval_radial_numeric(FractionalParams(1.0, d, t), r, 1e-11);
                CHECK(std::abs(p1.value - poisson(d, t, r)) < 1e-9);
                CHECK(eval_closed_form(FractionalParams(1.0, d, t), r) == Catch::Approx(poisson(d, t, r)));
                const auto p2 = eval_radial_numeric(FractionalParams(2.0, d, t), r, 1e-11);
                CHECK(std::abs(p2.value - gauss(d, t, r)) < 1e-9);
                CHECK(eval_closed_form(FractionalParams(2.0, d, t), r) ==
                      Catch::Approx(gauss(d, t, r)).margin(1e-300));
            }
        }
    }
}

TEST_CASE("numeric kernel matches an independent Fourier-integral oracle in d = 1") {
    for (double alpha : {0.5, 1.5}) {
        for (double r : {0.0, 0.25, 1.0, 3.0, 10.0}) {
            const auto v = eval_radial_numeric(FractionalParams(alpha, 1, 1.0), r, 1e-10);
            const double oracle = r == 0.0 ? std::tgamma(1.0 + 1.0 / alpha) / pi : ooura_1d(alpha, 1.0, r);
            CHECK(std::abs(v.value - oracle) < 1e-8);
        }
    }
}

TEST_CASE("kernel value at the origin") {
    // p(1, 0) = |S^{d-1}| Gamma(d / alpha) / (alpha (2 pi)^d)
    for (int d : {1, 2, 3}) {
        for (double alpha : {0.5, 1.2, 1.8}) {
            const double exact = unit_sphere_area(d) * std::tgamma(d / alpha) / (alpha * std::pow(2.0 * pi, d));
            CHECK(eval_radial_numeric(FractionalParams(alpha, d, 1.0), 0.0, 1e-11).value ==
                  Catch::Approx(exact).epsilon(1e-9));
        }
    }
}

TEST_CASE("kernel obeys the self-similar scaling") {
    for (double alpha : {0.5, 1.5}) {
        for (int d : {1, 2}) {
            const double t = 0.3, r = 0.7;
            const double lhs = eval_radial_numeric(FractionalParams(alpha, d, t), r, 1e-12).value;
            const double rhs = std::pow(t, -d / alpha) *
                               eval_radial_quadrature(FractionalParams(alpha, d, 1.0), std::pow(t, -1.0 / alpha) * r,
                                                      1e-12)
                                   .value;
            CHECK(lhs == Catch::Approx(rhs).epsilon(1e-8));
        }
    }
}

TEST_CASE("far-field expansion: leading coefficient and agreement with quadrature") {
    // d = 1: p(1, x) ~ Gamma(1 + alpha) sin(pi alpha / 2) / (pi |x|^{1 + alpha})
    for (double alpha : {0.5, 1.0, 1.5})
        CHECK(tail_series_coefficient(alpha, 1, 1) ==
              Catch::Approx(std::tgamma(1.0 + alpha) * std::sin(pi * alpha / 2.0) / pi));
    CHECK(tail_series_coefficient(2.0, 2, 3) == Catch::Approx(0.0).margin(1e-14));
    for (int k = 1; k < 6; ++k)
        CHECK(std::abs(tail_series_coefficient(0.5, 2, k)) <= tail_series_envelope(0.5, 2, k) * (1 + 1e-12));

    for (double alpha : {0.5, 1.5}) {
        const FractionalParams p(alpha, 2, 1.0);
        const double r = 60.0;
        const SeriesValue s = kernel_tail_series(p, r);
        const auto q = eval_radial_quadrature(p, r, 1e-14);
        CHECK(std::abs(s.value - q.value) < 10 * (s.abs_err + q.abs_err) + 1e-15);
    }
}

TEST_CASE("kernel is positive and radially decreasing") {
    for (double alpha : {0.3, 0.8, 1.3, 1.9}) {
        for (int d : {1, 2, 3}) {
            const FractionalParams p(alpha, d, 1.0);
            const double p0 = unit_sphere_area(d) * std::tgamma(d / alpha) / (alpha * std::pow(2.0 * pi, d));
            double prev = std::numeric_limits<double>::infinity();
            for (double r = 0.0; r < 30.0; r += 0.37) {
                const auto v = eval_radial_numeric(p, r, 1e-10 * std::max(1.0, p0) * std::pow(1.0 + r, -d - alpha));
                CHECK(v.lower() > 0.0);
                CHECK(v.value < prev);
                prev = v.value;
            }
        }
    }
}

TEST_CASE("kernel has unit mass") {
    for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
        for (int d : {1, 2}) {
            const MassEstimate m = l1_mass(FractionalParams(alpha, d, 0.1), 1e-7);
            CHECK(std::abs(m.value - 1.0) < 1e-7);
        }
    }
}

TEST_CASE("two-sided bound for the Cauchy kernel has the closed-form extremes") {
    // p(t,x)(t+|x|)^2/t = (t+|x|)^2 / (pi (t^2+x^2)): minimum 1/pi at x = 0, maximum 2/pi at |x| = t.
    ProbeGrid grid = ProbeGrid::log_spaced(0.01, 1.0, 5, 1e3, 81);
    const FractionalParams p(1.0, 1);
    const BoundReport rep = check_two_sided_bound(std::span(&p, 1), grid);
    CHECK(rep.ratio_min == Catch::Approx(1.0 / pi).epsilon(1e-8));
    CHECK(rep.ratio_max == Catch::Approx(2.0 / pi).epsilon(1e-8));
    CHECK(rep.C1_hat == Catch::Approx(pi).epsilon(1e-7));
}

TEST_CASE("two-sided bound rejects the Gaussian case") {
    const FractionalParams p(2.0, 1);
    CHECK_THROWS_AS(check_two_sided_bound(std::span(&p, 1), ProbeGrid::log_spaced(0.1, 1.0, 2, 10.0, 5)),
                    std::invalid_argument);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(FractionalParams(0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(FractionalParams(2.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(FractionalParams(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(FractionalParams(1.0, 1, 0.0), std::invalid_argument);
}
