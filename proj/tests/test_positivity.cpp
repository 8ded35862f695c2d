#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracbern/bump.hpp"
#include "fracbern/positivity.hpp"

using namespace fracbern;
using std::numbers::pi;

namespace {

// Tanh-sinh handles the xi^alpha cusp at the origin and the bump's flat edges.
double oracle_integral(const std::function<double(double)>& f, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, a, b, 1e-15);
}

// 2 int_0^{1/3} exp(-t (2 pi xi)^alpha) (exp(-eps t phi1(xi)) - 1) cos(2 pi r xi) dxi
double F_oracle_1d(double alpha, double eps, double t, double r) {
    const BumpProfile phi1 = make_bump(BumpKind::perturb_phi1);
    auto f = [&](double xi) {
        return std::exp(-t * std::pow(2.0 * pi * xi, alpha)) * std::expm1(-eps * t * phi1(xi)) *
               std::cos(2.0 * pi * r * xi);
    };
    return 2.0 * (oracle_integral(f, 0.0, 0.25) + oracle_integral(f, 0.25, 1.0 / 3.0));
}

// 2 int_0^2 psi(xi) exp(-t (2 pi xi)^alpha) cos(2 pi r xi) dxi
double banded_oracle_1d(double alpha, double t, double r) {
    auto f = [&](double xi) {
        return lp_band_symbol(xi) * std::exp(-t * std::pow(2.0 * pi * xi, alpha)) * std::cos(2.0 * pi * r * xi);
    };
    return 2.0 * (oracle_integral(f, 0.5, 1.0) + oracle_integral(f, 1.0, 2.0));
}

} // namespace

TEST_CASE("F_eps vanishes at eps = 0 and k_0 is the kernel") {
    PerturbedKernelSpec spec{FractionalParams(1.0, 1), 0.0};
    for (double r : {0.0, 0.5, 5.0}) {
        CHECK(eval_F_eps(spec, 0.5, r, 1e-12).value == 0.0);
        CHECK(eval_k_eps(spec, 0.5, r, 1e-12).value ==
              Catch::Approx(0.5 / (pi * (0.25 + r * r))).epsilon(1e-10));
    }
}

TEST_CASE("F_eps matches a direct independent quadrature oracle in d = 1") {
    for (double alpha : {0.5, 1.0, 1.5}) {
        for (double r : {0.0, 0.7, 3.0, 20.0}) {
            PerturbedKernelSpec spec{FractionalParams(alpha, 1), 0.01};
            const KernelValue v = eval_F_eps(spec, 1.0, r, 1e-13);
            CHECK(std::abs(v.value - F_oracle_1d(alpha, 0.01, 1.0, r)) < 1e-12);
        }
    }
    PerturbedKernelSpec spec{FractionalParams(1.0, 1), 0.01};
    const double F0 = eval_F_eps(spec, 1.0, 0.0, 1e-13).value;
    CHECK(F0 < 0.0);
    CHECK(std::abs(F0) <= 0.01 * 1.0 * 2.0 / 3.0);
}

TEST_CASE("F_eps scales linearly in eps for small eps") {
    for (int d : {1, 2, 3}) {
        PerturbedKernelSpec a{FractionalParams(1.2, d), 1e-4};
        PerturbedKernelSpec b{FractionalParams(1.2, d), 2e-4};
        const double fa = eval_F_eps(a, 0.5, 1.0, 1e-15).value;
        const double fb = eval_F_eps(b, 0.5, 1.0, 1e-15).value;
        CHECK(fb / fa == Catch::Approx(2.0).epsilon(1e-3));
    }
}

TEST_CASE("perturbed kernel mass is exp(-eps t)") {
    for (double alpha : {0.5, 1.0, 1.5}) {
        PerturbedKernelSpec spec{FractionalParams(alpha, 1), 0.005};
        for (double t : {0.25, 1.0}) {
            const MassValue m = k_eps_l1(spec, t, 1e-7);
            CHECK(std::abs(m.value - std::exp(-0.005 * t)) < 2e-7);
        }
    }
    PerturbedKernelSpec spec{FractionalParams(1.0, 2), 0.001};
    CHECK(std::abs(k_eps_l1(spec, 0.5, 1e-7).value - std::exp(-0.0005)) < 2e-7);
}

TEST_CASE("certificate grid radii") {
    const PositivityGrids g;
    const auto r = g.radii(1.0, 0.01);
    CHECK(r.front() == 0.0);
    CHECK(r.back() == Catch::Approx(50.0));
    CHECK(r.size() == g.r_points + 1);
    CHECK(g.radii(0.5, 1.0).back() == Catch::Approx(50.0));
}

TEST_CASE("zero perturbation is certified, a large one is not") {
    PositivityGrids g;
    g.t = {1.0, 0.25};
    g.r_points = 20;
    const PositivityBaseline base = prepare_baseline(FractionalParams(1.0, 1), g);
    CHECK(base.C1 == Catch::Approx(pi).epsilon(1e-6));
    const PositivityCertificate zero = certify_positivity(base, 0.0);
    CHECK(zero.positive());
    CHECK(zero.min_relative_margin > 0.99);
    const PositivityCertificate big = certify_positivity(base, 1.0);
    CHECK_FALSE(big.positive());
    const auto j = big.to_json(3);
    CHECK(j.at("eps").get<double>() == 1.0);
    CHECK(j.at("worst_points").size() == 3);
}

TEST_CASE("eps threshold for the Cauchy kernel (frozen)") {
    const EpsSearchResult res = find_eps_star(FractionalParams(1.0, 1));
    CHECK(res.eps_star > 0.0);
    CHECK(res.cert.positive());
    // Frozen from the first certified run; the tail condition is the binding one.
    CHECK(res.eps_star == Catch::Approx(0.015296).epsilon(1e-3));
    CHECK(2.0 * res.cert.C1 * res.cert.C1 * res.cert.envelope_const * res.eps_star < 1.0);
}

TEST_CASE("perturbed kernel rejects the Gaussian case") {
    PerturbedKernelSpec spec{FractionalParams(2.0, 1), 0.1};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    CHECK_THROWS_AS(prepare_baseline(FractionalParams(2.0, 1), PositivityGrids{}), std::invalid_argument);
}

TEST_CASE("banded kernel matches a independent quadrature oracle and has zero mean") {
    for (double t : {0.0, 0.01, 0.3}) {
        for (double r : {0.0, 0.4, 2.5, 11.0}) {
            const KernelValue g = eval_banded_kernel(FractionalParams(1.0, 1), t, r, 1e-12);
            CHECK(std::abs(g.value - banded_oracle_1d(1.0, t, r)) < 1e-11);
        }
    }
}

TEST_CASE("banded kernel L1 norm exceeds one and decreases in t") {
    const BandedL1 b0 = banded_kernel_l1(FractionalParams(1.0, 1), 0.0, 1e-6);
    CHECK(b0.lower_bound > 1.0);
    CHECK(b0.value == Catch::Approx(1.5633028588).epsilon(1e-6));
    const BandedL1 b1 = banded_kernel_l1(FractionalParams(1.0, 1), 0.01, 1e-6);
    CHECK(b1.lower_bound > 1.0);
    CHECK(b1.value < b0.value);
    const BandedL1 b2 = banded_kernel_l1(FractionalParams(1.0, 1), 0.5, 1e-6);
    CHECK(b2.value < b1.value);
    const BandedL1 d2 = banded_kernel_l1(FractionalParams(1.0, 2), 0.0, 1e-5);
    CHECK(d2.lower_bound > 1.0);
    CHECK(d2.value == Catch::Approx(3.5566154).epsilon(1e-5));
}
