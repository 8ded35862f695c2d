#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "fracbern/ensemble.hpp"
#include "fracbern/inequality.hpp"

using namespace fracbern;
using std::numbers::pi;

namespace {

EnsembleSpec annulus_ensemble(double A1, double A2, std::size_t members, std::uint64_t seed, std::size_t n = 128,
                              int dim = 1) {
    EnsembleSpec e;
    e.annulus = {A1, A2};
    e.n_samples = members;
    e.seed = seed;
    e.n = n;
    e.dim = dim;
    return e;
}

GridFunction cosine(std::size_t n, double k) {
    return GridFunction::sample(1, 1.0, n, [k](std::span<const double> x) { return std::cos(2.0 * pi * k * x[0]); });
}

} // namespace

TEST_CASE("ensemble members are reproducible, real and annulus-supported") {
    const EnsembleSpec e = annulus_ensemble(2.0, 6.0, 4, 99, 64, 2);
    const GridFunction a = sample_band_limited(e, 3);
    const GridFunction b = sample_band_limited(e, 3);
    CHECK(a.values() == b.values());
    CHECK(a.is_real());
    CHECK(sample_band_limited(e, 2).values() != a.values());

    const auto c = forward_dft(a);
    const auto norms = frequency_norms(2, 1.0, 64);
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (norms[i] < 2.0 || norms[i] > 6.0)
            CHECK(std::abs(c[i]) < 1e-14);
    }
    for (const auto& k : annulus_modes(e)) {
        const double r = std::hypot(static_cast<double>(k[0]), static_cast<double>(k[1]));
        CHECK(r >= 2.0);
        CHECK(r <= 6.0);
        CHECK((k[0] > 0 || (k[0] == 0 && k[1] > 0)));
    }
}

TEST_CASE("ensemble coefficients are standard complex normal") {
    const EnsembleSpec e = annulus_ensemble(1.0, 30.0, 1, 7);
    double m2 = 0.0, m1re = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < 200; ++i) {
        for (const auto& c : draw_coefficients(e, i).coeffs) {
            m2 += std::norm(c);
            m1re += c.real();
            ++count;
        }
    }
    CHECK(m2 / count == Catch::Approx(1.0).epsilon(0.03));
    CHECK(std::abs(m1re / count) < 0.03);
}

TEST_CASE("ensemble validation") {
    CHECK_THROWS_AS(annulus_ensemble(3.0, 2.0, 4, 0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(annulus_ensemble(1.0, 64.0, 4, 0, 128).validate(), std::invalid_argument);
    CHECK_THROWS_AS(annulus_modes(annulus_ensemble(1.2, 1.8, 4, 0)), std::invalid_argument);
}

TEST_CASE("decay constant at q = 2 respects the spectral floor") {
    for (double alpha : {1.0, 2.0}) {
        const EnsembleSpec e = annulus_ensemble(2.0, 8.0, 8, 5);
        const ConstantEstimate c = estimate_decay_constant(FractionalParams(alpha, 1), 2.0, 4.0, e,
                                                           default_decay_times());
        // Lattice modes with psi(k/4) > 0 start at |k| = 3.
        const double floor = std::pow(2.0 * pi * 3.0, alpha) / std::pow(4.0, alpha);
        CHECK(c.value >= floor * (1 - 1e-12));
        CHECK(c.value >= std::pow(pi, alpha));
        CHECK(c.value <= c.ensemble_value);
        CHECK(c.witness().rfind("member=", 0) == 0);
    }
}

TEST_CASE("decay rate of an eigenfunction is its eigenvalue for every q") {
    const GridFunction f = cosine(256, 4.0);
    const auto t = default_decay_times();
    for (double q : {1.0, 1.5, 3.0, kInfNorm})
        CHECK(decay_rate(f, 4.0, 1.5, q, t) == Catch::Approx(std::pow(2.0 * pi * 4.0, 1.5) / std::pow(4.0, 1.5)));
}

TEST_CASE("decay constants are invariant under N -> 2N dilation") {
    EnsembleSpec a = annulus_ensemble(2.0, 8.0, 6, 17, 128);
    EnsembleSpec b = annulus_ensemble(4.0, 16.0, 6, 17, 256);
    b.dilation = 2;
    const FractionalParams p(1.0, 1);
    const auto ta = default_decay_times();
    std::vector<double> tb;
    for (double t : ta)
        tb.push_back(t / 2.0);
    EstimatorOptions opts;
    opts.refine = false;
    const ConstantEstimate ca = estimate_decay_constant(p, 3.0, 4.0, a, ta, opts);
    const ConstantEstimate cb = estimate_decay_constant(p, 3.0, 8.0, b, tb, opts);
    CHECK(cb.value == Catch::Approx(ca.value).epsilon(1e-5));
    CHECK(cb.witness_index == ca.witness_index);
}

TEST_CASE("bernstein and poincare ratios reproduce exact floors on single modes") {
    for (double alpha : {0.5, 1.0, 2.0}) {
        const GridFunction f = cosine(256, 3.0);
        CHECK(bernstein_ratio(f, 4.0, alpha, 2.0) ==
              Catch::Approx(std::pow(2.0 * pi * 3.0, alpha) / std::pow(4.0, alpha)).epsilon(1e-10));
        CHECK(poincare_ratio(cosine(256, 1.0), alpha, 2.0) == Catch::Approx(std::pow(2.0 * pi, alpha)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(poincare_ratio(GridFunction::constant(1, 1.0, 64, 1.0), 1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(bernstein_ratio(cosine(64, 3.0), 4.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("bernstein and poincare estimates are positive and above the q = 2 floors") {
    const FractionalParams p(1.0, 1);
    const EnsembleSpec e = annulus_ensemble(2.0, 8.0, 8, 3);
    for (double q : {1.5, 2.0, 4.0}) {
        const ConstantEstimate b = estimate_bernstein_constant(p, q, 4.0, e);
        CHECK(b.value > 0.0);
        const ConstantEstimate c = estimate_poincare_constant(p, q, annulus_ensemble(1.0, 4.0, 8, 3));
        CHECK(c.value > 0.0);
        if (q == 2.0) {
            CHECK(b.value >= 2.0 * pi * 3.0 / 4.0 * (1 - 1e-12));
            CHECK(c.value >= 2.0 * pi * (1 - 1e-12));
        }
    }
}

TEST_CASE("derivative identity holds on eigenfunctions and random members") {
    const FractionalParams p(1.0, 1);
    const GridFunction f = cosine(256, 4.0);
    const DerivativeCheck d = check_derivative_identity(f, 4.0, p, 3.0, default_h_sequence(4.0, 1.0));
    CHECK(d.residual < 1e-7 * d.pairing);
    CHECK(d.raw_residuals.size() == 3);

    const EnsembleSpec e = annulus_ensemble(2.0, 8.0, 4, 8, 256);
    for (double alpha : {1.0, 2.0}) {
        for (std::size_t i = 0; i < 4; ++i) {
            const FractionalParams pa(alpha, 1);
            const DerivativeCheck r =
                check_derivative_identity(sample_band_limited(e, i), 4.0, pa, 1.5, default_h_sequence(4.0, alpha));
            CHECK(r.residual < 1e-4 * 1.5 * std::abs(r.pairing));
            // Extrapolation improves on the raw difference quotients.
            CHECK(r.residual < r.raw_residuals.back());
        }
    }
}

TEST_CASE("maximal domination constant is finite and at least one with t = 0 in the grid") {
    const EnsembleSpec e = annulus_ensemble(1.0, 4.0, 8, 2);
    std::vector<double> t{0.0};
    for (double s : default_decay_times())
        t.push_back(s);
    const ConstantEstimate c = maximal_domination_constant(FractionalParams(1.0, 1), e, t);
    CHECK(c.value >= 1.0 - 1e-12);
    CHECK(c.value < 2.0);
    CHECK(maximal_ratio(cosine(128, 1.0), 1.0, t) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("q-profile fits recover synthetic shapes") {
    std::vector<ConstantEstimate> est;
    for (double q : {1.25, 1.5, 2.0, 4.0, 8.0}) {
        ConstantEstimate c;
        c.q = q;
        c.value = 3.0 * (q - 1.0) / (q * q);
        est.push_back(c);
    }
    const ProfileFit fit = fit_q_profile(est, ProfileModel::q_minus_1_over_q2);
    CHECK(fit.kappa == Catch::Approx(3.0));
    CHECK(fit.residual < 1e-12);
    CHECK(fit.envelope_kappa == Catch::Approx(3.0));
    const ProfileFit flat = fit_q_profile(est, ProfileModel::constant_in_q);
    CHECK(flat.residual > 0.3);
    CHECK(profile_shape(ProfileModel::q_minus_1_over_q2, kInfNorm) == 0.0);
    est.resize(3);
    CHECK_THROWS_AS(fit_q_profile(est, ProfileModel::constant_in_q), std::invalid_argument);
}
