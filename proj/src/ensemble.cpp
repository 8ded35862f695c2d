#include "fracbern/ensemble.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fracbern {

namespace {

double unit_open(std::uint64_t bits) {
    // 53 random bits mapped to (0, 1].
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

bool canonical(const std::vector<long>& k) {
    for (long v : k)
        if (v != 0)
            return v > 0;
    return false;
}

} // namespace

void FrequencyAnnulus::validate() const {
    if (!(A1 > 0.0 && A2 > A1))
        throw std::invalid_argument("annulus needs 0 < A1 < A2");
}

void EnsembleSpec::validate() const {
    annulus.validate();
    if (n_samples == 0)
        throw std::invalid_argument("ensemble needs at least one member");
    if (dim < 1 || !(box_len > 0.0) || dilation < 1)
        throw std::invalid_argument("invalid ensemble grid parameters");
    if (annulus.A2 >= static_cast<double>(n) / (2.0 * box_len))
        throw std::invalid_argument("annulus outer radius " + std::to_string(annulus.A2) +
                                    " is not below the Nyquist frequency");
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::vector<std::vector<long>> annulus_modes(const EnsembleSpec& spec) {
    spec.validate();
    const double unit = spec.dilation / spec.box_len;
    const long K = static_cast<long>(std::floor(spec.annulus.A2 / unit));
    std::vector<std::vector<long>> out;
    std::vector<long> k(static_cast<std::size_t>(spec.dim), -K);
    for (;;) {
        double r2 = 0.0;
        for (long v : k)
            r2 += static_cast<double>(v * v);
        const double r = std::sqrt(r2) * unit;
        if (canonical(k) && r >= spec.annulus.A1 && r <= spec.annulus.A2)
            out.push_back(k);
        int a = spec.dim - 1;
        while (a >= 0 && k[static_cast<std::size_t>(a)] == K) {
            k[static_cast<std::size_t>(a)] = -K;
            --a;
        }
        if (a < 0)
            break;
        ++k[static_cast<std::size_t>(a)];
    }
    if (out.empty())
        throw std::invalid_argument("annulus contains no lattice frequencies");
    return out;
}

ModeCoefficients draw_coefficients(const EnsembleSpec& spec, std::size_t index) {
    ModeCoefficients mc;
    mc.modes = annulus_modes(spec);
    mc.coeffs.reserve(mc.modes.size());
    const std::uint64_t base = splitmix64(splitmix64(spec.seed) ^ static_cast<std::uint64_t>(index));
    for (const auto& k : mc.modes) {
        std::uint64_t h = base;
        for (long v : k)
            h = splitmix64(h ^ static_cast<std::uint64_t>(v));
        const double u1 = unit_open(splitmix64(h ^ 1u));
        const double u2 = unit_open(splitmix64(h ^ 2u));
        const double rad = std::sqrt(-std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        mc.coeffs.emplace_back(rad * std::cos(ang), rad * std::sin(ang));
    }
    return mc;
}

GridFunction synthesize(const EnsembleSpec& spec, const ModeCoefficients& mc) {
    spec.validate();
    const std::size_t n = spec.n;
    std::size_t total = 1;
    for (int a = 0; a < spec.dim; ++a)
        total *= n;
    std::vector<Complex> c(total);
    auto slot = [&](const std::vector<long>& k, long sign) {
        std::size_t flat = 0;
        for (long v : k) {
            const long m = sign * v * spec.dilation;
            const long wrapped = ((m % static_cast<long>(n)) + static_cast<long>(n)) % static_cast<long>(n);
            flat = flat * n + static_cast<std::size_t>(wrapped);
        }
        return flat;
    };
    for (std::size_t i = 0; i < mc.modes.size(); ++i) {
        c[slot(mc.modes[i], 1)] += mc.coeffs[i];
        c[slot(mc.modes[i], -1)] += std::conj(mc.coeffs[i]);
    }
    return inverse_dft(spec.dim, spec.box_len, n, std::move(c), true);
}

GridFunction sample_band_limited(const EnsembleSpec& spec, std::size_t index) {
    return synthesize(spec, draw_coefficients(spec, index));
}

} // namespace fracbern
