#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fracbern/grid.hpp"

namespace fracbern {

struct FrequencyAnnulus {
    double A1 = 0.5;
    double A2 = 2.0;

    void validate() const;
};

/// Reproducible ensemble of real functions with spectrum in an annulus.
struct EnsembleSpec {
    FrequencyAnnulus annulus;
    std::size_t n_samples = 64;
    std::uint64_t seed = 0;
    int dim = 1;
    double box_len = 1.0;
    std::size_t n = 128;
    /// Members are g(dilation x) for g drawn on the annulus divided by
    /// `dilation`, so ensembles related by N -> 2N can share their draws.
    int dilation = 1;

    void validate() const;
};

/// Canonical modes (first nonzero component positive) of one member and their
/// coefficients; the coefficient of -k is the conjugate.
struct ModeCoefficients {
    std::vector<std::vector<long>> modes;
    std::vector<Complex> coeffs;
};

/// Integer modes k, before dilation, whose frequency dilation k / L lies in the annulus.
std::vector<std::vector<long>> annulus_modes(const EnsembleSpec& spec);

/// Standard complex normal coefficients (E|c|^2 = 1). Each coefficient is a
/// function of (seed, index, mode) alone.
ModeCoefficients draw_coefficients(const EnsembleSpec& spec, std::size_t index);

GridFunction synthesize(const EnsembleSpec& spec, const ModeCoefficients& coeffs);

GridFunction sample_band_limited(const EnsembleSpec& spec, std::size_t index);

/// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

} // namespace fracbern
