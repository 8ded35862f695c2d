#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fracbern/bump.hpp"
#include "fracbern/params.hpp"

namespace fracbern {

using Complex = std::complex<double>;

/// Sentinel exponent for the sup norm.
inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// Samples of a function on the periodic box [0, L)^d, n points per axis,
/// row-major with the last axis fastest. Sample j sits at x = j L / n.
class GridFunction {
  public:
    GridFunction() = default;
    GridFunction(int dim, double box_len, std::size_t n, std::vector<Complex> values, bool is_real);

    /// Real samples of f at every grid point.
    static GridFunction sample(int dim, double box_len, std::size_t n,
                               const std::function<double(std::span<const double>)>& f);
    static GridFunction constant(int dim, double box_len, std::size_t n, double c);

    int dim() const { return dim_; }
    double box_len() const { return box_len_; }
    std::size_t n() const { return n_; }
    std::size_t size() const { return values_.size(); }
    bool is_real() const { return is_real_; }
    const std::vector<Complex>& values() const { return values_; }
    double real(std::size_t i) const { return values_[i].real(); }

    /// Volume of one grid cell, (L / n)^d.
    double cell_volume() const;
    /// Coordinates of sample i.
    std::vector<double> point(std::size_t i) const;

  private:
    int dim_ = 1;
    double box_len_ = 1.0;
    std::size_t n_ = 0;
    std::vector<Complex> values_;
    bool is_real_ = true;
};

/// Signed frequency index of DFT slot i: i for i < n/2, i - n otherwise.
long signed_index(std::size_t i, std::size_t n);

/// Highest representable frequency along one axis, n / (2 L).
double nyquist(const GridFunction& f);

/// Normalized forward DFT  c_k = n^(-d) sum_j f_j exp(-2 pi i k.j / n), so that
/// f_j = sum_k c_k exp(2 pi i k.j / n) and slot k carries frequency k / L.
std::vector<Complex> forward_dft(const GridFunction& f);

/// Inverse of forward_dft. With is_real set, imaginary parts are discarded.
GridFunction inverse_dft(int dim, double box_len, std::size_t n, std::vector<Complex> coeffs, bool is_real);

/// Physical frequency vector (k / L) of DFT slot `flat`.
std::vector<double> frequency(const GridFunction& f, std::size_t flat);

/// Euclidean norm of the physical frequency of every DFT slot.
std::vector<double> frequency_norms(int dim, double box_len, std::size_t n);

struct SpectralMultiplier {
    std::function<Complex(std::span<const double>)> symbol;
    std::string label;

    /// Symbol depending on |xi| only.
    static SpectralMultiplier radial(std::string label, std::function<double(double)> profile);
};

/// (2 pi |xi|)^alpha.
SpectralMultiplier fractional_laplacian(double alpha);
/// exp(-t (2 pi |xi|)^alpha).
SpectralMultiplier heat_semigroup(double alpha, double t);
/// exp(-t ((2 pi |xi|)^alpha + eps phi1(xi))).
SpectralMultiplier perturbed_semigroup(double alpha, double t, double eps);

/// Checks symbol(xi) == symbol(R xi) on `probes` random rotations of sample frequencies.
bool is_radial(const SpectralMultiplier& m, int dim, std::size_t probes = 64, double rel_tol = 1e-12);

/// Pointwise multiplication of the discrete spectrum by m(k / L). A real input
/// stays real when the symbol satisfies m(-xi) = conj(m(xi)) on the grid.
GridFunction apply_multiplier(const GridFunction& f, const SpectralMultiplier& m);

enum class LpKind { band, low, high };

std::string to_string(LpKind kind);
LpKind lp_kind_from_string(const std::string& name);

/// Littlewood-Paley symbol at frequency norm r: psi(r/N), phi(r/N) or 1 - phi(r/N).
double lp_symbol(double r, double N, LpKind kind);

/// Littlewood-Paley projection at scale N. Requires 2N <= Nyquist.
GridFunction lp_project(const GridFunction& f, double N, LpKind kind);

/// (L/n)^d sum |f_j|^q, to the power 1/q; max |f_j| for q = kInfNorm.
double lebesgue_norm(const GridFunction& f, double q);

/// Riemann sum of (|grad|^alpha g) |g|^(q-2) g for a real g, with |0|^(q-2) 0 = 0.
double fractional_pairing(const GridFunction& g, double alpha, double q);

/// fractional_pairing of the band projection P_N f.
double bernstein_pairing(const GridFunction& f, double N, const FractionalParams& params, double q);

/// Radii of the dyadic ball family used by maximal_function: L 2^(-j), j = 1 .. log2(n) - 1.
std::vector<double> maximal_radii(const GridFunction& f);

/// Centred discrete maximal function: at each sample, the largest average of
/// |f| over the periodized closed balls of radius maximal_radii(f), and over
/// the single cell at the sample itself.
GridFunction maximal_function(const GridFunction& f);

/// Binary layout: int32 dim, float64 L, int32 n, uint8 is_real, then n^d
/// (re, im) float64 pairs, all little-endian.
void write_grid(std::ostream& out, const GridFunction& f);
GridFunction read_grid(std::istream& in);
void save_grid(const std::string& path, const GridFunction& f);
GridFunction load_grid(const std::string& path);

} // namespace fracbern
