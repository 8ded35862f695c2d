#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fracbern/ensemble.hpp"
#include "fracbern/grid.hpp"
#include "fracbern/params.hpp"

namespace fracbern {

enum class Quantity { decay_c, bernstein_c, poincare_c, maximal_C };

std::string to_string(Quantity q);

struct ConstantEstimate {
    Quantity quantity = Quantity::decay_c;
    double alpha = 0.0;
    int dim = 1;
    double q = 2.0;
    double N = 1.0;
    double value = 0.0;
    /// Extreme over the random ensemble before local refinement.
    double ensemble_value = 0.0;
    std::size_t witness_index = 0;
    double witness_t = 0.0;
    bool refined = false;
    EnsembleSpec ensemble;

    /// "member=<i>[;t=<t>][;refined]"
    std::string witness() const;
};

struct EstimatorOptions {
    /// One pass of coordinate perturbations of the extremal member.
    bool refine = true;
    /// Perturbation size relative to the RMS coefficient modulus.
    double refine_step = 0.25;
    std::size_t workers = 1;
    /// Norm ratios below this are round-off, not decay, and are skipped.
    double ratio_floor = 1e-8;
    /// Projection used by the Bernstein estimator: band (P_N) or high (P_{>=N}).
    LpKind projection = LpKind::band;
};

/// t = 2^-k, k = 0..12.
std::vector<double> default_decay_times();

/// min over t of -log(||exp(-t|grad|^alpha) P_N f||_q / ||P_N f||_q) / (t N^alpha).
/// Returns +inf when P_N f vanishes or every ratio is below the floor.
double decay_rate(const GridFunction& f, double N, double alpha, double q, std::span<const double> t_grid,
                  double ratio_floor = 1e-8, double* argmin_t = nullptr);

/// bernstein_pairing / (N^alpha ||P f||_q^q), P the band or high projection.
double bernstein_ratio(const GridFunction& f, double N, double alpha, double q, LpKind projection = LpKind::band);

/// fractional_pairing(f) / ||f||_q^q for mean-zero f.
double poincare_ratio(const GridFunction& f, double alpha, double q);

/// max over samples and t of |exp(-t|grad|^alpha) f| / Mf, skipping 0/0.
double maximal_ratio(const GridFunction& f, double alpha, std::span<const double> t_grid, double* argmax_t = nullptr);

ConstantEstimate estimate_decay_constant(const FractionalParams& params, double q, double N,
                                         const EnsembleSpec& ensemble, std::span<const double> t_grid,
                                         const EstimatorOptions& opts = {});

ConstantEstimate estimate_bernstein_constant(const FractionalParams& params, double q, double N,
                                             const EnsembleSpec& ensemble, const EstimatorOptions& opts = {});

ConstantEstimate estimate_poincare_constant(const FractionalParams& params, double q, const EnsembleSpec& ensemble,
                                            const EstimatorOptions& opts = {});

ConstantEstimate maximal_domination_constant(const FractionalParams& params, const EnsembleSpec& ensemble,
                                             std::span<const double> t_grid, const EstimatorOptions& opts = {});

struct DerivativeCheck {
    double residual = 0.0;
    double pairing = 0.0;
    /// Richardson-extrapolated F'(0).
    double derivative = 0.0;
    /// |(F(h) - F(0))/h + q pairing| for each h, before extrapolation.
    std::vector<double> raw_residuals;
};

/// Finite-difference check of  F'(0) = -q * pairing  with F(t) = ||exp(-t|grad|^alpha) P_N f||_q^q.
DerivativeCheck check_derivative_identity(const GridFunction& f, double N, const FractionalParams& params, double q,
                                          std::span<const double> h_sequence);

/// {1e-2, 5e-3, 2.5e-3} in units of the band time scale (2 pi 2N)^-alpha.
std::vector<double> default_h_sequence(double N, double alpha);

enum class ProfileModel { constant_in_q, q_minus_1_over_q2 };

std::string to_string(ProfileModel m);

struct ProfileFit {
    ProfileModel model = ProfileModel::constant_in_q;
    double kappa = 0.0;
    /// max over q of |kappa g(q) - value(q)| / value(q)
    double residual = 0.0;
    /// Largest kappa with value(q) >= kappa g(q) at every q.
    double envelope_kappa = 0.0;
};

/// g(q) = 1 or (q - 1)/q^2; the latter is 0 at q = inf.
double profile_shape(ProfileModel m, double q);

/// Least-squares fit value(q) ~ kappa g(q). Needs at least four distinct q.
ProfileFit fit_q_profile(std::span<const ConstantEstimate> estimates, ProfileModel model);

} // namespace fracbern
