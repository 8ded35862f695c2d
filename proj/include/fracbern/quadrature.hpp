#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fracbern/params.hpp"

namespace fracbern {

struct QuadResult {
    double value = 0.0;
    double abs_err = 0.0;
    std::size_t evals = 0;
    bool converged = true;
};

using RealFunction = std::function<double(double)>;

/// Globally adaptive 15-point Gauss-Kronrod integration of f over [a, b]
/// with an absolute error target. Subdivides the interval with the largest
/// error estimate until the summed estimate drops below abs_tol or the
/// evaluation budget is spent; `converged` reports which one happened.
QuadResult integrate_adaptive(const RealFunction& f, double a, double b, double abs_tol,
                              std::size_t max_evals = 100000);

/// Single 15-point Kronrod rule on [a, b], error estimated against the
/// embedded 7-point Gauss rule.
QuadResult gauss_kronrod15(const RealFunction& f, double a, double b);

/// Wynn epsilon extrapolation of a sequence of partial sums.
struct Extrapolation {
    double value = 0.0;
    double abs_err = 0.0;
};

/// Accelerates a sequence of partial sums. Keeps the most recent `window`
/// terms and returns the highest even-order epsilon entry together with an
/// error estimate built from the spread of the last three extrapolants.
class WynnEpsilon {
  public:
    explicit WynnEpsilon(std::size_t window = 40) : window_(window) {}

    Extrapolation push(double partial_sum);
    std::size_t size() const { return sums_.size(); }

  private:
    double extrapolate() const;

    std::size_t window_;
    std::vector<double> sums_;
    std::vector<double> history_;
};

/// Extrapolated limit of a fixed sequence of partial sums.
double wynn_limit(std::span<const double> partial_sums);

} // namespace fracbern
