#pragma once

#include <stdexcept>
#include <string>

namespace fracbern {

/// Exponent, dimension and diffusion time of the fractional heat semigroup
/// exp(-t |grad|^alpha), where |grad|^alpha has symbol (2 pi |xi|)^alpha.
struct FractionalParams {
    double alpha = 1.0;
    int dim = 1;
    double t = 1.0;

    FractionalParams() = default;
    FractionalParams(double alpha_, int dim_, double t_ = 1.0) : alpha(alpha_), dim(dim_), t(t_) { validate(); }

    void validate() const {
        if (!(alpha > 0.0 && alpha <= 2.0))
            throw std::invalid_argument("alpha must lie in (0, 2], got " + std::to_string(alpha));
        if (dim < 1)
            throw std::invalid_argument("dimension must be positive, got " + std::to_string(dim));
        if (!(t > 0.0))
            throw std::invalid_argument("diffusion time must be positive, got " + std::to_string(t));
    }

    FractionalParams with_time(double t_new) const { return {alpha, dim, t_new}; }
};

/// Raised when an adaptive quadrature cannot meet its error target within its
/// evaluation budget.
class QuadratureError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace fracbern
