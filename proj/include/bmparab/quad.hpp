#pragma once

// Adaptive Gauss-Kronrod quadrature for complex-valued integrands on finite,
// semi-infinite and doubly-infinite ranges.
//
// Infinite ranges are truncated at a point certified by a caller-supplied
// decay envelope |f(u)| <= K exp(-r u^p) for u >= knee. Without an envelope,
// [0, inf) is mapped onto [0, 1) by u = t / (1 - t).

#include <complex>
#include <functional>
#include <limits>
#include <optional>

namespace bmparab::quad {

using Complex = std::complex<double>;
using Integrand = std::function<Complex(double)>;

struct DecayEnvelope {
    double scale = 1.0;     // K
    double rate = 1.0;      // r > 0
    double exponent = 2.0;  // p > 1
    double knee = 0.0;      // bound holds for u >= knee
};

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;
    std::optional<DecayEnvelope> truncation;
    // Upper bound on the width of the initial panels, e.g. pi / (4|x|) to
    // resolve an e^{-iux} factor.
    double max_panel = std::numeric_limits<double>::infinity();
};

struct QuadratureResult {
    Complex value;
    double error_estimate = 0.0;  // quadrature error + certified truncation tail
    double truncation_point = std::numeric_limits<double>::infinity();
    long evaluations = 0;
    bool converged = true;
};

// Throws DomainError when a tolerance, envelope parameter or budget is invalid.
void validate(const QuadratureSpec& spec);

// Smallest U >= knee with K * int_U^inf exp(-r u^p) du < target.
double truncation_point(const DecayEnvelope& env, double target);

// Upper bound on K * int_U^inf exp(-r u^p) du.
double tail_bound(const DecayEnvelope& env, double upper);

// Integrand returning NaN/Inf throws NumericalError naming the abscissa.
// Budget exhaustion returns the best estimate with converged = false.
QuadratureResult integrate_finite(const Integrand& f, double a, double b, const QuadratureSpec& spec);
QuadratureResult integrate_semi_infinite(const Integrand& f, const QuadratureSpec& spec);

// Symmetric truncation [-U, U]; evaluated as int_0^inf {f(u) + f(-u)} du.
QuadratureResult integrate_real_line(const Integrand& f, const QuadratureSpec& spec);

}  // namespace bmparab::quad
