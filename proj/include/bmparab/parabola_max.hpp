#pragma once

// Distribution of the maximum of W(t) - c t^2.
//
//   N_c = max_{t >= 0} {W(t) - c t^2}   (one-sided W)
//   M_c = max_{t in R} {W(t) - c t^2}   (two-sided W from the origin)
//
// Every quantity depends on x only through z = (4c)^{1/3} x. The one-sided
// CDF and density are single semi-infinite integrals of Ai-only integrands;
// M_c is the maximum of two independent copies of N_c, so F_M = F_c^2 and
// g_c = 2 f_c F_c.

#include <complex>
#include <vector>

#include "bmparab/quad.hpp"

namespace bmparab::parabola {

enum class Side { one, two };

class DriftCoefficient {
public:
    // Throws DomainError unless c is finite and > 0.
    explicit DriftCoefficient(double c);

    double value() const { return c_; }
    // (4c)^{1/3}, the factor mapping x to z.
    double scale() const { return scale_; }

private:
    double c_;
    double scale_;
};

struct DistributionPoint {
    double x = 0.0;
    double cdf = 0.0;
    double pdf = 0.0;
};

// Highest moment order accepted by moment().
inline constexpr int kMaxMomentOrder = 8;

// Half-width of the u-range used by the Bi-form cross-check.
inline constexpr double kBiFormCutoff = 12.0;

// Quadrature defaults shared by every operation (abs/rel 1e-10).
quad::QuadratureSpec default_spec();

// x < 0 is rejected with DomainError. Quadrature that misses its tolerance
// throws NumericalError carrying (c, x).
double cdf_one_sided(DriftCoefficient c, double x, const quad::QuadratureSpec& spec = default_spec());

// Unclamped value with the achieved error bound; cdf_one_sided() clamps this
// to [0, 1] after checking it lies within 1e-8 of that range.
struct RawValue {
    double value = 0.0;
    double error_estimate = 0.0;
};
RawValue cdf_one_sided_raw(DriftCoefficient c, double x, const quad::QuadratureSpec& spec = default_spec());

// The undeformed representation with Ai and Bi, truncated to |u| <= 12.
// Cancellation limits this to ~1e-6; it exists as a cross-check of
// cdf_one_sided. The raw variant keeps the (ideally zero) imaginary part.
double cdf_bi_form(DriftCoefficient c, double x, const quad::QuadratureSpec& spec = default_spec());
std::complex<double> cdf_bi_form_raw(DriftCoefficient c, double x,
                                     const quad::QuadratureSpec& spec = default_spec());

double pdf_one_sided(DriftCoefficient c, double x, const quad::QuadratureSpec& spec = default_spec());
RawValue pdf_one_sided_raw(DriftCoefficient c, double x, const quad::QuadratureSpec& spec = default_spec());

double cdf_two_sided(DriftCoefficient c, double x, const quad::QuadratureSpec& spec = default_spec());
double pdf_two_sided(DriftCoefficient c, double x, const quad::QuadratureSpec& spec = default_spec());

double cdf(DriftCoefficient c, double x, Side side, const quad::QuadratureSpec& spec = default_spec());
double pdf(DriftCoefficient c, double x, Side side, const quad::QuadratureSpec& spec = default_spec());

// Which fields of a DistributionPoint to compute; the others are NaN.
enum class Quantities { both, cdf, pdf };

// cdf and pdf at x from one evaluation of each one-sided integral.
DistributionPoint evaluate(DriftCoefficient c, double x, Side side,
                           const quad::QuadratureSpec& spec = default_spec(), Quantities what = Quantities::both);

// Evaluates every x independently on up to `threads` workers; output order
// follows xs.
std::vector<DistributionPoint> evaluate_grid(DriftCoefficient c, const std::vector<double>& xs, Side side,
                                             const quad::QuadratureSpec& spec = default_spec(),
                                             unsigned threads = 1, Quantities what = Quantities::both);

// E[N_c^k] or E[M_c^k], 0 <= k <= kMaxMomentOrder.
double moment(DriftCoefficient c, int k, Side side, const quad::QuadratureSpec& spec = default_spec());

// x with |cdf(x) - p| < 1e-8, p in (0, 1).
double quantile(DriftCoefficient c, double p, Side side, const quad::QuadratureSpec& spec = default_spec());

// int_0^inf Ai(u + z e^{-2i pi/3}) du + int_0^inf Ai(u + z e^{2i pi/3}) du,
// each half integrated separately. Equals 1 - int_z^inf Ai for real z >= 0.
std::complex<double> rotated_airy_integral_sum(double z, const quad::QuadratureSpec& spec = default_spec());

// Upper bound on P(N_c > x): the parabola dominates the tangent line
// x + 2 c s t - c s^2, optimized over s.
double one_sided_tail_bound(DriftCoefficient c, double x);

}  // namespace bmparab::parabola
