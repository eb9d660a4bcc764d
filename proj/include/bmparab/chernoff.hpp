#pragma once

// Density of Z = argmax_t {W(t) - t^2} for two-sided W (Chernoff's
// distribution):
//
//   f_Z(t) = phi(t) phi(-t) / 2,
//   phi(x) = 2^{-2/3} / pi * int_R e^{-iux} / Ai(i 2^{-1/3} u) du.
//
// phi decays like e^{-(2/3)x^3} as x -> +inf and only like e^{-c|x|} as
// x -> -inf (poles of 1/Ai at u = i 2^{1/3} |a_k|). The function
// u2(t) = e^{(2/3)t^3} phi(t) has the same pairwise products,
// u2(t) u2(-t) = phi(t) phi(-t), and carries the superexponential decay on the
// negative side instead, u2(t) ~ c1 exp(-(2/3)|t|^3 - c|t|).
//
// For x > 0 the contour is shifted to Im u = -2x^2, the saddle of the
// integrand, so phi(x) is obtained without cancellation.

#include <complex>
#include <vector>

#include "bmparab/quad.hpp"

namespace bmparab::chernoff {

struct TailConstants {
    static constexpr double c_tail = 2.9458;
    static constexpr double c1_tail = 2.2638;
};

// Largest |t| evaluated by quadrature.
inline constexpr double kMaxAbsT = 6.0;

struct ChernoffPoint {
    double t = 0.0;
    double phi_plus = 0.0;   // phi(t)
    double phi_minus = 0.0;  // phi(-t)
    double density = 0.0;    // phi(t) phi(-t) / 2
};

quad::QuadratureSpec default_spec();

// |x| <= kMaxAbsT, else DomainError.
double phi(double x, const quad::QuadratureSpec& spec = default_spec());

// The undeformed real-line integral with both half-lines evaluated
// separately; the imaginary part should vanish. Loses relative accuracy once
// phi(x) drops under ~1e-14, i.e. x > 3.
std::complex<double> phi_raw(double x, const quad::QuadratureSpec& spec = default_spec());

// e^{(2/3)t^3} phi(t), |t| <= kMaxAbsT.
double u2(double t, const quad::QuadratureSpec& spec = default_spec());

// c1 exp(-(2/3)|t|^3 - c|t|) with the tabulated constants; t < 0 only.
double u2_asymptote(double t);

ChernoffPoint chernoff_density(double t, const quad::QuadratureSpec& spec = default_spec());

std::vector<ChernoffPoint> density_grid(const std::vector<double>& ts,
                                        const quad::QuadratureSpec& spec = default_spec(), unsigned threads = 1);

// int_{-6}^{6} t^k f_Z(t) dt.
double location_moment(int k, const quad::QuadratureSpec& spec = default_spec());

// Distribution function of Z on [-6, 6], tabulated from f_Z on a uniform grid
// and interpolated with cubic Hermite pieces (f_Z supplies the slopes).
class LocationCdf {
public:
    explicit LocationCdf(double step = 0.01, const quad::QuadratureSpec& spec = default_spec(),
                         unsigned threads = 1);

    double operator()(double t) const;
    double total_mass() const { return cumulative_.back(); }

private:
    double step_;
    std::vector<double> density_;
    std::vector<double> cumulative_;
};

}  // namespace bmparab::chernoff
