#pragma once

// Airy functions of complex argument.
//
// Branch convention: every fractional power (z^{1/4}, z^{3/2}) uses the
// principal branch with arg z in (-pi, pi]. A negative-real argument carrying
// a signed zero imaginary part (-x - 0i) is normalized to arg = +pi.
//
// Accuracy: relative error <= 1e-12 wherever |Ai(z)| > 1e-300 and z is not
// within rounding distance of an Ai zero, for |z| <= kZMax.

#include <complex>

namespace bmparab::airy {

using Complex = std::complex<double>;

// Largest |z| accepted by every evaluator in this module.
inline constexpr double kZMax = 100.0;

// |z| at or below which the Maclaurin series is used.
inline constexpr double kSeriesRadius = 10.0;

struct AiryPair {
    Complex ai;
    Complex ai_prime;
    // Set when Ai(z) was flushed to exact zero instead of a subnormal.
    bool underflow = false;
};

// Ai(z) = ai * exp(-zeta), Ai'(z) = ai_prime * exp(-zeta), with
// zeta = (2/3) z^{3/2}. The scaled parts stay O(|z|^{+-1/4}) across the whole
// disc |z| <= kZMax, so products and quotients of Airy values can be formed
// by combining exponents first.
struct ScaledAiryPair {
    Complex ai;
    Complex ai_prime;
    Complex zeta;
};

// Throws DomainError if z is not finite or |z| > kZMax.
AiryPair airy_ai(Complex z);
ScaledAiryPair airy_ai_scaled(Complex z);

// Bi and Bi' through the connection formula
//   Bi(z) = i Ai(z) - 2i e^{i pi/3} Ai(z e^{-2i pi/3}).
AiryPair airy_bi(Complex z);

// |e^{-2i pi/3} Ai(z e^{-2i pi/3}) + e^{2i pi/3} Ai(z e^{2i pi/3}) + Ai(z)|
double rotation_identity_residual(Complex z);

// Integral of Ai over [a, inf) for real a >= 0; absolute error <= 1e-12.
// Throws DomainError for a < 0.
double airy_tail_integral(double a);

// (2/3) z^{3/2} on the principal branch.
Complex zeta_of(Complex z);

}  // namespace bmparab::airy
