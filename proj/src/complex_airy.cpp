#include "bmparab/complex_airy.hpp"

#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bmparab/errors.hpp"

namespace bmparab::airy {

namespace {

constexpr double kPi = std::numbers::pi;

// Ai(0) and -Ai'(0) split into double-double form so the double-double
// series gets them to ~32 digits.
constexpr double kAi0Hi = 0.3550280538878172;
constexpr double kAi0Lo = 2.05233632436212e-17;
constexpr double kAip0Hi = 0.2588194037928068;
constexpr double kAip0Lo = -2.522243111610832e-17;

const Complex kRotPlus = std::polar(1.0, 2.0 * kPi / 3.0);    // e^{2i pi/3}
const Complex kRotMinus = std::polar(1.0, -2.0 * kPi / 3.0);  // e^{-2i pi/3}

// Double-double real: hi + lo with |lo| <= ulp(hi)/2, ~106 bits.
struct DoubleDouble {
    double hi = 0.0;
    double lo = 0.0;

    DoubleDouble() = default;
    DoubleDouble(double h) : hi(h) {}  // NOLINT: implicit widening like a float type
    DoubleDouble(double h, double l) : hi(h), lo(l) {}

    explicit operator double() const { return hi + lo; }
};

inline DoubleDouble quick_two_sum(double a, double b) {
    const double s = a + b;
    return {s, b - (s - a)};
}

inline DoubleDouble two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline DoubleDouble operator+(DoubleDouble x, DoubleDouble y) {
    DoubleDouble s = two_sum(x.hi, y.hi);
    const DoubleDouble t = two_sum(x.lo, y.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline DoubleDouble operator-(DoubleDouble x) { return {-x.hi, -x.lo}; }
inline DoubleDouble operator-(DoubleDouble x, DoubleDouble y) { return x + (-y); }

inline DoubleDouble operator*(DoubleDouble x, DoubleDouble y) {
    const double p = x.hi * y.hi;
    double e = std::fma(x.hi, y.hi, -p);
    e += x.hi * y.lo + x.lo * y.hi;
    return quick_two_sum(p, e);
}

inline DoubleDouble operator/(DoubleDouble x, double d) {
    const double q1 = x.hi / d;
    const double p = q1 * d;
    const double pe = std::fma(q1, d, -p);
    const DoubleDouble r = x - DoubleDouble(p, pe);
    return quick_two_sum(q1, r.hi / d);
}

inline DoubleDouble& operator+=(DoubleDouble& x, DoubleDouble y) { return x = x + y; }

template <class R>
double to_double(R x) { return static_cast<double>(x); }

template <class R>
double epsilon_of();
template <>
double epsilon_of<double>() { return DBL_EPSILON; }
template <>
double epsilon_of<long double>() { return LDBL_EPSILON; }
template <>
double epsilon_of<DoubleDouble>() { return 0x1p-104; }

// Minimal complex arithmetic over an arbitrary real type; std::complex is
// only specified for float/double/long double.
template <class R>
struct Cx {
    R re;
    R im;
};

template <class R>
Cx<R> operator+(Cx<R> a, Cx<R> b) { return {a.re + b.re, a.im + b.im}; }
template <class R>
Cx<R> operator-(Cx<R> a, Cx<R> b) { return {a.re - b.re, a.im - b.im}; }
template <class R>
Cx<R> operator*(Cx<R> a, Cx<R> b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class R>
Cx<R> operator*(R s, Cx<R> a) { return {s * a.re, s * a.im}; }
template <class R>
Cx<R> operator/(Cx<R> a, double d) { return {a.re / d, a.im / d}; }
template <class R>
double norm2(Cx<R> a) {
    const double re = to_double(a.re), im = to_double(a.im);
    return re * re + im * im;
}

// Maclaurin series Ai = c1 f - c2 g, with
//   f = sum 3^k (1/3)_k z^{3k} / (3k)!,  g = sum 3^k (2/3)_k z^{3k+1} / (3k+1)!.
template <class R>
AiryPair maclaurin(Complex zd) {
    const Cx<R> z{R(zd.real()), R(zd.imag())};
    const Cx<R> z3 = z * z * z;
    const Cx<R> one{R(1), R(0)};

    Cx<R> ft = one, f = one;
    Cx<R> gt = z, g = z;
    Cx<R> fpt = (z * z) / 2.0, fp = fpt;
    Cx<R> gpt = one, gp = one;

    const double eps2 = epsilon_of<R>() * epsilon_of<R>() / 16.0;
    const double zabs3 = std::abs(zd) * std::abs(zd) * std::abs(zd);
    for (int k = 1; k < 400; ++k) {
        const double k3 = 3.0 * k;
        ft = (ft * z3) / ((k3 - 1) * k3);
        gt = (gt * z3) / (k3 * (k3 + 1));
        gpt = (gpt * z3) / ((k3 - 2) * k3);
        if (k >= 2) fpt = (fpt * z3) / ((k3 - 3) * (k3 - 1));
        f = f + ft;
        g = g + gt;
        gp = gp + gpt;
        if (k >= 2) fp = fp + fpt;

        const bool shrinking = zabs3 < 0.5 * (3.0 * k - 3.0) * (3.0 * k - 1.0);
        if (shrinking && norm2(ft) <= eps2 * norm2(f) && norm2(gt) <= eps2 * norm2(g) &&
            norm2(fpt) <= eps2 * (norm2(fp) + 1.0) && norm2(gpt) <= eps2 * norm2(gp)) {
            break;
        }
    }

    const R c1 = R(kAi0Hi) + R(kAi0Lo);
    const R c2 = R(kAip0Hi) + R(kAip0Lo);
    const Cx<R> ai = c1 * f - c2 * g;
    const Cx<R> aip = c1 * fp - c2 * gp;
    return {Complex(to_double(ai.re), to_double(ai.im)), Complex(to_double(aip.re), to_double(aip.im)),
            false};
}

// Digits lost to cancellation in the series grow like exp(|zeta| + Re zeta):
// the terms sum to roughly Bi-size while Ai sits at e^{-zeta}.
AiryPair series_ai(Complex z) {
    const Complex zeta = zeta_of(z);
    const double loss = std::abs(zeta) + zeta.real();
    if (loss < 4.6) return maclaurin<double>(z);
    if (loss < 9.2) return maclaurin<long double>(z);
    return maclaurin<DoubleDouble>(z);
}

// Poincare expansion, scaled by e^{zeta}. Accurate for |arg z| <= 2 pi/3 and
// |z| > kSeriesRadius, where the optimally truncated error is ~e^{-2|zeta|}.
ScaledAiryPair asymptotic_scaled(Complex z) {
    const Complex zeta = zeta_of(z);
    const Complex inv = 1.0 / zeta;
    const Complex z14 = std::sqrt(std::sqrt(z));

    Complex su = 1.0, sv = 1.0;
    Complex pw = 1.0;
    double uk = 1.0;
    double last = HUGE_VAL;
    for (int k = 1; k < 200; ++k) {
        uk *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / (216.0 * k * (2.0 * k - 1.0));
        const double vk = -(6.0 * k + 1.0) / (6.0 * k - 1.0) * uk;
        pw *= -inv;
        const Complex tu = uk * pw;
        const double mag = std::abs(tu);
        if (mag > last) break;  // divergent tail from here on
        last = mag;
        su += tu;
        sv += vk * pw;
        if (mag < 1e-17 * std::abs(su)) break;
    }
    const double norm = 0.5 / std::sqrt(kPi);
    return {norm * su / z14, -norm * z14 * sv, zeta};
}

ScaledAiryPair large_scaled(Complex z) {
    if (std::abs(std::arg(z)) <= 2.0 * kPi / 3.0) return asymptotic_scaled(z);
    // Ai(z) = -e^{-2i pi/3} Ai(z e^{-2i pi/3}) - e^{2i pi/3} Ai(z e^{2i pi/3});
    // both rotated arguments fall in |arg| <= 2 pi/3.
    const ScaledAiryPair m = asymptotic_scaled(z * kRotMinus);
    const ScaledAiryPair p = asymptotic_scaled(z * kRotPlus);
    const Complex zeta = zeta_of(z);
    const Complex em = std::exp(zeta - m.zeta);
    const Complex ep = std::exp(zeta - p.zeta);
    const Complex ai = -kRotMinus * m.ai * em - kRotPlus * p.ai * ep;
    const Complex aip = -kRotPlus * m.ai_prime * em - kRotMinus * p.ai_prime * ep;
    return {ai, aip, zeta};
}

Complex normalize(Complex z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw DomainError("airy: non-finite argument");
    }
    if (std::abs(z) > kZMax) {
        std::ostringstream os;
        os << "airy: |z| = " << std::abs(z) << " exceeds Z_MAX = " << kZMax;
        throw DomainError(os.str());
    }
    // Pin arg(-x - 0i) to +pi.
    if (z.imag() == 0.0) z.imag(0.0);
    return z;
}

}  // namespace

Complex zeta_of(Complex z) {
    if (z.imag() == 0.0) z.imag(0.0);
    return (2.0 / 3.0) * z * std::sqrt(z);
}

ScaledAiryPair airy_ai_scaled(Complex z) {
    z = normalize(z);
    if (std::abs(z) <= kSeriesRadius) {
        const AiryPair p = series_ai(z);
        const Complex zeta = zeta_of(z);
        const Complex e = std::exp(zeta);
        return {p.ai * e, p.ai_prime * e, zeta};
    }
    return large_scaled(z);
}

AiryPair airy_ai(Complex z) {
    z = normalize(z);
    if (std::abs(z) <= kSeriesRadius) return series_ai(z);

    const ScaledAiryPair s = large_scaled(z);
    // log|Ai| below the smallest normal double: flush to zero.
    const double log_mag = -s.zeta.real() + std::log(std::max(std::abs(s.ai), std::abs(s.ai_prime)));
    if (log_mag < std::log(DBL_MIN)) return {0.0, 0.0, true};
    const Complex e = std::exp(-s.zeta);
    return {s.ai * e, s.ai_prime * e, false};
}

AiryPair airy_bi(Complex z) {
    // Below the real axis z e^{-2i pi/3} leaves the sector |arg| <= 2 pi/3
    // where Ai is summed directly; Bi(conj z) = conj Bi(z) keeps it inside.
    if (std::signbit(z.imag())) {
        AiryPair up = airy_bi(std::conj(z));
        up.ai = std::conj(up.ai);
        up.ai_prime = std::conj(up.ai_prime);
        return up;
    }
    const AiryPair a = airy_ai(z);
    const AiryPair r = airy_ai(z * kRotMinus);
    const Complex i(0.0, 1.0);
    const Complex w = std::polar(1.0, kPi / 3.0);
    AiryPair out;
    out.ai = i * a.ai - 2.0 * i * w * r.ai;
    // d/dz Ai(z e^{-2i pi/3}) brings e^{-2i pi/3}; e^{i pi/3} e^{-2i pi/3} = e^{-i pi/3}.
    out.ai_prime = i * a.ai_prime - 2.0 * i * std::conj(w) * r.ai_prime;
    return out;
}

double rotation_identity_residual(Complex z) {
    const Complex a = airy_ai(z).ai;
    const Complex m = airy_ai(z * kRotMinus).ai;
    const Complex p = airy_ai(z * kRotPlus).ai;
    return std::abs(kRotMinus * m + kRotPlus * p + a);
}

namespace {

// Integral of the Maclaurin series over [0, a], in double-double: the terms
// reach e^{zeta(a)} while the result is O(1).
DoubleDouble airy_integral_0_to(double a) {
    using R = DoubleDouble;
    const R x = a;
    const R x3 = x * x * x;
    R ft = 1.0, gt = x;               // series terms of f and g
    R sf = x, sg = (x * x) / 2.0;     // integrated terms
    const double eps = epsilon_of<R>();
    for (int k = 1; k < 400; ++k) {
        const double k3 = 3.0 * k;
        ft = (ft * x3) / ((k3 - 1) * k3);
        gt = (gt * x3) / (k3 * (k3 + 1));
        const R tf = (ft * x) / (k3 + 1);
        const R tg = (gt * x) / (k3 + 2);
        sf += tf;
        sg += tg;
        if (a * a * a < 0.5 * k3 * k3 && tf.hi <= eps * sf.hi && tg.hi <= eps * sg.hi) break;
    }
    const R c1 = R(kAi0Hi) + R(kAi0Lo);
    const R c2 = R(kAip0Hi) + R(kAip0Lo);
    return c1 * sf - c2 * sg;
}

}  // namespace

double airy_tail_integral(double a) {
    if (!std::isfinite(a) || a < 0.0) {
        throw DomainError("airy_tail_integral: requires finite a >= 0");
    }
    if (a == 0.0) return 1.0 / 3.0;
    if (a <= 12.0) {
        // 1/3 - int_0^a Ai, formed in double-double before rounding.
        const DoubleDouble third = DoubleDouble(1.0) / 3.0;
        return std::max(0.0, to_double(third - airy_integral_0_to(a)));
    }
    // int_a^inf Ai = Ai(a)/sqrt(a) (1 + O(a^{-3/2})); below 1e-13 here, so the
    // leading term is well inside the 1e-12 absolute budget.
    return airy_ai(Complex(a, 0.0)).ai.real() / std::sqrt(a);
}

}  // namespace bmparab::airy
