#include "bmparab/parabola_max.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "bmparab/complex_airy.hpp"
#include "bmparab/errors.hpp"

namespace bmparab::parabola {

namespace {

using airy::Complex;
using quad::DecayEnvelope;
using quad::QuadratureSpec;

constexpr double kPi = std::numbers::pi;
const Complex kRay = std::polar(1.0, -kPi / 6.0);  // e^{-i pi/6}
const Complex kI(0.0, 1.0);

// |Ai(e^{-i pi/6} u)| ~ exp(-(sqrt2/3) u^{3/2}) while Ai(iu + z)/Ai(iu) stays
// bounded for z >= 0; the Ai' variant picks up a |iu + z|^{1/2} factor, which
// the reduced rate absorbs.
constexpr double kRayRate = std::numbers::sqrt2 / 3.0;

DecayEnvelope lemma_envelope(double z) { return {1.0, kRayRate, 1.5, std::max(4.0, z)}; }
DecayEnvelope lemma_derivative_envelope(double z) { return {4.0, 0.9 * kRayRate, 1.5, std::max(4.0, z)}; }

std::string context(double c, double x) {
    std::ostringstream os;
    os.precision(17);
    os << "(c = " << c << ", x = " << x << ")";
    return os.str();
}

void require_nonnegative(double x, const char* op) {
    if (!std::isfinite(x) || x < 0.0) {
        throw DomainError(std::string(op) + ": x must be finite and >= 0");
    }
}

void require_converged(const quad::QuadratureResult& r, const char* op, double c, double x) {
    if (!r.converged) {
        std::ostringstream os;
        os << op << ": quadrature did not converge " << context(c, x) << ", error estimate "
           << r.error_estimate;
        throw NumericalError(os.str());
    }
}

// e^{-i pi/6} int_0^inf Ai(e^{-i pi/6} u) h(iu + z) / Ai(iu) du with h = Ai or
// Ai'. Scaled Airy values keep the three exponentials from overflowing.
quad::QuadratureResult lemma_integral(double z, bool derivative, const QuadratureSpec& spec, const char* op, double c,
                                      double x) {
    QuadratureSpec s = spec;
    s.truncation = derivative ? lemma_derivative_envelope(z) : lemma_envelope(z);
    quad::validate(s);
    const double upper = quad::truncation_point(*s.truncation, s.abs_tol / 10.0);
    if (std::hypot(z, upper) > airy::kZMax) {
        std::ostringstream os;
        os << op << ": integrand would leave the Airy domain |z| <= " << airy::kZMax << " " << context(c, x)
           << "; loosen abs_tol or reduce x";
        throw NumericalError(os.str());
    }
    const quad::Integrand f = [z, derivative](double u) {
        const auto ray = airy::airy_ai_scaled(kRay * u);
        const auto shifted = airy::airy_ai_scaled(Complex(z, u));
        const auto base = airy::airy_ai_scaled(Complex(0.0, u));
        const Complex num = derivative ? shifted.ai_prime : shifted.ai;
        return kRay * ray.ai * num / base.ai * std::exp(base.zeta - ray.zeta - shifted.zeta);
    };
    return quad::integrate_semi_infinite(f, s);
}

double clamp_probability(double v, const char* op, double c, double x) {
    if (v < -1e-8 || v > 1.0 + 1e-8) {
        std::ostringstream os;
        os.precision(17);
        os << op << ": value " << v << " outside [0, 1] beyond tolerance " << context(c, x);
        throw NumericalError(os.str());
    }
    return std::clamp(v, 0.0, 1.0);
}

double clamp_density(double v, const char* op, double c, double x) {
    if (v < -1e-10) {
        std::ostringstream os;
        os.precision(17);
        os << op << ": negative density " << v << " " << context(c, x);
        throw NumericalError(os.str());
    }
    return std::max(v, 0.0);
}

}  // namespace

DriftCoefficient::DriftCoefficient(double c) : c_(c), scale_(std::cbrt(4.0 * c)) {
    if (!std::isfinite(c) || c <= 0.0) throw DomainError("drift coefficient c must be finite and > 0");
}

QuadratureSpec default_spec() { return QuadratureSpec{}; }

RawValue cdf_one_sided_raw(DriftCoefficient c, double x, const QuadratureSpec& spec) {
    require_nonnegative(x, "cdf_one_sided");
    const double z = c.scale() * x;
    // Far in the tail the certified bound on 1 - F already meets the tolerance.
    const double tail = one_sided_tail_bound(c, x);
    if (z > 0.5 * airy::kZMax && tail < spec.abs_tol / 10.0) return {1.0, tail};
    const auto r = lemma_integral(z, false, spec, "cdf_one_sided", c.value(), x);
    require_converged(r, "cdf_one_sided", c.value(), x);
    return {1.0 - airy::airy_tail_integral(z) - 2.0 * r.value.real(), 2.0 * r.error_estimate + 1e-12};
}

double cdf_one_sided(DriftCoefficient c, double x, const QuadratureSpec& spec) {
    return clamp_probability(cdf_one_sided_raw(c, x, spec).value, "cdf_one_sided", c.value(), x);
}

RawValue pdf_one_sided_raw(DriftCoefficient c, double x, const QuadratureSpec& spec) {
    require_nonnegative(x, "pdf_one_sided");
    const double z = c.scale() * x;
    const auto r = lemma_integral(z, true, spec, "pdf_one_sided", c.value(), x);
    require_converged(r, "pdf_one_sided", c.value(), x);
    const double ai = airy::airy_ai(Complex(z, 0.0)).ai.real();
    return {c.scale() * (ai - 2.0 * r.value.real()), 2.0 * c.scale() * r.error_estimate};
}

double pdf_one_sided(DriftCoefficient c, double x, const QuadratureSpec& spec) {
    return clamp_density(pdf_one_sided_raw(c, x, spec).value, "pdf_one_sided", c.value(), x);
}

std::complex<double> cdf_bi_form_raw(DriftCoefficient c, double x, const QuadratureSpec& spec) {
    require_nonnegative(x, "cdf_bi_form");
    const double z = c.scale() * x;
    // {Ai(iu) Bi(iu + z) - Bi(iu) Ai(iu + z)} / Ai(iu); both halves of the
    // u-axis evaluated explicitly so the imaginary parts must cancel.
    const auto integrand = [z](double u) {
        const Complex base(0.0, u);
        const Complex shifted(z, u);
        const auto ai0 = airy::airy_ai(base).ai;
        const auto bi0 = airy::airy_bi(base).ai;
        const auto ai1 = airy::airy_ai(shifted).ai;
        const auto bi1 = airy::airy_bi(shifted).ai;
        return (ai0 * bi1 - bi0 * ai1) / ai0;
    };
    QuadratureSpec s = spec;
    s.truncation.reset();
    // The numerator and Ai(iu) both grow like exp((sqrt2/3)|u|^{3/2}), so
    // rounding noise near |u| = 12 sits around 1e-8; ask for no more.
    s.abs_tol = std::max(spec.abs_tol, 1e-8);
    s.rel_tol = std::max(spec.rel_tol, 1e-8);
    const auto r = quad::integrate_finite([&](double u) { return integrand(u) + integrand(-u); }, 0.0,
                                          kBiFormCutoff, s);
    if (!r.converged && r.error_estimate > 1e-7) {
        std::ostringstream os;
        os << "cdf_bi_form: quadrature error " << r.error_estimate << " " << context(c.value(), x);
        throw NumericalError(os.str());
    }
    return 0.5 * r.value;
}

double cdf_bi_form(DriftCoefficient c, double x, const QuadratureSpec& spec) {
    const Complex v = cdf_bi_form_raw(c, x, spec);
    return clamp_probability(v.real(), "cdf_bi_form", c.value(), x);
}

double cdf_two_sided(DriftCoefficient c, double x, const QuadratureSpec& spec) {
    const double f = cdf_one_sided(c, x, spec);
    return f * f;
}

double pdf_two_sided(DriftCoefficient c, double x, const QuadratureSpec& spec) {
    return 2.0 * pdf_one_sided(c, x, spec) * cdf_one_sided(c, x, spec);
}

double cdf(DriftCoefficient c, double x, Side side, const QuadratureSpec& spec) {
    return side == Side::one ? cdf_one_sided(c, x, spec) : cdf_two_sided(c, x, spec);
}

double pdf(DriftCoefficient c, double x, Side side, const QuadratureSpec& spec) {
    return side == Side::one ? pdf_one_sided(c, x, spec) : pdf_two_sided(c, x, spec);
}

DistributionPoint evaluate(DriftCoefficient c, double x, Side side, const QuadratureSpec& spec, Quantities what) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const bool need_cdf = what != Quantities::pdf || side == Side::two;
    const double big_f = need_cdf ? cdf_one_sided(c, x, spec) : nan;
    const double small_f = what != Quantities::cdf ? pdf_one_sided(c, x, spec) : nan;
    DistributionPoint p{x, big_f, small_f};
    if (side == Side::two) p = {x, big_f * big_f, 2.0 * small_f * big_f};
    if (what == Quantities::pdf) p.cdf = nan;
    return p;
}

std::vector<DistributionPoint> evaluate_grid(DriftCoefficient c, const std::vector<double>& xs, Side side,
                                             const QuadratureSpec& spec, unsigned threads, Quantities what) {
    std::vector<DistributionPoint> out(xs.size());
    threads = std::max(1u, std::min<unsigned>(threads, unsigned(xs.size())));
    if (threads <= 1) {
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = evaluate(c, xs[i], side, spec, what);
        return out;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < xs.size(); i += threads) out[i] = evaluate(c, xs[i], side, spec, what);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

double one_sided_tail_bound(DriftCoefficient c, double x) {
    if (x <= 0.0) return 1.0;
    const double a = 8.0 / (3.0 * std::sqrt(3.0)) * std::sqrt(c.value());
    return std::min(1.0, std::exp(-a * std::pow(x, 1.5)));
}

double moment(DriftCoefficient c, int k, Side side, const QuadratureSpec& spec) {
    if (k < 0 || k > kMaxMomentOrder) {
        throw DomainError("moment: order must lie in [0, " + std::to_string(kMaxMomentOrder) + "]");
    }
    // Densities inherit the tail bound exp(-a x^{3/2}) of P(N_c > x) up to a
    // polynomial factor; x^k times that factor is absorbed by running the
    // envelope at 0.8 a beyond a knee where x^{k + 1/2} e^{-0.2 a x^{3/2}} <= 1.
    const double a = 8.0 / (3.0 * std::sqrt(3.0)) * std::sqrt(c.value());
    double knee = 1.0;
    while ((k + 0.5) * std::log(knee) - 0.2 * a * std::pow(knee, 1.5) > 0.0) knee *= 1.1;

    QuadratureSpec s = spec;
    s.truncation = DecayEnvelope{6.0 * a, 0.8 * a, 1.5, knee};
    // Density evaluations carry ~1e-10 error; the outer rule cannot do better.
    s.abs_tol = std::max(spec.abs_tol, 1e-9);
    const auto r = quad::integrate_semi_infinite(
        [&](double x) {
            const double d = pdf(c, x, side, spec);
            return Complex(std::pow(x, k) * d, 0.0);
        },
        s);
    require_converged(r, "moment", c.value(), double(k));
    return r.value.real();
}

double quantile(DriftCoefficient c, double p, Side side, const QuadratureSpec& spec) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must lie in (0, 1)");
    const auto g = [&](double x) { return cdf(c, x, side, spec) - p; };
    double hi = 1.0 / c.scale();
    while (g(hi) < 0.0) hi *= 2.0;
    // Root is an x where F crosses p; bracket width 2^-45 relative keeps
    // |F(x) - p| near the CDF's own accuracy.
    boost::uintmax_t iters = 200;
    const auto bracket = boost::math::tools::toms748_solve(
        g, 0.0, hi, -p, g(hi), boost::math::tools::eps_tolerance<double>(45), iters);
    return 0.5 * (bracket.first + bracket.second);
}

std::complex<double> rotated_airy_integral_sum(double z, const QuadratureSpec& spec) {
    require_nonnegative(z, "rotated_airy_integral_sum");
    // Ai(u + w) with Re w = -z/2 behaves like exp(-(2/3) u^{3/2} + (z/2) u^{1/2});
    // beyond u = 3z the rate 1/2 dominates.
    QuadratureSpec s = spec;
    s.truncation = DecayEnvelope{1.0, 0.5, 1.5, std::max(4.0, 3.0 * z)};
    const Complex minus = z * std::polar(1.0, -2.0 * kPi / 3.0);
    const Complex plus = z * std::polar(1.0, 2.0 * kPi / 3.0);
    const auto a = quad::integrate_semi_infinite([&](double u) { return airy::airy_ai(u + minus).ai; }, s);
    const auto b = quad::integrate_semi_infinite([&](double u) { return airy::airy_ai(u + plus).ai; }, s);
    if (!a.converged || !b.converged) {
        throw NumericalError("rotated_airy_integral_sum: quadrature did not converge at z = " + std::to_string(z));
    }
    return a.value + b.value;
}

}  // namespace bmparab::parabola
