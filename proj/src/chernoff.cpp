#include "bmparab/chernoff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "bmparab/complex_airy.hpp"
#include "bmparab/errors.hpp"

namespace bmparab::chernoff {

namespace {

using airy::Complex;
using quad::DecayEnvelope;
using quad::QuadratureSpec;

constexpr double kPi = std::numbers::pi;
const double kArgScale = std::cbrt(0.5);                    // 2^{-1/3}
const double kPrefactor = 1.0 / (std::cbrt(4.0) * kPi);     // 1 / (2^{2/3} pi)

void require_in_range(double x, const char* op) {
    if (!std::isfinite(x) || std::abs(x) > kMaxAbsT) {
        std::ostringstream os;
        os << op << ": |x| must be <= " << kMaxAbsT << " (got " << x << ")";
        throw DomainError(os.str());
    }
}

// Shift of the contour below the real axis: the saddle of
// -eta x + (2/3) (2^{-1/3} eta)^{3/2} sits at eta = 2 x^2.
double contour_shift(double x) { return x > 0.0 ? 2.0 * x * x : 0.0; }

// Integrand on Im u = -eta, multiplied by e^{(2/3)x^3} when shifted so that it
// is O(1) at the saddle. Its modulus decreases monotonically in |u|.
Complex shifted_integrand(double x, double eta, double u) {
    const auto s = airy::airy_ai_scaled(kArgScale * Complex(eta, u));
    const double offset = eta > 0.0 ? -eta * x + (2.0 / 3.0) * x * x * x : 0.0;
    return std::exp(s.zeta + Complex(offset, -u * x)) / s.ai;
}

// Along the shifted line the modulus falls like exp(-u^2 / 8x) near the
// saddle and like exp(-u^{3/2}/3) beyond; rate 0.1 is valid past 0.8 x^2.
// Unshifted (x <= 0), |1/Ai(i 2^{-1/3} u)| ~ 2 sqrt(pi) |s|^{1/4} exp(-u^{3/2}/3).
DecayEnvelope phi_envelope(double x) {
    if (x > 0.0) return {12.0, 0.1, 1.5, std::max(2.0, 0.8 * x * x)};
    return {12.0, 0.3, 1.5, 2.0};
}

struct PhiParts {
    double integral;  // u2(x) when x > 0, phi(x) otherwise
    double error;
};

PhiParts phi_integral(double x, const QuadratureSpec& spec) {
    const double eta = contour_shift(x);
    QuadratureSpec s = spec;
    s.truncation = phi_envelope(x);
    if (x < 0.0) {
        // phi(x) ~ c1 e^{-c|x|}: keep the tolerance relative to that size, and
        // resolve the e^{-iux} oscillation.
        s.abs_tol = spec.abs_tol * std::min(1.0, std::exp(-TailConstants::c_tail * std::abs(x)));
        s.max_panel = std::min(spec.max_panel, kPi / (4.0 * std::abs(x)));
    }
    quad::validate(s);
    const double upper = quad::truncation_point(*s.truncation, s.abs_tol / 10.0);
    if (kArgScale * std::hypot(eta, upper) > airy::kZMax) {
        std::ostringstream os;
        os << "phi: integrand would leave the Airy domain at x = " << x << "; loosen abs_tol";
        throw NumericalError(os.str());
    }
    // Conjugate symmetry f(-u) = conj f(u) reduces the line to 2 Re int_0^inf.
    const auto r = quad::integrate_semi_infinite([&](double u) { return shifted_integrand(x, eta, u); }, s);
    if (!r.converged) {
        std::ostringstream os;
        os << "phi: quadrature did not converge at x = " << x << ", error estimate " << r.error_estimate;
        throw NumericalError(os.str());
    }
    return {2.0 * kPrefactor * r.value.real(), 2.0 * kPrefactor * r.error_estimate};
}

}  // namespace

QuadratureSpec default_spec() { return QuadratureSpec{}; }

double phi(double x, const QuadratureSpec& spec) {
    require_in_range(x, "phi");
    const PhiParts p = phi_integral(x, spec);
    return x > 0.0 ? std::exp(-(2.0 / 3.0) * x * x * x) * p.integral : p.integral;
}

double u2(double t, const QuadratureSpec& spec) {
    require_in_range(t, "u2");
    const PhiParts p = phi_integral(t, spec);
    return t > 0.0 ? p.integral : std::exp((2.0 / 3.0) * t * t * t) * p.integral;
}

std::complex<double> phi_raw(double x, const QuadratureSpec& spec) {
    require_in_range(x, "phi_raw");
    QuadratureSpec s = spec;
    s.truncation = phi_envelope(0.0);
    if (x != 0.0) s.max_panel = std::min(spec.max_panel, kPi / (4.0 * std::abs(x)));
    const auto r = quad::integrate_real_line(
        [x](double u) { return std::exp(Complex(0.0, -u * x)) / airy::airy_ai(Complex(0.0, kArgScale * u)).ai; },
        s);
    if (!r.converged) throw NumericalError("phi_raw: quadrature did not converge");
    return kPrefactor * r.value;
}

double u2_asymptote(double t) {
    if (!(t < 0.0)) throw DomainError("u2_asymptote: requires t < 0");
    const double a = std::abs(t);
    return TailConstants::c1_tail * std::exp(-(2.0 / 3.0) * a * a * a - TailConstants::c_tail * a);
}

ChernoffPoint chernoff_density(double t, const QuadratureSpec& spec) {
    require_in_range(t, "chernoff_density");
    const double plus = phi(t, spec);
    const double minus = phi(-t, spec);
    return {t, plus, minus, 0.5 * plus * minus};
}

std::vector<ChernoffPoint> density_grid(const std::vector<double>& ts, const QuadratureSpec& spec,
                                        unsigned threads) {
    std::vector<ChernoffPoint> out(ts.size());
    threads = std::max(1u, std::min<unsigned>(threads, unsigned(ts.size())));
    std::vector<std::exception_ptr> errors(threads);
    auto work = [&](unsigned t) {
        try {
            for (std::size_t i = t; i < ts.size(); i += threads) out[i] = chernoff_density(ts[i], spec);
        } catch (...) {
            errors[t] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

double location_moment(int k, const QuadratureSpec& spec) {
    if (k < 0) throw DomainError("location_moment: k must be >= 0");
    if (k % 2 == 1) return 0.0;  // f_Z is even
    QuadratureSpec s = spec;
    s.truncation.reset();
    s.abs_tol = std::max(spec.abs_tol, 1e-9);
    const auto r = quad::integrate_finite(
        [&](double t) { return Complex(std::pow(t, k) * chernoff_density(t, spec).density, 0.0); }, 0.0, kMaxAbsT,
        s);
    if (!r.converged) throw NumericalError("location_moment: quadrature did not converge");
    return 2.0 * r.value.real();
}

LocationCdf::LocationCdf(double step, const QuadratureSpec& spec, unsigned threads) : step_(step) {
    if (!(step > 0.0) || step > 1.0) throw DomainError("LocationCdf: step must lie in (0, 1]");
    const int half = int(std::lround(kMaxAbsT / step));
    if (std::abs(half * step - kMaxAbsT) > 1e-9) throw DomainError("LocationCdf: step must divide 6");

    // Density on the nonnegative half at spacing step/2 (Simpson midpoints),
    // mirrored by symmetry.
    std::vector<double> ts(2 * half + 1);
    for (int i = 0; i <= 2 * half; ++i) ts[i] = std::min(kMaxAbsT, 0.5 * step * i);
    const auto pts = density_grid(ts, spec, threads);

    const int n = 2 * half + 1;  // nodes on [-6, 6]
    density_.resize(n);
    std::vector<double> mid(n - 1);
    for (int i = 0; i < n; ++i) density_[i] = pts[2 * std::abs(i - half)].density;
    for (int i = 0; i + 1 < n; ++i) {
        // midpoint of [t_i, t_{i+1}] has |index| (2|i - half| -/+ 1) on the fine grid
        const int j = i - half;
        const int fine = j >= 0 ? 2 * j + 1 : -(2 * j + 1);
        mid[i] = pts[fine].density;
    }
    cumulative_.assign(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        cumulative_[i + 1] = cumulative_[i] + step / 6.0 * (density_[i] + 4.0 * mid[i] + density_[i + 1]);
    }
}

double LocationCdf::operator()(double t) const {
    if (t <= -kMaxAbsT) return 0.0;
    if (t >= kMaxAbsT) return cumulative_.back();
    const double pos = (t + kMaxAbsT) / step_;
    const std::size_t i = std::min(cumulative_.size() - 2, std::size_t(pos));
    const double s = pos - double(i);
    // cubic Hermite: values C_i, C_{i+1}; slopes f_Z, limited where they
    // disagree with the secant so each piece stays monotone (Fritsch-Carlson)
    const double rise = cumulative_[i + 1] - cumulative_[i];
    double m0 = step_ * density_[i], m1 = step_ * density_[i + 1];
    if (rise <= 0.0) {
        m0 = m1 = 0.0;
    } else {
        const double a = m0 / rise, b = m1 / rise;
        if (a * a + b * b > 9.0) {
            const double tau = 3.0 / std::hypot(a, b);
            m0 *= tau;
            m1 *= tau;
        }
    }
    // h00 = 1 - h01, so C_i + (nondecreasing increment) rounds monotonically
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return cumulative_[i] + (h01 * rise + h10 * m0 + h11 * m1);
}

}  // namespace bmparab::chernoff
