#include "bmparab/quad.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "bmparab/errors.hpp"

namespace bmparab::quad {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
using Gauss = boost::math::quadrature::gauss<double, 10>;

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Panel {
    double a = 0.0;
    double b = 0.0;
    Complex value;
    double error = 0.0;
};

struct ByError {
    bool operator()(const Panel& l, const Panel& r) const { return l.error < r.error; }
};

Complex checked_eval(const Integrand& f, double u) {
    const Complex v = f(u);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        std::ostringstream os;
        os.precision(17);
        os << "quad: integrand returned a non-finite value at u = " << u;
        throw NumericalError(os.str());
    }
    return v;
}

// One 21-point Kronrod panel with the embedded 10-point Gauss rule; error
// scaled as in QUADPACK's qk21.
Panel kronrod_panel(const Integrand& f, double a, double b) {
    const auto& x = Kronrod::abscissa();
    const auto& wk = Kronrod::weights();
    const auto& wg = Gauss::weights();
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    std::array<Complex, 21> fv;
    fv[0] = checked_eval(f, center);
    for (std::size_t i = 1; i < x.size(); ++i) {
        fv[2 * i - 1] = checked_eval(f, center - half * x[i]);
        fv[2 * i] = checked_eval(f, center + half * x[i]);
    }

    Complex kron = fv[0] * wk[0];
    Complex gauss = 0.0;
    double resabs = std::abs(fv[0]) * wk[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        const Complex pair = fv[2 * i - 1] + fv[2 * i];
        kron += pair * wk[i];
        resabs += (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i])) * wk[i];
        if (i % 2 == 1) gauss += pair * wg[i / 2];
    }
    const Complex mean = 0.5 * kron;
    double resasc = std::abs(fv[0] - mean) * wk[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        resasc += (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean)) * wk[i];
    }

    Panel p{a, b, kron * half, std::abs((kron - gauss) * half)};
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    if (resasc != 0.0 && p.error != 0.0) {
        p.error = resasc * std::min(1.0, std::pow(200.0 * p.error / resasc, 1.5));
    }
    if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
        p.error = std::max(50.0 * kEps * resabs, p.error);
    }
    return p;
}

// Neumaier-compensated sum of panel values.
Complex compensated_total(const std::vector<Panel>& panels) {
    double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0;
    auto add = [](double& s, double& c, double v) {
        const double t = s + v;
        c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
        s = t;
    };
    for (const Panel& p : panels) {
        add(sr, cr, p.value.real());
        add(si, ci, p.value.imag());
    }
    return {sr + cr, si + ci};
}

std::vector<double> initial_edges(double a, double b, double max_panel) {
    // Geometric widths 1, 1, 2, 4, ... from a, then capped at max_panel.
    std::vector<double> coarse{a};
    double width = std::min(1.0, b - a);
    double at = a;
    while (at < b) {
        const double next = (b - (at + width) < 0.25 * width) ? b : at + width;
        coarse.push_back(next);
        if (at > a) width *= 2.0;
        at = next;
    }
    std::vector<double> edges{a};
    for (std::size_t i = 1; i < coarse.size(); ++i) {
        const double lo = coarse[i - 1], hi = coarse[i];
        const int pieces = std::isfinite(max_panel) ? std::max(1, int(std::ceil((hi - lo) / max_panel))) : 1;
        for (int k = 1; k <= pieces; ++k) {
            edges.push_back(k == pieces ? hi : lo + (hi - lo) * k / pieces);
        }
    }
    return edges;
}

}  // namespace

void validate(const QuadratureSpec& spec) {
    if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0)) {
        throw DomainError("quad: abs_tol and rel_tol must be > 0");
    }
    if (spec.max_subdivisions < 1) throw DomainError("quad: max_subdivisions must be >= 1");
    if (!(spec.max_panel > 0.0)) throw DomainError("quad: max_panel must be > 0");
    if (spec.truncation) {
        const DecayEnvelope& e = *spec.truncation;
        if (!(e.rate > 0.0) || !(e.exponent > 1.0) || !(e.scale > 0.0) || !(e.knee >= 0.0)) {
            throw DomainError("quad: envelope needs K > 0, r > 0, p > 1, knee >= 0");
        }
    }
}

double tail_bound(const DecayEnvelope& env, double upper) {
    if (upper <= 0.0) return std::numeric_limits<double>::infinity();
    // u^p >= U^p + p U^{p-1} (u - U) for u >= U.
    const double p = env.exponent;
    return env.scale * std::exp(-env.rate * std::pow(upper, p)) / (env.rate * p * std::pow(upper, p - 1.0));
}

double truncation_point(const DecayEnvelope& env, double target) {
    double lo = std::max(env.knee, 1e-3);
    if (tail_bound(env, lo) < target) return lo;
    double hi = 2.0 * lo;
    while (tail_bound(env, hi) >= target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e8) throw DomainError("quad: envelope never drops below the tolerance");
    }
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (tail_bound(env, mid) < target ? hi : lo) = mid;
    }
    return hi;
}

QuadratureResult integrate_finite(const Integrand& f, double a, double b, const QuadratureSpec& spec) {
    validate(spec);
    if (!std::isfinite(a) || !std::isfinite(b) || !(a <= b)) {
        throw DomainError("quad: finite interval requires a <= b");
    }
    QuadratureResult out;
    out.truncation_point = b;
    if (a == b) return out;

    std::priority_queue<Panel, std::vector<Panel>, ByError> heap;
    double total_err = 0.0;
    Complex total = 0.0;
    const std::vector<double> edges = initial_edges(a, b, spec.max_panel);
    for (std::size_t k = 1; k < edges.size(); ++k) {
        Panel p = kronrod_panel(f, edges[k - 1], edges[k]);
        out.evaluations += 21;
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }

    const double min_width = 64.0 * kEps * std::max(std::abs(a), std::abs(b));
    auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
    while (total_err > tolerance()) {
        if (int(heap.size()) >= spec.max_subdivisions) {
            out.converged = false;
            break;
        }
        Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a <= min_width) {
            out.converged = false;
            break;
        }
        heap.pop();
        const Panel left = kronrod_panel(f, worst.a, mid);
        const Panel right = kronrod_panel(f, mid, worst.b);
        out.evaluations += 42;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    std::vector<Panel> panels;
    panels.reserve(heap.size());
    total_err = 0.0;
    while (!heap.empty()) {
        total_err += heap.top().error;
        panels.push_back(heap.top());
        heap.pop();
    }
    out.value = compensated_total(panels);
    out.error_estimate = total_err;
    return out;
}

QuadratureResult integrate_semi_infinite(const Integrand& f, const QuadratureSpec& spec) {
    validate(spec);
    if (spec.truncation) {
        const DecayEnvelope& env = *spec.truncation;
        const double upper = truncation_point(env, spec.abs_tol / 10.0);
        QuadratureResult r = integrate_finite(f, 0.0, upper, spec);
        r.error_estimate += tail_bound(env, upper);
        r.truncation_point = upper;
        return r;
    }
    // u = t / (1 - t); the Kronrod nodes never touch t = 1.
    const Integrand mapped = [&f](double t) {
        const double s = 1.0 - t;
        return f(t / s) / (s * s);
    };
    QuadratureSpec inner = spec;
    inner.max_panel = std::numeric_limits<double>::infinity();
    QuadratureResult r = integrate_finite(mapped, 0.0, 1.0, inner);
    r.truncation_point = std::numeric_limits<double>::infinity();
    return r;
}

QuadratureResult integrate_real_line(const Integrand& f, const QuadratureSpec& spec) {
    QuadratureSpec folded = spec;
    if (folded.truncation) folded.truncation->scale *= 2.0;
    const Integrand both = [&f](double u) { return f(u) + f(-u); };
    return integrate_semi_infinite(both, folded);
}

}  // namespace bmparab::quad
