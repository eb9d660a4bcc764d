#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "bmparab/complex_airy.hpp"
#include "bmparab/errors.hpp"
#include "bmparab/parabola_max.hpp"
#include "generators.hpp"

namespace pm = bmparab::parabola;
using pm::DriftCoefficient;
using pm::Side;

namespace {

const DriftCoefficient kHalf(0.5);
const DriftCoefficient kQuarter(0.25);

struct Frozen {
    double x, cdf, pdf;
};

// 30-digit evaluations of the same integral representation at c = 1/2.
const Frozen kFrozen[] = {
    {0.0, 0.0, 0.977473412305993747},
    {0.25, 0.239045751658480176, 0.916223970319366686},
    {0.5, 0.451334455533041060, 0.773336829174076342},
    {1.0, 0.752924173251355716, 0.437910540949498797},
    {1.5, 0.906035275393447257, 0.196213072091605760},
    {2.0, 0.969209946301705469, 0.0729684271636366131},
};

double bisect_two_sided(double p) {
    double lo = 0.0, hi = 4.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (pm::cdf_two_sided(kHalf, mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("parabola_max") {

TEST_CASE("drift coefficient") {
    CHECK(kHalf.scale() == doctest::Approx(std::cbrt(2.0)));
    CHECK_THROWS_AS(DriftCoefficient(0.0), bmparab::DomainError);
    CHECK_THROWS_AS(DriftCoefficient(-1.0), bmparab::DomainError);
    CHECK_THROWS_AS(DriftCoefficient(std::nan("")), bmparab::DomainError);
}

TEST_CASE("cdf and pdf against frozen high-precision values") {
    for (const auto& f : kFrozen) {
        INFO("x = " << f.x);
        CHECK(std::abs(pm::cdf_one_sided(kHalf, f.x) - f.cdf) < 1e-10);
        CHECK(std::abs(pm::pdf_one_sided(kHalf, f.x) - f.pdf) < 1e-10);
    }
}

TEST_CASE("cdf limits") {
    CHECK(std::abs(pm::cdf_one_sided(kHalf, 0.0)) < 1e-6);
    CHECK(std::abs(pm::cdf_one_sided(kHalf, 10.0) - 1.0) < 1e-8);
    CHECK(pm::pdf_one_sided(kHalf, 10.0) < 1e-10);
}

TEST_CASE("x enters only through (4c)^{1/3} x") {
    const double z = std::cbrt(8.0) * 0.7;
    CHECK(std::abs(pm::cdf_one_sided(DriftCoefficient(2.0), 0.7) - pm::cdf_one_sided(kQuarter, z)) < 1e-9);
    CHECK(std::abs(pm::pdf_one_sided(DriftCoefficient(2.0), 0.7) - 2.0 * pm::pdf_one_sided(kQuarter, z)) < 1e-9);
}

TEST_CASE("property: scaling collapse for several c") {
    gen::Rng rng(17);
    for (double c : {0.1, 0.5, 1.0, 2.0}) {
        for (int i = 0; i < 8; ++i) {
            const double x = rng.uniform(0.0, 2.5);
            const double z = std::cbrt(4.0 * c) * x;
            INFO("c = " << c << ", x = " << x);
            CHECK(std::abs(pm::cdf_one_sided(DriftCoefficient(c), x) - pm::cdf_one_sided(kQuarter, z)) < 1e-9);
        }
    }
}

TEST_CASE("Bi-form representation agrees") {
    for (double x : {0.25, 0.5, 1.0, 1.5, 2.0}) {
        INFO("x = " << x);
        CHECK(std::abs(pm::cdf_bi_form(kHalf, x) - pm::cdf_one_sided(kHalf, x)) < 1e-6);
        CHECK(std::abs(pm::cdf_bi_form_raw(kHalf, x).imag()) < 1e-8);
    }
    CHECK(std::abs(pm::cdf_bi_form(kHalf, 0.0)) < 1e-5);
}

TEST_CASE("density matches central differences of the cdf") {
    const double h = 1e-4;
    const auto fd = [&](double x) {
        return (pm::cdf_one_sided(kHalf, x + h) - pm::cdf_one_sided(kHalf, x - h)) / (2.0 * h);
    };
    CHECK(std::abs(pm::pdf_one_sided(kHalf, 1.0) - fd(1.0)) < 1e-5);
    gen::Rng rng(23);
    for (int i = 0; i < 20; ++i) {
        const double x = rng.uniform(0.1, 3.0);
        INFO("x = " << x);
        CHECK(std::abs(pm::pdf_one_sided(kHalf, x) - fd(x)) < 1e-5);
    }
}

TEST_CASE("two-sided composition") {
    const double F = pm::cdf_one_sided(kHalf, 1.0);
    const double f = pm::pdf_one_sided(kHalf, 1.0);
    CHECK(pm::pdf_two_sided(kHalf, 1.0) == 2.0 * f * F);
    CHECK(pm::cdf_two_sided(kHalf, 1.0) == F * F);
    const auto p = pm::evaluate(kHalf, 1.0, Side::two);
    CHECK(p.cdf == F * F);
    CHECK(p.pdf == 2.0 * f * F);
}

TEST_CASE("moments") {
    CHECK(std::abs(pm::moment(kHalf, 0, Side::one) - 1.0) < 1e-8);
    CHECK(std::abs(pm::moment(kHalf, 0, Side::two) - 1.0) < 1e-8);
    const double mean_half = pm::moment(kHalf, 1, Side::one);
    const double mean_quarter = pm::moment(kQuarter, 1, Side::one);
    CHECK(std::abs(mean_half - mean_quarter / kHalf.scale()) < 1e-8);
    CHECK_THROWS_AS(pm::moment(kHalf, 9, Side::one), bmparab::DomainError);
    CHECK_THROWS_AS(pm::moment(kHalf, -1, Side::one), bmparab::DomainError);
}

TEST_CASE("quantiles") {
    const double F1 = pm::cdf_one_sided(kHalf, 1.0);
    CHECK(std::abs(pm::quantile(kHalf, F1, Side::one) - 1.0) < 1e-6);
    CHECK(pm::quantile(kHalf, 1e-6, Side::one) < 1e-4);

    const double median = pm::quantile(kHalf, 0.5, Side::two);
    CHECK(std::abs(median - bisect_two_sided(0.5)) < 1e-8);
    CHECK(std::abs(pm::cdf_two_sided(kHalf, median) - 0.5) < 1e-8);

    double prev = 0.0;
    for (double p = 0.05; p < 1.0; p += 0.1) {
        const double q = pm::quantile(kHalf, p, Side::one);
        CHECK(q > prev);
        CHECK(std::abs(pm::cdf_one_sided(kHalf, q) - p) < 1e-8);
        prev = q;
    }
    CHECK_THROWS_AS(pm::quantile(kHalf, 0.0, Side::one), bmparab::DomainError);
    CHECK_THROWS_AS(pm::quantile(kHalf, 1.0, Side::two), bmparab::DomainError);
}

TEST_CASE("rotated Airy integral identity") {
    for (double z : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        const auto lhs = pm::rotated_airy_integral_sum(z);
        INFO("z = " << z);
        CHECK(std::abs(lhs.real() - (1.0 - bmparab::airy::airy_tail_integral(z))) < 1e-9);
        CHECK(std::abs(lhs.imag()) < 1e-9);
    }
    CHECK(std::abs(pm::rotated_airy_integral_sum(0.0).real() - 2.0 / 3.0) < 1e-9);
    CHECK(std::abs(pm::rotated_airy_integral_sum(8.0).real() - 1.0) < 1e-6);
}

TEST_CASE("property: cdf monotone and pdf nonnegative on a grid") {
    std::vector<double> xs;
    for (int i = 0; i <= 300; ++i) xs.push_back(0.01 * i);
    const auto pts = pm::evaluate_grid(kHalf, xs, Side::one);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].pdf >= 0.0);
        CHECK(pts[i].cdf >= 0.0);
        CHECK(pts[i].cdf <= 1.0);
        if (i > 0) CHECK(pts[i].cdf >= pts[i - 1].cdf);
    }
}

TEST_CASE("grid evaluation does not depend on the thread count") {
    const std::vector<double> xs{0.0, 0.3, 0.9, 1.7, 2.2, 3.5};
    const auto a = pm::evaluate_grid(kHalf, xs, Side::two, pm::default_spec(), 1);
    const auto b = pm::evaluate_grid(kHalf, xs, Side::two, pm::default_spec(), 4);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(a[i].x == xs[i]);
        CHECK(a[i].cdf == b[i].cdf);
        CHECK(a[i].pdf == b[i].pdf);
    }
}

TEST_CASE("property: the tail bound dominates 1 - F") {
    gen::Rng rng(29);
    for (int i = 0; i < 20; ++i) {
        const double c = rng.uniform(0.1, 3.0), x = rng.uniform(0.0, 4.0);
        const DriftCoefficient d(c);
        CHECK(1.0 - pm::cdf_one_sided(d, x) <= pm::one_sided_tail_bound(d, x) + 1e-10);
    }
}

TEST_CASE("property: integrand stays under its truncation envelope") {
    // |Ai(e^{-i pi/6} u) Ai(iu + z) / Ai(iu)| <= exp(-(sqrt2/3) u^{3/2}) for u >= max(4, z)
    namespace airy = bmparab::airy;
    const std::complex<double> ray = std::polar(1.0, -std::numbers::pi / 6.0);
    gen::Rng rng(31);
    for (int i = 0; i < 300; ++i) {
        const double z = rng.uniform(0.0, 8.0);
        const double u = rng.uniform(std::max(4.0, z), 60.0);
        const auto a = airy::airy_ai_scaled(ray * u);
        const auto b = airy::airy_ai_scaled(std::complex<double>(z, u));
        const auto d = airy::airy_ai_scaled(std::complex<double>(0.0, u));
        const double log_mod = std::log(std::abs(a.ai * b.ai / d.ai)) + (d.zeta - a.zeta - b.zeta).real();
        const double log_mod_prime = std::log(std::abs(a.ai * b.ai_prime / d.ai)) + (d.zeta - a.zeta - b.zeta).real();
        INFO("z = " << z << ", u = " << u);
        CHECK(log_mod <= -(std::numbers::sqrt2 / 3.0) * std::pow(u, 1.5));
        CHECK(log_mod_prime <= std::log(4.0) - 0.9 * (std::numbers::sqrt2 / 3.0) * std::pow(u, 1.5));
    }
}

TEST_CASE("far tail and unattainable tolerances") {
    CHECK(pm::cdf_one_sided(kHalf, 200.0) == 1.0);
    CHECK_THROWS_AS(pm::pdf_one_sided(kHalf, 200.0), bmparab::NumericalError);
    auto tight = pm::default_spec();
    tight.abs_tol = 1e-300;
    CHECK_THROWS_AS(pm::cdf_one_sided(kHalf, 1.0, tight), bmparab::NumericalError);
}

TEST_CASE("partial evaluation leaves the other field NaN") {
    const auto c_only = pm::evaluate(kHalf, 1.0, Side::two, pm::default_spec(), pm::Quantities::cdf);
    CHECK(c_only.cdf == pm::cdf_two_sided(kHalf, 1.0));
    CHECK(std::isnan(c_only.pdf));
    const auto p_only = pm::evaluate(kHalf, 1.0, Side::two, pm::default_spec(), pm::Quantities::pdf);
    CHECK(p_only.pdf == pm::pdf_two_sided(kHalf, 1.0));
    CHECK(std::isnan(p_only.cdf));
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(pm::cdf_one_sided(kHalf, -0.1), bmparab::DomainError);
    CHECK_THROWS_AS(pm::pdf_two_sided(kHalf, -1.0), bmparab::DomainError);
    CHECK_THROWS_AS(pm::cdf_bi_form(kHalf, -1.0), bmparab::DomainError);
    CHECK_THROWS_AS(pm::rotated_airy_integral_sum(-1.0), bmparab::DomainError);
}

}
