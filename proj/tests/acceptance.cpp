// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bmparab/chernoff.hpp"
#include "bmparab/cli.hpp"
#include "bmparab/complex_airy.hpp"
#include "bmparab/mc_oracle.hpp"
#include "bmparab/parabola_max.hpp"

namespace airy = bmparab::airy;
namespace pm = bmparab::parabola;
namespace ch = bmparab::chernoff;
namespace mc = bmparab::mc;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(int id, const char* title, const std::function<void(Verdict&)>& body) {
    Verdict v;
    v.detail.precision(3);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(v);
    } catch (const std::exception& e) {
        v.pass = false;
        v.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failures;
    std::printf("%s criterion %d: %s;%s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.str().c_str(),
                secs);
    std::fflush(stdout);
}

std::vector<std::vector<double>> figure(int which) {
    std::ostringstream out, err;
    const int code = bmparab::cli::run({"figure", "--which", std::to_string(which), "--c", "0.5"}, out, err);
    if (code != 0) throw std::runtime_error("figure " + std::to_string(which) + " failed: " + err.str());
    std::istringstream is(out.str());
    std::string line;
    std::getline(is, line);  // header
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        std::vector<double> r;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) r.push_back(std::stod(cell));
        rows.push_back(r);
    }
    return rows;
}

bool unimodal(const std::vector<std::vector<double>>& rows) {
    std::size_t i = 1;
    while (i < rows.size() && rows[i][1] >= rows[i - 1][1]) ++i;
    while (i < rows.size() && rows[i][1] <= rows[i - 1][1]) ++i;
    return i == rows.size();
}

double trapezoid(const std::vector<std::vector<double>>& rows) {
    double s = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        s += 0.5 * (rows[i][1] + rows[i - 1][1]) * (rows[i][0] - rows[i - 1][0]);
    }
    return s;
}

}  // namespace

int main() {
    const pm::DriftCoefficient half(0.5);
    const unsigned threads = bmparab::cli::thread_budget();

    criterion(1, "Airy rotation identity on the 441-point lattice and tail integral at 0", [](Verdict& v) {
        double worst = 0.0;
        for (int i = -10; i <= 10; ++i) {
            for (int j = -10; j <= 10; ++j) {
                worst = std::max(worst, airy::rotation_identity_residual({0.5 * i, 0.5 * j}));
            }
        }
        const double t0 = std::abs(airy::airy_tail_integral(0.0) - 1.0 / 3.0);
        v.detail << " max residual " << worst << ", |T(0) - 1/3| " << t0;
        v.require(worst < 1e-10, "residual < 1e-10");
        v.require(t0 <= 1e-12, "|T(0) - 1/3| <= 1e-12");
    });

    criterion(2, "Lemma form and Bi form agree to 1e-6 at c = 1/2", [&](Verdict& v) {
        double worst = 0.0;
        for (double x : {0.25, 0.5, 1.0, 1.5, 2.0}) {
            worst = std::max(worst, std::abs(pm::cdf_one_sided(half, x) - pm::cdf_bi_form(half, x)));
        }
        v.detail << " max difference " << worst;
        v.require(worst < 1e-6, "difference < 1e-6");
    });

    criterion(3, "rotated Airy integrals equal 1 - T(z), limit 1 at z = 8", [](Verdict& v) {
        double worst = 0.0;
        for (double z : {0.0, 0.5, 1.0, 2.0, 4.0}) {
            const auto lhs = pm::rotated_airy_integral_sum(z);
            worst = std::max(worst, std::abs(lhs - std::complex<double>(1.0 - airy::airy_tail_integral(z))));
        }
        const double at8 = std::abs(pm::rotated_airy_integral_sum(8.0) - 1.0);
        v.detail << " max mismatch " << worst << ", |value(8) - 1| " << at8;
        v.require(worst < 1e-9, "identity within 1e-9");
        v.require(at8 < 1e-6, "z = 8 within 1e-6 of 1");
    });

    criterion(4, "distribution axioms at c = 1/2", [&](Verdict& v) {
        std::vector<double> xs;
        for (int i = 0; i <= 300; ++i) xs.push_back(0.01 * i);
        const auto pts = pm::evaluate_grid(half, xs, pm::Side::one, pm::default_spec(), threads, pm::Quantities::cdf);
        bool monotone = true;
        for (std::size_t i = 1; i < pts.size(); ++i) monotone = monotone && pts[i].cdf >= pts[i - 1].cdf;
        const double mass_one = pm::moment(half, 0, pm::Side::one);
        const double mass_two = pm::moment(half, 0, pm::Side::two);
        double worst_fd = 0.0;
        const double h = 1e-4;
        for (int i = 1; i <= 30; ++i) {
            const double x = 0.1 * i;
            const double fd = (pm::cdf_one_sided(half, x + h) - pm::cdf_one_sided(half, x - h)) / (2.0 * h);
            worst_fd = std::max(worst_fd, std::abs(fd - pm::pdf_one_sided(half, x)));
        }
        v.detail << " monotone " << (monotone ? "yes" : "no") << ", |int f - 1| " << std::abs(mass_one - 1.0)
                 << ", |int g - 1| " << std::abs(mass_two - 1.0) << ", max |pdf - dF/dx| " << worst_fd;
        v.require(monotone, "F monotone on [0, 3]");
        v.require(std::abs(mass_one - 1.0) <= 1e-6, "int f = 1 +- 1e-6");
        v.require(std::abs(mass_two - 1.0) <= 1e-6, "int g = 1 +- 1e-6");
        v.require(worst_fd < 1e-5, "pdf matches central differences within 1e-5");
    });

    criterion(5, "scaling collapse onto c = 1/4", [](Verdict& v) {
        double worst = 0.0;
        const pm::DriftCoefficient quarter(0.25);
        for (double c : {0.1, 0.5, 1.0, 2.0}) {
            for (double x : {0.3, 0.7, 1.2}) {
                const double z = std::cbrt(4.0 * c) * x;
                worst = std::max(worst,
                                 std::abs(pm::cdf_one_sided(pm::DriftCoefficient(c), x) - pm::cdf_one_sided(quarter, z)));
            }
        }
        v.detail << " max difference " << worst;
        v.require(worst < 1e-9, "difference < 1e-9");
    });

    criterion(6, "Monte Carlo, 2e5 paths, step 5e-4, seed 42, c = 1/2, band 3 sigma + 0.003", [&](Verdict& v) {
        mc::McConfig cfg;
        cfg.c = 0.5;
        cfg.paths = 200000;
        cfg.step = 5e-4;
        cfg.seed = 42;
        cfg.sides = mc::Sides::two;
        cfg.threads = threads;
        const auto sample = mc::simulate(cfg);
        for (double x : {0.5, 1.0, 1.5}) {
            const double F = pm::cdf_one_sided(half, x);
            const double FM = pm::cdf_two_sided(half, x);
            const auto one = mc::empirical_cdf(sample.right_maxima, x);
            const auto two = mc::empirical_cdf(sample, x);
            const double d1 = std::abs(one.estimate - F), b1 = 3.0 * one.std_error + 0.003;
            const double d2 = std::abs(two.estimate - F * F), b2 = 3.0 * two.std_error + 0.003;
            v.detail << " x=" << x << ": one " << d1 << "/" << b1 << ", two " << d2 << "/" << b2 << ";";
            v.require(d1 <= b1, "one-sided x = " + std::to_string(x));
            v.require(d2 <= b2, "two-sided x = " + std::to_string(x));
            v.require(std::abs(FM - F * F) <= b2, "F_M = F^2 at x = " + std::to_string(x));
        }
    });

    criterion(7, "location density: mass, symmetry, tail asymptote, KS against simulation", [&](Verdict& v) {
        const double mass = ch::location_moment(0);
        bool symmetric = true;
        for (int i = 0; i <= 600; ++i) {
            const double t = 0.01 * i;
            symmetric = symmetric && ch::chernoff_density(t).density == ch::chernoff_density(-t).density;
        }
        const double ratio = ch::u2(-4.0) / ch::u2_asymptote(-4.0);

        const ch::LocationCdf cdf(0.01, ch::default_spec(), threads);
        mc::McConfig cfg;
        cfg.c = 1.0;
        cfg.paths = 100000;
        cfg.step = 1e-3;
        cfg.seed = 42;
        cfg.sides = mc::Sides::two;
        cfg.threads = threads;
        const auto sample = mc::simulate(cfg);
        const double d = mc::ks_statistic(sample.argmaxes, [&](double t) { return cdf(t); });
        const double p = mc::ks_pvalue(d, sample.argmaxes.size());

        v.detail << " |int f_Z - 1| " << std::abs(mass - 1.0) << ", symmetric " << (symmetric ? "yes" : "no")
                 << ", u2(-4)/asymptote " << ratio << ", KS D " << d << " p " << p;
        v.require(std::abs(mass - 1.0) <= 1e-5, "int f_Z = 1 +- 1e-5");
        v.require(symmetric, "f_Z(t) == f_Z(-t)");
        v.require(ratio >= 0.98 && ratio <= 1.02, "u2(-4)/asymptote in [0.98, 1.02]");
        v.require(p > 0.01, "KS p-value > 0.01");
    });

    criterion(8, "figure grids: cdf monotone 0 to 1, densities unimodal with unit mass, f_Z symmetric", [](Verdict& v) {
        const auto f1 = figure(1);
        bool monotone = true;
        for (std::size_t i = 1; i < f1.size(); ++i) monotone = monotone && f1[i][1] >= f1[i - 1][1];
        v.detail << " fig1 " << f1.front()[1] << ".." << f1.back()[1];
        v.require(monotone, "figure 1 monotone");
        v.require(f1.front()[1] < 1e-6 && f1.back()[1] > 1.0 - 1e-4, "figure 1 spans 0 to 1");
        for (int which : {2, 3}) {
            const auto rows = figure(which);
            const bool nonneg = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r[1] >= 0.0; });
            const double mass = trapezoid(rows);
            v.detail << ", fig" << which << " mass " << mass;
            v.require(nonneg, "figure " + std::to_string(which) + " nonnegative");
            v.require(unimodal(rows), "figure " + std::to_string(which) + " unimodal");
            v.require(std::abs(mass - 1.0) <= 1e-4, "figure " + std::to_string(which) + " integrates to 1");
        }
        const auto f4 = figure(4);
        double asym = 0.0;
        for (std::size_t i = 0; i < f4.size(); ++i) {
            const auto& a = f4[i];
            const auto& b = f4[f4.size() - 1 - i];
            asym = std::max(asym, std::abs(a[1] - b[1]) + std::abs(a[0] + b[0]));
        }
        v.detail << ", fig4 asymmetry " << asym;
        v.require(asym < 1e-10, "figure 4 symmetric");
        v.require(unimodal(f4), "figure 4 unimodal");
    });

    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
