#pragma once

// Monte Carlo ground truth for the maximum of W(t) - c t^2 and its location.
//
// Each path is a Gaussian random walk on the grid t_k = k * step up to the
// horizon. Path i draws from its own counter-seeded stream (one per half for
// two-sided W), so a sample is bit-identical for a given seed whatever the
// thread count, and the right half of two-sided path i is one-sided path i.
//
// With bridge correction on, the continuum maximum inside each step is drawn
// from the Brownian-bridge law of the maximum given the endpoints; the plain
// grid maximum is biased low by about 0.58 sqrt(step).

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace bmparab::mc {

enum class Sides { one, two };

struct McConfig {
    double c = 0.5;
    long paths = 1000;
    double step = 1e-3;
    double horizon = 0.0;  // 0 selects default_horizon(c)
    std::uint64_t seed = 42;
    Sides sides = Sides::one;
    bool bridge_correction = true;
    unsigned threads = 1;
};

// max(4, (10/c)^{2/3}): there c T^2 exceeds 10 sqrt(T).
double default_horizon(double c);

// Throws DomainError: c <= 0, paths < 1, step outside (0, 1e-2],
// horizon < (10/c)^{2/3}, or paths * horizon / step > 1e10.
void validate(const McConfig& config);

struct McSample {
    std::vector<double> maxima;        // one per path
    std::vector<double> argmaxes;      // location of each maximum (negative on the left half)
    std::vector<double> right_maxima;  // maximum over t >= 0 only
    McConfig config;
};

McSample simulate(McConfig config);

struct Estimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

// Fraction of maxima <= x with binomial standard error.
// Throws DomainError for an empty sample or fewer than 100 paths.
Estimate empirical_cdf(const McSample& sample, double x);
Estimate empirical_cdf(const std::vector<double>& values, double x);

Estimate sample_mean(const std::vector<double>& values);
double sample_median(std::vector<double> values);

// Header "max,argmax", one row per path, 17 significant digits.
void write_csv(const McSample& sample, std::ostream& out);

// sup_x |F_n(x) - F(x)| for the empirical distribution of values.
double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf);

// Asymptotic Kolmogorov tail P(sqrt(n) D_n > d sqrt(n)), with the
// Stephens finite-n correction.
double ks_pvalue(double d, std::size_t n);

// Two-sided exact binomial sign test of P(X > 0) = 1/2.
double sign_test_pvalue(std::size_t positives, std::size_t n);

}  // namespace bmparab::mc
