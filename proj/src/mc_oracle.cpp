#include "bmparab/mc_oracle.hpp"

#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <exception>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "bmparab/errors.hpp"

namespace bmparab::mc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream for one half of one path; side 0 is t >= 0.
std::mt19937_64 path_stream(std::uint64_t seed, long path, int side) {
    const std::uint64_t key = splitmix64(splitmix64(seed) ^ splitmix64(2 * std::uint64_t(path) + side + 1));
    std::seed_seq seq{std::uint32_t(key), std::uint32_t(key >> 32), std::uint32_t(seed), std::uint32_t(seed >> 32)};
    return std::mt19937_64(seq);
}

// Uniform on the open interval (0, 1).
double open_uniform(std::mt19937_64& rng) { return (double(rng() >> 11) + 0.5) * 0x1p-53; }

struct HalfMax {
    double value = 0.0;
    double location = 0.0;
};

HalfMax simulate_half(const McConfig& cfg, std::mt19937_64& rng) {
    boost::random::normal_distribution<double> normal;
    const double dt = cfg.step;
    const double sd = std::sqrt(dt);
    const double near = 6.0 * sd;  // a bridge this far below the running max exceeds it with prob < e^{-72}
    const long steps = long(std::ceil(cfg.horizon / dt - 1e-9));

    HalfMax best;
    double w = 0.0;
    double y0 = 0.0;
    for (long k = 1; k <= steps; ++k) {
        const double t = double(k) * dt;
        w += sd * normal(rng);
        const double y1 = w - cfg.c * t * t;
        if (cfg.bridge_correction) {
            if (std::max(y0, y1) > best.value - near) {
                const double d = y1 - y0;
                const double top = 0.5 * (y0 + y1 + std::sqrt(d * d - 2.0 * dt * std::log(open_uniform(rng))));
                if (top > best.value) {
                    best.value = top;
                    // the bridge maximum sits nearer the higher endpoint
                    const double lean = d / (std::abs(d) + 2.0 * (top - std::max(y0, y1)) + 1e-300);
                    best.location = t - dt * (0.5 - 0.5 * lean);
                }
            }
        } else if (y1 > best.value) {
            best.value = y1;
            best.location = t;
        }
        y0 = y1;
    }
    return best;
}

}  // namespace

double default_horizon(double c) { return std::max(4.0, std::pow(10.0 / c, 2.0 / 3.0)); }

void validate(const McConfig& cfg) {
    if (!(cfg.c > 0.0) || !std::isfinite(cfg.c)) throw DomainError("mc: c must be a finite positive number");
    if (cfg.paths < 1) throw DomainError("mc: paths must be >= 1");
    if (!(cfg.step > 0.0) || cfg.step > 1e-2) throw DomainError("mc: step must lie in (0, 1e-2]");
    const double min_horizon = std::pow(10.0 / cfg.c, 2.0 / 3.0);
    if (!(cfg.horizon >= min_horizon) || !std::isfinite(cfg.horizon)) {
        std::ostringstream os;
        os << "mc: horizon must be >= (10/c)^{2/3} = " << min_horizon;
        throw DomainError(os.str());
    }
    if (double(cfg.paths) * cfg.horizon / cfg.step > 1e10) {
        throw DomainError("mc: paths * horizon / step exceeds the 1e10 resource cap");
    }
}

McSample simulate(McConfig cfg) {
    if (cfg.horizon == 0.0 && cfg.c > 0.0) cfg.horizon = default_horizon(cfg.c);
    validate(cfg);

    McSample out;
    out.config = cfg;
    const std::size_t n = std::size_t(cfg.paths);
    out.maxima.resize(n);
    out.argmaxes.resize(n);
    out.right_maxima.resize(n);

    const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, unsigned(std::min<long>(cfg.paths, 1024))));
    std::vector<std::exception_ptr> errors(threads);
    auto work = [&](unsigned id) {
        try {
            for (std::size_t i = id; i < n; i += threads) {
                auto right_rng = path_stream(cfg.seed, long(i), 0);
                const HalfMax right = simulate_half(cfg, right_rng);
                out.right_maxima[i] = right.value;
                out.maxima[i] = right.value;
                out.argmaxes[i] = right.location;
                if (cfg.sides == Sides::two) {
                    auto left_rng = path_stream(cfg.seed, long(i), 1);
                    const HalfMax left = simulate_half(cfg, left_rng);
                    if (left.value > right.value) {
                        out.maxima[i] = left.value;
                        out.argmaxes[i] = -left.location;
                    }
                }
            }
        } catch (...) {
            errors[id] = std::current_exception();
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

Estimate empirical_cdf(const std::vector<double>& values, double x) {
    if (values.empty()) throw DomainError("empirical_cdf: empty sample");
    if (values.size() < 100) throw DomainError("empirical_cdf: needs at least 100 paths");
    const auto below = std::count_if(values.begin(), values.end(), [x](double v) { return v <= x; });
    const double n = double(values.size());
    const double est = double(below) / n;
    return {est, std::sqrt(est * (1.0 - est) / n)};
}

Estimate empirical_cdf(const McSample& sample, double x) { return empirical_cdf(sample.maxima, x); }

Estimate sample_mean(const std::vector<double>& values) {
    if (values.size() < 2) throw DomainError("sample_mean: needs at least two values");
    double mean = 0.0, m2 = 0.0;
    std::size_t k = 0;
    for (double v : values) {
        ++k;
        const double d = v - mean;
        mean += d / double(k);
        m2 += d * (v - mean);
    }
    const double sd = std::sqrt(m2 / double(k - 1));
    return {mean, sd / std::sqrt(double(k))};
}

double sample_median(std::vector<double> values) {
    if (values.empty()) throw DomainError("sample_median: empty sample");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    if (values.size() % 2 == 1) return values[mid];
    const double upper = values[mid];
    const double lower = *std::max_element(values.begin(), values.begin() + mid);
    return 0.5 * (lower + upper);
}

void write_csv(const McSample& sample, std::ostream& out) {
    const auto old = out.precision();
    out << "max,argmax\n" << std::setprecision(17);
    for (std::size_t i = 0; i < sample.maxima.size(); ++i) {
        out << sample.maxima[i] << ',' << sample.argmaxes[i] << '\n';
    }
    out.precision(old);
}

double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf) {
    if (values.empty()) throw DomainError("ks_statistic: empty sample");
    std::sort(values.begin(), values.end());
    const double n = double(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = cdf(values[i]);
        d = std::max({d, double(i + 1) / n - f, f - double(i) / n});
    }
    return d;
}

double ks_pvalue(double d, std::size_t n) {
    if (n == 0) throw DomainError("ks_pvalue: n must be >= 1");
    const double rn = std::sqrt(double(n));
    const double lambda = (rn + 0.12 + 0.11 / rn) * d;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-18) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double sign_test_pvalue(std::size_t positives, std::size_t n) {
    if (n == 0) throw DomainError("sign_test_pvalue: n must be >= 1");
    if (positives > n) throw DomainError("sign_test_pvalue: positives exceeds n");
    const boost::math::binomial_distribution<double> b(double(n), 0.5);
    const double k = double(std::min(positives, n - positives));
    return std::min(1.0, 2.0 * boost::math::cdf(b, k));
}

}  // namespace bmparab::mc
