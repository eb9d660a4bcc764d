#include "bmparab/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "bmparab/chernoff.hpp"
#include "bmparab/errors.hpp"
#include "bmparab/mc_oracle.hpp"
#include "bmparab/parabola_max.hpp"

namespace bmparab::cli {

namespace {

using parabola::DriftCoefficient;
using parabola::Side;

// Column-oriented result: every subcommand reduces to one of these.
struct Table {
    std::string kind;
    std::optional<double> c;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;  // already formatted cells
};

bool needs_quoting(const std::string& cell) {
    return cell.find_first_of(",\"\r\n") != std::string::npos;
}

std::string csv_cell(const std::string& cell) {
    if (!needs_quoting(cell)) return cell;
    std::string q = "\"";
    for (char ch : cell) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + '"';
}

void write_csv(const Table& t, std::ostream& os) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_cell(t.columns[i]);
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
        os << '\n';
    }
}

// Numeric cells become JSON numbers, the rest strings.
nlohmann::ordered_json json_cell(const std::string& cell) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (!cell.empty() && end == cell.c_str() + cell.size() && std::isfinite(v)) return v;
    return cell;
}

void write_json(const Table& t, std::ostream& os) {
    nlohmann::ordered_json doc;
    doc["kind"] = t.kind;
    if (t.c) doc["c"] = json_cell(format_number(*t.c));
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = json_cell(row[i]);
        rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    os << doc.dump(2) << '\n';
}

struct Common {
    double c = 0.5;
    std::vector<double> xs;
    std::string grid;
    std::string side = "one";
    std::string format = "csv";
    std::string out;
    double abs_tol = quad::QuadratureSpec{}.abs_tol;
    double rel_tol = quad::QuadratureSpec{}.rel_tol;

    quad::QuadratureSpec spec() const {
        quad::QuadratureSpec s;
        s.abs_tol = abs_tol;
        s.rel_tol = rel_tol;
        quad::validate(s);
        return s;
    }
    Side parsed_side() const { return side == "two" ? Side::two : Side::one; }
    std::vector<double> points(const std::vector<double>& fallback = {}) const {
        if (!grid.empty()) return parse_grid(grid);
        if (!xs.empty()) return xs;
        if (!fallback.empty()) return fallback;
        throw DomainError("one of --x or --grid is required");
    }
};

void add_common(CLI::App* sub, Common& o, bool points, bool with_side) {
    sub->add_option("--c", o.c, "drift coefficient c > 0")->capture_default_str();
    if (points) {
        auto* x = sub->add_option("--x", o.xs, "comma-separated evaluation points")->delimiter(',');
        auto* g = sub->add_option("--grid", o.grid, "start:stop:step grid");
        x->excludes(g);
    }
    if (with_side) {
        sub->add_option("--side", o.side, "one- or two-sided Brownian motion")
            ->check(CLI::IsMember({"one", "two"}))
            ->capture_default_str();
    }
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--out", o.out, "write output to this file instead of stdout");
    sub->add_option("--abs-tol", o.abs_tol, "absolute quadrature tolerance")->capture_default_str();
    sub->add_option("--rel-tol", o.rel_tol, "relative quadrature tolerance")->capture_default_str();
}

Table distribution_table(const Common& o, const std::vector<double>& xs, Side side, bool want_cdf, bool want_pdf,
                         unsigned threads) {
    const DriftCoefficient c(o.c);
    const auto what = want_cdf && want_pdf ? parabola::Quantities::both
                      : want_cdf           ? parabola::Quantities::cdf
                                           : parabola::Quantities::pdf;
    const auto pts = parabola::evaluate_grid(c, xs, side, o.spec(), threads, what);
    Table t;
    t.c = o.c;
    const std::string prefix = side == Side::one ? "one_sided_" : "two_sided_";
    t.kind = prefix + (want_cdf && want_pdf ? "distribution" : want_cdf ? "cdf" : "pdf");
    t.columns.push_back("x");
    if (want_cdf) t.columns.push_back("cdf");
    if (want_pdf) t.columns.push_back("pdf");
    for (const auto& p : pts) {
        std::vector<std::string> row{format_number(p.x)};
        if (want_cdf) row.push_back(format_number(p.cdf));
        if (want_pdf) row.push_back(format_number(p.pdf));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table chernoff_table(const Common& o, const std::vector<double>& ts, unsigned threads) {
    const auto pts = chernoff::density_grid(ts, o.spec(), threads);
    Table t;
    t.kind = "chernoff";
    t.columns = {"x", "density"};
    for (const auto& p : pts) t.rows.push_back({format_number(p.t), format_number(p.density)});
    return t;
}

struct McOptions {
    long paths = 20000;
    double step = 1e-3;
    std::uint64_t seed = 42;
    bool no_bridge = false;
    std::string samples;
};

// Exit status is kExitNumerical when any point falls outside its band.
Table mc_check_table(const Common& o, const McOptions& m, bool side_given, unsigned threads, std::ostream& err,
                     bool& all_pass) {
    const DriftCoefficient c(o.c);
    const auto xs = o.points();
    for (double x : xs) {
        if (!(x >= 0.0)) throw DomainError("mc-check: evaluation points must be >= 0");
    }
    mc::McConfig cfg;
    cfg.c = o.c;
    cfg.paths = m.paths;
    cfg.step = m.step;
    cfg.seed = m.seed;
    cfg.bridge_correction = !m.no_bridge;
    cfg.threads = threads;
    const bool two = !side_given || o.side == "two";
    const bool one = !side_given || o.side == "one";
    cfg.sides = two ? mc::Sides::two : mc::Sides::one;
    const auto sample = mc::simulate(cfg);
    if (!m.samples.empty()) {
        std::ofstream f(m.samples, std::ios::binary);
        if (!f) throw DomainError("mc-check: cannot open " + m.samples);
        mc::write_csv(sample, f);
    }

    Table t;
    t.kind = "mc_check";
    t.c = o.c;
    t.columns = {"x", "side", "empirical", "std_error", "analytic", "band", "result"};
    all_pass = true;
    const auto spec = o.spec();
    auto add = [&](const std::vector<double>& values, const char* side, double x, double analytic) {
        const auto e = mc::empirical_cdf(values, x);
        const double band = 3.0 * e.std_error + 0.003;
        const bool pass = std::abs(e.estimate - analytic) <= band;
        all_pass = all_pass && pass;
        t.rows.push_back({format_number(x), side, format_number(e.estimate), format_number(e.std_error),
                          format_number(analytic), format_number(band), pass ? "PASS" : "FAIL"});
    };
    for (double x : xs) {
        const double f = parabola::cdf_one_sided(c, x, spec);
        if (one) add(sample.right_maxima, "one", x, f);
        if (two) add(sample.maxima, "two", x, f * f);
    }
    if (!all_pass) err << "mc-check: at least one point lies outside its band\n";
    return t;
}

int emit(const Table& t, const Common& o, std::ostream& out) {
    std::ostringstream buf;
    if (o.format == "json") {
        write_json(t, buf);
    } else {
        write_csv(t, buf);
    }
    if (o.out.empty()) {
        out << buf.str();
        return kExitOk;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw DomainError("cannot open output file " + o.out);
    f << buf.str();
    return kExitOk;
}

std::vector<double> default_figure_grid(int which) {
    return which == 4 ? parse_grid("-3:3:0.01") : parse_grid("0:5:0.01");
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, ':')) {
        char* end = nullptr;
        const double v = std::strtod(piece.c_str(), &end);
        if (piece.empty() || end != piece.c_str() + piece.size() || !std::isfinite(v)) {
            throw DomainError("grid: expected start:stop:step, got '" + text + "'");
        }
        parts.push_back(v);
    }
    if (parts.size() != 3 || text.back() == ':') throw DomainError("grid: expected start:stop:step, got '" + text + "'");
    const double start = parts[0], stop = parts[1], step = parts[2];
    if (!(start <= stop)) throw DomainError("grid: start must be <= stop");
    if (!(step > 0.0)) throw DomainError("grid: step must be > 0");
    const double span = (stop - start) / step;
    if (span > 1e6) throw DomainError("grid: more than 1e6 steps");
    const long n = long(std::floor(span + 0.5));
    std::vector<double> xs(std::size_t(n) + 1);
    for (long i = 0; i <= n; ++i) xs[std::size_t(i)] = start + double(i) * step;
    return xs;
}

unsigned thread_budget() {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("BMPARAB_THREADS");
    if (env == nullptr || *env == '\0') return hw;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw DomainError(std::string("BMPARAB_THREADS must be a positive integer, got '") + env + "'");
    return unsigned(std::min<long>(v, 1024));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Distribution of the maximum of Brownian motion minus a parabola", "bmparab"};
    app.require_subcommand(1);

    Common o;
    McOptions m;
    int k = 1;
    std::vector<double> ps;
    int which = 1;

    auto* cdf = app.add_subcommand("cdf", "distribution function of the maximum");
    add_common(cdf, o, true, true);
    auto* pdf = app.add_subcommand("pdf", "density of the maximum");
    add_common(pdf, o, true, true);
    auto* two = app.add_subcommand("two-sided", "cdf and density for two-sided Brownian motion");
    add_common(two, o, true, false);
    auto* chern = app.add_subcommand("chernoff", "density of the location of the maximum for c = 1");
    add_common(chern, o, true, false);
    chern->remove_option(chern->get_option("--c"));
    auto* mom = app.add_subcommand("moment", "k-th moment of the maximum");
    add_common(mom, o, false, true);
    mom->add_option("--k", k, "moment order")->capture_default_str();
    auto* qnt = app.add_subcommand("quantile", "quantiles of the maximum");
    add_common(qnt, o, false, true);
    qnt->add_option("--p", ps, "comma-separated probabilities in (0, 1)")->delimiter(',')->required();
    auto* mcc = app.add_subcommand("mc-check", "compare Monte Carlo CDF estimates with the analytic CDF");
    add_common(mcc, o, true, true);
    mcc->add_option("--paths", m.paths, "number of simulated paths")->capture_default_str();
    mcc->add_option("--step", m.step, "time step of the random walk")->capture_default_str();
    mcc->add_option("--seed", m.seed, "random seed")->capture_default_str();
    mcc->add_flag("--no-bridge", m.no_bridge, "take the plain grid maximum");
    mcc->add_option("--samples", m.samples, "also write the sample as max,argmax CSV");
    auto* fig = app.add_subcommand("figure", "data grid for one of the four standard plots");
    add_common(fig, o, true, false);
    fig->add_option("--which", which, "1: cdf, 2: one-sided pdf, 3: two-sided pdf, 4: location density")
        ->check(CLI::Range(1, 4))
        ->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        const unsigned threads = thread_budget();
        Table t;
        int status = kExitOk;
        if (cdf->parsed()) {
            t = distribution_table(o, o.points(), o.parsed_side(), true, false, threads);
        } else if (pdf->parsed()) {
            t = distribution_table(o, o.points(), o.parsed_side(), false, true, threads);
        } else if (two->parsed()) {
            t = distribution_table(o, o.points(), Side::two, true, true, threads);
        } else if (chern->parsed()) {
            t = chernoff_table(o, o.points(), threads);
        } else if (mom->parsed()) {
            const double v = parabola::moment(DriftCoefficient(o.c), k, o.parsed_side(), o.spec());
            t.kind = o.side == "two" ? "two_sided_moment" : "one_sided_moment";
            t.c = o.c;
            t.columns = {"k", "moment"};
            t.rows.push_back({std::to_string(k), format_number(v)});
        } else if (qnt->parsed()) {
            const DriftCoefficient c(o.c);
            t.kind = o.side == "two" ? "two_sided_quantile" : "one_sided_quantile";
            t.c = o.c;
            t.columns = {"p", "x"};
            for (double p : ps) {
                t.rows.push_back({format_number(p), format_number(parabola::quantile(c, p, o.parsed_side(), o.spec()))});
            }
        } else if (mcc->parsed()) {
            bool pass = true;
            t = mc_check_table(o, m, mcc->count("--side") > 0, threads, err, pass);
            if (!pass) status = kExitNumerical;
        } else if (fig->parsed()) {
            const auto xs = o.points(default_figure_grid(which));
            if (which == 4) {
                t = chernoff_table(o, xs, threads);
            } else {
                const Side side = which == 3 ? Side::two : Side::one;
                t = distribution_table(o, xs, side, which == 1, which != 1, threads);
            }
            t.kind = "figure_" + std::to_string(which) + "_" + t.kind;
        }
        emit(t, o, out);
        return status;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace bmparab::cli
