// Command-line front end: closed-form eigenpairs with residual audits, the
// numerical eigenvalue estimator, shape comparisons, the intermediate-order
// counterexample certificate, the boundary-regularity barrier, and the
// logarithmic-profile check.  Reports are flat JSON (snake_case keys, floats
// at 17 significant digits) or CSV with a header row.
//
// Exit codes: 0 = the asserted property holds, 1 = usage error,
// 2 = assertion failed, 3 = numeric failure (e.g. the solver did not settle).

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "trunclap/closed_form.hpp"
#include "trunclap/comparisons.hpp"
#include "trunclap/convex_domain.hpp"
#include "trunclap/grid.hpp"
#include "trunclap/pde_solver.hpp"
#include "trunclap/regularity.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAssertion = 2;
constexpr int kExitNumeric = 3;
constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Report writing: a flat ordered map, rendered as JSON or CSV.

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Report {
    using Value = std::variant<bool, std::int64_t, double, std::string, std::vector<double>>;
    std::vector<std::pair<std::string, Value>> entries;

    void put(std::string key, bool v) { entries.emplace_back(std::move(key), v); }
    void put(std::string key, int v) { entries.emplace_back(std::move(key), std::int64_t(v)); }
    void put(std::string key, std::int64_t v) { entries.emplace_back(std::move(key), v); }
    void put(std::string key, std::uint64_t v) {
        entries.emplace_back(std::move(key), std::int64_t(v));
    }
    void put(std::string key, double v) { entries.emplace_back(std::move(key), v); }
    void put(std::string key, const char* v) {
        entries.emplace_back(std::move(key), std::string(v));
    }
    void put(std::string key, std::string v) { entries.emplace_back(std::move(key), std::move(v)); }
    void put(std::string key, std::vector<double> v) {
        entries.emplace_back(std::move(key), std::move(v));
    }

    static std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            if (c == '"' || c == '\\') out.push_back('\\');
            out.push_back(c);
        }
        return out;
    }

    static std::string render_value(const Value& v, bool csv) {
        if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
        if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
        if (const auto* d = std::get_if<double>(&v)) return format_double(*d);
        if (const auto* s = std::get_if<std::string>(&v))
            return csv ? *s : "\"" + escape(*s) + "\"";
        const auto& a = std::get<std::vector<double>>(v);
        std::string out = csv ? "" : "[";
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i) out += csv ? ";" : ", ";
            out += format_double(a[i]);
        }
        if (!csv) out += "]";
        return out;
    }

    void write_json(std::ostream& out) const {
        out << "{\n";
        for (std::size_t i = 0; i < entries.size(); ++i) {
            out << "  \"" << entries[i].first << "\": "
                << render_value(entries[i].second, false);
            if (i + 1 < entries.size()) out << ",";
            out << "\n";
        }
        out << "}\n";
    }

    // one header row, one value row; array values join with ';'
    void write_csv(std::ostream& out) const {
        for (std::size_t i = 0; i < entries.size(); ++i)
            out << entries[i].first << (i + 1 < entries.size() ? "," : "\n");
        for (std::size_t i = 0; i < entries.size(); ++i)
            out << render_value(entries[i].second, true)
                << (i + 1 < entries.size() ? "," : "\n");
    }
};

// A free-form table for per-sample / per-rung CSV output.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    void write_csv(std::ostream& out) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            out << header[i] << (i + 1 < header.size() ? "," : "\n");
        for (const auto& row : rows)
            for (std::size_t i = 0; i < row.size(); ++i)
                out << format_double(row[i]) << (i + 1 < row.size() ? "," : "\n");
    }
};

// ---------------------------------------------------------------------------
// Common options.

struct CommonOpts {
    std::string out_path;           // empty = stdout
    std::string format = "json";    // json | csv
    std::uint64_t seed = 1;         // quasi-random start index / RNG seed
    int threads = 0;                // 0 = TRUNCLAP_THREADS or serial
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("-o,--out", opts.out_path, "output file (default: stdout)");
    cmd->add_option("--format", opts.format, "report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_option("--seed", opts.seed, "sampling seed / start index")
        ->capture_default_str();
    cmd->add_option("--threads", opts.threads,
                    "solver threads (0: TRUNCLAP_THREADS or serial)")
        ->capture_default_str();
}

void stamp_common(Report& rep, const char* subcommand, const CommonOpts& opts) {
    rep.put("schema_version", kSchemaVersion);
    rep.put("subcommand", subcommand);
    rep.put("format", opts.format);
    rep.put("seed", opts.seed);
    rep.put("threads", std::int64_t(trunclap::resolve_threads(opts.threads)));
}

int emit(const CommonOpts& opts, const Report& rep, const Table* table, int code) {
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!opts.out_path.empty()) {
        file.open(opts.out_path);
        if (!file) {
            std::cerr << "error: cannot open output file " << opts.out_path << "\n";
            return kExitUsage;
        }
        out = &file;
    }
    if (opts.format == "csv") {
        if (table)
            table->write_csv(*out);
        else
            rep.write_csv(*out);
    } else {
        rep.write_json(*out);
    }
    return code;
}

// Numbers on the command line may reference pi: accepts "1.5", "pi",
// "pi/128", "2*pi", "3pi/2" and the like.
double parse_pi_expr(const std::string& text) {
    const auto pos = text.find("pi");
    if (pos == std::string::npos) {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw CLI::ValidationError("bad number: " + text);
        return v;
    }
    double factor = 1.0, divisor = 1.0;
    std::string head = text.substr(0, pos), tail = text.substr(pos + 2);
    if (!head.empty() && head.back() == '*') head.pop_back();
    if (!head.empty()) factor = std::stod(head);
    if (!tail.empty()) {
        if (tail.front() != '/') throw CLI::ValidationError("bad pi expression: " + text);
        divisor = std::stod(tail.substr(1));
    }
    return factor * std::numbers::pi / divisor;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_pi_expr(item));
    if (out.empty()) throw CLI::ValidationError("empty list");
    return out;
}

// ---------------------------------------------------------------------------
// eigen-closed: exact eigenpairs plus a residual audit over sampled points.

struct EigenClosedOpts {
    CommonOpts common;
    bool cube = false, rect = false, ball = false;
    int dim = 2, order = 1;
    std::string side = "pi", rho = "pi/2", alpha_text;
    int samples = 1000;
};

int run_eigen_closed(const EigenClosedOpts& o) {
    using namespace trunclap;
    const int modes = int(o.cube) + int(o.rect) + int(o.ball);
    if (modes != 1) {
        std::cerr << "error: choose exactly one of --cube, --rect, --ball\n";
        return kExitUsage;
    }
    if (!o.ball && o.order != 1) {
        std::cerr << "error: box eigenpairs are first-order only\n";
        return kExitUsage;
    }

    EigenPair pair = [&] {
        if (o.cube) return cube_eigenpair(o.dim, parse_pi_expr(o.side) / 2.0);
        if (o.rect) {
            auto alpha = parse_double_list(o.alpha_text);
            return rect_eigenpair(BoxSpec{int(alpha.size()), parse_pi_expr(o.side) / 2.0, alpha});
        }
        return ball_eigenpair(o.dim, o.order, parse_pi_expr(o.rho));
    }();

    // sample the domain and audit the defining identity pointwise
    ConvexDomain domain = [&]() -> ConvexDomain {
        const int n = pair.dim();
        if (pair.shape() == EigenPair::Shape::radial)
            return ConvexDomain::ball(std::vector<double>(std::size_t(n), 0.0),
                                      parse_pi_expr(o.rho));
        const double r = parse_pi_expr(o.side) / 2.0;
        std::vector<double> lo(static_cast<std::size_t>(n));
        std::vector<double> hi(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double a = o.rect ? parse_double_list(o.alpha_text)[std::size_t(i)] : 1.0;
            lo[std::size_t(i)] = -r / a;
            hi[std::size_t(i)] = r / a;
        }
        return ConvexDomain::box(lo, hi);
    }();

    const auto pts = sample_interior(domain, std::size_t(o.samples), o.common.seed);
    Table audit;
    for (int i = 0; i < pair.dim(); ++i) audit.header.push_back("x" + std::to_string(i));
    audit.header.push_back("residual");
    double worst = 0.0;
    const int k = o.ball ? o.order : 1;
    for (const auto& x : pts) {
        const double res = residual(pair, x, k);
        worst = std::max(worst, std::abs(res));
        auto row = x;
        row.push_back(res);
        audit.rows.push_back(std::move(row));
    }

    Report rep;
    stamp_common(rep, "eigen-closed", o.common);
    rep.put("shape", o.cube ? "cube" : (o.rect ? "rect" : "ball"));
    rep.put("dim", pair.dim());
    rep.put("order", k);
    if (o.ball)
        rep.put("rho", parse_pi_expr(o.rho));
    else
        rep.put("side", parse_pi_expr(o.side));
    if (o.rect) rep.put("alpha", parse_double_list(o.alpha_text));
    rep.put("samples", o.samples);
    rep.put("mu", pair.mu());
    if (!pair.exponents().empty()) rep.put("exponents", pair.exponents());
    rep.put("residual_max", worst);
    const bool ok = worst <= 1e-8;
    rep.put("identity_holds", ok);
    return emit(o.common, rep, &audit, ok ? kExitPass : kExitAssertion);
}

// ---------------------------------------------------------------------------
// eigen-numeric: the wide-stencil inverse-power estimate, optionally swept
// over a refinement ladder.

struct EigenNumericOpts {
    CommonOpts common;
    std::string domain = "square";  // square | rect | disc | cube3
    std::string side = "pi", rho = "pi/2", alpha_text = "1,2";
    std::string h = "pi/32";
    std::string h_list = "pi/32,pi/64,pi/128";
    bool refine = false;
    int order = 4;
    double tau_factor = 0.45, tolerance = 1e-6;
    int max_outer = 400;
    std::int64_t inner_cap = 2'000'000;
    std::string field_out;
};

int run_eigen_numeric(const EigenNumericOpts& o) {
    using namespace trunclap;

    int dim = 2;
    std::optional<double> mu_exact;
    ConvexDomain domain = [&]() -> ConvexDomain {
        if (o.domain == "square") {
            const double r = parse_pi_expr(o.side) / 2.0;
            mu_exact = cube_eigenpair(2, r).mu();
            return ConvexDomain::box({-r, -r}, {r, r});
        }
        if (o.domain == "cube3") {
            dim = 3;
            const double r = parse_pi_expr(o.side) / 2.0;
            mu_exact = cube_eigenpair(3, r).mu();
            return ConvexDomain::box({-r, -r, -r}, {r, r, r});
        }
        if (o.domain == "rect") {
            const auto alpha = parse_double_list(o.alpha_text);
            if (alpha.size() != 2) throw CLI::ValidationError("--alpha needs two entries here");
            const double r = parse_pi_expr(o.side) / 2.0;
            mu_exact = rect_eigenpair(BoxSpec{2, r, alpha}).mu();
            return ConvexDomain::box({-r / alpha[0], -r / alpha[1]},
                                     {r / alpha[0], r / alpha[1]});
        }
        if (o.domain == "disc") {
            const double rho = parse_pi_expr(o.rho);
            mu_exact = ball_eigenpair(2, 1, rho).mu();
            return ConvexDomain::ball({0.0, 0.0}, rho);
        }
        throw CLI::ValidationError("unknown domain: " + o.domain);
    }();

    EigenConfig cfg;
    cfg.tau_factor = o.tau_factor;
    cfg.threads = o.common.threads;
    cfg.tolerance = o.tolerance;
    cfg.max_outer = o.max_outer;
    cfg.inner_sweep_cap = o.inner_cap;

    // the grid must stay alive as long as the returned eigenfield is used,
    // so the caller owns it and the stencil is scoped here
    const auto estimate_on = [&](const GridDomain& grid) {
        const WideStencil stencil(grid, DirectionSet::make(dim, o.order));
        return eigen_inverse_power(stencil, cfg);
    };

    Report rep;
    stamp_common(rep, "eigen-numeric", o.common);
    rep.put("domain", o.domain);
    if (o.domain == "disc")
        rep.put("rho", parse_pi_expr(o.rho));
    else
        rep.put("side", parse_pi_expr(o.side));
    if (o.domain == "rect") rep.put("alpha", parse_double_list(o.alpha_text));
    rep.put("direction_order", o.order);
    rep.put("tau_factor", o.tau_factor);
    rep.put("tolerance", o.tolerance);
    rep.put("max_outer", o.max_outer);
    if (mu_exact) rep.put("mu_exact", *mu_exact);

    if (o.refine) {
        const auto hs = parse_double_list(o.h_list);
        Table sweep;
        sweep.header = {"h", "mu_h"};
        if (mu_exact) sweep.header.push_back("abs_error");
        std::vector<double> mus;
        bool all_converged = true;
        for (double h : hs) {
            const GridDomain grid(domain, h);
            const auto est = estimate_on(grid);
            all_converged = all_converged && est.converged;
            mus.push_back(est.mu_h);
            std::vector<double> row = {h, est.mu_h};
            if (mu_exact) row.push_back(std::abs(est.mu_h - *mu_exact));
            sweep.rows.push_back(std::move(row));
        }
        rep.put("h_list", hs);
        rep.put("mu_h_list", mus);
        if (mu_exact) {
            bool monotone = true;
            for (std::size_t i = 0; i + 1 < mus.size(); ++i)
                monotone = monotone &&
                           std::abs(mus[i + 1] - *mu_exact) < std::abs(mus[i] - *mu_exact);
            rep.put("error_monotone", monotone);
        }
        rep.put("converged", all_converged);
        return emit(o.common, rep, &sweep, all_converged ? kExitPass : kExitNumeric);
    }

    const double h = parse_pi_expr(o.h);
    rep.put("h", h);
    const GridDomain grid(domain, h);
    const auto est = estimate_on(grid);
    rep.put("mu_h", est.mu_h);
    rep.put("iterations", est.iterations);
    rep.put("total_sweeps", est.total_sweeps);
    rep.put("converged", est.converged);
    rep.put("mu_history", est.residual_history);
    if (mu_exact) {
        rep.put("abs_error", std::abs(est.mu_h - *mu_exact));
        rep.put("rel_error", std::abs(est.mu_h - *mu_exact) / std::abs(*mu_exact));
    }
    if (!o.field_out.empty()) {
        std::ofstream f(o.field_out, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot open field output " << o.field_out << "\n";
            return kExitUsage;
        }
        io::write_field(f, est.eigenfield);
        rep.put("field_out", o.field_out);
    }

    Table history;
    history.header = {"iteration", "mu_delta"};
    for (std::size_t i = 0; i < est.residual_history.size(); ++i)
        history.rows.push_back({double(i + 1), est.residual_history[i]});

    // non-convergence is a numeric failure: report it, dump the history
    return emit(o.common, rep, &history, est.converged ? kExitPass : kExitNumeric);
}

// ---------------------------------------------------------------------------
// fk: box against the volume-matched cube.

struct FkOpts {
    CommonOpts common;
    std::string alpha_text = "1,1";
    std::string side = "pi";
};

int run_fk(const FkOpts& o) {
    using namespace trunclap;
    auto alpha = parse_double_list(o.alpha_text);
    // normalise to unit product so any positive list describes a shape
    double log_prod = 0.0;
    for (double a : alpha) {
        if (!(a > 0.0)) throw CLI::ValidationError("--alpha entries must be positive");
        log_prod += std::log(a);
    }
    const double scale = std::exp(-log_prod / double(alpha.size()));
    for (double& a : alpha) a *= scale;

    const auto fk = fk_check(alpha, parse_pi_expr(o.side) / 2.0);

    Report rep;
    stamp_common(rep, "fk", o.common);
    rep.put("dim", fk.dim);
    rep.put("alpha", fk.alpha);
    rep.put("side", parse_pi_expr(o.side));
    rep.put("mu_rect", fk.mu_rect);
    rep.put("mu_cube", fk.mu_cube);
    rep.put("harmonic_mean", fk.harmonic_mean);
    rep.put("geometric_mean", fk.geometric_mean);
    rep.put("is_equality", fk.is_equality);
    const bool ok = fk.mu_rect <= fk.mu_cube * (1.0 + 1e-12);
    rep.put("cube_maximal", ok);
    return emit(o.common, rep, nullptr, ok ? kExitPass : kExitAssertion);
}

// fk2: ball against the volume-matched cube.

struct Fk2Opts {
    CommonOpts common;
    int dim = 2;
    std::string side = "pi";
};

int run_fk2(const Fk2Opts& o) {
    using namespace trunclap;
    const auto fk2 = fk2_check(o.dim, parse_pi_expr(o.side) / 2.0);

    Report rep;
    stamp_common(rep, "fk2", o.common);
    rep.put("dim", fk2.dim);
    rep.put("side", parse_pi_expr(o.side));
    rep.put("radius", fk2.radius);
    rep.put("mu_ball", fk2.mu_ball);
    rep.put("mu_cube", fk2.mu_cube);
    rep.put("ratio", fk2.ratio);
    rep.put("ball_larger", fk2.ball_larger);
    return emit(o.common, rep, nullptr, fk2.ball_larger ? kExitPass : kExitAssertion);
}

// lieb: intersection of a box with its quarter-turn copy.

struct LiebOpts {
    CommonOpts common;
    std::string alpha_text = "1,2";
    std::string side = "pi";
};

int run_lieb(const LiebOpts& o) {
    using namespace trunclap;
    const auto alpha = parse_double_list(o.alpha_text);
    const double r = parse_pi_expr(o.side) / 2.0;
    const auto lieb = alpha.size() == 2 ? lieb_reversal_2d(alpha[0], alpha[1], r)
                                        : lieb_reversal_nd(alpha, r);

    Report rep;
    stamp_common(rep, "lieb", o.common);
    rep.put("dim", lieb.dim);
    rep.put("alpha", lieb.alpha);
    rep.put("side", parse_pi_expr(o.side));
    rep.put("mu_a", lieb.mu_a);
    rep.put("mu_b", lieb.mu_b);
    rep.put("mu_sum", lieb.mu_a + lieb.mu_b);
    rep.put("mu_intersection_inf", lieb.mu_intersection_inf);
    rep.put("reversed", lieb.reversed);
    return emit(o.common, rep, nullptr, lieb.reversed ? kExitPass : kExitAssertion);
}

// counterexample: the explicit frame certificate for intermediate orders.

struct CounterexampleOpts {
    CommonOpts common;
    int dim = 3, order = 2;
    std::string side = "pi";
    double a = 1.0, b = 2.0;
    int random_frames = 0;
};

int run_counterexample(const CounterexampleOpts& o) {
    using namespace trunclap;
    const auto cert =
        product_counterexample(o.dim, o.order, parse_pi_expr(o.side) / 2.0, o.a, o.b);

    Report rep;
    stamp_common(rep, "counterexample", o.common);
    rep.put("dim", cert.dim);
    rep.put("order", cert.order);
    rep.put("side", parse_pi_expr(o.side));
    rep.put("a", cert.a);
    rep.put("b", cert.b);
    rep.put("gamma_sq", cert.gamma_sq);
    rep.put("mu", cert.mu);
    rep.put("point", cert.point);
    rep.put("u_at_point", cert.u_at_point);
    rep.put("frame_lower_bound", cert.frame_lower_bound);
    rep.put("frame_residual", cert.frame_residual);
    rep.put("pk_residual", cert.pk_residual);
    rep.put("lower_bound_coefficient",
            cert.frame_lower_bound / cert.u_at_point);

    bool sandwich_ok = true;
    if (o.random_frames > 0) {
        // brute-force cross-check: no frame's trace sum may exceed the
        // spectral top-k sum
        std::mt19937_64 rng(o.common.seed);
        std::normal_distribution<double> gauss;
        const auto pair = product_candidate(o.dim, o.order, parse_pi_expr(o.side) / 2.0);
        const SymMatrix hess = pair.hessian(cert.point);
        const double top = pk_plus(hess, o.order);
        for (int trial = 0; trial < o.random_frames && sandwich_ok; ++trial) {
            // random orthonormal frame by Gram-Schmidt
            std::vector<std::vector<double>> vecs(
                std::size_t(o.order), std::vector<double>(std::size_t(o.dim)));
            for (auto& v : vecs)
                for (double& c : v) c = gauss(rng);
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t i = 0; i < vecs.size(); ++i) {
                    for (std::size_t j = 0; j < i; ++j) {
                        double dot = 0;
                        for (std::size_t c = 0; c < vecs[i].size(); ++c)
                            dot += vecs[i][c] * vecs[j][c];
                        for (std::size_t c = 0; c < vecs[i].size(); ++c)
                            vecs[i][c] -= dot * vecs[j][c];
                    }
                    double norm = 0;
                    for (double c : vecs[i]) norm += c * c;
                    norm = std::sqrt(norm);
                    for (double& c : vecs[i]) c /= norm;
                }
            double sum = 0.0;
            for (const auto& v : vecs) sum += hess.quad_form(v);
            sandwich_ok = sum <= top + 1e-9;
        }
        rep.put("random_frames", o.random_frames);
        rep.put("sandwich_holds", sandwich_ok);
    }

    const bool ok = cert.verified && cert.frame_lower_bound > 0.0 && sandwich_ok;
    rep.put("verified", ok);
    return emit(o.common, rep, nullptr, ok ? kExitPass : kExitAssertion);
}

// holder: cube cover, barrier supersolution, Hoelder quotient, exponent fit.

struct HolderOpts {
    CommonOpts common;
    std::string domain = "square";  // square | rect | hexagon
    std::string side = "pi", sides_text = "pi,pi/2";
    double hex_radius = 1.5;
    double alpha = 1.0, beta = 1.0;
    int samples = 1000, pairs = 2000;
};

int run_holder(const HolderOpts& o) {
    using namespace trunclap;
    ConvexDomain domain = [&]() -> ConvexDomain {
        if (o.domain == "square") {
            const double r = parse_pi_expr(o.side) / 2.0;
            return ConvexDomain::box({-r, -r}, {r, r});
        }
        if (o.domain == "rect") {
            const auto sides = parse_double_list(o.sides_text);
            if (sides.size() != 2) throw CLI::ValidationError("--sides needs two entries");
            return ConvexDomain::box({-sides[0] / 2.0, -sides[1] / 2.0},
                                     {sides[0] / 2.0, sides[1] / 2.0});
        }
        if (o.domain == "hexagon") return ConvexDomain::regular_polygon(6, o.hex_radius);
        throw CLI::ValidationError("unknown domain: " + o.domain);
    }();

    const auto cover = build_cube_cover(domain);
    const auto bar = barrier(cover, o.alpha, o.beta);
    const double super_max = barrier_supersolution_max(bar, std::size_t(o.samples));

    // sampled Hoelder quotient of the barrier
    auto xs = sample_interior(domain, std::size_t(o.pairs), o.common.seed);
    auto zs = sample_interior(domain, std::size_t(o.pairs), o.common.seed + 4999);
    double quotient_max = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dist2 = 0.0;
        for (std::size_t c = 0; c < xs[i].size(); ++c)
            dist2 += (
                xs[i][c] - zs[i][c]) * (xs[i][c] - zs[i][c]);
        if (dist2 == 0.0) continue;
        const double gap = std::abs(bar.value(xs[i]) - bar.value(zs[i]));
        quotient_max =
            std::max(quotient_max, gap / std::pow(std::sqrt(dist2), bar.holder_exponent()));
    }

    // boundary decay rate of the eigenfunction along the first face normal
    const auto probe = face_probe(domain, 0);
    const double slope = holder_exponent_fit(
        [&](std::span<const double> x) { return cover.inf_phi(x); }, probe, 0.005, 0.25);
    const double slope_target = 1.0 / double(cover.dim());

    Report rep;
    stamp_common(rep, "holder", o.common);
    rep.put("domain", o.domain);
    rep.put("cubes", std::int64_t(cover.cubes.size()));
    rep.put("alpha", o.alpha);
    rep.put("beta", o.beta);
    rep.put("samples", o.samples);
    rep.put("pairs", o.pairs);
    rep.put("prefactor", bar.prefactor());
    rep.put("holder_exponent", bar.holder_exponent());
    rep.put("holder_bound", bar.holder_bound());
    rep.put("supersolution_max", super_max);
    rep.put("quotient_max", quotient_max);
    rep.put("exponent_fit", slope);
    rep.put("exponent_target", slope_target);

    const bool super_ok = super_max <= 1e-8 * std::max(1.0, o.alpha);
    const bool quotient_ok = quotient_max <= bar.holder_bound() * (1.0 + 1e-12);
    const bool fit_ok = std::abs(slope - slope_target) <= 0.05 * slope_target;
    rep.put("supersolution_holds", super_ok);
    rep.put("quotient_bounded", quotient_ok);
    rep.put("exponent_matches", fit_ok);
    const bool ok = super_ok && quotient_ok && fit_ok;
    return emit(o.common, rep, nullptr, ok ? kExitPass : kExitAssertion);
}

// remark: the logarithmic profile with no Hoelder modulus.

struct RemarkOpts {
    CommonOpts common;
    int dim = 2;
    std::string sigma;  // empty: 2n
};

int run_remark(const RemarkOpts& o) {
    using namespace trunclap;
    const double sigma = o.sigma.empty() ? 2.0 * o.dim : parse_pi_expr(o.sigma);
    const auto rem = remark_counterexample(o.dim, sigma);

    Report rep;
    stamp_common(rep, "remark", o.common);
    rep.put("dim", rem.dim);
    rep.put("sigma", rem.sigma);
    rep.put("u_at_zero", rem.u_at_zero);
    rep.put("max_form", rem.max_form);
    rep.put("concave", rem.concave);
    rep.put("gammas", rem.gammas);
    rep.put("distances", rem.distances);
    for (std::size_t g = 0; g < rem.gammas.size(); ++g) {
        char key[64];
        std::snprintf(key, sizeof(key), "quotients_gamma_%g", rem.gammas[g]);
        rep.put(key, rem.quotients[g]);
    }
    rep.put("quotients_grow", rem.quotients_grow);

    Table ladder;
    ladder.header = {"gamma", "distance", "quotient"};
    for (std::size_t g = 0; g < rem.gammas.size(); ++g)
        for (std::size_t k = 0; k < rem.distances.size(); ++k)
            ladder.rows.push_back({rem.gammas[g], rem.distances[k], rem.quotients[g][k]});

    const bool ok = rem.concave && rem.quotients_grow;
    return emit(o.common, rep, &ladder, ok ? kExitPass : kExitAssertion);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"truncated-Laplacian toolkit: exact eigenpairs, shape comparisons, "
                 "wide-stencil eigenvalue estimates, boundary regularity checks"};
    app.require_subcommand(1);

    EigenClosedOpts ec;
    auto* cmd_ec = app.add_subcommand("eigen-closed", "closed-form eigenpairs + residual audit");
    cmd_ec->add_flag("--cube", ec.cube, "cube domain");
    cmd_ec->add_flag("--ball", ec.ball, "ball domain");
    cmd_ec->add_option("--rect", ec.alpha_text, "box stretch factors a1,a2,...")
        ->expected(1);
    cmd_ec->add_option("-n,--dim", ec.dim, "dimension")->capture_default_str();
    cmd_ec->add_option("-k,--order", ec.order, "operator order (ball only)")
        ->capture_default_str();
    cmd_ec->add_option("--side", ec.side, "box side length (pi expressions ok)")
        ->capture_default_str();
    cmd_ec->add_option("--rho", ec.rho, "ball radius")->capture_default_str();
    cmd_ec->add_option("--samples", ec.samples, "audit sample count")->capture_default_str();
    add_common(cmd_ec, ec.common);

    EigenNumericOpts en;
    auto* cmd_en = app.add_subcommand("eigen-numeric", "wide-stencil eigenvalue estimate");
    cmd_en->add_option("--domain", en.domain, "square | rect | disc | cube3")
        ->check(CLI::IsMember({"square", "rect", "disc", "cube3"}))
        ->capture_default_str();
    cmd_en->add_option("--side", en.side, "box side length")->capture_default_str();
    cmd_en->add_option("--rho", en.rho, "disc radius")->capture_default_str();
    cmd_en->add_option("--alpha", en.alpha_text, "rect stretch factors")->capture_default_str();
    cmd_en->add_option("--spacing", en.h, "grid spacing h")->capture_default_str();
    cmd_en->add_flag("--refine", en.refine, "sweep the refinement ladder instead");
    cmd_en->add_option("--spacing-list", en.h_list, "ladder spacings for --refine")
        ->capture_default_str();
    cmd_en->add_option("-r,--order", en.order, "direction order")->capture_default_str();
    cmd_en->add_option("--tau-factor", en.tau_factor, "damping factor in (0, 0.5]")
        ->capture_default_str();
    cmd_en->add_option("--tolerance", en.tolerance, "relative mu stopping tolerance")
        ->capture_default_str();
    cmd_en->add_option("--max-outer", en.max_outer, "outer iteration cap")
        ->capture_default_str();
    cmd_en->add_option("--inner-cap", en.inner_cap, "inner sweep cap")->capture_default_str();
    cmd_en->add_option("--field-out", en.field_out, "write the eigenfield snapshot here");
    add_common(cmd_en, en.common);

    FkOpts fk;
    auto* cmd_fk = app.add_subcommand("fk", "box vs volume-matched cube");
    cmd_fk->add_option("--alpha", fk.alpha_text, "box stretch factors")->capture_default_str();
    cmd_fk->add_option("--side", fk.side, "cube side length")->capture_default_str();
    add_common(cmd_fk, fk.common);

    Fk2Opts fk2;
    auto* cmd_fk2 = app.add_subcommand("fk2", "ball vs volume-matched cube");
    cmd_fk2->add_option("-n,--dim", fk2.dim, "dimension")->capture_default_str();
    cmd_fk2->add_option("--side", fk2.side, "cube side length")->capture_default_str();
    add_common(cmd_fk2, fk2.common);

    LiebOpts lieb;
    auto* cmd_lieb = app.add_subcommand("lieb", "box against its quarter-turn copy");
    cmd_lieb->add_option("--alpha", lieb.alpha_text, "stretch factors, ascending")
        ->capture_default_str();
    cmd_lieb->add_option("--side", lieb.side, "box side length")->capture_default_str();
    add_common(cmd_lieb, lieb.common);

    CounterexampleOpts ce;
    auto* cmd_ce = app.add_subcommand("counterexample",
                                      "frame certificate against intermediate-order eigenpairs");
    cmd_ce->add_option("-n,--dim", ce.dim, "dimension")->capture_default_str();
    cmd_ce->add_option("-k,--order", ce.order, "operator order")->capture_default_str();
    cmd_ce->add_option("--side", ce.side, "box side length")->capture_default_str();
    cmd_ce->add_option("--a", ce.a, "smaller slope")->capture_default_str();
    cmd_ce->add_option("--b", ce.b, "larger slope")->capture_default_str();
    cmd_ce->add_option("--random-frames", ce.random_frames,
                       "also brute-force this many random frames")
        ->capture_default_str();
    add_common(cmd_ce, ce.common);

    HolderOpts holder;
    auto* cmd_holder = app.add_subcommand("holder", "cube cover, barrier, exponent fit");
    cmd_holder->add_option("--domain", holder.domain, "square | rect | hexagon")
        ->check(CLI::IsMember({"square", "rect", "hexagon"}))
        ->capture_default_str();
    cmd_holder->add_option("--side", holder.side, "square side length")->capture_default_str();
    cmd_holder->add_option("--sides", holder.sides_text, "rect side lengths")
        ->capture_default_str();
    cmd_holder->add_option("--hex-radius", holder.hex_radius, "hexagon circumradius")
        ->capture_default_str();
    cmd_holder->add_option("--alpha", holder.alpha, "barrier strength")->capture_default_str();
    cmd_holder->add_option("--beta", holder.beta, "barrier exponent in (0,1]")
        ->capture_default_str();
    cmd_holder->add_option("--samples", holder.samples, "supersolution samples")
        ->capture_default_str();
    cmd_holder->add_option("--pairs", holder.pairs, "Hoelder quotient pairs")
        ->capture_default_str();
    add_common(cmd_holder, holder.common);

    RemarkOpts remark;
    auto* cmd_remark = app.add_subcommand("remark", "logarithmic profile without a modulus");
    cmd_remark->add_option("-n,--dim", remark.dim, "dimension")->capture_default_str();
    cmd_remark->add_option("--sigma", remark.sigma, "shift (default 2n)");
    add_common(cmd_remark, remark.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    ec.rect = cmd_ec->count("--rect") > 0;

    try {
        if (cmd_ec->parsed()) return run_eigen_closed(ec);
        if (cmd_en->parsed()) return run_eigen_numeric(en);
        if (cmd_fk->parsed()) return run_fk(fk);
        if (cmd_fk2->parsed()) return run_fk2(fk2);
        if (cmd_lieb->parsed()) return run_lieb(lieb);
        if (cmd_ce->parsed()) return run_counterexample(ce);
        if (cmd_holder->parsed()) return run_holder(holder);
        if (cmd_remark->parsed()) return run_remark(remark);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const trunclap::iteration_limit_error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        for (double v : e.residual_history()) std::cerr << format_double(v) << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
