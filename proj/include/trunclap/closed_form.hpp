#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "trunclap/matrix_core.hpp"

// Closed-form principal eigenpairs for the truncated Laplacians.  Two
// families are covered:
//
//   * product pairs on boxes:  u(x) = prod_i cos(c alpha_i x_i)^{q_i},
//     which solve P^+_1(D^2 u) = -mu u on the box {|x_i| < R/alpha_i}
//     when the exponents are tuned to the side ratios;
//
//   * radial pairs on balls:  u(x) = v(|x|), where v solves the
//     k-dimensional radial Laplacian eigenvalue problem
//     v'' + ((k-1)/s) v' + mu v = 0, v'(0) = 0, v(rho) = 0, and the
//     ordering v'' >= v'/s makes u principal for P^+_k on the N-ball.
//
// The same product machinery with exponent k/N produces the natural (and
// wrong) candidate for P^+_k on the cube; product_counterexample builds the
// explicit frame certificate showing its residual is strictly positive.

namespace trunclap {

struct BoxSpec {
    int dim = 0;
    double half_width = 0.0;            // R
    std::vector<double> alpha;          // box = prod_i (-R/alpha_i, R/alpha_i)
};

struct BallSpec {
    int dim = 0;
    double radius = 0.0;
};

// ---------------------------------------------------------------------------
// Radial profile v(s) on [0, rho]: either the analytic cosine (order 1) or a
// dense table produced by the shooting solver, interpolated with Hermite
// cubics so that derivative values stay consistent with the stored slopes.

class RadialProfile {
  public:
    static RadialProfile cosine(double rho) {
        RadialProfile p;
        p.rho_ = rho;
        p.order_ = 1;
        p.mu_ = square(std::numbers::pi / (2.0 * rho));
        return p;
    }

    static RadialProfile table(double rho, int order, double mu, std::vector<double> v,
                               std::vector<double> dv) {
        RadialProfile p;
        p.rho_ = rho;
        p.order_ = order;
        p.mu_ = mu;
        p.v_ = std::move(v);
        p.dv_ = std::move(dv);
        p.step_ = rho / double(p.v_.size() - 1);
        return p;
    }

    double rho() const { return rho_; }
    int order() const { return order_; }
    double mu() const { return mu_; }

    double value(double s) const {
        if (analytic()) return std::cos(wavenumber() * s);
        return hermite(s, false);
    }

    double deriv(double s) const {
        if (analytic()) return -wavenumber() * std::sin(wavenumber() * s);
        return hermite(s, true);
    }

    // Second derivative recovered from the ODE itself rather than by
    // differentiating the interpolant twice.
    double second_deriv(double s) const {
        if (analytic()) return -mu_ * std::cos(wavenumber() * s);
        if (s < 1e-8 * rho_) return -mu_ * value(s) / order_;
        return -(order_ - 1) / s * deriv(s) - mu_ * value(s);
    }

  private:
    static double square(double x) { return x * x; }
    bool analytic() const { return v_.empty(); }
    double wavenumber() const { return std::numbers::pi / (2.0 * rho_); }

    double hermite(double s, bool want_deriv) const {
        s = std::clamp(s, 0.0, rho_);
        std::size_t j = std::min(std::size_t(s / step_), v_.size() - 2);
        const double t = (s - double(j) * step_) / step_;
        const double v0 = v_[j], v1 = v_[j + 1];
        const double m0 = dv_[j] * step_, m1 = dv_[j + 1] * step_;
        if (!want_deriv) {
            const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
            const double h10 = t * (1 - t) * (1 - t);
            const double h01 = t * t * (3 - 2 * t);
            const double h11 = t * t * (t - 1);
            return h00 * v0 + h10 * m0 + h01 * v1 + h11 * m1;
        }
        const double g00 = 6 * t * (t - 1);
        const double g10 = (1 - t) * (1 - 3 * t);
        const double g01 = 6 * t * (1 - t);
        const double g11 = t * (3 * t - 2);
        return (g00 * v0 + g10 * m0 + g01 * v1 + g11 * m1) / step_;
    }

    double rho_ = 0.0;
    int order_ = 1;
    double mu_ = 0.0;
    double step_ = 0.0;
    std::vector<double> v_, dv_;
};

namespace detail {

// One RK4 pass of v'' + ((k-1)/s) v' + mu v = 0 from the series start at
// s = step out to s = rho.  Optionally records the profile.  Returns v(rho).
inline double radial_shoot(int k, double rho, double mu, int samples, std::vector<double>* v_out,
                           std::vector<double>* dv_out) {
    const double step = rho / double(samples);

    // Power series v = sum a_m s^{2m} with a_0 = 1 and
    // a_m = -mu a_{m-1} / (2m (2m + k - 2)) seeds the first node; the ODE's
    // coefficient is singular at s = 0 but the solution is analytic.
    auto series = [&](double s, double& v, double& dv) {
        v = 1.0;
        dv = 0.0;
        double a = 1.0;
        double spow = 1.0;
        for (int m = 1; m <= 24; ++m) {
            a *= -mu / double(2 * m * (2 * m + k - 2));
            spow *= s * s;
            v += a * spow;
            dv += a * double(2 * m) * spow / s;
            if (std::abs(a * spow) < 1e-22) break;
        }
    };

    double s = step;
    double v, w;
    series(s, v, w);
    if (v_out) {
        v_out->assign(std::size_t(samples) + 1, 0.0);
        dv_out->assign(std::size_t(samples) + 1, 0.0);
        (*v_out)[0] = 1.0;
        (*dv_out)[0] = 0.0;
        (*v_out)[1] = v;
        (*dv_out)[1] = w;
    }

    auto acc = [&](double si, double vi, double wi) { return -(k - 1) / si * wi - mu * vi; };

    for (int i = 1; i < samples; ++i) {
        const double h = step;
        const double k1v = w, k1w = acc(s, v, w);
        const double k2v = w + 0.5 * h * k1w, k2w = acc(s + 0.5 * h, v + 0.5 * h * k1v, w + 0.5 * h * k1w);
        const double k3v = w + 0.5 * h * k2w, k3w = acc(s + 0.5 * h, v + 0.5 * h * k2v, w + 0.5 * h * k2w);
        const double k4v = w + h * k3w, k4w = acc(s + h, v + h * k3v, w + h * k3w);
        v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        w += h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
        s += h;
        if (v_out) {
            (*v_out)[std::size_t(i) + 1] = v;
            (*dv_out)[std::size_t(i) + 1] = w;
        }
    }
    return v;
}

}  // namespace detail

struct RadialSolution {
    double mu = 0.0;
    RadialProfile profile;
};

// Shooting solve for the principal radial eigenvalue of order k on [0, rho]:
// scan mu upward until v(rho) changes sign, then bisect the first zero.
inline RadialSolution solve_radial_dirichlet(int k, double rho, int samples = 10000) {
    if (k < 1) throw std::invalid_argument("solve_radial_dirichlet: order must be >= 1");
    if (!(rho > 0.0)) throw std::invalid_argument("solve_radial_dirichlet: radius must be positive");
    if (samples < 100) throw std::invalid_argument("solve_radial_dirichlet: too few samples");

    if (k == 1) {
        RadialProfile p = RadialProfile::cosine(rho);
        return {p.mu(), p};
    }

    // v(rho; mu) > 0 for small mu; the principal eigenvalue is the first
    // sign change.  The cosine value is always a lower bound.
    double lo = std::pow(std::numbers::pi / (2.0 * rho), 2);
    double hi = lo;
    double f_hi = detail::radial_shoot(k, rho, hi, samples, nullptr, nullptr);
    int guard = 0;
    while (f_hi > 0.0) {
        lo = hi;
        hi *= 1.25;
        f_hi = detail::radial_shoot(k, rho, hi, samples, nullptr, nullptr);
        if (++guard > 200)
            throw std::runtime_error("solve_radial_dirichlet: failed to bracket the eigenvalue");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f = detail::radial_shoot(k, rho, mid, samples, nullptr, nullptr);
        (f > 0.0 ? lo : hi) = mid;
    }

    const double mu = 0.5 * (lo + hi);
    std::vector<double> v, dv;
    detail::radial_shoot(k, rho, mu, samples, &v, &dv);
    return {mu, RadialProfile::table(rho, k, mu, std::move(v), std::move(dv))};
}

// ---------------------------------------------------------------------------
// EigenPair: a candidate or exact principal pair (u, mu), with evaluators for
// u, its gradient and Hessian.  value() extends continuously to the closure
// (u = 0 on the boundary); gradient/Hessian/residual require strict
// interiority.

struct ProductForm {
    double c = 0.0;                  // pi / (2R)
    std::vector<double> alpha;
    std::vector<double> q;           // per-factor exponents, in (0, 1]
};

struct RadialForm {
    double rho = 0.0;
    RadialProfile profile;
};

class EigenPair {
  public:
    enum class Shape { product, radial };

    static EigenPair product(ProductForm form, double mu, int order) {
        EigenPair p;
        p.dim_ = int(form.alpha.size());
        p.mu_ = mu;
        p.order_ = order;
        p.exponents_.resize(form.q.size());
        for (std::size_t i = 0; i < form.q.size(); ++i) p.exponents_[i] = 1.0 / form.q[i] - 1.0;
        p.payload_ = std::move(form);
        return p;
    }

    static EigenPair radial(int dim, RadialForm form, int order) {
        EigenPair p;
        p.dim_ = dim;
        p.mu_ = form.profile.mu();
        p.order_ = order;
        p.payload_ = std::move(form);
        return p;
    }

    Shape shape() const {
        return std::holds_alternative<ProductForm>(payload_) ? Shape::product : Shape::radial;
    }
    int dim() const { return dim_; }
    int order() const { return order_; }
    double mu() const { return mu_; }

    // p_i with u = prod g_i^{1/(p_i+1)}; empty for radial pairs.
    const std::vector<double>& exponents() const { return exponents_; }

    const RadialProfile& profile() const {
        const auto* r = std::get_if<RadialForm>(&payload_);
        if (!r) throw std::invalid_argument("EigenPair: no radial profile on a product pair");
        return r->profile;
    }

    bool interior(std::span<const double> x) const {
        check_point(x);
        if (const auto* f = std::get_if<ProductForm>(&payload_)) {
            for (int i = 0; i < dim_; ++i)
                if (std::abs(f->c * f->alpha[std::size_t(i)] * x[std::size_t(i)]) >=
                    std::numbers::pi / 2.0)
                    return false;
            return true;
        }
        const auto& r = std::get<RadialForm>(payload_);
        return norm(x) < r.rho;
    }

    double value(std::span<const double> x) const { return double(value_impl<double>(x)); }

    long double value_ext(std::span<const double> x) const { return value_impl<long double>(x); }

    std::vector<double> gradient(std::span<const double> x) const {
        require_interior(x, "gradient");
        if (const auto* f = std::get_if<ProductForm>(&payload_)) {
            const double u = value(x);
            std::vector<double> g(static_cast<std::size_t>(dim_));
            for (int i = 0; i < dim_; ++i) g[std::size_t(i)] = u * log_slope(*f, x, i);
            return g;
        }
        const auto& rf = std::get<RadialForm>(payload_);
        const double r = norm(x);
        std::vector<double> g(std::size_t(dim_), 0.0);
        if (r < 1e-14 * rf.rho) return g;  // gradient vanishes at the centre
        const double dv = rf.profile.deriv(r);
        for (int i = 0; i < dim_; ++i) g[std::size_t(i)] = dv * x[std::size_t(i)] / r;
        return g;
    }

    SymMatrix hessian(std::span<const double> x) const { return hessian_impl<double>(x); }

    SymMatrixT<long double> hessian_ext(std::span<const double> x) const {
        return hessian_impl<long double>(x);
    }

  private:
    template <typename Real>
    Real value_impl(std::span<const double> x) const {
        check_point(x);
        if (const auto* f = std::get_if<ProductForm>(&payload_)) {
            Real u = 1;
            for (int i = 0; i < dim_; ++i) {
                const Real t = Real(f->c) * Real(f->alpha[std::size_t(i)]) * Real(x[std::size_t(i)]);
                Real cosv = std::cos(t);
                if (cosv < 0) {
                    if (double(cosv) < -1e-12)
                        throw std::domain_error("EigenPair: point outside the closed box");
                    cosv = 0;  // boundary up to rounding
                }
                u *= std::pow(cosv, Real(f->q[std::size_t(i)]));
            }
            return u;
        }
        const auto& r = std::get<RadialForm>(payload_);
        const double s = norm(x);
        if (s > r.rho * (1.0 + 1e-12))
            throw std::domain_error("EigenPair: point outside the closed ball");
        return Real(r.profile.value(std::min(s, r.rho)));
    }

    template <typename Real>
    SymMatrixT<Real> hessian_impl(std::span<const double> x) const {
        require_interior(x, "hessian");
        if (const auto* f = std::get_if<ProductForm>(&payload_)) {
            // u = prod g_i(x_i):  H_ij = u r_i r_j (i != j),  H_ii = u g_i''/g_i,
            // with r_i = g_i'/g_i.
            const Real u = value_impl<Real>(x);
            std::vector<Real> slope(static_cast<std::size_t>(dim_));
            std::vector<Real> curv(static_cast<std::size_t>(dim_));
            for (int i = 0; i < dim_; ++i) {
                const Real ca = Real(f->c) * Real(f->alpha[std::size_t(i)]);
                const Real q = Real(f->q[std::size_t(i)]);
                const Real tanv = std::tan(ca * Real(x[std::size_t(i)]));
                slope[std::size_t(i)] = -q * ca * tanv;
                curv[std::size_t(i)] = q * ca * ca * ((q - 1) * tanv * tanv - 1);
            }
            SymMatrixT<Real> h(dim_);
            for (int i = 0; i < dim_; ++i) {
                h.at(i, i) = u * curv[std::size_t(i)];
                for (int j = 0; j < i; ++j)
                    h.at(i, j) = u * slope[std::size_t(i)] * slope[std::size_t(j)];
            }
            return h;
        }
        const auto& rf = std::get<RadialForm>(payload_);
        const double r = norm(x);
        SymMatrixT<Real> h(dim_);
        if (r < 1e-14 * rf.rho) {
            // limit D^2 u(0) = v''(0) I = -(mu/k) I
            const Real c = Real(-mu_ / rf.profile.order());
            for (int i = 0; i < dim_; ++i) h.at(i, i) = c;
            return h;
        }
        const Real vpp = Real(rf.profile.second_deriv(r));
        const Real vp_over_r = Real(rf.profile.deriv(r) / r);
        for (int i = 0; i < dim_; ++i) {
            const Real xi = Real(x[std::size_t(i)] / r);
            for (int j = 0; j <= i; ++j) {
                const Real xj = Real(x[std::size_t(j)] / r);
                h.at(i, j) = (vpp - vp_over_r) * xi * xj + (i == j ? vp_over_r : Real(0));
            }
        }
        return h;
    }

    static double log_slope(const ProductForm& f, std::span<const double> x, int i) {
        const double ca = f.c * f.alpha[std::size_t(i)];
        return -f.q[std::size_t(i)] * ca * std::tan(ca * x[std::size_t(i)]);
    }

    static double norm(std::span<const double> x) {
        double s = 0;
        for (double c : x) s += c * c;
        return std::sqrt(s);
    }

    void check_point(std::span<const double> x) const {
        if (int(x.size()) != dim_) throw std::invalid_argument("EigenPair: point dimension mismatch");
    }

    void require_interior(std::span<const double> x, const char* what) const {
        if (!interior(x))
            throw std::domain_error(std::string("EigenPair: ") + what +
                                    " requires a strictly interior point");
    }

    int dim_ = 0;
    int order_ = 1;
    double mu_ = 0.0;
    std::vector<double> exponents_;
    std::variant<ProductForm, RadialForm> payload_;
};

// ---------------------------------------------------------------------------
// Factories.

// Principal pair for P^+_1 on the box prod (-R/alpha_i, R/alpha_i):
// kappa = sum alpha_i^{-2}, mu = (pi/(2R))^2 / kappa, exponents
// q_i = 1 / (kappa alpha_i^2).
inline EigenPair rect_eigenpair(const BoxSpec& spec) {
    if (spec.dim < 1) throw std::invalid_argument("rect_eigenpair: dimension must be >= 1");
    if (!(spec.half_width > 0.0))
        throw std::invalid_argument("rect_eigenpair: half width must be positive");
    if (int(spec.alpha.size()) != spec.dim)
        throw std::invalid_argument("rect_eigenpair: alpha size must match dimension");
    for (double a : spec.alpha)
        if (!(a > 0.0)) throw std::invalid_argument("rect_eigenpair: alpha entries must be positive");

    double kappa = 0.0;
    for (double a : spec.alpha) kappa += 1.0 / (a * a);

    ProductForm form;
    form.c = std::numbers::pi / (2.0 * spec.half_width);
    form.alpha = spec.alpha;
    form.q.resize(std::size_t(spec.dim));
    for (int i = 0; i < spec.dim; ++i)
        form.q[std::size_t(i)] = 1.0 / (kappa * spec.alpha[std::size_t(i)] * spec.alpha[std::size_t(i)]);
    const double mu = form.c * form.c / kappa;
    return EigenPair::product(std::move(form), mu, 1);
}

// Cube of side 2r: the rectangle with all stretch factors equal to one.
inline EigenPair cube_eigenpair(int n, double r) {
    return rect_eigenpair(BoxSpec{n, r, std::vector<double>(std::size_t(n), 1.0)});
}

// The product-form candidate for order k on the cube of side 2r:
// u = prod cos(c x_i)^{k/n}, mu = (1/n)(k pi/(2r))^2.  Exact for k = 1; for
// 2 <= k <= n-1 it is *not* a solution (see product_counterexample).
inline EigenPair product_candidate(int n, int k, double r) {
    if (n < 1) throw std::invalid_argument("product_candidate: dimension must be >= 1");
    if (k < 1 || k > n) throw std::invalid_argument("product_candidate: order must satisfy 1 <= k <= n");
    if (!(r > 0.0)) throw std::invalid_argument("product_candidate: half width must be positive");
    ProductForm form;
    form.c = std::numbers::pi / (2.0 * r);
    form.alpha.assign(std::size_t(n), 1.0);
    form.q.assign(std::size_t(n), double(k) / double(n));
    const double mu = double(k) * double(k) * form.c * form.c / double(n);
    return EigenPair::product(std::move(form), mu, k);
}

// Principal pair for P^+_k on the N-ball of radius rho: u(x) = v(|x|) with v
// the order-k radial profile.  mu does not depend on N, only on k and rho.
inline EigenPair ball_eigenpair(int n, int k, double rho) {
    if (n < 1) throw std::invalid_argument("ball_eigenpair: dimension must be >= 1");
    if (k < 1 || k > n) throw std::invalid_argument("ball_eigenpair: order must satisfy 1 <= k <= n");
    RadialSolution sol = solve_radial_dirichlet(k, rho);
    return EigenPair::radial(n, RadialForm{rho, sol.profile}, k);
}

// P^+_k(D^2 u)(x) + mu u(x).  Zero (to rounding) for exact pairs, strictly
// positive for the product candidates with 2 <= k <= n-1.  The Hessian and
// eigenvalue sum are evaluated in extended precision: near the boundary the
// Hessian entries blow up like the inverse square of the distance, and the
// O(eps ||H||) eigensolver error in plain double would swamp a 1e-10
// residual tolerance.
inline double residual(const EigenPair& pair, std::span<const double> x, int k) {
    if (k < 1 || k > pair.dim())
        throw std::invalid_argument("residual: order must satisfy 1 <= k <= dim");
    if (!pair.interior(x))
        throw std::domain_error("residual: point must be strictly interior");
    const SymMatrixT<long double> h = pair.hessian_ext(x);
    const long double r = pk_plus(h, k) + static_cast<long double>(pair.mu()) * pair.value_ext(x);
    return double(r);
}

struct RadialConvexityReport {
    double min_gap = 0.0;        // min over samples of v''(s) - v'(s)/s
    double argmin_radius = 0.0;
    bool satisfied = false;      // min_gap >= -1e-8
};

// The ball pair is principal for P^+_k exactly because the radial Hessian
// eigenvalue v'' dominates the tangential one v'/s; this samples that gap.
inline RadialConvexityReport radial_convexity_check(const EigenPair& pair, int n_samples = 1000) {
    if (pair.shape() != EigenPair::Shape::radial)
        throw std::invalid_argument("radial_convexity_check: pair is not radial");
    if (n_samples < 2) throw std::invalid_argument("radial_convexity_check: need at least 2 samples");
    const RadialProfile& prof = pair.profile();
    const double rho = prof.rho();
    RadialConvexityReport report;
    report.min_gap = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= n_samples; ++i) {
        // avoid s = 0 (gap -> 0 trivially) and s = rho (v' finite, fine)
        const double s = rho * double(i) / double(n_samples + 1);
        const double gap = prof.second_deriv(s) - prof.deriv(s) / s;
        if (gap < report.min_gap) {
            report.min_gap = gap;
            report.argmin_radius = s;
        }
    }
    report.satisfied = report.min_gap >= -1e-8;
    return report;
}

// ---------------------------------------------------------------------------
// Constructive counterexample: for 2 <= k <= n-1 the product candidate fails
// to solve P^+_k(D^2 u) = -mu u.  At the point where the per-factor slopes
// are (a,...,a,b) with b > a the explicit frame below certifies
//
//   P^+_k(D^2 u)(x) + mu u(x) >= (n(k-1)/k)(n gamma^2 - a^2) u(x) > 0,
//
// with gamma^2 = (ab)^2 / ((n-1)b^2 + a^2).

struct CounterexampleCertificate {
    int dim = 0;
    int order = 0;
    double half_width = 0.0;
    double a = 0.0, b = 0.0;
    double gamma_sq = 0.0;
    double mu = 0.0;
    std::vector<double> point;
    Frame frame;
    double u_at_point = 0.0;
    double frame_lower_bound = 0.0;  // (n(k-1)/k)(n gamma^2 - a^2) u
    double frame_residual = 0.0;     // sum_i <D^2u v_i, v_i> + mu u ; equals the bound analytically
    double pk_residual = 0.0;        // P^+_k(D^2 u) + mu u  >= frame_residual
    bool verified = false;
};

inline CounterexampleCertificate product_counterexample(int n, int k, double r, double a, double b) {
    if (n < 3) throw std::invalid_argument("product_counterexample: dimension must be >= 3");
    if (k < 2 || k > n - 1)
        throw std::invalid_argument("product_counterexample: order must satisfy 2 <= k <= n-1");
    if (!(r > 0.0)) throw std::invalid_argument("product_counterexample: half width must be positive");
    if (!(0.0 < a && a < b))
        throw std::invalid_argument("product_counterexample: slopes must satisfy 0 < a < b");

    const EigenPair pair = product_candidate(n, k, r);
    const double c = std::numbers::pi / (2.0 * r);

    // Invert the per-factor log-slope -(kc/n) tan(c t) = s at s = a and s = b.
    auto slope_point = [&](double s) { return -std::atan(double(n) * s / (double(k) * c)) / c; };

    CounterexampleCertificate cert;
    cert.dim = n;
    cert.order = k;
    cert.half_width = r;
    cert.a = a;
    cert.b = b;
    cert.mu = pair.mu();
    cert.gamma_sq = (a * b) * (a * b) / (double(n - 1) * b * b + a * a);
    cert.point.assign(std::size_t(n), slope_point(a));
    cert.point.back() = slope_point(b);

    // Frame: v_1 = gamma (1/a, ..., 1/a, 1/b); v_2..v_k are an orthonormal
    // basis of successive coordinate differences among the first n-1 slots
    // (zero-sum there, last coordinate zero), hence orthogonal to v_1.
    const double gamma = std::sqrt(cert.gamma_sq);
    cert.frame.dim = n;
    std::vector<double> v1(std::size_t(n), gamma / a);
    v1.back() = gamma / b;
    cert.frame.vectors.push_back(std::move(v1));
    for (int j = 0; j < k - 1; ++j) {
        std::vector<double> d(std::size_t(n), 0.0);
        d[std::size_t(j)] = 1.0;
        d[std::size_t(j) + 1] = -1.0;
        // Gram-Schmidt against the previously accepted difference vectors.
        for (int prev = 1; prev <= j; ++prev) {
            const auto& w = cert.frame.vectors[std::size_t(prev)];
            double dot = 0.0;
            for (int t = 0; t < n; ++t) dot += d[std::size_t(t)] * w[std::size_t(t)];
            for (int t = 0; t < n; ++t) d[std::size_t(t)] -= dot * w[std::size_t(t)];
        }
        double norm = 0.0;
        for (double t : d) norm += t * t;
        norm = std::sqrt(norm);
        for (double& t : d) t /= norm;
        cert.frame.vectors.push_back(std::move(d));
    }

    cert.u_at_point = pair.value(cert.point);
    cert.frame_lower_bound =
        double(n) * double(k - 1) / double(k) * (double(n) * cert.gamma_sq - a * a) * cert.u_at_point;

    // Evaluate both residuals in extended precision and compare against the
    // analytic bound; `verified` records that the certificate is coherent.
    const SymMatrixT<long double> h = pair.hessian_ext(cert.point);
    FrameT<long double> frame_ext;
    frame_ext.dim = n;
    for (const auto& v : cert.frame.vectors)
        frame_ext.vectors.emplace_back(v.begin(), v.end());
    const long double mu_u = static_cast<long double>(cert.mu) * pair.value_ext(cert.point);
    cert.frame_residual = double(frame_sum(h, frame_ext) + mu_u);
    cert.pk_residual = double(pk_plus(h, k) + mu_u);

    const double scale = std::max(1.0, std::abs(cert.frame_lower_bound));
    cert.verified = cert.frame_lower_bound > 0.0 &&
                    std::abs(cert.frame_residual - cert.frame_lower_bound) <= 1e-10 * scale &&
                    cert.pk_residual >= cert.frame_residual - 1e-10 * scale;
    return cert;
}

}  // namespace trunclap
