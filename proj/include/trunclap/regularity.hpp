#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "trunclap/closed_form.hpp"
#include "trunclap/convex_domain.hpp"
#include "trunclap/grid.hpp"
#include "trunclap/matrix_core.hpp"
#include "trunclap/sampling.hpp"

// Boundary-regularity machinery for P+_1: covering a convex polytope by
// rotated side-pi cubes, the associated Hoelder barrier (a power of the
// infimum of the cubes' principal eigenfunctions), exponent measurement along
// face normals, and the logarithmic profile showing that without a sign
// condition on f no Hoelder exponent survives.

namespace trunclap {

// One rotated cube of side pi: center + orthonormal axes; its principal
// eigenfunction is prod_i cos(z_i)^{1/N} in local coordinates z.
struct CoverCube {
    std::vector<double> center;
    std::vector<std::vector<double>> axes;  // axes[i] = world direction of local axis i

    std::vector<double> local(std::span<const double> x) const {
        const std::size_t n = center.size();
        std::vector<double> z(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                z[i] += axes[i][j] * (x[j] - center[j]);
        return z;
    }

    bool contains(std::span<const double> x, double tol = 1e-9) const {
        for (double zi : local(x))
            if (std::abs(zi) > std::numbers::pi / 2.0 + tol) return false;
        return true;
    }

    // principal eigenfunction of the cube, extended by zero outside; the
    // cosine is evaluated as the sine of the gap to the wall so that points
    // constructed exactly on a face come out exactly zero
    double phi(std::span<const double> x) const {
        const auto z = local(x);
        const double q = 1.0 / double(z.size());
        const double half = std::numbers::pi / 2.0;
        double v = 1.0;
        for (double zi : z) v *= std::pow(std::max(std::sin(half - std::abs(zi)), 0.0), q);
        return v;
    }
};

struct CubeCover {
    ConvexDomain domain;
    std::vector<CoverCube> cubes;

    int dim() const { return domain.dim(); }

    double inf_phi(std::span<const double> x) const {
        double v = std::numeric_limits<double>::infinity();
        for (const auto& c : cubes) v = std::min(v, c.phi(x));
        return v;
    }
};

namespace detail {

// canonical form of a cube's axis frame: directions with canonical sign,
// sorted -- the eigenfunction is symmetric under both, so equal canonical
// frames with equal centers describe the same cube
inline std::vector<std::vector<double>> canonical_axes(std::vector<std::vector<double>> axes) {
    for (auto& a : axes) {
        for (double c : a) {
            if (std::abs(c) > 1e-12) {
                if (c < 0.0)
                    for (double& v : a) v = -v;
                break;
            }
        }
    }
    std::sort(axes.begin(), axes.end());
    return axes;
}

inline bool same_cube(const CoverCube& a, const CoverCube& b) {
    for (std::size_t i = 0; i < a.center.size(); ++i)
        if (std::abs(a.center[i] - b.center[i]) > 1e-9) return false;
    const auto ca = canonical_axes(a.axes), cb = canonical_axes(b.axes);
    for (std::size_t i = 0; i < ca.size(); ++i)
        for (std::size_t j = 0; j < ca[i].size(); ++j)
            if (std::abs(ca[i][j] - cb[i][j]) > 1e-9) return false;
    return true;
}

inline void require_containment(const CoverCube& cube,
                                const std::vector<std::vector<double>>& vertices) {
    for (const auto& v : vertices)
        if (!cube.contains(v))
            throw std::invalid_argument(
                "build_cube_cover: domain does not fit inside a touching side-pi cube; "
                "rescale it below diameter pi");
}

}  // namespace detail

// One cube per face: the cube face lies in the face's supporting plane, the
// cube reaches inward by pi, and it is centred on the domain's tangential
// extent.  Duplicates (e.g. the four faces of the side-pi square all produce
// the square itself) are merged.
inline CubeCover build_cube_cover(const ConvexDomain& domain) {
    const double half = std::numbers::pi / 2.0;
    CubeCover cover{domain, {}};

    std::vector<std::vector<double>> vertices;
    if (domain.is_polygon()) {
        for (const auto& v : domain.polygon_vertices())
            vertices.push_back({v[0], v[1]});
        const auto& normals = domain.polygon_normals();
        const auto& offsets = domain.polygon_offsets();
        for (std::size_t f = 0; f < normals.size(); ++f) {
            const std::array<double, 2> n = normals[f];
            const std::array<double, 2> t = {-n[1], n[0]};
            double smin = std::numeric_limits<double>::infinity(), smax = -smin;
            for (const auto& v : vertices) {
                const double s = t[0] * v[0] + t[1] * v[1];
                smin = std::min(smin, s);
                smax = std::max(smax, s);
            }
            const double sc = 0.5 * (smin + smax);
            // base point on the face plane at the tangential centre
            const double b0 = n[0] * offsets[f] + t[0] * sc;
            const double b1 = n[1] * offsets[f] + t[1] * sc;
            CoverCube cube;
            cube.center = {b0 - n[0] * half, b1 - n[1] * half};
            cube.axes = {{t[0], t[1]}, {-n[0], -n[1]}};
            detail::require_containment(cube, vertices);
            bool dup = false;
            for (const auto& c : cover.cubes) dup = dup || detail::same_cube(c, cube);
            if (!dup) cover.cubes.push_back(std::move(cube));
        }
        return cover;
    }

    if (domain.is_box()) {
        const auto& lo = domain.box_lo();
        const auto& hi = domain.box_hi();
        const int n = domain.dim();
        std::vector<double> corner(static_cast<std::size_t>(n));
        for (int mask = 0; mask < (1 << n); ++mask) {
            for (int i = 0; i < n; ++i)
                corner[std::size_t(i)] =
                    ((mask >> i) & 1) ? hi[std::size_t(i)] : lo[std::size_t(i)];
            vertices.push_back(corner);
        }
        for (int axis = 0; axis < n; ++axis) {
            for (int side = 0; side < 2; ++side) {
                CoverCube cube;
                cube.center.assign(std::size_t(n), 0.0);
                for (int i = 0; i < n; ++i)
                    cube.center[std::size_t(i)] =
                        0.5 * (lo[std::size_t(i)] + hi[std::size_t(i)]);
                cube.center[std::size_t(axis)] =
                    side == 0 ? lo[std::size_t(axis)] + half : hi[std::size_t(axis)] - half;
                cube.axes.assign(std::size_t(n), std::vector<double>(std::size_t(n), 0.0));
                for (int i = 0; i < n; ++i) cube.axes[std::size_t(i)][std::size_t(i)] = 1.0;
                detail::require_containment(cube, vertices);
                bool dup = false;
                for (const auto& c : cover.cubes) dup = dup || detail::same_cube(c, cube);
                if (!dup) cover.cubes.push_back(std::move(cube));
            }
        }
        return cover;
    }

    throw std::invalid_argument("build_cube_cover: cover construction needs a polytope");
}

// Deterministic quasi-random interior samples (rejection from the bounding box).
inline std::vector<std::vector<double>> sample_interior(const ConvexDomain& domain,
                                                        std::size_t count,
                                                        std::uint64_t start_index = 1) {
    auto [lo, hi] = domain.bounding_box();
    HaltonSequence seq(domain.dim(), start_index);
    std::vector<std::vector<double>> out;
    out.reserve(count);
    std::size_t guard = 0;
    while (out.size() < count) {
        auto x = seq.next_in_box(lo, hi);
        if (domain.boundary_gap(x) > 1e-12) out.push_back(std::move(x));
        if (++guard > 1000 * count + 10000)
            throw std::runtime_error("sample_interior: rejection sampling stalled");
    }
    return out;
}

// ubar = (N alpha / beta) * (inf_cubes phi)^beta -- vanishes on the boundary
// of the covered domain and carries an explicit Hoelder modulus.
struct BarrierField {
    double alpha = 0.0;
    double beta = 0.0;
    CubeCover cover;

    double prefactor() const { return double(cover.dim()) * alpha / beta; }
    double holder_exponent() const { return beta / double(cover.dim()); }
    // sampled Hoelder quotients never exceed this: (N alpha/beta) N^(beta/2N)
    double holder_bound() const {
        const double n = double(cover.dim());
        return prefactor() * std::pow(n, beta / (2.0 * n));
    }

    double value(std::span<const double> x) const {
        return prefactor() * std::pow(cover.inf_phi(x), beta);
    }
};

inline BarrierField barrier(const CubeCover& cover, double alpha, double beta) {
    if (!(alpha > 0.0)) throw std::invalid_argument("barrier: alpha must be positive");
    if (!(beta > 0.0) || beta > 1.0)
        throw std::invalid_argument("barrier: beta must lie in (0, 1]");
    return BarrierField{alpha, beta, cover};
}

// Residual of the per-cube supersolution inequality at an interior point:
//   P+_1(D^2((N alpha/beta) phi^beta)) + alpha phi^beta  <=  0.
// The Hessian of phi^beta is beta phi^(beta-1) D^2 phi plus a nonpositive
// rank-one term beta(beta-1) phi^(beta-2) grad grad^T, so the inequality
// follows from the eigenfunction equation; this evaluates it exactly.
inline double barrier_supersolution_gap(const BarrierField& bar, const CoverCube& cube,
                                        std::span<const double> x) {
    const int n = int(cube.center.size());
    const auto pair = cube_eigenpair(n, std::numbers::pi / 2.0);
    const auto z = cube.local(x);
    // rotation leaves eigenvalues alone, so work in the cube's coordinates
    const double v = pair.value(z);
    const auto g = pair.gradient(z);
    const auto h = pair.hessian(z);
    SymMatrix hb(n);
    const double b = bar.beta;
    const double s1 = b * std::pow(v, b - 1.0);
    const double s2 = b * (b - 1.0) * std::pow(v, b - 2.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j)
            hb.at(i, j) = s1 * h(i, j) + s2 * g[std::size_t(i)] * g[std::size_t(j)];
    const double pp = pk_plus(hb, 1) * bar.prefactor();
    return pp + bar.alpha * std::pow(v, b);
}

// max of the supersolution residual over quasi-random interior samples,
// checked for every cube of the cover (the chain inequality per cube)
inline double barrier_supersolution_max(const BarrierField& bar, std::size_t samples = 1000) {
    const auto pts = sample_interior(bar.cover.domain, samples);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& cube : bar.cover.cubes)
        for (const auto& x : pts)
            worst = std::max(worst, barrier_supersolution_gap(bar, cube, x));
    return worst;
}

namespace detail {

// near-boundary probes: face centres pushed inward by graded distances,
// where a sign condition is hardest to satisfy
inline std::vector<std::vector<double>> graded_boundary_samples(const ConvexDomain& domain) {
    std::vector<std::vector<double>> base;   // (point on face, inward normal) pairs
    std::vector<std::vector<double>> inward;
    if (domain.is_polygon()) {
        const auto& verts = domain.polygon_vertices();
        const auto& normals = domain.polygon_normals();
        for (std::size_t f = 0; f < normals.size(); ++f) {
            const auto& p = verts[f];
            const auto& q = verts[(f + 1) % verts.size()];
            base.push_back({0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])});
            inward.push_back({-normals[f][0], -normals[f][1]});
        }
    } else if (domain.is_box()) {
        const auto& lo = domain.box_lo();
        const auto& hi = domain.box_hi();
        const int n = domain.dim();
        for (int axis = 0; axis < n; ++axis)
            for (int side = 0; side < 2; ++side) {
                std::vector<double> c(static_cast<std::size_t>(n));
                std::vector<double> d(static_cast<std::size_t>(n), 0.0);
                for (int i = 0; i < n; ++i)
                    c[std::size_t(i)] = 0.5 * (lo[std::size_t(i)] + hi[std::size_t(i)]);
                c[std::size_t(axis)] = side ? hi[std::size_t(axis)] : lo[std::size_t(axis)];
                d[std::size_t(axis)] = side ? -1.0 : 1.0;
                base.push_back(c);
                inward.push_back(d);
            }
    }
    std::vector<std::vector<double>> out;
    for (std::size_t f = 0; f < base.size(); ++f)
        for (double dist : {1e-2, 1e-4, 1e-6}) {
            auto x = base[f];
            for (std::size_t i = 0; i < x.size(); ++i) x[i] += dist * inward[f][i];
            if (domain.boundary_gap(x) > 0.0) out.push_back(std::move(x));
        }
    return out;
}

}  // namespace detail

// The sign condition under which the barrier controls boundary regularity:
// f(x) >= -alpha (inf phi)^beta at every sample (quasi-random interior plus
// graded near-boundary probes).
template <typename F>
bool holder_condition_check(F&& f, const CubeCover& cover, double alpha, double beta,
                            std::size_t samples = 1000) {
    if (!(alpha > 0.0)) throw std::invalid_argument("holder_condition_check: alpha > 0 required");
    if (!(beta > 0.0) || beta > 1.0)
        throw std::invalid_argument("holder_condition_check: beta in (0,1] required");
    auto pts = sample_interior(cover.domain, samples);
    for (auto& x : detail::graded_boundary_samples(cover.domain)) pts.push_back(std::move(x));
    for (const auto& x : pts) {
        const double floor = -alpha * std::pow(cover.inf_phi(x), beta);
        if (!(f(std::span<const double>(x)) >= floor)) return false;
    }
    return true;
}

// A point on a face together with the inward unit normal, for probing decay
// rates along the normal.
struct FaceProbe {
    std::vector<double> base;
    std::vector<double> inward;
};

inline FaceProbe face_probe(const ConvexDomain& domain, std::size_t face) {
    if (domain.is_polygon()) {
        const auto& verts = domain.polygon_vertices();
        const auto& normals = domain.polygon_normals();
        if (face >= normals.size()) throw std::invalid_argument("face_probe: face out of range");
        const auto& p = verts[face];
        const auto& q = verts[(face + 1) % verts.size()];
        return {{0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])},
                {-normals[face][0], -normals[face][1]}};
    }
    if (domain.is_box()) {
        const auto& lo = domain.box_lo();
        const auto& hi = domain.box_hi();
        const int n = domain.dim();
        if (face >= 2 * std::size_t(n)) throw std::invalid_argument("face_probe: face out of range");
        const int axis = int(face) / 2;
        const bool high = face % 2;
        FaceProbe probe;
        probe.base.resize(std::size_t(n));
        probe.inward.assign(std::size_t(n), 0.0);
        for (int i = 0; i < n; ++i)
            probe.base[std::size_t(i)] = 0.5 * (lo[std::size_t(i)] + hi[std::size_t(i)]);
        probe.base[std::size_t(axis)] = high ? hi[std::size_t(axis)] : lo[std::size_t(axis)];
        probe.inward[std::size_t(axis)] = high ? -1.0 : 1.0;
        return probe;
    }
    throw std::invalid_argument("face_probe: domain has no flat faces");
}

// Least-squares slope of log u(base + d*inward) against log d over the
// distances d = h, 2h, ... below `window`: the measured boundary growth
// exponent.  Requires at least five positive samples.
template <typename F>
double holder_exponent_fit(F&& u, const FaceProbe& probe, double h, double window) {
    if (!(h > 0.0) || !(window > h))
        throw std::invalid_argument("holder_exponent_fit: need 0 < h < window");
    std::vector<double> logd, logu;
    std::vector<double> x(probe.base.size());
    for (double d = h; d < window; d += h) {
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = probe.base[i] + d * probe.inward[i];
        const double v = u(std::span<const double>(x));
        if (!(v > 0.0))
            throw std::invalid_argument("holder_exponent_fit: field must be positive inside");
        logd.push_back(std::log(d));
        logu.push_back(std::log(v));
    }
    if (logd.size() < 5)
        throw std::invalid_argument("holder_exponent_fit: fewer than 5 samples in the window");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = double(logd.size());
    for (std::size_t i = 0; i < logd.size(); ++i) {
        sx += logd[i];
        sy += logu[i];
        sxx += logd[i] * logd[i];
        sxy += logd[i] * logu[i];
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

inline double holder_exponent_fit(const ScalarField& u, const FaceProbe& probe, double window) {
    return holder_exponent_fit(
        [&](std::span<const double> x) { return u.sample(x); }, probe, u.grid().h(), window);
}

// ---------------------------------------------------------------------------
// The logarithmic profile u = 1/(sigma - sum_i log cos x_i) on (-pi/2,pi/2)^n:
// for sigma = 2n it is concave (so P+_1(D^2 u) <= 0 with f = P+_1(D^2 u)
// bounded), yet u ~ 1/|log d| near each face, which beats every Hoelder
// exponent -- no sign condition, no Hoelder regularity.

struct RemarkReport {
    int dim = 0;
    double sigma = 0.0;
    double u_at_zero = 0.0;      // 1/sigma by substitution
    double max_form = 0.0;       // sup of <D^2u w, w> over samples x directions
    bool concave = false;        // max_form <= 1e-8
    std::vector<double> gammas;                 // candidate Hoelder exponents
    std::vector<double> distances;              // boundary distances probed
    std::vector<std::vector<double>> quotients; // [gamma][distance]
    bool quotients_grow = false;  // each row increases as the distance shrinks
};

namespace detail {

// Hessian of 1/(sigma - sum log cos): with S = sigma - sum log cos and
// t_i = tan x_i,  D^2u = (2/S^3) t t^T - (1/S^2) diag(sec^2).
inline SymMatrix remark_hessian(double sigma, std::span<const double> x) {
    const int n = int(x.size());
    double s = sigma;
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        s -= std::log(std::cos(x[std::size_t(i)]));
        t[std::size_t(i)] = std::tan(x[std::size_t(i)]);
    }
    SymMatrix h(n);
    const double c3 = 2.0 / (s * s * s), c2 = 1.0 / (s * s);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) h.at(i, j) = c3 * t[std::size_t(i)] * t[std::size_t(j)];
        const double sec2 = 1.0 + t[std::size_t(i)] * t[std::size_t(i)];
        h.at(i, i) = c3 * t[std::size_t(i)] * t[std::size_t(i)] - c2 * sec2;
    }
    return h;
}

}  // namespace detail

// value of the profile at distance d inward from the centre of a face,
// evaluated directly in d for full precision at tiny distances
inline double remark_profile(int n, double sigma, double d) {
    (void)n;
    return 1.0 / (sigma - std::log(std::sin(d)));
}

inline RemarkReport remark_counterexample(int n, double sigma = 0.0) {
    if (n < 1) throw std::invalid_argument("remark_counterexample: dimension must be positive");
    if (sigma == 0.0) sigma = 2.0 * n;
    RemarkReport rep;
    rep.dim = n;
    rep.sigma = sigma;
    rep.u_at_zero = 1.0 / sigma;

    // Concavity sweep: quasi-random samples plus the per-coordinate worst
    // point x_i = pi/3 (where 2 sin^2 + log cos peaks), lambda_max exactly
    // via the symmetric eigensolver plus random quadratic forms.
    const double half = std::numbers::pi / 2.0;
    HaltonSequence seq(n, 1);
    std::vector<double> lo(std::size_t(n), -half * (1.0 - 1e-9));
    std::vector<double> hi(std::size_t(n), half * (1.0 - 1e-9));
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 1000; ++i) pts.push_back(seq.next_in_box(lo, hi));
    pts.push_back(std::vector<double>(std::size_t(n), std::numbers::pi / 3.0));

    std::mt19937_64 rng(20260814);
    std::normal_distribution<double> gauss;
    rep.max_form = -std::numeric_limits<double>::infinity();
    std::vector<double> w(static_cast<std::size_t>(n));
    for (const auto& x : pts) {
        const auto h = detail::remark_hessian(sigma, x);
        rep.max_form = std::max(rep.max_form, spectrum(h).values.back());
        for (int trial = 0; trial < 1000; ++trial) {
            double norm2 = 0.0;
            for (double& wi : w) {
                wi = gauss(rng);
                norm2 += wi * wi;
            }
            if (norm2 < 1e-12) continue;
            rep.max_form = std::max(rep.max_form, h.quad_form(w) / norm2);
        }
    }
    rep.concave = rep.max_form <= 1e-8;

    // Hoelder quotients against the face value 0 at graded distances: for
    // every candidate exponent they grow as the boundary is approached,
    // since u ~ 1/|log d| decays slower than any power.
    rep.gammas = {0.5, 0.25, 0.1};
    rep.distances = {1e-4, 1e-8, 1e-12};
    rep.quotients.assign(rep.gammas.size(), std::vector<double>(rep.distances.size(), 0.0));
    rep.quotients_grow = true;
    for (std::size_t g = 0; g < rep.gammas.size(); ++g) {
        for (std::size_t k = 0; k < rep.distances.size(); ++k) {
            const double d = rep.distances[k];
            const double q1 = remark_profile(n, sigma, d) / std::pow(d, rep.gammas[g]);
            const double q2 = (remark_profile(n, sigma, 2.0 * d) - remark_profile(n, sigma, d)) /
                              std::pow(d, rep.gammas[g]);
            rep.quotients[g][k] = std::max(q1, q2);
            if (k > 0 && !(rep.quotients[g][k] > rep.quotients[g][k - 1]))
                rep.quotients_grow = false;
        }
    }
    return rep;
}

}  // namespace trunclap
