#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "trunclap/grid.hpp"

// Monotone wide-stencil discretization of P+_1 (largest Hessian eigenvalue)
// with homogeneous Dirichlet data, an explicit damped fixed-point solver for
//   max_e  Delta_e u = f,
// and an inverse-power loop for the principal eigenvalue.
//
// Each stencil direction contributes a second difference with exact boundary
// cuts: if the lattice neighbour lies outside the domain, the one-sided
// formula uses the exact ray-boundary distance and the boundary value zero.
// All coefficients are nonnegative off the diagonal, so the scheme is
// monotone, and the damping factor tau is chosen per node below the
// contraction threshold 1/c_centre, which keeps every sweep order-preserving.

namespace trunclap {

inline int resolve_threads(int requested) {
    if (requested > 0) return std::min(requested, 64);
    if (const char* env = std::getenv("TRUNCLAP_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return int(std::min<long>(v, 64));
    }
    return 1;
}

class iteration_limit_error : public std::runtime_error {
  public:
    iteration_limit_error(std::string what, std::vector<double> history)
        : std::runtime_error(std::move(what)), history_(std::move(history)) {}
    const std::vector<double>& residual_history() const { return history_; }

  private:
    std::vector<double> history_;
};

struct SolveConfig {
    double tau_factor = 0.45;  // tau = tau_factor * min_e(h_plus h_minus), must stay <= 0.5
    double tolerance = 1e-10;  // stop when sup |update| drops below this
    std::int64_t max_sweeps = 2'000'000;
    int threads = 0;  // 0: TRUNCLAP_THREADS env var, else 1
    bool throw_on_limit = true;
};

struct SolveOutcome {
    ScalarField u;
    std::int64_t sweeps = 0;
    std::vector<double> update_history;  // sup |update| per sweep
};

namespace detail {

// Deterministic static partition: node f(i) is evaluated with identical
// arithmetic whatever the thread count, and the per-chunk maxima are merged
// with max(), which is associative, so results are bit-identical.
template <typename Fn>
double parallel_max(std::int64_t n, int threads, Fn&& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || n < 1024) return fn(std::int64_t(0), n);
    std::vector<double> part(std::size_t(threads), 0.0);
    std::vector<std::thread> pool;
    const std::int64_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::int64_t lo = std::min<std::int64_t>(t * chunk, n);
        const std::int64_t hi = std::min<std::int64_t>(lo + chunk, n);
        pool.emplace_back([&part, &fn, t, lo, hi] { part[std::size_t(t)] = fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
    double m = 0.0;
    for (double v : part) m = std::max(m, v);
    return m;
}

}  // namespace detail

class WideStencil {
  public:
    // The grid must outlive the stencil; the direction set is copied in.
    WideStencil(const GridDomain& grid, DirectionSet dirs)
        : grid_(&grid), dirs_(std::move(dirs)) {
        if (dirs_.dim != grid.dim())
            throw std::invalid_argument("WideStencil: direction set dimension mismatch");
        const int n = grid.dim();
        const double h = grid.h();
        const std::size_t nd = dirs_.size();

        stride_.resize(nd);
        inv_l2_.resize(nd);
        len_.resize(nd);
        for (std::size_t d = 0; d < nd; ++d) {
            std::int64_t s = 0;
            double e2 = 0.0;
            for (int i = 0; i < n; ++i) {
                s += std::int64_t(dirs_.dirs[d][std::size_t(i)]) * grid.strides()[std::size_t(i)];
                e2 += double(dirs_.dirs[d][std::size_t(i)]) * double(dirs_.dirs[d][std::size_t(i)]);
            }
            stride_[d] = s;
            len_[d] = h * std::sqrt(e2);
            inv_l2_[d] = 1.0 / (len_[d] * len_[d]);
        }

        const std::int64_t m = grid.interior_count();
        cut_index_.assign(std::size_t(m) * nd, -1);
        tau_scale_.assign(std::size_t(m), 0.0);

        std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
        std::vector<double> x(static_cast<std::size_t>(n)), unit(static_cast<std::size_t>(n));
        for (std::int64_t rank = 0; rank < m; ++rank) {
            const std::int64_t flat = grid.interior_nodes()[std::size_t(rank)];
            grid.unflatten(flat, idx);
            grid.node_point(idx, x);
            double min_prod = std::numeric_limits<double>::infinity();
            for (std::size_t d = 0; d < nd; ++d) {
                const auto& e = dirs_.dirs[d];
                double hp = len_[d], hm = len_[d];
                std::int64_t ip = flat + stride_[d], im = flat - stride_[d];
                const bool plus_in = neighbour_interior(idx, e, +1);
                const bool minus_in = neighbour_interior(idx, e, -1);
                if (!plus_in || !minus_in) {
                    for (int i = 0; i < n; ++i)
                        unit[std::size_t(i)] = double(e[std::size_t(i)]) * h / len_[d];
                    if (!plus_in) {
                        hp = std::min(grid.domain().ray_exit(x, unit), len_[d]);
                        ip = 0;  // corner of the padded lattice: always exterior, pinned to 0
                    }
                    if (!minus_in) {
                        for (double& c : unit) c = -c;
                        hm = std::min(grid.domain().ray_exit(x, unit), len_[d]);
                        im = 0;
                        for (double& c : unit) c = -c;
                    }
                    Cut cut;
                    cut.c_plus = 2.0 / (hp * (hp + hm));
                    cut.c_minus = 2.0 / (hm * (hp + hm));
                    cut.c_centre = 2.0 / (hp * hm);
                    cut.idx_plus = ip;
                    cut.idx_minus = im;
                    cut_index_[std::size_t(rank) * nd + d] = std::int32_t(cuts_.size());
                    cuts_.push_back(cut);
                }
                min_prod = std::min(min_prod, hp * hm);
            }
            tau_scale_[std::size_t(rank)] = min_prod;
        }
    }

    const GridDomain& grid() const { return *grid_; }
    const DirectionSet& directions() const { return dirs_; }

    // min_e (h_plus h_minus) at the given interior rank; tau = tau_factor * this
    double tau_scale(std::int64_t rank) const { return tau_scale_[std::size_t(rank)]; }

    // Second difference along stencil direction d, normalized to approximate
    // <D^2 u e, e> / |e|^2.  Boundary/exterior nodes have no equation.
    double second_difference(const ScalarField& u, std::int64_t flat, std::size_t d) const {
        const std::int64_t rank = grid_->interior_rank(flat);
        if (rank < 0)
            throw std::domain_error("second_difference: node is on or outside the boundary");
        return diff_at(u.values().data(), rank, flat, d);
    }

    double second_difference(const ScalarField& u, std::int64_t flat,
                             std::span<const int> e) const {
        return second_difference(u, flat, find_direction(e));
    }

    // max over stencil directions of the second difference (discrete P+_1)
    double pplus1_at(const ScalarField& u, std::int64_t flat) const {
        const std::int64_t rank = grid_->interior_rank(flat);
        if (rank < 0) throw std::domain_error("pplus1_at: node is on or outside the boundary");
        return best_at(u.values().data(), rank, flat);
    }

    ScalarField apply_pplus1(const ScalarField& u, int threads = 0) const {
        ScalarField out(*grid_);
        const double* src = u.values().data();
        double* dst = out.values().data();
        const auto& nodes = grid_->interior_nodes();
        detail::parallel_max(grid_->interior_count(), resolve_threads(threads),
                             [&](std::int64_t lo, std::int64_t hi) {
                                 for (std::int64_t r = lo; r < hi; ++r)
                                     dst[nodes[std::size_t(r)]] = best_at(src, r, nodes[std::size_t(r)]);
                                 return 0.0;
                             });
        return out;
    }

    // Damped fixed-point iteration  u <- u + tau (P(u) - f)  from the given
    // start (zero by default), stopping when the sup-norm of the update
    // drops below cfg.tolerance.
    SolveOutcome solve_dirichlet(const ScalarField& f, const SolveConfig& cfg = {},
                                 const ScalarField* initial = nullptr) const {
        if (!(cfg.tau_factor > 0.0) || cfg.tau_factor > 0.5)
            throw std::invalid_argument("solve_dirichlet: tau_factor must lie in (0, 1/2]");
        for (auto flat : grid_->interior_nodes())
            if (!std::isfinite(f[flat]))
                throw std::invalid_argument("solve_dirichlet: right-hand side is not finite");

        const int threads = resolve_threads(cfg.threads);
        const std::int64_t m = grid_->interior_count();
        const auto& nodes = grid_->interior_nodes();

        std::vector<double> cur(std::size_t(grid_->node_count()), 0.0);
        std::vector<double> nxt(std::size_t(grid_->node_count()), 0.0);
        if (initial) {
            if (initial->grid().node_count() != grid_->node_count())
                throw std::invalid_argument("solve_dirichlet: initial guess lives on another grid");
            for (auto flat : nodes) cur[std::size_t(flat)] = (*initial)[flat];
        }

        std::vector<double> history;
        const double* rhs = f.values().data();
        std::int64_t sweep = 0;
        for (; sweep < cfg.max_sweeps; ++sweep) {
            const double* src = cur.data();
            double* dst = nxt.data();
            const double sup_update = detail::parallel_max(
                m, threads, [&](std::int64_t lo, std::int64_t hi) {
                    double worst = 0.0;
                    for (std::int64_t r = lo; r < hi; ++r) {
                        const std::int64_t flat = nodes[std::size_t(r)];
                        const double upd = cfg.tau_factor * tau_scale_[std::size_t(r)] *
                                           (best_at(src, r, flat) - rhs[flat]);
                        dst[flat] = src[flat] + upd;
                        worst = std::max(worst, std::abs(upd));
                    }
                    return worst;
                });
            history.push_back(sup_update);
            cur.swap(nxt);
            if (sup_update < cfg.tolerance) {
                ++sweep;
                break;
            }
        }
        if (sweep >= cfg.max_sweeps && (history.empty() || history.back() >= cfg.tolerance)) {
            if (cfg.throw_on_limit)
                throw iteration_limit_error(
                    "solve_dirichlet: sweep limit reached before the update tolerance",
                    std::move(history));
        }

        SolveOutcome out{ScalarField(*grid_), sweep, std::move(history)};
        for (auto flat : nodes) out.u[flat] = cur[std::size_t(flat)];
        return out;
    }

  private:
    struct Cut {
        double c_plus = 0.0, c_minus = 0.0, c_centre = 0.0;
        std::int64_t idx_plus = 0, idx_minus = 0;
    };

    bool neighbour_interior(const std::vector<std::int64_t>& idx, const std::vector<int>& e,
                            int sign) const {
        std::int64_t flat = 0;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const std::int64_t j = idx[i] + sign * e[i];
            if (j < 0 || j >= grid_->shape()[i]) return false;
            flat += j * grid_->strides()[i];
        }
        return grid_->is_interior(flat);
    }

    double diff_at(const double* u, std::int64_t rank, std::int64_t flat, std::size_t d) const {
        const std::int32_t ci = cut_index_[std::size_t(rank) * dirs_.size() + d];
        const double u0 = u[flat];
        if (ci < 0)
            return (u[flat + stride_[d]] + u[flat - stride_[d]] - 2.0 * u0) * inv_l2_[d];
        const Cut& c = cuts_[std::size_t(ci)];
        return c.c_plus * u[c.idx_plus] + c.c_minus * u[c.idx_minus] - c.c_centre * u0;
    }

    double best_at(const double* u, std::int64_t rank, std::int64_t flat) const {
        const std::size_t nd = dirs_.size();
        const std::int32_t* ci = &cut_index_[std::size_t(rank) * nd];
        const double u0 = u[flat];
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t d = 0; d < nd; ++d) {
            double v;
            if (ci[d] < 0) {
                v = (u[flat + stride_[d]] + u[flat - stride_[d]] - 2.0 * u0) * inv_l2_[d];
            } else {
                const Cut& c = cuts_[std::size_t(ci[d])];
                v = c.c_plus * u[c.idx_plus] + c.c_minus * u[c.idx_minus] - c.c_centre * u0;
            }
            best = std::max(best, v);
        }
        return best;
    }

    std::size_t find_direction(std::span<const int> e) const {
        if (int(e.size()) != grid_->dim())
            throw std::invalid_argument("second_difference: direction dimension mismatch");
        for (std::size_t d = 0; d < dirs_.size(); ++d) {
            bool same = true, flipped = true;
            for (int i = 0; i < grid_->dim(); ++i) {
                same = same && dirs_.dirs[d][std::size_t(i)] == e[std::size_t(i)];
                flipped = flipped && dirs_.dirs[d][std::size_t(i)] == -e[std::size_t(i)];
            }
            if (same || flipped) return d;  // second differences are even in e
        }
        throw std::invalid_argument("second_difference: direction is not in the stencil");
    }

    const GridDomain* grid_;
    DirectionSet dirs_;
    std::vector<std::int64_t> stride_;
    std::vector<double> inv_l2_, len_;
    std::vector<std::int32_t> cut_index_;  // (rank, dir) -> cuts_ index, -1 regular
    std::vector<Cut> cuts_;
    std::vector<double> tau_scale_;  // per rank: min_e h_plus h_minus
};

struct EigenConfig {
    double tau_factor = 0.45;
    int threads = 0;
    double tolerance = 2e-5;  // relative change of mu, met twice in a row
    int max_outer = 200;
    std::int64_t inner_sweep_cap = 400'000;
    // Inner solves stop on sup |update| < rel * tau_factor * h^2 with rel
    // following the outer progress between these two bounds.
    double inner_rel_start = 1e-2;
    double inner_rel_floor = 2e-7;
};

struct EigenEstimate {
    double mu_h = 0.0;
    int iterations = 0;
    std::vector<double> residual_history;  // |mu_m - mu_{m-1}| per outer step
    ScalarField eigenfield;                // sup-normalized, positive inside
    std::int64_t total_sweeps = 0;
    bool converged = false;                // stopped on the tolerance, not the cap
};

// Inverse-power iteration for the principal Dirichlet eigenpair of P+_1:
// given the current sup-normalized positive iterate u, solve P(w) = -u and
// read off mu = 1 / sup(w).  The final estimate averages the last few mu
// values.  An optional warm start (e.g. a coarse solution carried over)
// shortens the first solve considerably.
inline EigenEstimate eigen_inverse_power(const WideStencil& stencil, const EigenConfig& cfg = {},
                                         const ScalarField* warm_start = nullptr) {
    const GridDomain& grid = stencil.grid();
    EigenEstimate est{0.0, 0, {}, ScalarField(grid), 0};

    ScalarField u(grid);
    if (warm_start) {
        if (warm_start->grid().node_count() != grid.node_count())
            throw std::invalid_argument("eigen_inverse_power: warm start lives on another grid");
        const double sup = warm_start->sup_norm();
        if (!(sup > 0.0))
            throw std::invalid_argument("eigen_inverse_power: warm start is identically zero");
        for (auto flat : grid.interior_nodes()) u[flat] = std::abs((*warm_start)[flat]) / sup;
    } else {
        u.fill_interior(1.0);
    }

    const double tau_ref = cfg.tau_factor * grid.h() * grid.h();
    ScalarField f(grid), w(grid);
    w = u;  // first inner start: mu guess 1

    std::vector<double> mus;
    double mu_prev = std::numeric_limits<double>::quiet_NaN();
    double rel = cfg.inner_rel_start;
    int consecutive = 0;

    for (int m = 0; m < cfg.max_outer; ++m) {
        for (auto flat : grid.interior_nodes()) f[flat] = -u[flat];

        SolveConfig inner;
        inner.tau_factor = cfg.tau_factor;
        inner.threads = cfg.threads;
        inner.max_sweeps = cfg.inner_sweep_cap;
        inner.throw_on_limit = false;  // a truncated solve only slows the outer loop
        inner.tolerance = rel * tau_ref;

        SolveOutcome sol = stencil.solve_dirichlet(f, inner, &w);
        est.total_sweeps += sol.sweeps;
        w = std::move(sol.u);

        const double sup = w.max_interior();
        if (!std::isfinite(sup) || !(sup > 0.0))
            throw std::runtime_error("eigen_inverse_power: iteration collapsed");
        const double mu = 1.0 / sup;
        mus.push_back(mu);
        est.iterations = m + 1;

        if (!std::isnan(mu_prev)) {
            const double diff = std::abs(mu - mu_prev);
            est.residual_history.push_back(diff);
            consecutive = diff <= cfg.tolerance * std::abs(mu) ? consecutive + 1 : 0;
            // tighten the inner tolerance as the outer loop closes in
            rel = std::clamp(0.05 * diff / std::max(std::abs(mu), 1e-300), cfg.inner_rel_floor,
                             cfg.inner_rel_start);
        }
        mu_prev = mu;

        // w itself is kept as the warm start of the next inner solve: the
        // target there is approximately u/mu, which is exactly w's scale.
        const double inv = 1.0 / sup;
        for (auto flat : grid.interior_nodes()) u[flat] = w[flat] * inv;

        if (consecutive >= 2) {
            est.converged = true;
            break;
        }
    }

    const std::size_t tail = std::min<std::size_t>(5, mus.size());
    double sum = 0.0;
    for (std::size_t i = mus.size() - tail; i < mus.size(); ++i) sum += mus[i];
    est.mu_h = sum / double(tail);
    est.eigenfield = std::move(u);
    return est;
}

// Certifies  P(phi) + mu phi <= tol  at every interior node -- the discrete
// form of the comparison-based lower-bound test for the principal eigenvalue.
// phi must be positive somewhere inside.
inline bool bnv_certify_lower_bound(const WideStencil& stencil, double mu, const ScalarField& phi,
                                    double tol = 1e-9) {
    if (phi.grid().node_count() != stencil.grid().node_count())
        throw std::invalid_argument("bnv_certify_lower_bound: field lives on another grid");
    if (!(phi.max_interior() > 0.0))
        throw std::invalid_argument("bnv_certify_lower_bound: test field must be positive somewhere");
    for (auto flat : stencil.grid().interior_nodes())
        if (stencil.pplus1_at(phi, flat) + mu * phi[flat] > tol) return false;
    return true;
}

// Multilinear transfer of a coarse-grid field onto a finer grid over the
// same domain (exterior values are zero on both sides).
inline ScalarField prolongate(const ScalarField& coarse, const GridDomain& fine) {
    const GridDomain& cg = coarse.grid();
    const int n = fine.dim();
    if (cg.dim() != n) throw std::invalid_argument("prolongate: dimension mismatch");

    ScalarField out(fine);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(n)), cell(static_cast<std::size_t>(n));
    std::vector<double> x(static_cast<std::size_t>(n)), frac(static_cast<std::size_t>(n));
    for (auto flat : fine.interior_nodes()) {
        fine.unflatten(flat, idx);
        fine.node_point(idx, x);
        for (int i = 0; i < n; ++i) {
            const double s = (x[std::size_t(i)] - cg.origin()[std::size_t(i)]) / cg.h();
            double c = std::floor(s);
            c = std::clamp(c, 0.0, double(cg.shape()[std::size_t(i)] - 2));
            cell[std::size_t(i)] = std::int64_t(c);
            frac[std::size_t(i)] = std::clamp(s - c, 0.0, 1.0);
        }
        double v = 0.0;
        for (int corner = 0; corner < (1 << n); ++corner) {
            double wgt = 1.0;
            std::int64_t cflat = 0;
            for (int i = 0; i < n; ++i) {
                const bool hi = (corner >> i) & 1;
                wgt *= hi ? frac[std::size_t(i)] : 1.0 - frac[std::size_t(i)];
                cflat += (cell[std::size_t(i)] + (hi ? 1 : 0)) * cg.strides()[std::size_t(i)];
            }
            v += wgt * coarse[cflat];
        }
        out[flat] = v;
    }
    return out;
}

}  // namespace trunclap
