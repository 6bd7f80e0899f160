#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "trunclap/closed_form.hpp"

// Shape comparisons for the principal P^+_1 eigenvalue.  The classical
// Faber-Krahn picture inverts: among boxes of fixed volume the cube
// *maximises* mu (equality only for the cube itself), and the volume-matched
// ball beats even the cube.  For intersections of two congruent boxes the
// Lieb-style bound mu(A cap (B + tau)) < mu(A) + mu(B), valid for the
// Laplacian at a good translation, fails outright once the boxes are
// elongated enough: the infimum over translations exceeds the sum.

namespace trunclap {

struct FkReport {
    int dim = 0;
    std::vector<double> alpha;     // normalised stretches, prod alpha_i = 1
    double mu_rect = 0.0;          // box prod (-r/alpha_i, r/alpha_i)
    double mu_cube = 0.0;          // cube (-r, r)^n, same volume
    double harmonic_mean = 0.0;    // of the alpha_i^2
    double geometric_mean = 0.0;   // of the alpha_i^2 (equals 1 here)
    bool is_equality = false;      // all alpha_i equal
};

// mu(box) <= mu(cube) at equal volume.  The two eigenvalues compare through
// the harmonic-geometric mean inequality for the alpha_i^2: the box value is
// (pi/(2r))^2 (harmonic mean) / n and the normalisation pins the geometric
// mean at one.
inline FkReport fk_check(const std::vector<double>& alpha, double r) {
    const int n = int(alpha.size());
    if (n < 1) throw std::invalid_argument("fk_check: need at least one stretch factor");
    if (!(r > 0.0)) throw std::invalid_argument("fk_check: half width must be positive");
    double log_prod = 0.0;
    for (double a : alpha) {
        if (!(a > 0.0)) throw std::invalid_argument("fk_check: stretch factors must be positive");
        log_prod += std::log(a);
    }
    if (std::abs(log_prod) > 1e-10)
        throw std::invalid_argument("fk_check: stretch factors must have unit product");

    FkReport rep;
    rep.dim = n;
    rep.alpha = alpha;
    rep.mu_rect = rect_eigenpair(BoxSpec{n, r, alpha}).mu();
    rep.mu_cube = cube_eigenpair(n, r).mu();

    double inv_sum = 0.0, log_sum = 0.0;
    double lo = alpha.front(), hi = alpha.front();
    for (double a : alpha) {
        inv_sum += 1.0 / (a * a);
        log_sum += 2.0 * std::log(a);
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    rep.harmonic_mean = double(n) / inv_sum;
    rep.geometric_mean = std::exp(log_sum / double(n));
    rep.is_equality = (hi - lo) <= 1e-12;
    return rep;
}

// Volume of the unit ball in dimension n, by the two-step recursion
// omega_n = (2 pi / n) omega_{n-2} with omega_0 = 1, omega_1 = 2.
inline double unit_ball_volume(int n) {
    if (n < 1) throw std::invalid_argument("unit_ball_volume: dimension must be >= 1");
    double even = 1.0, odd = 2.0;  // omega_0, omega_1
    for (int m = 2; m <= n; ++m) {
        if (m % 2 == 0)
            even *= 2.0 * std::numbers::pi / double(m);
        else
            odd *= 2.0 * std::numbers::pi / double(m);
    }
    return n % 2 == 0 ? even : odd;
}

struct Fk2Report {
    int dim = 0;
    double half_width = 0.0;   // cube half side r
    double radius = 0.0;       // ball of equal volume
    double mu_ball = 0.0;
    double mu_cube = 0.0;
    double ratio = 0.0;        // mu_ball / mu_cube = n omega_n^{2/n} / 4
    bool ball_larger = false;
};

// Ball versus cube of the same volume: the ball has the strictly larger
// principal eigenvalue in every dimension n >= 2 (the ratio grows to
// pi e / 2 as n -> infinity; in dimension 1 the shapes coincide).
inline Fk2Report fk2_check(int n, double r) {
    if (n < 1) throw std::invalid_argument("fk2_check: dimension must be >= 1");
    if (!(r > 0.0)) throw std::invalid_argument("fk2_check: half width must be positive");

    Fk2Report rep;
    rep.dim = n;
    rep.half_width = r;
    const double omega = unit_ball_volume(n);
    rep.radius = 2.0 * r * std::pow(omega, -1.0 / double(n));
    rep.mu_ball = ball_eigenpair(n, 1, rep.radius).mu();
    rep.mu_cube = cube_eigenpair(n, r).mu();
    rep.ratio = rep.mu_ball / rep.mu_cube;
    rep.ball_larger = rep.mu_ball > rep.mu_cube;
    return rep;
}

struct LiebReport {
    int dim = 0;
    std::vector<double> alpha;          // box stretches, ascending
    double mu_a = 0.0;                  // mu of the box
    double mu_b = 0.0;                  // mu of its quarter-turn copy (equal)
    double mu_intersection_inf = 0.0;   // infimum over relative translations
    bool reversed = false;              // inf > mu_a + mu_b strictly
};

// A is the box prod (-r/alpha_i, r/alpha_i); B is A rotated a quarter turn
// in the (1,2)-plane, so the first two half-sides swap.  Over all
// translations of B the intersection is again a box, with half-sides at most
// (r/alpha_2, r/alpha_2, r/alpha_3, ..., r/alpha_n) since alpha_1 <= alpha_2;
// the box eigenvalue depends only on the sum of squared half-sides, so the
// infimum is attained at that envelope:
//
//   inf = (pi/(2r))^2 / (2/alpha_2^2 + sum_{i>=3} 1/alpha_i^2).
//
// Reversal of the Lieb-style inequality -- inf exceeding mu(A) + mu(B) --
// reduces to 1/alpha_1^2 > 3/alpha_2^2 + sum_{i>=3} 1/alpha_i^2.
inline LiebReport lieb_reversal_nd(const std::vector<double>& alpha, double r) {
    const int n = int(alpha.size());
    if (n < 3) throw std::invalid_argument("lieb_reversal_nd: dimension must be >= 3");
    if (!(r > 0.0)) throw std::invalid_argument("lieb_reversal_nd: half width must be positive");
    for (int i = 0; i < n; ++i) {
        if (!(alpha[std::size_t(i)] > 0.0))
            throw std::invalid_argument("lieb_reversal_nd: stretch factors must be positive");
        if (i + 1 < n && alpha[std::size_t(i)] > alpha[std::size_t(i) + 1] * (1.0 + 1e-12))
            throw std::invalid_argument("lieb_reversal_nd: stretch factors must be ascending");
    }

    LiebReport rep;
    rep.dim = n;
    rep.alpha = alpha;
    const double c2 = std::pow(std::numbers::pi / (2.0 * r), 2);

    double full_sum = 0.0;
    for (double a : alpha) full_sum += 1.0 / (a * a);
    rep.mu_a = c2 / full_sum;
    rep.mu_b = rep.mu_a;

    double tail = 0.0;
    for (int i = 2; i < n; ++i) tail += 1.0 / (alpha[std::size_t(i)] * alpha[std::size_t(i)]);
    const double a2sq = alpha[1] * alpha[1];
    rep.mu_intersection_inf = c2 / (2.0 / a2sq + tail);

    // strict reversal condition, evaluated algebraically so that boundary
    // cases are decided by the inequality itself and not by the rounding of
    // the two eigenvalues above
    const double a1sq = alpha[0] * alpha[0];
    rep.reversed = 1.0 / a1sq > 3.0 / a2sq + tail;
    return rep;
}

// Planar case: rectangle with half-sides (r/a1, r/a2), a1 <= a2, against its
// quarter-turn copy.  inf over translations = (a2^2/2) (pi/(2r))^2, and
// reversal holds exactly when a2^2 > 3 a1^2.
inline LiebReport lieb_reversal_2d(double a1, double a2, double r) {
    if (!(a1 > 0.0) || !(a2 > 0.0))
        throw std::invalid_argument("lieb_reversal_2d: stretch factors must be positive");
    if (a1 > a2 * (1.0 + 1e-12))
        throw std::invalid_argument("lieb_reversal_2d: need a1 <= a2");
    if (!(r > 0.0)) throw std::invalid_argument("lieb_reversal_2d: half width must be positive");

    LiebReport rep;
    rep.dim = 2;
    rep.alpha = {a1, a2};
    const double c2 = std::pow(std::numbers::pi / (2.0 * r), 2);
    rep.mu_a = c2 / (1.0 / (a1 * a1) + 1.0 / (a2 * a2));
    rep.mu_b = rep.mu_a;
    rep.mu_intersection_inf = a2 * a2 / 2.0 * c2;
    rep.reversed = a2 * a2 > 3.0 * a1 * a1;
    return rep;
}

}  // namespace trunclap
