#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

// Convex domains with the two geometric queries the grid machinery needs:
// a conservative inside-gap (exact for boxes and balls, a lower bound for
// general polytopes) and the exact distance to the boundary along a ray,
// which is what keeps the cut-cell stencils monotone.

namespace trunclap {

class ConvexDomain {
  public:
    static ConvexDomain box(std::vector<double> lo, std::vector<double> hi) {
        if (lo.size() != hi.size() || lo.empty())
            throw std::invalid_argument("ConvexDomain::box: bound size mismatch");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] < hi[i]))
                throw std::invalid_argument("ConvexDomain::box: need lo < hi per axis");
        ConvexDomain d;
        d.dim_ = int(lo.size());
        d.payload_ = Box{std::move(lo), std::move(hi)};
        return d;
    }

    static ConvexDomain ball(std::vector<double> centre, double radius) {
        if (centre.empty()) throw std::invalid_argument("ConvexDomain::ball: empty centre");
        if (!(radius > 0.0)) throw std::invalid_argument("ConvexDomain::ball: radius must be positive");
        ConvexDomain d;
        d.dim_ = int(centre.size());
        d.payload_ = Ball{std::move(centre), radius};
        return d;
    }

    // Convex planar polygon from its vertex loop (either orientation).
    static ConvexDomain polygon(std::vector<std::array<double, 2>> vertices) {
        const int m = int(vertices.size());
        if (m < 3) throw std::invalid_argument("ConvexDomain::polygon: need at least 3 vertices");

        // orient counter-clockwise
        double area2 = 0.0;
        for (int i = 0; i < m; ++i) {
            const auto& p = vertices[std::size_t(i)];
            const auto& q = vertices[std::size_t((i + 1) % m)];
            area2 += p[0] * q[1] - q[0] * p[1];
        }
        if (std::abs(area2) < 1e-14)
            throw std::invalid_argument("ConvexDomain::polygon: degenerate vertex loop");
        if (area2 < 0.0) std::reverse(vertices.begin(), vertices.end());

        Poly poly;
        poly.vertices = vertices;
        std::vector<double> lo = {vertices[0][0], vertices[0][1]};
        std::vector<double> hi = lo;
        for (int i = 0; i < m; ++i) {
            const auto& p = vertices[std::size_t(i)];
            const auto& q = vertices[std::size_t((i + 1) % m)];
            const double ex = q[0] - p[0], ey = q[1] - p[1];
            const double len = std::hypot(ex, ey);
            if (len < 1e-14)
                throw std::invalid_argument("ConvexDomain::polygon: repeated vertex");
            // outward normal of a CCW loop
            poly.normals.push_back({ey / len, -ex / len});
            poly.offsets.push_back((ey * p[0] - ex * p[1]) / len);
            lo[0] = std::min(lo[0], p[0]);
            lo[1] = std::min(lo[1], p[1]);
            hi[0] = std::max(hi[0], p[0]);
            hi[1] = std::max(hi[1], p[1]);
        }
        // convexity: every vertex on the inner side of every face
        for (int f = 0; f < m; ++f)
            for (int v = 0; v < m; ++v) {
                const double slack = poly.offsets[std::size_t(f)] -
                                     poly.normals[std::size_t(f)][0] * vertices[std::size_t(v)][0] -
                                     poly.normals[std::size_t(f)][1] * vertices[std::size_t(v)][1];
                if (slack < -1e-10)
                    throw std::invalid_argument("ConvexDomain::polygon: vertex loop is not convex");
            }
        poly.lo = std::move(lo);
        poly.hi = std::move(hi);

        ConvexDomain d;
        d.dim_ = 2;
        d.payload_ = std::move(poly);
        return d;
    }

    static ConvexDomain regular_polygon(int sides, double circumradius) {
        if (sides < 3) throw std::invalid_argument("ConvexDomain::regular_polygon: need >= 3 sides");
        if (!(circumradius > 0.0))
            throw std::invalid_argument("ConvexDomain::regular_polygon: radius must be positive");
        std::vector<std::array<double, 2>> verts;
        for (int i = 0; i < sides; ++i) {
            const double th = 2.0 * std::numbers::pi * double(i) / double(sides);
            verts.push_back({circumradius * std::cos(th), circumradius * std::sin(th)});
        }
        return polygon(std::move(verts));
    }

    int dim() const { return dim_; }

    bool is_ball() const { return std::holds_alternative<Ball>(payload_); }
    bool is_box() const { return std::holds_alternative<Box>(payload_); }
    bool is_polygon() const { return std::holds_alternative<Poly>(payload_); }

    // 2D polygon introspection (face normals point outward, unit length).
    const std::vector<std::array<double, 2>>& polygon_vertices() const {
        return require_poly().vertices;
    }
    const std::vector<std::array<double, 2>>& polygon_normals() const {
        return require_poly().normals;
    }
    const std::vector<double>& polygon_offsets() const { return require_poly().offsets; }

    const std::vector<double>& box_lo() const { return require_box().lo; }
    const std::vector<double>& box_hi() const { return require_box().hi; }

    double ball_radius() const { return require_ball().radius; }
    const std::vector<double>& ball_centre() const { return require_ball().centre; }

    // Positive strictly inside, negative outside.  Exact distance for boxes
    // and balls; for polygons the minimum face slack, which lower-bounds the
    // true distance from inside.
    double boundary_gap(std::span<const double> x) const {
        check(x);
        if (const auto* b = std::get_if<Box>(&payload_)) {
            double gap = std::numeric_limits<double>::infinity();
            for (int i = 0; i < dim_; ++i) {
                gap = std::min(gap, x[std::size_t(i)] - b->lo[std::size_t(i)]);
                gap = std::min(gap, b->hi[std::size_t(i)] - x[std::size_t(i)]);
            }
            return gap;
        }
        if (const auto* s = std::get_if<Ball>(&payload_)) {
            double r2 = 0.0;
            for (int i = 0; i < dim_; ++i) {
                const double d = x[std::size_t(i)] - s->centre[std::size_t(i)];
                r2 += d * d;
            }
            return s->radius - std::sqrt(r2);
        }
        const auto& p = std::get<Poly>(payload_);
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t f = 0; f < p.normals.size(); ++f)
            gap = std::min(gap, p.offsets[f] - p.normals[f][0] * x[0] - p.normals[f][1] * x[1]);
        return gap;
    }

    bool contains(std::span<const double> x, double margin = 0.0) const {
        return boundary_gap(x) > margin;
    }

    // Distance along the unit direction d from the interior point x to the
    // boundary.  Exact: faces are hyperplanes, the sphere is a quadratic.
    double ray_exit(std::span<const double> x, std::span<const double> d) const {
        check(x);
        if (int(d.size()) != dim_)
            throw std::invalid_argument("ConvexDomain::ray_exit: direction dimension mismatch");
        if (const auto* b = std::get_if<Box>(&payload_)) {
            double t = std::numeric_limits<double>::infinity();
            for (int i = 0; i < dim_; ++i) {
                const double di = d[std::size_t(i)];
                if (di > 1e-15)
                    t = std::min(t, (b->hi[std::size_t(i)] - x[std::size_t(i)]) / di);
                else if (di < -1e-15)
                    t = std::min(t, (b->lo[std::size_t(i)] - x[std::size_t(i)]) / di);
            }
            return t;
        }
        if (const auto* s = std::get_if<Ball>(&payload_)) {
            double xd = 0.0, xx = 0.0;
            for (int i = 0; i < dim_; ++i) {
                const double y = x[std::size_t(i)] - s->centre[std::size_t(i)];
                xd += y * d[std::size_t(i)];
                xx += y * y;
            }
            const double disc = xd * xd + s->radius * s->radius - xx;
            return -xd + std::sqrt(std::max(disc, 0.0));
        }
        const auto& p = std::get<Poly>(payload_);
        double t = std::numeric_limits<double>::infinity();
        for (std::size_t f = 0; f < p.normals.size(); ++f) {
            const double nd = p.normals[f][0] * d[0] + p.normals[f][1] * d[1];
            if (nd > 1e-15) {
                const double slack = p.offsets[f] - p.normals[f][0] * x[0] - p.normals[f][1] * x[1];
                t = std::min(t, slack / nd);
            }
        }
        return t;
    }

    std::pair<std::vector<double>, std::vector<double>> bounding_box() const {
        if (const auto* b = std::get_if<Box>(&payload_)) return {b->lo, b->hi};
        if (const auto* s = std::get_if<Ball>(&payload_)) {
            std::vector<double> lo = s->centre, hi = s->centre;
            for (int i = 0; i < dim_; ++i) {
                lo[std::size_t(i)] -= s->radius;
                hi[std::size_t(i)] += s->radius;
            }
            return {lo, hi};
        }
        const auto& p = std::get<Poly>(payload_);
        return {p.lo, p.hi};
    }

  private:
    struct Box {
        std::vector<double> lo, hi;
    };
    struct Ball {
        std::vector<double> centre;
        double radius = 0.0;
    };
    struct Poly {
        std::vector<std::array<double, 2>> vertices;  // CCW
        std::vector<std::array<double, 2>> normals;   // unit outward, per edge
        std::vector<double> offsets;                  // <n, x> <= offset
        std::vector<double> lo, hi;
    };

    void check(std::span<const double> x) const {
        if (int(x.size()) != dim_)
            throw std::invalid_argument("ConvexDomain: point dimension mismatch");
    }

    const Poly& require_poly() const {
        const auto* p = std::get_if<Poly>(&payload_);
        if (!p) throw std::invalid_argument("ConvexDomain: not a polygon");
        return *p;
    }
    const Box& require_box() const {
        const auto* b = std::get_if<Box>(&payload_);
        if (!b) throw std::invalid_argument("ConvexDomain: not a box");
        return *b;
    }
    const Ball& require_ball() const {
        const auto* b = std::get_if<Ball>(&payload_);
        if (!b) throw std::invalid_argument("ConvexDomain: not a ball");
        return *b;
    }

    int dim_ = 0;
    std::variant<Box, Ball, Poly> payload_;
};

}  // namespace trunclap
