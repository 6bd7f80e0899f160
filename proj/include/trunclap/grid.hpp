#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "trunclap/convex_domain.hpp"

// Uniform lattice over a convex domain plus the wide stencil's direction set.
// Fields live on the full bounding lattice with exterior nodes pinned to the
// boundary value (zero), which keeps the sweep kernels branch-free: a
// neighbour read either lands on a valid interior value or on the Dirichlet
// datum, never on garbage.

namespace trunclap {

struct DirectionSet {
    int dim = 0;
    int order = 0;  // max-norm radius of the integer stencil vectors
    std::vector<std::vector<int>> dirs;

    // All coprime integer vectors of max-norm <= order, one per +/- pair
    // (canonical sign: first nonzero entry positive), axes included,
    // lexicographically sorted so the set is reproducible.
    static DirectionSet make(int dim, int order) {
        if (dim < 1) throw std::invalid_argument("DirectionSet: dimension must be positive");
        if (order < 1) throw std::invalid_argument("DirectionSet: order must be positive");
        DirectionSet ds;
        ds.dim = dim;
        ds.order = order;

        std::vector<int> v(std::size_t(dim), -order);
        while (true) {
            bool zero = true, canonical = false;
            for (int i = 0; i < dim; ++i) {
                if (v[std::size_t(i)] != 0) {
                    zero = false;
                    canonical = v[std::size_t(i)] > 0;
                    break;
                }
            }
            if (!zero && canonical) {
                int g = 0;
                for (int i = 0; i < dim; ++i) g = std::gcd(g, std::abs(v[std::size_t(i)]));
                if (g == 1) ds.dirs.push_back(v);
            }
            int axis = dim - 1;
            while (axis >= 0 && v[std::size_t(axis)] == order) {
                v[std::size_t(axis)] = -order;
                --axis;
            }
            if (axis < 0) break;
            ++v[std::size_t(axis)];
        }
        std::sort(ds.dirs.begin(), ds.dirs.end());
        return ds;
    }

    std::size_t size() const { return dirs.size(); }

    // Largest angular gap covered by the set: max over unit vectors of the
    // angle to the nearest stencil direction (estimated on a dense sample).
    // Useful for consistency-order experiments, not used by the solver.
    double direction_resolution(int samples_per_axis = 64) const {
        double worst = 0.0;
        std::vector<double> unit(static_cast<std::size_t>(dim));
        std::vector<int> idx(std::size_t(dim), 0);
        while (true) {
            double norm2 = 0.0;
            for (int i = 0; i < dim; ++i) {
                unit[std::size_t(i)] =
                    -1.0 + 2.0 * double(idx[std::size_t(i)]) / double(samples_per_axis - 1);
                norm2 += unit[std::size_t(i)] * unit[std::size_t(i)];
            }
            if (norm2 > 1e-12) {
                const double norm = std::sqrt(norm2);
                double best = 2.0;
                for (const auto& d : dirs) {
                    double dot = 0.0, dd = 0.0;
                    for (int i = 0; i < dim; ++i) {
                        dot += unit[std::size_t(i)] * double(d[std::size_t(i)]);
                        dd += double(d[std::size_t(i)]) * double(d[std::size_t(i)]);
                    }
                    best = std::min(best, std::acos(std::min(1.0, std::abs(dot) / (norm * std::sqrt(dd)))));
                }
                worst = std::max(worst, best);
            }
            int axis = dim - 1;
            while (axis >= 0 && idx[std::size_t(axis)] == samples_per_axis - 1) {
                idx[std::size_t(axis)] = 0;
                --axis;
            }
            if (axis < 0) break;
            ++idx[std::size_t(axis)];
        }
        return worst;
    }
};

class GridDomain {
  public:
    GridDomain(ConvexDomain domain, double h) : domain_(std::move(domain)), h_(h) {
        if (!(h > 0.0)) throw std::invalid_argument("GridDomain: spacing must be positive");
        const int n = domain_.dim();
        if (n != 2 && n != 3)
            throw std::invalid_argument("GridDomain: only dimensions 2 and 3 are gridded");

        auto [lo, hi] = domain_.bounding_box();
        origin_ = lo;
        shape_.assign(std::size_t(n), 0);
        for (int i = 0; i < n; ++i) {
            // pad by one layer so every interior node has lattice neighbours
            origin_[std::size_t(i)] -= h_;
            const double extent = hi[std::size_t(i)] - origin_[std::size_t(i)] + h_;
            shape_[std::size_t(i)] = std::int64_t(std::ceil(extent / h_)) + 1;
        }

        strides_.assign(std::size_t(n), 1);
        for (int i = n - 2; i >= 0; --i)
            strides_[std::size_t(i)] = strides_[std::size_t(i + 1)] * shape_[std::size_t(i + 1)];
        total_ = strides_[0] * shape_[0];

        // Nodes within a hair of the boundary count as boundary: their value
        // is the Dirichlet datum and they never get an equation.
        const double margin = 1e-9 * h_;
        interior_rank_.assign(std::size_t(total_), -1);
        std::vector<double> x(static_cast<std::size_t>(n));
        std::vector<std::int64_t> idx(std::size_t(n), 0);
        for (std::int64_t flat = 0; flat < total_; ++flat) {
            unflatten(flat, idx);
            node_point(idx, x);
            if (domain_.boundary_gap(x) > margin) {
                interior_rank_[std::size_t(flat)] = std::int64_t(interior_nodes_.size());
                interior_nodes_.push_back(flat);
            }
        }
        if (interior_nodes_.empty())
            throw std::invalid_argument("GridDomain: no interior nodes at this spacing");
    }

    const ConvexDomain& domain() const { return domain_; }
    int dim() const { return domain_.dim(); }
    double h() const { return h_; }
    const std::vector<std::int64_t>& shape() const { return shape_; }
    const std::vector<std::int64_t>& strides() const { return strides_; }
    const std::vector<double>& origin() const { return origin_; }
    std::int64_t node_count() const { return total_; }
    std::int64_t interior_count() const { return std::int64_t(interior_nodes_.size()); }
    const std::vector<std::int64_t>& interior_nodes() const { return interior_nodes_; }

    bool is_interior(std::int64_t flat) const { return interior_rank_[std::size_t(flat)] >= 0; }
    std::int64_t interior_rank(std::int64_t flat) const { return interior_rank_[std::size_t(flat)]; }

    void unflatten(std::int64_t flat, std::vector<std::int64_t>& idx) const {
        for (std::size_t i = 0; i < shape_.size(); ++i) {
            idx[i] = flat / strides_[i];
            flat -= idx[i] * strides_[i];
        }
    }

    std::int64_t flatten(std::span<const std::int64_t> idx) const {
        std::int64_t flat = 0;
        for (std::size_t i = 0; i < shape_.size(); ++i) flat += idx[i] * strides_[i];
        return flat;
    }

    void node_point(std::span<const std::int64_t> idx, std::vector<double>& x) const {
        for (std::size_t i = 0; i < shape_.size(); ++i)
            x[i] = origin_[i] + h_ * double(idx[i]);
    }

    std::vector<double> point_of(std::int64_t flat) const {
        std::vector<std::int64_t> idx(static_cast<std::size_t>(dim()));
        std::vector<double> x(static_cast<std::size_t>(dim()));
        unflatten(flat, idx);
        node_point(idx, x);
        return x;
    }

    // Nearest lattice node to a physical point (no interiority promise).
    std::int64_t nearest_node(std::span<const double> x) const {
        std::int64_t flat = 0;
        for (std::size_t i = 0; i < shape_.size(); ++i) {
            auto j = std::int64_t(std::llround((x[i] - origin_[i]) / h_));
            j = std::clamp(j, std::int64_t(0), shape_[i] - 1);
            flat += j * strides_[i];
        }
        return flat;
    }

  private:
    ConvexDomain domain_;
    double h_;
    std::vector<double> origin_;
    std::vector<std::int64_t> shape_;
    std::vector<std::int64_t> strides_;
    std::int64_t total_ = 0;
    std::vector<std::int64_t> interior_rank_;   // -1 outside/boundary
    std::vector<std::int64_t> interior_nodes_;  // flat index per rank
};

// One value per lattice node; exterior entries stay at the boundary value.
class ScalarField {
  public:
    explicit ScalarField(const GridDomain& grid)
        : grid_(&grid), values_(std::size_t(grid.node_count()), 0.0) {}

    const GridDomain& grid() const { return *grid_; }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    double operator[](std::int64_t flat) const { return values_[std::size_t(flat)]; }
    double& operator[](std::int64_t flat) { return values_[std::size_t(flat)]; }

    void fill_interior(double v) {
        for (auto flat : grid_->interior_nodes()) values_[std::size_t(flat)] = v;
    }

    template <typename F>
    void assign_interior(F&& f) {
        std::vector<std::int64_t> idx(static_cast<std::size_t>(grid_->dim()));
        std::vector<double> x(static_cast<std::size_t>(grid_->dim()));
        for (auto flat : grid_->interior_nodes()) {
            grid_->unflatten(flat, idx);
            grid_->node_point(idx, x);
            values_[std::size_t(flat)] = f(std::span<const double>(x));
        }
    }

    double sup_norm() const {
        double m = 0.0;
        for (auto flat : grid_->interior_nodes())
            m = std::max(m, std::abs(values_[std::size_t(flat)]));
        return m;
    }

    // Multilinear interpolation at an arbitrary point (clamped to the
    // lattice hull; exterior nodes contribute their pinned value).
    double sample(std::span<const double> x) const {
        const int n = grid_->dim();
        if (int(x.size()) != n) throw std::invalid_argument("ScalarField::sample: bad point");
        double value = 0.0;
        std::vector<std::int64_t> cell(static_cast<std::size_t>(n));
        std::vector<double> frac(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double s = (x[std::size_t(i)] - grid_->origin()[std::size_t(i)]) / grid_->h();
            double c = std::floor(s);
            c = std::clamp(c, 0.0, double(grid_->shape()[std::size_t(i)] - 2));
            cell[std::size_t(i)] = std::int64_t(c);
            frac[std::size_t(i)] = std::clamp(s - c, 0.0, 1.0);
        }
        for (int corner = 0; corner < (1 << n); ++corner) {
            double w = 1.0;
            std::int64_t flat = 0;
            for (int i = 0; i < n; ++i) {
                const bool hi = (corner >> i) & 1;
                w *= hi ? frac[std::size_t(i)] : 1.0 - frac[std::size_t(i)];
                flat += (cell[std::size_t(i)] + (hi ? 1 : 0)) * grid_->strides()[std::size_t(i)];
            }
            value += w * values_[std::size_t(flat)];
        }
        return value;
    }

    double min_interior() const {
        double m = std::numeric_limits<double>::infinity();
        for (auto flat : grid_->interior_nodes())
            m = std::min(m, values_[std::size_t(flat)]);
        return m;
    }

    double max_interior() const {
        double m = -std::numeric_limits<double>::infinity();
        for (auto flat : grid_->interior_nodes())
            m = std::max(m, values_[std::size_t(flat)]);
        return m;
    }

  private:
    const GridDomain* grid_;
    std::vector<double> values_;
};

namespace io {

namespace detail {

template <typename T>
void put_le(std::ostream& out, T v) {
    static_assert(sizeof(T) == 8);
    unsigned char buf[8];
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) buf[i] = (unsigned char)((bits >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), 8);
}

template <typename T>
T get_le(std::istream& in) {
    static_assert(sizeof(T) == 8);
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    if (!in) throw std::runtime_error("field deserialize: truncated stream");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t(buf[i]) << (8 * i);
    T v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace detail

// Layout: dim, shape, spacing, bounding box (origin then far corner), then
// the node values in row-major order.  All scalars little-endian 64-bit.
inline void write_field(std::ostream& out, const ScalarField& field) {
    const auto& g = field.grid();
    detail::put_le<std::int64_t>(out, g.dim());
    for (auto s : g.shape()) detail::put_le<std::int64_t>(out, s);
    detail::put_le<double>(out, g.h());
    for (int i = 0; i < g.dim(); ++i) detail::put_le<double>(out, g.origin()[std::size_t(i)]);
    for (int i = 0; i < g.dim(); ++i)
        detail::put_le<double>(out,
                               g.origin()[std::size_t(i)] +
                                   g.h() * double(g.shape()[std::size_t(i)] - 1));
    for (double v : field.values()) detail::put_le<double>(out, v);
}

struct RawField {
    int dim = 0;
    std::vector<std::int64_t> shape;
    double h = 0.0;
    std::vector<double> lo, hi;
    std::vector<double> values;
};

inline RawField read_field(std::istream& in) {
    RawField raw;
    raw.dim = int(detail::get_le<std::int64_t>(in));
    if (raw.dim < 1 || raw.dim > 3) throw std::runtime_error("field deserialize: bad dimension");
    std::int64_t total = 1;
    for (int i = 0; i < raw.dim; ++i) {
        raw.shape.push_back(detail::get_le<std::int64_t>(in));
        if (raw.shape.back() < 1) throw std::runtime_error("field deserialize: bad shape");
        total *= raw.shape.back();
    }
    raw.h = detail::get_le<double>(in);
    for (int i = 0; i < raw.dim; ++i) raw.lo.push_back(detail::get_le<double>(in));
    for (int i = 0; i < raw.dim; ++i) raw.hi.push_back(detail::get_le<double>(in));
    raw.values.resize(std::size_t(total));
    for (auto& v : raw.values) v = detail::get_le<double>(in);
    return raw;
}

inline void write_field_csv(std::ostream& out, const ScalarField& field) {
    const auto& g = field.grid();
    const int n = g.dim();
    out << "x0";
    for (int i = 1; i < n; ++i) out << ",x" << i;
    out << ",value,interior\n";
    char buf[64];
    std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
    std::vector<double> x(static_cast<std::size_t>(n));
    for (std::int64_t flat = 0; flat < g.node_count(); ++flat) {
        g.unflatten(flat, idx);
        g.node_point(idx, x);
        for (int i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", x[std::size_t(i)]);
            out << (i ? "," : "") << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g", field[flat]);
        out << ',' << buf << ',' << (g.is_interior(flat) ? 1 : 0) << '\n';
    }
}

}  // namespace io

}  // namespace trunclap
