#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

// Dense symmetric-matrix kernel: packed storage, a cyclic Jacobi eigensolver,
// and the "sum of k extreme eigenvalues" operators that drive everything else
// in this library.  Dimensions are small (a Hessian in dimension <= 16), so
// the solver favours accuracy and simplicity over asymptotics: Jacobi delivers
// eigenvalues to a few ulps of the spectral norm, which the residual checks
// downstream actually need, and has no trouble with the clustered spectra
// produced by highly symmetric test matrices.

namespace trunclap {

template <typename Real = double>
class SymMatrixT {
  public:
    explicit SymMatrixT(int dim) : dim_(dim) {
        if (dim < 1) throw std::invalid_argument("SymMatrix: dimension must be >= 1");
        data_.assign(std::size_t(dim) * (dim + 1) / 2, Real(0));
    }

    static SymMatrixT diagonal(std::span<const Real> entries) {
        SymMatrixT m(int(entries.size()));
        for (int i = 0; i < m.dim_; ++i) m.at(i, i) = entries[std::size_t(i)];
        return m;
    }

    static SymMatrixT identity(int dim) {
        SymMatrixT m(dim);
        for (int i = 0; i < dim; ++i) m.at(i, i) = Real(1);
        return m;
    }

    int dim() const { return dim_; }

    Real operator()(int i, int j) const { return data_[slot(i, j)]; }

    // Mutable reference to the single stored copy of entry (i,j) == (j,i).
    Real& at(int i, int j) { return data_[slot(i, j)]; }

    SymMatrixT operator+(const SymMatrixT& other) const { return combined(other, Real(1)); }
    SymMatrixT operator-(const SymMatrixT& other) const { return combined(other, Real(-1)); }

    SymMatrixT operator*(Real scale) const {
        SymMatrixT r = *this;
        for (Real& v : r.data_) v *= scale;
        return r;
    }

    template <typename Other>
    SymMatrixT<Other> cast() const {
        SymMatrixT<Other> r(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j <= i; ++j) r.at(i, j) = static_cast<Other>((*this)(i, j));
        return r;
    }

    // Quadratic form <M v, v>.
    Real quad_form(std::span<const Real> v) const {
        check_vector(v);
        Real sum = 0;
        for (int i = 0; i < dim_; ++i) {
            Real row = 0;
            for (int j = 0; j < dim_; ++j) row += (*this)(i, j) * v[std::size_t(j)];
            sum += row * v[std::size_t(i)];
        }
        return sum;
    }

    Real frobenius_norm() const {
        Real sum = 0;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) sum += (*this)(i, j) * (*this)(i, j);
        using std::sqrt;
        return sqrt(sum);
    }

  private:
    std::size_t slot(int i, int j) const {
        if (i < 0 || j < 0 || i >= dim_ || j >= dim_)
            throw std::invalid_argument("SymMatrix: index out of range");
        if (i < j) std::swap(i, j);
        return std::size_t(i) * (i + 1) / 2 + j;
    }

    void check_vector(std::span<const Real> v) const {
        if (int(v.size()) != dim_)
            throw std::invalid_argument("SymMatrix: vector dimension mismatch");
    }

    SymMatrixT combined(const SymMatrixT& other, Real sign) const {
        if (other.dim_ != dim_)
            throw std::invalid_argument("SymMatrix: dimension mismatch");
        SymMatrixT r = *this;
        for (std::size_t s = 0; s < data_.size(); ++s) r.data_[s] += sign * other.data_[s];
        return r;
    }

    int dim_;
    std::vector<Real> data_;
};

using SymMatrix = SymMatrixT<double>;

// Eigenvalues sorted ascending.
template <typename Real = double>
struct SpectrumT {
    std::vector<Real> values;

    int dim() const { return int(values.size()); }
    Real min() const { return values.front(); }
    Real max() const { return values.back(); }
};

using Spectrum = SpectrumT<double>;

template <typename Real = double>
struct EigenDecompositionT {
    std::vector<Real> values;                 // ascending
    std::vector<std::vector<Real>> vectors;   // vectors[j] is unit, pairs with values[j]
};

using EigenDecomposition = EigenDecompositionT<double>;

// Cyclic Jacobi with accumulated rotations.  Sweeps rotate away every
// off-diagonal entry in row order; convergence is quadratic once the
// off-diagonal mass is small, so the sweep cap below is never reached in
// practice (typical counts are 6-12 for dimension 16).
template <typename Real>
EigenDecompositionT<Real> eigen_decompose(const SymMatrixT<Real>& m) {
    const int n = m.dim();
    std::vector<Real> a(std::size_t(n) * n);
    std::vector<Real> v(std::size_t(n) * n, Real(0));
    for (int i = 0; i < n; ++i) {
        v[std::size_t(i) * n + i] = Real(1);
        for (int j = 0; j < n; ++j) a[std::size_t(i) * n + j] = m(i, j);
    }

    const Real frob = m.frobenius_norm();
    const Real stop = frob * std::numeric_limits<Real>::epsilon();

    auto off_norm = [&]() {
        Real s = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += a[std::size_t(i) * n + j] * a[std::size_t(i) * n + j];
        using std::sqrt;
        return sqrt(Real(2) * s);
    };

    for (int sweep = 0; sweep < 100 && off_norm() > stop; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const Real apq = a[std::size_t(p) * n + q];
                if (apq == Real(0)) continue;
                const Real app = a[std::size_t(p) * n + p];
                const Real aqq = a[std::size_t(q) * n + q];
                const Real theta = (aqq - app) / (2 * apq);
                using std::sqrt;
                Real t;
                if (std::abs(theta) > Real(1e12)) {
                    t = 1 / (2 * theta);  // avoids overflow in theta^2
                } else {
                    t = (theta >= 0 ? Real(1) : Real(-1)) / (std::abs(theta) + sqrt(theta * theta + 1));
                }
                const Real c = 1 / sqrt(t * t + 1);
                const Real s = t * c;

                for (int i = 0; i < n; ++i) {
                    const Real aip = a[std::size_t(i) * n + p];
                    const Real aiq = a[std::size_t(i) * n + q];
                    a[std::size_t(i) * n + p] = c * aip - s * aiq;
                    a[std::size_t(i) * n + q] = s * aip + c * aiq;
                }
                for (int j = 0; j < n; ++j) {
                    const Real apj = a[std::size_t(p) * n + j];
                    const Real aqj = a[std::size_t(q) * n + j];
                    a[std::size_t(p) * n + j] = c * apj - s * aqj;
                    a[std::size_t(q) * n + j] = s * apj + c * aqj;
                }
                for (int i = 0; i < n; ++i) {
                    const Real vip = v[std::size_t(i) * n + p];
                    const Real viq = v[std::size_t(i) * n + q];
                    v[std::size_t(i) * n + p] = c * vip - s * viq;
                    v[std::size_t(i) * n + q] = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        return a[std::size_t(x) * n + x] < a[std::size_t(y) * n + y];
    });

    EigenDecompositionT<Real> out;
    out.values.resize(std::size_t(n));
    out.vectors.assign(std::size_t(n), std::vector<Real>(std::size_t(n)));
    for (int j = 0; j < n; ++j) {
        out.values[std::size_t(j)] = a[std::size_t(order[std::size_t(j)]) * n + order[std::size_t(j)]];
        for (int i = 0; i < n; ++i)
            out.vectors[std::size_t(j)][std::size_t(i)] = v[std::size_t(i) * n + order[std::size_t(j)]];
    }
    return out;
}

template <typename Real>
SpectrumT<Real> spectrum(const SymMatrixT<Real>& m) {
    return SpectrumT<Real>{eigen_decompose(m).values};
}

template <typename Real>
Real spectral_norm(const SymMatrixT<Real>& m) {
    SpectrumT<Real> s = spectrum(m);
    return std::max(std::abs(s.min()), std::abs(s.max()));
}

namespace detail {
template <typename Real>
void check_order(const SymMatrixT<Real>& m, int k) {
    if (k < 1 || k > m.dim())
        throw std::invalid_argument("truncated trace: order k must satisfy 1 <= k <= dim");
}
}  // namespace detail

// Sum of the k largest eigenvalues.
template <typename Real>
Real pk_plus(const SymMatrixT<Real>& m, int k) {
    detail::check_order(m, k);
    SpectrumT<Real> s = spectrum(m);
    Real sum = 0;
    for (int i = m.dim() - k; i < m.dim(); ++i) sum += s.values[std::size_t(i)];
    return sum;
}

// Sum of the k smallest eigenvalues.
template <typename Real>
Real pk_minus(const SymMatrixT<Real>& m, int k) {
    detail::check_order(m, k);
    SpectrumT<Real> s = spectrum(m);
    Real sum = 0;
    for (int i = 0; i < k; ++i) sum += s.values[std::size_t(i)];
    return sum;
}

// A k-tuple of (supposedly) orthonormal vectors in dimension dim.
template <typename Real = double>
struct FrameT {
    int dim = 0;
    std::vector<std::vector<Real>> vectors;

    int order() const { return int(vectors.size()); }

    // Largest deviation of the Gram matrix from the identity.
    Real orthonormality_defect() const {
        Real worst = 0;
        for (std::size_t i = 0; i < vectors.size(); ++i) {
            for (std::size_t j = i; j < vectors.size(); ++j) {
                Real dot = 0;
                for (int c = 0; c < dim; ++c)
                    dot += vectors[i][std::size_t(c)] * vectors[j][std::size_t(c)];
                const Real target = (i == j) ? Real(1) : Real(0);
                worst = std::max(worst, std::abs(dot - target));
            }
        }
        return worst;
    }
};

using Frame = FrameT<double>;

inline constexpr double kFrameTolerance = 1e-12;

// Sum_i <M v_i, v_i> over the frame vectors.  Maximising this over all
// orthonormal k-frames yields pk_plus, minimising yields pk_minus; the frame
// must be genuinely orthonormal for that interpretation to hold, so a sloppy
// frame is rejected rather than silently accepted.
template <typename Real>
Real frame_sum(const SymMatrixT<Real>& m, const FrameT<Real>& frame) {
    if (frame.dim != m.dim())
        throw std::invalid_argument("frame_sum: frame dimension mismatch");
    if (frame.order() < 1 || frame.order() > m.dim())
        throw std::invalid_argument("frame_sum: frame order must satisfy 1 <= k <= dim");
    for (const auto& vec : frame.vectors)
        if (int(vec.size()) != frame.dim)
            throw std::invalid_argument("frame_sum: frame vector has wrong length");
    if (double(frame.orthonormality_defect()) > kFrameTolerance)
        throw std::invalid_argument("frame_sum: frame is not orthonormal within 1e-12");
    Real sum = 0;
    for (const auto& vec : frame.vectors) sum += m.quad_form(vec);
    return sum;
}

// The matrix with constant diagonal a and constant off-diagonal b.  Rank-one
// structure aside from the diagonal shift: M = (a - b) I + b 11^T.
template <typename Real = double>
SymMatrixT<Real> special_matrix(Real a, Real b, int n) {
    if (n < 2) throw std::invalid_argument("special_matrix: dimension must be >= 2");
    SymMatrixT<Real> m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) m.at(i, j) = (i == j) ? a : b;
    return m;
}

// Closed-form spectrum of special_matrix: a - b with multiplicity n - 1 (the
// eigenspace is the hyperplane of zero-sum vectors) and the simple eigenvalue
// a + (n-1) b along the all-ones direction.  Degenerates cleanly at b = 0 to
// n copies of a.
template <typename Real = double>
SpectrumT<Real> special_spectrum(Real a, Real b, int n) {
    if (n < 2) throw std::invalid_argument("special_spectrum: dimension must be >= 2");
    std::vector<Real> vals(std::size_t(n), a - b);
    vals.back() = a + Real(n - 1) * b;
    std::sort(vals.begin(), vals.end());
    return SpectrumT<Real>{std::move(vals)};
}

}  // namespace trunclap
