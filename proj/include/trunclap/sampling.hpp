#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace trunclap {

// Van der Corput radical inverse in the given base.  For i >= 1 the result
// lies strictly inside (0, 1), which is what we rely on when mapping sample
// points into open boxes: the sequence never lands exactly on a boundary.
inline double radical_inverse(std::uint64_t i, std::uint32_t base) {
    double inv_base = 1.0 / static_cast<double>(base);
    double scale = inv_base;
    double result = 0.0;
    while (i > 0) {
        result += static_cast<double>(i % base) * scale;
        i /= base;
        scale *= inv_base;
    }
    return result;
}

// Halton sequence over (0,1)^dim.  Low-discrepancy and fully deterministic,
// so sampled checks are reproducible without carrying RNG state around.
class HaltonSequence {
  public:
    explicit HaltonSequence(int dim, std::uint64_t start_index = 1)
        : dim_(dim), index_(start_index) {
        if (dim < 1 || dim > int(sizeof(primes_) / sizeof(primes_[0])))
            throw std::invalid_argument("HaltonSequence: unsupported dimension");
        if (start_index == 0)
            throw std::invalid_argument("HaltonSequence: start index must be >= 1");
    }

    int dim() const { return dim_; }

    // Next point in (0,1)^dim.
    std::vector<double> next() {
        std::vector<double> x(dim_);
        for (int d = 0; d < dim_; ++d)
            x[d] = radical_inverse(index_, primes_[d]);
        ++index_;
        return x;
    }

    // Next point mapped affinely into the open box (lo, hi)^dim given
    // per-coordinate bounds.
    std::vector<double> next_in_box(std::span<const double> lo, std::span<const double> hi) {
        if (int(lo.size()) != dim_ || int(hi.size()) != dim_)
            throw std::invalid_argument("HaltonSequence: bounds dimension mismatch");
        std::vector<double> x = next();
        for (int d = 0; d < dim_; ++d)
            x[d] = lo[d] + x[d] * (hi[d] - lo[d]);
        return x;
    }

  private:
    static constexpr std::uint32_t primes_[16] = {2,  3,  5,  7,  11, 13, 17, 19,
                                                  23, 29, 31, 37, 41, 43, 47, 53};
    int dim_;
    std::uint64_t index_;
};

}  // namespace trunclap
