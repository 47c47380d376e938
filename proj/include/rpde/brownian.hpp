#ifndef RPDE_BROWNIAN_HPP
#define RPDE_BROWNIAN_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "rpde/rng.hpp"

namespace rpde {

// Brownian increments of a dim-dimensional path on the dyadic grid with
// 2^level steps of size dt = horizon * 2^-level.  Increment k lives at
// incr[k*dim .. k*dim+dim-1].  Paths are immutable once sampled.
struct DyadicPath {
    int level = 0;
    int dim = 1;
    double horizon = 1.0;
    std::vector<double> incr;

    std::uint64_t steps() const { return std::uint64_t(1) << level; }
    double dt() const { return horizon * std::ldexp(1.0, -level); }
    std::span<const double> increment(std::uint64_t k) const {
        return {incr.data() + k * static_cast<std::uint64_t>(dim), static_cast<std::size_t>(dim)};
    }
};

// 2^level iid N(0, dt * I) increment vectors, deterministic given the stream.
DyadicPath sample_path(int level, int dim, RngStream& rng, double horizon = 1.0);

// Level n-1 path whose increment k is incr[2k] + incr[2k+1], exactly.
DyadicPath coarsen(const DyadicPath& path);

// Consecutive increment pairs (2m, 2m+1) exchanged; level and dim unchanged.
DyadicPath antithetic_swap(const DyadicPath& path);

// Levy-area proxy for one step: off-diagonal dB_i dB_j / 2, diagonal
// (dB_i^2 - dt) / 2.  Row-major dim x dim output.
void levy_proxy_into(std::span<const double> increment, double dt, std::span<double> out);

struct LevyProxy {
    int dim = 1;
    std::vector<double> a;  // row-major
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * dim + j]; }
};

LevyProxy levy_proxy(std::span<const double> increment, double dt);

}  // namespace rpde

#endif
