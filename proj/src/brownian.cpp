#include "rpde/brownian.hpp"

#include <cmath>

#include "rpde/errors.hpp"

namespace rpde {

DyadicPath sample_path(int level, int dim, RngStream& rng, double horizon) {
    if (level < 0) throw config_error("sample_path: level must be >= 0");
    if (dim < 1) throw config_error("sample_path: dim must be >= 1");
    if (!(horizon > 0.0)) throw config_error("sample_path: horizon must be positive");

    DyadicPath path;
    path.level = level;
    path.dim = dim;
    path.horizon = horizon;
    const std::uint64_t n = path.steps();
    const double sd = std::sqrt(path.dt());
    path.incr.resize(n * static_cast<std::uint64_t>(dim));
    for (auto& v : path.incr) v = sd * rng.normal();
    return path;
}

DyadicPath coarsen(const DyadicPath& path) {
    if (path.level < 1) throw config_error("CoarsenAtLevelZero: cannot coarsen a level-0 path");

    DyadicPath out;
    out.level = path.level - 1;
    out.dim = path.dim;
    out.horizon = path.horizon;
    const std::uint64_t n = out.steps();
    const std::uint64_t d = static_cast<std::uint64_t>(path.dim);
    out.incr.resize(n * d);
    for (std::uint64_t k = 0; k < n; ++k)
        for (std::uint64_t j = 0; j < d; ++j)
            out.incr[k * d + j] = path.incr[2 * k * d + j] + path.incr[(2 * k + 1) * d + j];
    return out;
}

DyadicPath antithetic_swap(const DyadicPath& path) {
    if (path.level < 1) throw config_error("SwapAtLevelZero: no increment pairs at level 0");

    DyadicPath out = path;
    const std::uint64_t d = static_cast<std::uint64_t>(path.dim);
    const std::uint64_t pairs = path.steps() / 2;
    for (std::uint64_t m = 0; m < pairs; ++m)
        for (std::uint64_t j = 0; j < d; ++j)
            std::swap(out.incr[2 * m * d + j], out.incr[(2 * m + 1) * d + j]);
    return out;
}

void levy_proxy_into(std::span<const double> increment, double dt, std::span<double> out) {
    const std::size_t d = increment.size();
    for (std::size_t i = 0; i < d; ++i) {
        out[i * d + i] = 0.5 * (increment[i] * increment[i] - dt);
        for (std::size_t j = i + 1; j < d; ++j) {
            const double v = 0.5 * increment[i] * increment[j];
            out[i * d + j] = v;
            out[j * d + i] = v;
        }
    }
}

LevyProxy levy_proxy(std::span<const double> increment, double dt) {
    if (!(dt > 0.0)) throw config_error("levy_proxy: dt must be positive");
    LevyProxy p;
    p.dim = static_cast<int>(increment.size());
    p.a.resize(increment.size() * increment.size());
    levy_proxy_into(increment, dt, p.a);
    return p;
}

}  // namespace rpde
