#include "rpde/scheme.hpp"

#include <cmath>

#include "rpde/errors.hpp"

namespace rpde {

std::uint64_t level_cost_units(int level, double gamma, const FieldSpec& field) {
    const std::uint64_t steps = std::uint64_t(1) << level;
    return steps * (1 + static_cast<std::uint64_t>(effective_terms(field, level, gamma)));
}

SchemeResult num_sol(std::span<const double> x, int level, const DyadicPath& path,
                     FieldRealization& realization, const ParamSet& params,
                     const Problem& problem) {
    const int d = problem.d;
    const int dp = problem.dprime;
    if (static_cast<int>(x.size()) != d)
        throw config_error("DimensionMismatch: starting point has wrong dimension");
    if (path.dim != dp) throw config_error("DimensionMismatch: path dim != d'");
    if (path.level != level) throw config_error("DimensionMismatch: path level != requested level");

    const double dt = path.dt();
    const std::uint64_t steps = path.steps();

    std::vector<double> state(x.begin(), x.end());
    std::vector<double> next(static_cast<std::size_t>(d));
    std::vector<double> mu(static_cast<std::size_t>(d));
    std::vector<double> sig(static_cast<std::size_t>(d) * dp);
    std::vector<double> jac(static_cast<std::size_t>(d) * dp * d);
    std::vector<double> atil(static_cast<std::size_t>(dp) * dp);

    for (std::uint64_t k = 0; k < steps; ++k) {
        const auto db = path.increment(k);
        realization.drift(level, params.gamma, state, mu);
        problem.sigma(state, sig);
        problem.sigma_jac(state, jac);
        levy_proxy_into(db, dt, atil);

        for (int i = 0; i < d; ++i) {
            double s = state[static_cast<std::size_t>(i)] + mu[static_cast<std::size_t>(i)] * dt;
            for (int j = 0; j < dp; ++j)
                s += sig[static_cast<std::size_t>(i) * dp + j] * db[static_cast<std::size_t>(j)];
            for (int j = 0; j < dp; ++j)
                for (int l = 0; l < d; ++l) {
                    const double dsig = jac[(static_cast<std::size_t>(i) * dp + j) * d + l];
                    if (dsig == 0.0) continue;
                    double inner = 0.0;
                    for (int m = 0; m < dp; ++m)
                        inner += sig[static_cast<std::size_t>(l) * dp + m] *
                                 atil[static_cast<std::size_t>(m) * dp + j];
                    s += dsig * inner;
                }
            next[static_cast<std::size_t>(i)] = s;
        }
        state.swap(next);
    }

    SchemeResult result;
    result.terminal = std::move(state);
    result.cost_units = level_cost_units(level, params.gamma, problem.field);
    return result;
}

DeltaResult delta_gen(std::span<const double> x, int level, RngStream& rng,
                      FieldRealization& realization, const ParamSet& params,
                      const Problem& problem) {
    if (level < 0) throw config_error("delta_gen: level must be >= 0");

    DyadicPath fine = sample_path(level + 1, problem.dprime, rng, problem.horizon);
    const DyadicPath anti = antithetic_swap(fine);
    const DyadicPath coarse = coarsen(fine);

    const SchemeResult xf = num_sol(x, level + 1, fine, realization, params, problem);
    const SchemeResult xa = num_sol(x, level + 1, anti, realization, params, problem);
    const SchemeResult xc = num_sol(x, level, coarse, realization, params, problem);

    DeltaResult result;
    result.delta = 0.5 * (problem.payoff(xf.terminal) + problem.payoff(xa.terminal)) -
                   problem.payoff(xc.terminal);
    result.cost_units = xc.cost_units + xf.cost_units + xa.cost_units;
    result.fine = std::move(fine);
    return result;
}

}  // namespace rpde
