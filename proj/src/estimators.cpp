#include "rpde/estimators.hpp"

#include <cmath>
#include <limits>

#include "rpde/errors.hpp"

namespace rpde {

double GeometricLaw::pmf(int n) const {
    if (n < 0) return 0.0;
    return (1.0 - std::exp2(-rate)) * std::exp2(-rate * n);
}

int geometric_from_uniform(double u, const GeometricLaw& law) {
    // smallest n with 1 - r^(n+1) >= u, r = 2^-rate
    const double log_r = -law.rate * std::log(2.0);
    const double t = std::log1p(-u) / log_r;
    const long n = static_cast<long>(std::ceil(t - 1.0));
    return n < 0 ? 0 : static_cast<int>(n);
}

int sample_geometric(const GeometricLaw& law, RngStream& rng) {
    if (!(law.rate > 0.0)) throw config_error("geometric law rate must be positive");
    return geometric_from_uniform(rng.uniform01(), law);
}

ZSample unbiased_z(std::span<const double> x, FieldRealization& realization,
                   const ParamSet& params, const Problem& problem, RngStream& rng) {
    const GeometricLaw law{params.theta};
    const int n = sample_geometric(law, rng);
    const int n0 = params.n0;
    // a level this deep could not be simulated in any practical time or memory
    if (n + n0 + 1 > 40) throw numeric_error("inner level draw exceeds the supported range");

    DeltaResult dg = delta_gen(x, n + n0, rng, realization, params, problem);

    // reuse the fine path for the base level: coarsen n+1 times down to n0
    DyadicPath base = std::move(dg.fine);
    for (int lev = n + n0 + 1; lev > n0; --lev) base = coarsen(base);
    const SchemeResult xb = num_sol(x, n0, base, realization, params, problem);

    ZSample z;
    z.base = problem.payoff(xb.terminal);
    z.correction = dg.delta / law.pmf(n);
    z.value = z.base + z.correction;
    z.level_drawn = n;
    z.cost_units = xb.cost_units + dg.cost_units;
    return z;
}

ZSample biased_baseline_z(std::span<const double> x, FieldRealization& realization,
                          const ParamSet& params, const Problem& problem, RngStream& rng) {
    const DyadicPath path = sample_path(params.n0, problem.dprime, rng, problem.horizon);
    const SchemeResult xb = num_sol(x, params.n0, path, realization, params, problem);

    ZSample z;
    z.base = problem.payoff(xb.terminal);
    z.correction = 0.0;
    z.value = z.base;
    z.level_drawn = -1;
    z.cost_units = xb.cost_units;
    return z;
}

double rho(const std::vector<std::vector<double>>& z_block, std::size_t a, std::size_t b,
           const Problem& problem) {
    if (z_block.empty()) throw config_error("IndexRange: empty Z block");
    const std::size_t m = z_block.front().size();
    if (a < 1 || a > b || b > m) throw config_error("IndexRange: need 1 <= a <= b <= m");

    std::vector<double> means(z_block.size());
    for (std::size_t i = 0; i < z_block.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = a - 1; j < b; ++j) s += z_block[i][j];
        means[i] = s / static_cast<double>(b - a + 1);
    }
    return problem.functional(means);
}

namespace {

struct WCore {
    double plugin_term = 0.0;
    double nested_delta = 0.0;  // Delta~ at the realized outer level
    double biased_value = 0.0;
    std::uint64_t z_count = 0;
    std::uint64_t cost_units = 0;
    std::uint64_t biased_cost_units = 0;
};

// Shared body of the W layer at outer level n: one field realization for the
// whole copy, k * 2^(n+n1+1) inner Z draws with per-(i,j) substreams, and the
// three running sums the nested difference needs.
WCore run_w_core(const Problem& problem, const ParamSet& params, const CopyStreams& streams,
                 int outer_level) {
    const std::size_t k = problem.num_points();
    if (k == 0) throw config_error("problem has no evaluation points");
    const int n = outer_level + params.n1;
    if (n + 1 >= 31 || (std::uint64_t(1) << (n + 1)) * k > (std::uint64_t(1) << 31))
        throw numeric_error("outer level draw exceeds the supported replicate range");

    const std::uint64_t half = std::uint64_t(1) << n;
    const std::uint64_t base_count = std::uint64_t(1) << params.n1;

    FieldRealization realization = realize(problem.field, streams.field_stream());

    std::vector<double> sum_half1(k, 0.0), sum_half2(k, 0.0);
    std::vector<double> sum_base(k, 0.0), sum_base_only(k, 0.0);

    WCore core;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::uint64_t j = 0; j < 2 * half; ++j) {
            RngStream zs = streams.z_stream(i, j, k);
            const ZSample z =
                unbiased_z(problem.points[i], realization, params, problem, zs);
            (j < half ? sum_half1 : sum_half2)[i] += z.value;
            if (j < base_count) {
                sum_base[i] += z.value;
                sum_base_only[i] += z.base;
            }
            core.cost_units += z.cost_units;
        }
    }
    core.z_count = k * 2 * half;
    core.biased_cost_units =
        k * base_count * level_cost_units(params.n0, params.gamma, problem.field);

    std::vector<double> means(k);
    const auto apply_g = [&](const std::vector<double>& sums, double count) {
        for (std::size_t i = 0; i < k; ++i) means[i] = sums[i] / count;
        return problem.functional(means);
    };

    std::vector<double> sum_total(k);
    for (std::size_t i = 0; i < k; ++i) sum_total[i] = sum_half1[i] + sum_half2[i];

    const double g_total = apply_g(sum_total, static_cast<double>(2 * half));
    const double g_half1 = apply_g(sum_half1, static_cast<double>(half));
    const double g_half2 = apply_g(sum_half2, static_cast<double>(half));

    core.nested_delta = g_total - 0.5 * (g_half1 + g_half2);
    if (2 * half >= base_count) {  // always true for a real outer draw
        core.plugin_term = apply_g(sum_base, static_cast<double>(base_count));
        core.biased_value = apply_g(sum_base_only, static_cast<double>(base_count));
    } else {  // forced low level in a convergence study: no full base block
        core.plugin_term = std::numeric_limits<double>::quiet_NaN();
        core.biased_value = std::numeric_limits<double>::quiet_NaN();
    }
    return core;
}

}  // namespace

WSample unbiased_w(const Problem& problem, const ParamSet& params, const CopyStreams& streams) {
    RngStream outer = streams.outer_stream();
    const GeometricLaw law{params.outer_rate};
    const int n_tilde = sample_geometric(law, outer);

    const WCore core = run_w_core(problem, params, streams, n_tilde);

    WSample w;
    w.plugin_term = core.plugin_term;
    w.correction = core.nested_delta / law.pmf(n_tilde);
    w.value = w.correction + w.plugin_term;
    w.outer_level = n_tilde;
    w.z_count = core.z_count;
    w.cost_units = core.cost_units;
    w.biased_value = core.biased_value;
    w.biased_cost_units = core.biased_cost_units;
    return w;
}

WSample biased_baseline_w(const Problem& problem, const ParamSet& params,
                          const CopyStreams& streams) {
    const std::size_t k = problem.num_points();
    if (k == 0) throw config_error("problem has no evaluation points");
    const std::uint64_t base_count = std::uint64_t(1) << params.n1;

    FieldRealization realization = realize(problem.field, streams.field_stream());

    std::vector<double> sums(k, 0.0);
    std::uint64_t cost = 0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::uint64_t j = 0; j < base_count; ++j) {
            RngStream zs = streams.z_stream(i, j, k);
            const ZSample z =
                biased_baseline_z(problem.points[i], realization, params, problem, zs);
            sums[i] += z.value;
            cost += z.cost_units;
        }
    }

    std::vector<double> means(k);
    for (std::size_t i = 0; i < k; ++i) means[i] = sums[i] / static_cast<double>(base_count);

    WSample w;
    w.plugin_term = problem.functional(means);
    w.correction = 0.0;
    w.value = w.plugin_term;
    w.outer_level = -1;
    w.z_count = k * base_count;
    w.cost_units = cost;
    w.biased_value = w.value;
    w.biased_cost_units = cost;
    return w;
}

double nested_delta(const Problem& problem, const ParamSet& params, const CopyStreams& streams,
                    int level) {
    if (level < 0) throw config_error("nested_delta: level must be >= 0");
    return run_w_core(problem, params, streams, level - params.n1).nested_delta;
}

double expected_z_cost(const ParamSet& params, const FieldSpec& field) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    // per-level cost grows like 2^((1+gamma) n), or 2^n once the term count
    // saturates a finite field; the geometric tail must decay faster
    const double growth = field.max_terms ? 1.0 : 1.0 + params.gamma;
    if (!(params.theta > growth)) return inf;

    const auto cost_real = [&](int lev) -> double {
        const double lg = static_cast<double>(lev) * params.gamma;
        double m = (lg < 62.0) ? static_cast<double>(truncation_size(lev, params.gamma))
                               : std::exp2(lg);
        if (field.max_terms) m = std::min(m, static_cast<double>(*field.max_terms));
        return std::exp2(static_cast<double>(lev)) * (1.0 + m);
    };

    const GeometricLaw law{params.theta};
    const double ratio = std::exp2(growth - params.theta);  // asymptotic term ratio < 1
    double total = cost_real(params.n0);
    double term = 0.0;
    for (int n = 0; n < 200000; ++n) {
        term = law.pmf(n) * (cost_real(params.n0 + n) + 2.0 * cost_real(params.n0 + n + 1));
        total += term;
        if (term < 1e-13 * (1.0 - ratio) * total) return total;
    }
    return total + term * ratio / (1.0 - ratio);  // geometric bound on the rest
}

}  // namespace rpde
