#ifndef RPDE_ESTIMATORS_HPP
#define RPDE_ESTIMATORS_HPP

#include <cstdint>
#include <vector>

#include "rpde/rng.hpp"
#include "rpde/scheme.hpp"

namespace rpde {

// Geometric law on {0,1,2,...} with P(N = n) = (1 - 2^-rate) 2^(-rate n).
struct GeometricLaw {
    double rate = 1.5;
    double pmf(int n) const;
};

// inverse-CDF on a single uniform; exposed separately so the map is testable
int geometric_from_uniform(double u, const GeometricLaw& law);
int sample_geometric(const GeometricLaw& law, RngStream& rng);

// rate of the outer randomization layer
constexpr double kOuterGeometricRate = 1.5;

// Single-point estimator with E[Z | mu] = u(x, 1):
//   Z = f(X_{n0}(1)) + Delta_{N+n0} / p_N,  N ~ Geom(1 - 2^-theta).
// The base term reuses the same Brownian path as the level difference: the
// level-n0 path is the (N+1)-fold coarsening of the fine path.
struct ZSample {
    double value = 0.0;
    double base = 0.0;        // f(X_{n0}(1))
    double correction = 0.0;  // Delta_{N+n0} / p_N
    int level_drawn = 0;      // N
    std::uint64_t cost_units = 0;
};

ZSample unbiased_z(std::span<const double> x, FieldRealization& realization,
                   const ParamSet& params, const Problem& problem, RngStream& rng);

// debiasing removed: Z = f(X_{n0}(1)) on a freshly sampled level-n0 path
ZSample biased_baseline_z(std::span<const double> x, FieldRealization& realization,
                          const ParamSet& params, const Problem& problem, RngStream& rng);

// G applied to the componentwise means of columns a..b (1-based, inclusive)
// of a k x m block of Z values.
double rho(const std::vector<std::vector<double>>& z_block, std::size_t a, std::size_t b,
           const Problem& problem);

// Functional estimator with E[W | mu] = G(E[Z_1|mu], ..., E[Z_k|mu]):
//   W = Delta~_{N~+n1} / p~_{N~} + G(mean of the first 2^n1 Z's),
// N~ ~ Geom(1 - 2^-1.5).  All Z's inside one W draw share one field
// realization; Brownian paths and inner levels are independent per Z.
struct WSample {
    double value = 0.0;
    double plugin_term = 0.0;   // G of the means of the first 2^n1 Z's
    double correction = 0.0;    // Delta~ / p~
    int outer_level = 0;        // N~ (-1 for the biased baseline)
    std::uint64_t z_count = 0;  // k * 2^(N~+n1+1)
    std::uint64_t cost_units = 0;
    // the same statistic with every debiasing term dropped, extracted from
    // the shared sampling: G of the means of the first 2^n1 base terms
    double biased_value = 0.0;
    std::uint64_t biased_cost_units = 0;
};

WSample unbiased_w(const Problem& problem, const ParamSet& params, const CopyStreams& streams);

// both randomized corrections removed: G of means of 2^n1 base-only Z's,
// sharing one field realization within the copy
WSample biased_baseline_w(const Problem& problem, const ParamSet& params,
                          const CopyStreams& streams);

// Delta~ at a fixed level n (for convergence studies): consumes the copy's
// streams exactly as unbiased_w would, but with the level pinned instead of
// drawn from the outer geometric law.
double nested_delta(const Problem& problem, const ParamSet& params, const CopyStreams& streams,
                    int level);

// Analytic expectation of the Z cost,
//   cost_{n0} + sum_n p_n (cost_{n+n0} + 2 cost_{n+n0+1}),
// in the same units as ZSample::cost_units.  Returns +inf when theta fails to
// dominate the per-level cost growth.
double expected_z_cost(const ParamSet& params, const FieldSpec& field);

}  // namespace rpde

#endif
