#ifndef RPDE_ENGINE_HPP
#define RPDE_ENGINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rpde/estimators.hpp"
#include "rpde/problems.hpp"
#include "rpde/stats.hpp"

namespace rpde {

enum class EstimatorKind { unbiased_w, biased_w, unbiased_z, biased_z };

std::string estimator_name(EstimatorKind kind);
EstimatorKind estimator_from_name(const std::string& name);

struct EstimateReport {
    std::string estimator;
    std::string problem;
    double estimate = 0.0;
    double std_error = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::uint64_t copies = 0;
    double mean_cost_units = 0.0;
    std::uint64_t max_cost_units = 0;
    double clt_margin = 0.0;  // 1/sqrt(copies)
    double wall_time_seconds = 0.0;
    std::uint64_t seed = 0;
    int threads = 1;
    ParamSet params;
};

// Draw `copies` iid samples of the chosen estimator and reduce them.
//
// Copies are partitioned into fixed-size chunks; worker threads fill one
// mergeable accumulator per chunk and the chunks are merged in index order,
// so the report is identical for any thread count (every copy's randomness
// is already pinned by its counter-based substreams).  Optional out-params
// collect per-copy values/costs for CSV spill and histograms.  Any non-finite
// sample aborts the run with numeric_error.
EstimateReport run_estimate(const Problem& problem, const ParamSet& params, EstimatorKind kind,
                            std::uint64_t copies, std::uint64_t seed, int threads,
                            std::vector<double>* per_copy_values = nullptr,
                            std::vector<std::uint64_t>* per_copy_costs = nullptr);

// Plain sequential loop over copies with a single accumulator; reference
// implementation for validating the chunked parallel reduction.
EstimateReport run_estimate_reference(const Problem& problem, const ParamSet& params,
                                      EstimatorKind kind, std::uint64_t copies,
                                      std::uint64_t seed);

struct LevelMoment {
    int level = 0;
    std::uint64_t samples = 0;
    double m2 = 0.0;     // mean of the squared difference
    double m2_se = 0.0;  // standard error of that mean
};

struct ConvergenceReport {
    std::string which;  // "delta" or "nested-delta"
    std::string problem;
    std::vector<LevelMoment> levels;
    double slope = 0.0;     // OLS slope of log2(m2) against level
    double slope_se = 0.0;
    bool degenerate = false;  // all moments exactly zero
    std::uint64_t seed = 0;
};

// second moments of the antithetic level difference across levels
ConvergenceReport run_delta_convergence(const Problem& problem, const ParamSet& params,
                                        const std::vector<int>& levels,
                                        std::uint64_t samples_per_level, std::uint64_t seed,
                                        int threads);

// second moments of the nested (outer-layer) difference across outer levels
ConvergenceReport run_nested_convergence(const Problem& problem, const ParamSet& params,
                                         const std::vector<int>& levels,
                                         std::uint64_t samples_per_level, std::uint64_t seed,
                                         int threads);

struct CompareReport {
    EstimateReport unbiased;
    EstimateReport biased;
    bool intervals_overlap = false;
    std::string verdict;
};

// Paired comparison: one sampling pass per copy yields the full estimator and
// the baseline with every debiasing term dropped (the baseline's marginal law
// is exactly that of a standalone baseline run, and fully degenerate problems
// give bit-equal arms).  Baseline cost counts only the work a standalone
// baseline would do.
CompareReport run_compare(const Problem& problem, const ParamSet& params, std::uint64_t copies,
                          std::uint64_t seed, int threads);

std::string report_json(const EstimateReport& r);
EstimateReport estimate_report_from_json(const std::string& text);
std::string report_json(const ConvergenceReport& r);
std::string report_json(const CompareReport& r);
std::string param_set_json(const ParamSet& p);

}  // namespace rpde

#endif
