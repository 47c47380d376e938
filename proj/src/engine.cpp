#include "rpde/engine.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "rpde/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rpde {

namespace {

using nlohmann::json;

constexpr std::uint64_t kChunk = 64;  // copies per reduction chunk

struct CopyResult {
    double value = 0.0;
    std::uint64_t cost = 0;
};

CopyResult sample_copy(const Problem& problem, const ParamSet& params, EstimatorKind kind,
                       const CopyStreams& cs) {
    switch (kind) {
        case EstimatorKind::unbiased_w: {
            const WSample w = unbiased_w(problem, params, cs);
            return {w.value, w.cost_units};
        }
        case EstimatorKind::biased_w: {
            const WSample w = biased_baseline_w(problem, params, cs);
            return {w.value, w.cost_units};
        }
        case EstimatorKind::unbiased_z: {
            FieldRealization realization = realize(problem.field, cs.field_stream());
            RngStream rng = cs.z_stream(0, 0, problem.num_points());
            const ZSample z = unbiased_z(problem.points.front(), realization, params, problem, rng);
            return {z.value, z.cost_units};
        }
        case EstimatorKind::biased_z: {
            FieldRealization realization = realize(problem.field, cs.field_stream());
            RngStream rng = cs.z_stream(0, 0, problem.num_points());
            const ZSample z =
                biased_baseline_z(problem.points.front(), realization, params, problem, rng);
            return {z.value, z.cost_units};
        }
    }
    throw config_error("unknown estimator kind");
}

struct ChunkAccum {
    Welford values;
    Welford costs;
    std::uint64_t max_cost = 0;
};

// Runs fn(copy) for every copy in [0, copies) and reduces (value, cost) pairs
// chunk by chunk in fixed index order.  fn must be pure given the copy index.
template <typename Fn>
void run_chunked(std::uint64_t copies, int threads, const Fn& fn, Welford& values, Welford& costs,
                 std::uint64_t& max_cost) {
    const std::uint64_t n_chunks = (copies + kChunk - 1) / kChunk;
    std::vector<ChunkAccum> chunks(n_chunks);

    std::atomic<std::int64_t> first_bad{-1};
    std::atomic<bool> failed{false};
    std::string fail_what;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : 1)
#endif
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(n_chunks); ++c) {
        if (failed.load(std::memory_order_relaxed)) continue;
        ChunkAccum acc;
        const std::uint64_t lo = static_cast<std::uint64_t>(c) * kChunk;
        const std::uint64_t hi = std::min(copies, lo + kChunk);
        for (std::uint64_t copy = lo; copy < hi; ++copy) {
            CopyResult r;
            try {
                r = fn(copy);
            } catch (...) {
                bool expected = false;
                if (failed.compare_exchange_strong(expected, true)) {
                    try { throw; } catch (const std::exception& e) { fail_what = e.what(); }
                    first_bad.store(static_cast<std::int64_t>(copy));
                }
                break;
            }
            if (!std::isfinite(r.value)) {
                bool expected = false;
                if (failed.compare_exchange_strong(expected, true)) {
                    fail_what = "estimator copy produced a non-finite value";
                    first_bad.store(static_cast<std::int64_t>(copy));
                }
                break;
            }
            acc.values.add(r.value);
            acc.costs.add(static_cast<double>(r.cost));
            acc.max_cost = std::max(acc.max_cost, r.cost);
        }
        chunks[static_cast<std::size_t>(c)] = acc;
    }

    if (failed.load()) {
        throw numeric_error("copy " + std::to_string(first_bad.load()) + ": " + fail_what);
    }

    for (const auto& acc : chunks) {
        values.merge(acc.values);
        costs.merge(acc.costs);
        max_cost = std::max(max_cost, acc.max_cost);
    }
}

EstimateReport finish_report(const Problem& problem, const ParamSet& params, EstimatorKind kind,
                             std::uint64_t copies, std::uint64_t seed, int threads,
                             const Welford& values, const Welford& costs, std::uint64_t max_cost,
                             double wall_seconds) {
    EstimateReport r;
    r.estimator = estimator_name(kind);
    r.problem = problem.name;
    r.estimate = values.mean;
    r.std_error = values.std_error();
    r.ci_lo = r.estimate - 1.96 * r.std_error;
    r.ci_hi = r.estimate + 1.96 * r.std_error;
    r.copies = copies;
    r.mean_cost_units = costs.mean;
    r.max_cost_units = max_cost;
    r.clt_margin = 1.0 / std::sqrt(static_cast<double>(copies));
    r.wall_time_seconds = wall_seconds;
    r.seed = seed;
    r.threads = threads;
    r.params = params;
    return r;
}

std::vector<int> validated_levels(const std::vector<int>& levels, int min_level) {
    if (levels.size() < 3) throw config_error("convergence: need at least 3 levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < min_level) throw config_error("convergence: level below minimum");
        if (i > 0 && levels[i] <= levels[i - 1])
            throw config_error("convergence: levels must be strictly increasing");
    }
    return levels;
}

ConvergenceReport moments_to_report(const Problem& problem, const std::string& which,
                                    const std::vector<int>& levels,
                                    const std::vector<Welford>& sq, std::uint64_t seed) {
    ConvergenceReport rep;
    rep.which = which;
    rep.problem = problem.name;
    rep.seed = seed;
    bool any_zero = false;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        LevelMoment m;
        m.level = levels[i];
        m.samples = sq[i].n;
        m.m2 = sq[i].mean;
        m.m2_se = sq[i].std_error();
        rep.levels.push_back(m);
        // moments at the squared-roundoff floor are zeros of an exact identity
        if (m.m2 <= 1e-24) any_zero = true;
    }
    if (any_zero) {
        rep.degenerate = true;  // exact zeros; log-slope undefined
        return rep;
    }
    std::vector<double> xs, ys;
    for (const auto& m : rep.levels) {
        xs.push_back(static_cast<double>(m.level));
        ys.push_back(std::log2(m.m2));
    }
    const OlsFit fit = fit_line(xs, ys);
    rep.slope = fit.slope;
    rep.slope_se = fit.slope_se;
    return rep;
}

}  // namespace

std::string estimator_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::unbiased_w: return "unbiased-w";
        case EstimatorKind::biased_w: return "biased-w";
        case EstimatorKind::unbiased_z: return "unbiased-z";
        case EstimatorKind::biased_z: return "biased-z";
    }
    return "?";
}

EstimatorKind estimator_from_name(const std::string& name) {
    if (name == "unbiased-w" || name == "w") return EstimatorKind::unbiased_w;
    if (name == "biased-w") return EstimatorKind::biased_w;
    if (name == "unbiased-z" || name == "z") return EstimatorKind::unbiased_z;
    if (name == "biased-z") return EstimatorKind::biased_z;
    throw config_error("unknown estimator: " + name);
}

EstimateReport run_estimate(const Problem& problem, const ParamSet& params, EstimatorKind kind,
                            std::uint64_t copies, std::uint64_t seed, int threads,
                            std::vector<double>* per_copy_values,
                            std::vector<std::uint64_t>* per_copy_costs) {
    if (copies < 2) throw config_error("estimate: need at least 2 copies");
    if (copies > 0xFFFFFFFFull) throw config_error("estimate: copy index space is 32-bit");

    if (per_copy_values) per_copy_values->assign(copies, 0.0);
    if (per_copy_costs) per_copy_costs->assign(copies, 0);

    const auto t0 = std::chrono::steady_clock::now();
    Welford values, costs;
    std::uint64_t max_cost = 0;
    run_chunked(
        copies, threads,
        [&](std::uint64_t copy) {
            const CopyStreams cs{seed, static_cast<std::uint32_t>(copy)};
            const CopyResult r = sample_copy(problem, params, kind, cs);
            if (per_copy_values) (*per_copy_values)[copy] = r.value;
            if (per_copy_costs) (*per_copy_costs)[copy] = r.cost;
            return r;
        },
        values, costs, max_cost);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    return finish_report(problem, params, kind, copies, seed, threads, values, costs, max_cost,
                         secs);
}

EstimateReport run_estimate_reference(const Problem& problem, const ParamSet& params,
                                      EstimatorKind kind, std::uint64_t copies,
                                      std::uint64_t seed) {
    if (copies < 2) throw config_error("estimate: need at least 2 copies");
    const auto t0 = std::chrono::steady_clock::now();
    Welford values, costs;
    std::uint64_t max_cost = 0;
    for (std::uint64_t copy = 0; copy < copies; ++copy) {
        const CopyStreams cs{seed, static_cast<std::uint32_t>(copy)};
        const CopyResult r = sample_copy(problem, params, kind, cs);
        if (!std::isfinite(r.value))
            throw numeric_error("copy " + std::to_string(copy) + ": non-finite value");
        values.add(r.value);
        costs.add(static_cast<double>(r.cost));
        max_cost = std::max(max_cost, r.cost);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return finish_report(problem, params, kind, copies, seed, 1, values, costs, max_cost, secs);
}

ConvergenceReport run_delta_convergence(const Problem& problem, const ParamSet& params,
                                        const std::vector<int>& levels,
                                        std::uint64_t samples_per_level, std::uint64_t seed,
                                        int threads) {
    validated_levels(levels, 0);
    if (samples_per_level < 2) throw config_error("convergence: need at least 2 samples per level");
    if (levels.size() * samples_per_level > 0xFFFFFFFFull)
        throw config_error("convergence: sample index space is 32-bit");

    std::vector<Welford> sq(levels.size());
    for (std::size_t li = 0; li < levels.size(); ++li) {
        Welford values, costs;
        std::uint64_t max_cost = 0;
        run_chunked(
            samples_per_level, threads,
            [&](std::uint64_t s) {
                // one global copy index per (level, sample)
                const std::uint64_t idx = li * samples_per_level + s;
                const CopyStreams cs{seed, static_cast<std::uint32_t>(idx)};
                FieldRealization realization = realize(problem.field, cs.field_stream());
                RngStream rng = cs.z_stream(0, 0, problem.num_points());
                const DeltaResult d = delta_gen(problem.points.front(), levels[li], rng,
                                                realization, params, problem);
                return CopyResult{d.delta * d.delta, d.cost_units};
            },
            values, costs, max_cost);
        sq[li] = values;
    }
    return moments_to_report(problem, "delta", levels, sq, seed);
}

ConvergenceReport run_nested_convergence(const Problem& problem, const ParamSet& params,
                                         const std::vector<int>& levels,
                                         std::uint64_t samples_per_level, std::uint64_t seed,
                                         int threads) {
    validated_levels(levels, 1);
    if (samples_per_level < 2) throw config_error("convergence: need at least 2 samples per level");
    if (levels.size() * samples_per_level > 0xFFFFFFFFull)
        throw config_error("convergence: sample index space is 32-bit");

    std::vector<Welford> sq(levels.size());
    for (std::size_t li = 0; li < levels.size(); ++li) {
        Welford values, costs;
        std::uint64_t max_cost = 0;
        run_chunked(
            samples_per_level, threads,
            [&](std::uint64_t s) {
                const std::uint64_t idx = li * samples_per_level + s;
                const CopyStreams cs{seed, static_cast<std::uint32_t>(idx)};
                const double d = nested_delta(problem, params, cs, levels[li]);
                return CopyResult{d * d, 0};
            },
            values, costs, max_cost);
        sq[li] = values;
    }
    return moments_to_report(problem, "nested-delta", levels, sq, seed);
}

CompareReport run_compare(const Problem& problem, const ParamSet& params, std::uint64_t copies,
                          std::uint64_t seed, int threads) {
    if (copies < 2) throw config_error("compare: need at least 2 copies");

    // one pass: the full estimator and the baseline extracted from the same
    // sampling, reduced into separate accumulators
    std::vector<double> biased_values(copies, 0.0);
    std::vector<std::uint64_t> biased_costs(copies, 0);

    const auto t0 = std::chrono::steady_clock::now();
    Welford u_values, u_costs;
    std::uint64_t u_max = 0;
    run_chunked(
        copies, threads,
        [&](std::uint64_t copy) {
            const CopyStreams cs{seed, static_cast<std::uint32_t>(copy)};
            const WSample w = unbiased_w(problem, params, cs);
            if (!std::isfinite(w.biased_value))
                throw numeric_error("baseline value is non-finite");
            biased_values[copy] = w.biased_value;
            biased_costs[copy] = w.biased_cost_units;
            return CopyResult{w.value, w.cost_units};
        },
        u_values, u_costs, u_max);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Welford b_values, b_costs;
    std::uint64_t b_max = 0;
    for (std::uint64_t c = 0; c < copies; ++c) {
        b_values.add(biased_values[c]);
        b_costs.add(static_cast<double>(biased_costs[c]));
        b_max = std::max(b_max, biased_costs[c]);
    }

    CompareReport rep;
    rep.unbiased = finish_report(problem, params, EstimatorKind::unbiased_w, copies, seed, threads,
                                 u_values, u_costs, u_max, secs);
    rep.biased = finish_report(problem, params, EstimatorKind::biased_w, copies, seed, threads,
                               b_values, b_costs, b_max, 0.0);
    rep.intervals_overlap =
        !(rep.unbiased.ci_hi < rep.biased.ci_lo || rep.biased.ci_hi < rep.unbiased.ci_lo);
    if (rep.intervals_overlap)
        rep.verdict = "no significant bias detected";
    else if (rep.biased.estimate > rep.unbiased.estimate)
        rep.verdict = "significant bias detected (baseline higher)";
    else
        rep.verdict = "significant bias detected (baseline lower)";
    return rep;
}

namespace {

json json_number_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

double number_or_nan(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

json params_to_json(const ParamSet& p) {
    json checks = json::array();
    for (const auto& c : p.checks) {
        checks.push_back(json{{"name", c.name},
                              {"lhs", json_number_or_null(c.lhs)},
                              {"rhs", json_number_or_null(c.rhs)},
                              {"strict", c.strict},
                              {"evaluated", c.evaluated},
                              {"holds", c.holds}});
    }
    return json{{"epsilon", json_number_or_null(p.epsilon)},
                {"q", p.q},
                {"alpha", json_number_or_null(p.alpha)},
                {"beta", json_number_or_null(p.beta)},
                {"gamma", p.gamma},
                {"theta", p.theta},
                {"delta", json_number_or_null(p.delta)},
                {"n0", p.n0},
                {"n1", p.n1},
                {"outer_rate", p.outer_rate},
                {"override", p.override_mode},
                {"inequalities", checks},
                {"warnings", p.warnings}};
}

ParamSet params_from_json(const json& j) {
    ParamSet p;
    p.epsilon = number_or_nan(j.at("epsilon"));
    p.q = j.at("q").get<double>();
    p.alpha = number_or_nan(j.at("alpha"));
    p.beta = number_or_nan(j.at("beta"));
    p.gamma = j.at("gamma").get<double>();
    p.theta = j.at("theta").get<double>();
    p.delta = number_or_nan(j.at("delta"));
    p.n0 = j.at("n0").get<int>();
    p.n1 = j.at("n1").get<int>();
    p.outer_rate = j.at("outer_rate").get<double>();
    p.override_mode = j.at("override").get<bool>();
    for (const auto& c : j.at("inequalities")) {
        InequalityCheck ic;
        ic.name = c.at("name").get<std::string>();
        ic.lhs = number_or_nan(c.at("lhs"));
        ic.rhs = number_or_nan(c.at("rhs"));
        ic.strict = c.at("strict").get<bool>();
        ic.evaluated = c.at("evaluated").get<bool>();
        ic.holds = c.at("holds").get<bool>();
        p.checks.push_back(ic);
    }
    for (const auto& w : j.at("warnings")) p.warnings.push_back(w.get<std::string>());
    return p;
}

json estimate_to_json(const EstimateReport& r) {
    return json{{"estimator", r.estimator},
                {"problem", r.problem},
                {"estimate", r.estimate},
                {"std_error", r.std_error},
                {"ci95", json::array({r.ci_lo, r.ci_hi})},
                {"copies", r.copies},
                {"mean_cost_units", r.mean_cost_units},
                {"max_cost_units", r.max_cost_units},
                {"clt_margin", r.clt_margin},
                {"wall_time_seconds", r.wall_time_seconds},
                {"seed", r.seed},
                {"threads", r.threads},
                {"params", params_to_json(r.params)}};
}

EstimateReport estimate_from_json(const json& j) {
    EstimateReport r;
    r.estimator = j.at("estimator").get<std::string>();
    r.problem = j.at("problem").get<std::string>();
    r.estimate = j.at("estimate").get<double>();
    r.std_error = j.at("std_error").get<double>();
    r.ci_lo = j.at("ci95")[0].get<double>();
    r.ci_hi = j.at("ci95")[1].get<double>();
    r.copies = j.at("copies").get<std::uint64_t>();
    r.mean_cost_units = j.at("mean_cost_units").get<double>();
    r.max_cost_units = j.at("max_cost_units").get<std::uint64_t>();
    r.clt_margin = j.at("clt_margin").get<double>();
    r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.threads = j.at("threads").get<int>();
    r.params = params_from_json(j.at("params"));
    return r;
}

}  // namespace

std::string report_json(const EstimateReport& r) { return estimate_to_json(r).dump(2); }

EstimateReport estimate_report_from_json(const std::string& text) {
    return estimate_from_json(json::parse(text));
}

std::string report_json(const ConvergenceReport& r) {
    json levels = json::array();
    for (const auto& m : r.levels) {
        levels.push_back(json{{"level", m.level},
                              {"samples", m.samples},
                              {"m2", m.m2},
                              {"m2_se", m.m2_se}});
    }
    json j{{"which", r.which},
           {"problem", r.problem},
           {"levels", levels},
           {"seed", r.seed},
           {"degenerate", r.degenerate}};
    if (r.degenerate) {
        j["note"] = "degenerate: exact zeros";
        j["slope"] = nullptr;
        j["slope_se"] = nullptr;
    } else {
        j["slope"] = r.slope;
        j["slope_se"] = r.slope_se;
    }
    return j.dump(2);
}

std::string report_json(const CompareReport& r) {
    return json{{"unbiased", json::parse(report_json(r.unbiased))},
                {"biased", json::parse(report_json(r.biased))},
                {"intervals_overlap", r.intervals_overlap},
                {"verdict", r.verdict}}
        .dump(2);
}

std::string param_set_json(const ParamSet& p) { return params_to_json(p).dump(2); }

}  // namespace rpde
