// Command-line driver: parameter derivation, parallel estimation, convergence
// studies, bias comparisons and histogram export, all reported as JSON/CSV.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rpde/engine.hpp"
#include "rpde/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

struct ParamFlags {
    std::optional<double> epsilon;
    std::optional<double> gamma;
    std::optional<double> theta;
    std::optional<int> n0;
    std::optional<int> n1;
    std::optional<double> outer_rate;
};

void add_param_flags(CLI::App* cmd, ParamFlags& flags) {
    cmd->add_option("--epsilon", flags.epsilon, "derive exponents from this epsilon");
    cmd->add_option("--gamma", flags.gamma, "override gamma (requires --theta)");
    cmd->add_option("--theta", flags.theta, "override theta (requires --gamma)");
    cmd->add_option("--n0", flags.n0, "base level of the inner estimator");
    cmd->add_option("--n1", flags.n1, "base level of the outer estimator");
    cmd->add_option("--outer-rate", flags.outer_rate,
                    "rate of the outer geometric law (analyzed value: 1.5)");
}

// problem defaults, then CLI overrides on top
rpde::ParamSet resolve_params(const rpde::Problem& problem, const ParamFlags& flags) {
    const rpde::ParamSet& base = problem.default_params;
    const int n0 = flags.n0.value_or(base.n0);
    const int n1 = flags.n1.value_or(base.n1);

    rpde::ParamSet set;
    if (flags.gamma || flags.theta) {
        if (!(flags.gamma && flags.theta))
            throw rpde::config_error("--gamma and --theta must be given together");
        set = rpde::override_parameters(*flags.gamma, *flags.theta, base.q, n0, n1);
    } else if (flags.epsilon) {
        set = rpde::derive_parameters(*flags.epsilon, base.q, n0, n1);
    } else if (base.override_mode) {
        set = rpde::override_parameters(base.gamma, base.theta, base.q, n0, n1);
    } else {
        set = rpde::derive_parameters(base.epsilon, base.q, n0, n1);
    }
    if (flags.outer_rate) set = rpde::with_outer_rate(set, *flags.outer_rate);
    for (const auto& w : set.warnings) std::cerr << "warning: " << w << "\n";
    return set;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw rpde::config_error("cannot open output file: " + out_path);
    out << text << "\n";
}

std::vector<int> parse_levels(const std::string& text) {
    std::vector<int> levels;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const int lo = std::stoi(text.substr(0, dots));
        const int hi = std::stoi(text.substr(dots + 2));
        for (int l = lo; l <= hi; ++l) levels.push_back(l);
        return levels;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) levels.push_back(std::stoi(item));
    return levels;
}

int default_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void write_per_copy_csv(const std::string& path, const std::vector<double>& values,
                        const std::vector<std::uint64_t>& costs) {
    std::ofstream out(path);
    if (!out) throw rpde::config_error("cannot open per-copy csv: " + path);
    out << "copy,value,cost_units\n";
    out.precision(17);
    for (std::size_t i = 0; i < values.size(); ++i)
        out << i << "," << values[i] << "," << costs[i] << "\n";
}

std::vector<double> read_samples_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw rpde::config_error("cannot open samples file: " + path);
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.rfind("copy,", 0) == 0) continue;  // header
        // either one value per line or the per-copy csv layout
        const auto c1 = line.find(',');
        const std::string field =
            c1 == std::string::npos ? line : line.substr(c1 + 1, line.find(',', c1 + 1) - c1 - 1);
        values.push_back(std::stod(field));
    }
    if (values.empty()) throw rpde::config_error("EmptyInput: no samples in " + path);
    return values;
}

std::string histogram_csv(const rpde::HistogramBins& h) {
    std::ostringstream os;
    os.precision(17);
    os << "bin_lo,bin_hi,count\n";
    const double w = (h.hi - h.lo) / static_cast<double>(h.counts.size());
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        const double lo = h.lo == h.hi ? h.lo : h.lo + w * static_cast<double>(b);
        const double hi = h.lo == h.hi ? h.hi : (b + 1 == h.counts.size() ? h.hi : lo + w);
        os << lo << "," << hi << "," << h.counts[b] << "\n";
    }
    return os.str();
}

int run(int argc, char** argv) {
    CLI::App app{"unbiased Monte Carlo estimation for diffusions with random drift fields"};
    app.require_subcommand(1);

    // ---- params ----
    auto* cmd_params = app.add_subcommand("params", "derive or override the exponent set");
    ParamFlags p_flags;
    double p_q = 5.0;
    add_param_flags(cmd_params, p_flags);
    cmd_params->add_option("--q", p_q, "field decay exponent");
    std::string p_out;
    cmd_params->add_option("--out", p_out, "write JSON here instead of stdout");

    // ---- estimate ----
    auto* cmd_est = app.add_subcommand("estimate", "run independent estimator copies in parallel");
    std::string e_problem = "ou-example1", e_estimator = "w", e_out, e_csv;
    std::uint64_t e_copies = 10000, e_seed = 42;
    int e_threads = default_threads();
    ParamFlags e_flags;
    cmd_est->add_option("--problem", e_problem, "builtin name or problem JSON file");
    cmd_est->add_option("--estimator", e_estimator, "w | z | biased-w | biased-z");
    cmd_est->add_option("--copies", e_copies, "number of independent copies");
    cmd_est->add_option("--seed", e_seed, "master seed");
    cmd_est->add_option("--threads", e_threads, "worker threads");
    add_param_flags(cmd_est, e_flags);
    cmd_est->add_option("--out", e_out, "write JSON here instead of stdout");
    cmd_est->add_option("--per-copy-csv", e_csv, "spill per-copy values to CSV");

    // ---- convergence ----
    auto* cmd_conv = app.add_subcommand("convergence", "per-level second moments and fitted slope");
    std::string c_problem = "ou-example1", c_levels = "2..7", c_which = "delta", c_out;
    std::uint64_t c_samples = 1000, c_seed = 42;
    int c_threads = default_threads();
    ParamFlags c_flags;
    cmd_conv->add_option("--problem", c_problem, "builtin name or problem JSON file");
    cmd_conv->add_option("--levels", c_levels, "levels, e.g. 2..7 or 2,3,5");
    cmd_conv->add_option("--samples-per-level", c_samples, "samples per level (>= 1000)");
    cmd_conv->add_option("--which", c_which, "delta | nested");
    cmd_conv->add_option("--seed", c_seed, "master seed");
    cmd_conv->add_option("--threads", c_threads, "worker threads");
    add_param_flags(cmd_conv, c_flags);
    cmd_conv->add_option("--out", c_out, "write JSON here instead of stdout");

    // ---- compare ----
    auto* cmd_cmp = app.add_subcommand("compare", "full estimator against the biased baseline");
    std::string m_problem = "example2", m_out;
    std::uint64_t m_copies = 10000, m_seed = 42;
    int m_threads = default_threads();
    ParamFlags m_flags;
    cmd_cmp->add_option("--problem", m_problem, "builtin name or problem JSON file");
    cmd_cmp->add_option("--copies", m_copies, "copies per arm");
    cmd_cmp->add_option("--seed", m_seed, "master seed");
    cmd_cmp->add_option("--threads", m_threads, "worker threads");
    add_param_flags(cmd_cmp, m_flags);
    cmd_cmp->add_option("--out", m_out, "write JSON here instead of stdout");

    // ---- histogram ----
    auto* cmd_hist = app.add_subcommand("histogram", "equal-width binned counts as CSV");
    std::string h_problem = "ou-example1", h_estimator = "w", h_file, h_out;
    std::uint64_t h_copies = 10000, h_seed = 42;
    int h_bins = 50, h_threads = default_threads();
    ParamFlags h_flags;
    cmd_hist->add_option("--problem", h_problem, "builtin name or problem JSON file");
    cmd_hist->add_option("--estimator", h_estimator, "w | z | biased-w | biased-z");
    cmd_hist->add_option("--copies", h_copies, "copies to draw when sampling inline");
    cmd_hist->add_option("--seed", h_seed, "master seed");
    cmd_hist->add_option("--threads", h_threads, "worker threads");
    cmd_hist->add_option("--bins", h_bins, "number of bins (>= 2)");
    cmd_hist->add_option("--samples-file", h_file, "bin an existing CSV instead of sampling");
    add_param_flags(cmd_hist, h_flags);
    cmd_hist->add_option("--out", h_out, "write CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (cmd_params->parsed()) {
        rpde::ParamSet set;
        const int n0 = p_flags.n0.value_or(5);
        const int n1 = p_flags.n1.value_or(5);
        if (p_flags.gamma || p_flags.theta) {
            if (!(p_flags.gamma && p_flags.theta))
                throw rpde::config_error("--gamma and --theta must be given together");
            set = rpde::override_parameters(*p_flags.gamma, *p_flags.theta, p_q, n0, n1);
        } else {
            const double eps = p_flags.epsilon.value_or(rpde::default_epsilon(p_q));
            set = rpde::derive_parameters(eps, p_q, n0, n1);
        }
        if (p_flags.outer_rate) set = rpde::with_outer_rate(set, *p_flags.outer_rate);
        emit(rpde::param_set_json(set), p_out);
        return 0;
    }

    if (cmd_est->parsed()) {
        const rpde::Problem problem = rpde::load_problem(e_problem);
        const rpde::ParamSet params = resolve_params(problem, e_flags);
        const rpde::EstimatorKind kind = rpde::estimator_from_name(e_estimator);
        std::vector<double> values;
        std::vector<std::uint64_t> costs;
        const bool spill = !e_csv.empty();
        const rpde::EstimateReport rep =
            rpde::run_estimate(problem, params, kind, e_copies, e_seed, e_threads,
                               spill ? &values : nullptr, spill ? &costs : nullptr);
        if (spill) write_per_copy_csv(e_csv, values, costs);
        emit(rpde::report_json(rep), e_out);
        return 0;
    }

    if (cmd_conv->parsed()) {
        if (c_samples < 1000)
            throw rpde::config_error("convergence: --samples-per-level must be >= 1000");
        const rpde::Problem problem = rpde::load_problem(c_problem);
        const rpde::ParamSet params = resolve_params(problem, c_flags);
        const std::vector<int> levels = parse_levels(c_levels);
        rpde::ConvergenceReport rep;
        if (c_which == "delta")
            rep = rpde::run_delta_convergence(problem, params, levels, c_samples, c_seed,
                                              c_threads);
        else if (c_which == "nested")
            rep = rpde::run_nested_convergence(problem, params, levels, c_samples, c_seed,
                                               c_threads);
        else
            throw rpde::config_error("--which must be delta or nested");
        emit(rpde::report_json(rep), c_out);
        return 0;
    }

    if (cmd_cmp->parsed()) {
        const rpde::Problem problem = rpde::load_problem(m_problem);
        const rpde::ParamSet params = resolve_params(problem, m_flags);
        const rpde::CompareReport rep =
            rpde::run_compare(problem, params, m_copies, m_seed, m_threads);
        emit(rpde::report_json(rep), m_out);
        return 0;
    }

    if (cmd_hist->parsed()) {
        std::vector<double> values;
        if (!h_file.empty()) {
            values = read_samples_file(h_file);
        } else {
            const rpde::Problem problem = rpde::load_problem(h_problem);
            const rpde::ParamSet params = resolve_params(problem, h_flags);
            const rpde::EstimatorKind kind = rpde::estimator_from_name(h_estimator);
            std::vector<std::uint64_t> costs;
            rpde::run_estimate(problem, params, kind, h_copies, h_seed, h_threads, &values,
                               &costs);
        }
        emit(histogram_csv(rpde::make_histogram(values, h_bins)), h_out);
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const rpde::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const rpde::numeric_error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
