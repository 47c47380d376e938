#ifndef RPDE_SCHEME_HPP
#define RPDE_SCHEME_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rpde/brownian.hpp"
#include "rpde/field.hpp"
#include "rpde/params.hpp"

namespace rpde {

// Diffusion problem dX = mu(X) dt + sigma(X) dB with random drift field mu,
// payoff f and functional G over k evaluation points.
//
// sigma writes a row-major d x d' matrix; sigma_jac writes the rank-3 array
// jac[(i*d' + j)*d + l] = d sigma_ij / d x_l, supplied analytically.  The
// smoothness bounds on sigma, f, G are documented contracts, not checked.
struct Problem {
    std::string name;
    int d = 1;
    int dprime = 1;
    std::function<void(std::span<const double>, std::span<double>)> sigma;
    std::function<void(std::span<const double>, std::span<double>)> sigma_jac;
    std::function<double(std::span<const double>)> payoff;                 // f
    std::function<double(std::span<const double>)> functional;             // G
    std::function<void(std::span<const double>, std::span<double>)> functional_grad;  // optional
    std::vector<std::vector<double>> points;  // x_1 .. x_k
    double horizon = 1.0;  // terminal times are pinned to 1; != 1 is experimental
    FieldSpec field;
    ParamSet default_params;
    std::vector<std::string> assumption_notes;
    std::string config_json;  // canonical config this problem was built from

    std::size_t num_points() const { return points.size(); }
};

// cost of one level-n recursion: 2^n steps, each counting 1 unit for the
// diffusion work plus one unit per drift term evaluated
std::uint64_t level_cost_units(int level, double gamma, const FieldSpec& field);

struct SchemeResult {
    std::vector<double> terminal;  // X_n(1)
    std::uint64_t cost_units = 0;
};

// Milstein-type recursion over the path's 2^level steps: each step adds
// drift * dt, sigma * dB, and the sum over (j,l,m) of
// (d sigma_ij / d x_l) sigma_lm A~_mj with the Levy-area proxy A~.
// The drift is the level-matched truncation of the field realization.
SchemeResult num_sol(std::span<const double> x, int level, const DyadicPath& path,
                     FieldRealization& realization, const ParamSet& params,
                     const Problem& problem);

struct DeltaResult {
    double delta = 0.0;
    std::uint64_t cost_units = 0;  // cost_n + 2 cost_{n+1}
    DyadicPath fine;               // level n+1 path, returned for reuse
};

// Antithetic level difference at level n: samples a level n+1 path, runs the
// fine recursion on it, the antithetic recursion on its pair-swapped view
// (both with the level n+1 drift truncation) and the coarse recursion on its
// pairwise-summed coarsening (level n truncation), and returns
//   delta = (f(fine) + f(antithetic)) / 2 - f(coarse).
DeltaResult delta_gen(std::span<const double> x, int level, RngStream& rng,
                      FieldRealization& realization, const ParamSet& params,
                      const Problem& problem);

}  // namespace rpde

#endif
