#ifndef RPDE_PROBLEMS_HPP
#define RPDE_PROBLEMS_HPP

#include <string>

#include "rpde/scheme.hpp"

namespace rpde {

// Ornstein-Uhlenbeck benchmark: dX = -alpha X dt + dB, X0 = 0, alpha drawn
// N(alpha_mean, alpha_sd^2) once per copy, payoff f(x) = x^2, functional
// G(y) = exp(-y^2).  The drift is a one-term field (psi_1(x) = -x, V_1 =
// alpha) whose truncation is pinned to one term at every level, so the
// truncated drift is exact.  Set alpha_sd = 0 to pin alpha.
Problem ou_example1(double alpha_mean = 1.0, double alpha_sd = 0.05);

// conditional mean E[X_1^2 | alpha] = (1 - e^(-2 alpha)) / (2 alpha),
// continued by its limit 1 at alpha = 0
double ou_conditional_mean(double alpha);

// ground truth for the OU benchmark: integral of the Gaussian alpha density
// against exp(-conditional_mean(alpha)^2), by adaptive quadrature over
// +-8 standard deviations (the discarded tails are below 1e-12)
double ou_nu_quadrature(double abs_tol, double alpha_mean = 1.0, double alpha_sd = 0.05);

// Sine-series benchmark: dX = -mu(X) dt + cos(X) dB, X0 = 0, with
// mu(x) = sum_i i^-4 sin(i x) V_i, V_i ~ N(0, 0.25^2), run at the boundary
// pair gamma = 1/3, theta = 4/3 and n0 = n1 = 5.  The decay exponent q = 4
// sits outside the admissible range, so expected cost is infinite (realized
// cost is finite per copy); shipped with warnings.  f(x) = x^2 and the
// convex G(y) = y^2 give the debiasing-free baseline a strictly positive
// nested bias, which the compare command resolves at 10^4 copies.
Problem example2_problem();

// Fully degenerate pipeline (zero drift, unit diffusion, identity payoff and
// functional): every level difference and nested difference vanishes
// identically, which pins down the exactness tests.
Problem trivial_linear();

// Parse a problem from a builtin name ("ou-example1", "example2",
// "trivial-linear"), a JSON string, or a path to a JSON file.
Problem load_problem(const std::string& name_or_path);
Problem problem_from_json(const std::string& json_text);

// canonical JSON form; problem_from_json(problem_config(p)) reproduces p
std::string problem_config(const Problem& p);

}  // namespace rpde

#endif
