#ifndef RPDE_PARAMS_HPP
#define RPDE_PARAMS_HPP

#include <string>
#include <vector>

namespace rpde {

// One admissibility condition on the exponent set, evaluated as lhs OP rhs.
struct InequalityCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool strict = true;      // strict '>' vs '>='
    bool evaluated = true;   // false when the needed exponents are not defined
    bool holds = false;
};

// Exponent set driving truncation and level randomization.
//
// In derived mode everything follows from a single small epsilon:
//   alpha = 1/2 - eps, beta = 1/2 + 2 eps, gamma = 1/3 - 12 eps,
//   theta = 4/3 - (23/2) eps, delta = 33 eps,
// subject to eps < 1/144 and eps < (1/36)(1/6 - 12 eps)(q - 4).
// In override mode (gamma, theta) are supplied directly; the conditions that
// can still be evaluated are attached as warnings instead of errors, since
// useful configurations sit exactly on the admissibility boundary.
struct ParamSet {
    double epsilon = 0.0;  // NaN in override mode
    double q = 0.0;        // field decay exponent
    double alpha = 0.0;    // NaN in override mode
    double beta = 0.0;     // NaN in override mode
    double gamma = 0.0;
    double theta = 0.0;
    double delta = 0.0;    // NaN in override mode
    int n0 = 5;            // base level of the inner estimator
    int n1 = 5;            // base level of the outer estimator
    // rate of the outer geometric law; the analysis fixes 1.5 and changing it
    // attaches a warning
    double outer_rate = 1.5;
    bool override_mode = false;
    std::vector<InequalityCheck> checks;
    std::vector<std::string> warnings;
};

// returns a copy with the outer geometric rate replaced (warning attached
// when it leaves the analyzed value)
ParamSet with_outer_rate(ParamSet params, double rate);

// Largest epsilon on a 1e-6 grid satisfying both epsilon conditions for q.
double default_epsilon(double q);

// Derive the full exponent set from epsilon.  Throws config_error with
// "EpsilonTooLarge" when an epsilon condition fails and "InvalidQ" for q <= 4.
ParamSet derive_parameters(double epsilon, double q, int n0, int n1);

// Build a set from user-supplied (gamma, theta).  Only nonpositive inputs are
// rejected ("InvalidOverride"); failed admissibility checks become warnings.
ParamSet override_parameters(double gamma, double theta, double q, int n0, int n1);

}  // namespace rpde

#endif
