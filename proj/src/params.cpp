#include "rpde/params.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rpde/errors.hpp"

namespace rpde {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

InequalityCheck make_check(const std::string& name, double lhs, double rhs, bool strict) {
    InequalityCheck c;
    c.name = name;
    c.lhs = lhs;
    c.rhs = rhs;
    c.strict = strict;
    c.holds = strict ? (lhs > rhs) : (lhs >= rhs);
    return c;
}

InequalityCheck skipped_check(const std::string& name) {
    InequalityCheck c;
    c.name = name;
    c.lhs = kNaN;
    c.rhs = kNaN;
    c.evaluated = false;
    c.holds = false;
    return c;
}

// second epsilon condition: eps < (1/36)(1/6 - 12 eps)(q - 4)
double epsilon_bound2(double epsilon, double q) {
    return (1.0 / 36.0) * (1.0 / 6.0 - 12.0 * epsilon) * (q - 4.0);
}

void attach_checks(ParamSet& p) {
    p.checks.clear();
    if (!p.override_mode) {
        p.checks.push_back(make_check("epsilon < 1/144", 1.0 / 144.0, p.epsilon, true));
        p.checks.push_back(make_check("epsilon < (1/36)(1/6 - 12 epsilon)(q - 4)",
                                      epsilon_bound2(p.epsilon, p.q), p.epsilon, true));
    } else {
        p.checks.push_back(skipped_check("epsilon < 1/144"));
        p.checks.push_back(skipped_check("epsilon < (1/36)(1/6 - 12 epsilon)(q - 4)"));
    }

    p.checks.push_back(make_check("gamma >= 1/4", p.gamma, 0.25, false));
    p.checks.push_back(
        make_check("(3 + (q-4)/2) gamma > 1", (3.0 + (p.q - 4.0) / 2.0) * p.gamma, 1.0, true));

    if (!p.override_mode) {
        p.checks.push_back(make_check("8(2 alpha - beta) > 4 - delta",
                                      8.0 * (2.0 * p.alpha - p.beta), 4.0 - p.delta, true));
        p.checks.push_back(make_check("4 - delta > 3 theta", 4.0 - p.delta, 3.0 * p.theta, true));
    } else {
        p.checks.push_back(skipped_check("8(2 alpha - beta) > 4 - delta"));
        p.checks.push_back(skipped_check("4 - delta > 3 theta"));
    }

    p.checks.push_back(make_check("3 theta > 0", 3.0 * p.theta, 0.0, true));
    p.checks.push_back(make_check("theta > 1 + gamma", p.theta, 1.0 + p.gamma, true));
    p.checks.push_back(make_check("1 + gamma > 0", 1.0 + p.gamma, 0.0, true));
}

void validate_levels(int n0, int n1) {
    if (n0 < 0) throw config_error("InvalidLevel: n0 must be >= 0");
    if (n1 < 1) throw config_error("InvalidLevel: n1 must be >= 1");
}

}  // namespace

double default_epsilon(double q) {
    if (q <= 4.0) throw config_error("InvalidQ: field decay exponent q must exceed 4");
    // closed-form cap of the second condition: eps < (q-4)/(216 + 72(q-4))
    const double cap = std::min(1.0 / 144.0, (q - 4.0) / (216.0 + 72.0 * (q - 4.0)));
    constexpr double step = 1e-6;
    double eps = std::floor(cap / step) * step;
    while (eps > 0.0 && !(eps < 1.0 / 144.0 && eps < epsilon_bound2(eps, q))) eps -= step;
    if (eps <= 0.0) throw config_error("EpsilonTooLarge: no admissible epsilon on the 1e-6 grid");
    return eps;
}

ParamSet derive_parameters(double epsilon, double q, int n0, int n1) {
    if (q <= 4.0) throw config_error("InvalidQ: field decay exponent q must exceed 4");
    if (!(epsilon > 0.0)) throw config_error("EpsilonTooLarge: epsilon must be positive");
    if (!(epsilon < 1.0 / 144.0)) {
        std::ostringstream os;
        os << "EpsilonTooLarge: epsilon = " << epsilon << " violates epsilon < 1/144";
        throw config_error(os.str());
    }
    if (!(epsilon < epsilon_bound2(epsilon, q))) {
        std::ostringstream os;
        os << "EpsilonTooLarge: epsilon = " << epsilon
           << " violates epsilon < (1/36)(1/6 - 12 epsilon)(q - 4) = " << epsilon_bound2(epsilon, q);
        throw config_error(os.str());
    }
    validate_levels(n0, n1);

    ParamSet p;
    p.epsilon = epsilon;
    p.q = q;
    p.alpha = 0.5 - epsilon;
    p.beta = 0.5 + 2.0 * epsilon;
    p.gamma = 1.0 / 3.0 - 12.0 * epsilon;
    p.theta = 4.0 / 3.0 - 11.5 * epsilon;
    p.delta = 33.0 * epsilon;
    p.n0 = n0;
    p.n1 = n1;
    p.override_mode = false;
    attach_checks(p);
    for (const auto& c : p.checks) {
        if (c.evaluated && !c.holds)
            throw config_error("EpsilonTooLarge: derived set fails '" + c.name + "'");
    }
    return p;
}

ParamSet with_outer_rate(ParamSet params, double rate) {
    if (!(rate > 0.0)) throw config_error("InvalidOverride: outer rate must be positive");
    params.outer_rate = rate;
    if (rate != 1.5) {
        std::ostringstream os;
        os << "outer geometric rate " << rate << " departs from the analyzed value 1.5";
        params.warnings.push_back(os.str());
    }
    return params;
}

ParamSet override_parameters(double gamma, double theta, double q, int n0, int n1) {
    if (!(gamma > 0.0) || !(theta > 0.0))
        throw config_error("InvalidOverride: gamma and theta must be positive");
    validate_levels(n0, n1);

    ParamSet p;
    p.epsilon = kNaN;
    p.q = q;
    p.alpha = kNaN;
    p.beta = kNaN;
    p.gamma = gamma;
    p.theta = theta;
    p.delta = kNaN;
    p.n0 = n0;
    p.n1 = n1;
    p.override_mode = true;
    attach_checks(p);
    for (const auto& c : p.checks) {
        if (!c.evaluated || c.holds) continue;
        std::ostringstream os;
        os << c.name << " fails";
        if (c.strict && c.lhs == c.rhs) os << " at boundary (" << c.lhs << " = " << c.rhs << ")";
        else os << " (" << c.lhs << " vs " << c.rhs << ")";
        p.warnings.push_back(os.str());
    }
    if (q <= 4.0)
        p.warnings.push_back("q <= 4 violates the field decay assumption; expected cost may be infinite");
    return p;
}

}  // namespace rpde
