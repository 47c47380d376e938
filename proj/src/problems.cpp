#include "rpde/problems.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rpde/errors.hpp"
#include "rpde/quadrature.hpp"

namespace rpde {

namespace {

using nlohmann::json;

void set_constant_sigma(Problem& p, double c) {
    // d = d' = 1 for all shipped constant-sigma problems
    p.sigma = [c](std::span<const double>, std::span<double> sig) { sig[0] = c; };
    p.sigma_jac = [](std::span<const double>, std::span<double> jac) { jac[0] = 0.0; };
}

void set_cos_sigma(Problem& p) {
    p.sigma = [](std::span<const double> x, std::span<double> sig) { sig[0] = std::cos(x[0]); };
    p.sigma_jac = [](std::span<const double> x, std::span<double> jac) {
        jac[0] = -std::sin(x[0]);
    };
}

FieldSpec zero_field() {
    FieldSpec f;
    f.dim = 1;
    f.q = 5.0;
    f.max_terms = 0;
    f.lambda = [](std::size_t) { return 0.0; };
    f.cov = [](std::size_t, std::span<double> c) { c[0] = 0.0; };
    f.psi = [](std::size_t, std::span<const double>) { return 0.0; };
    return f;
}

json sigma_tag(const Problem& p) {
    // shipped problems use named sigma families only
    std::vector<double> x{0.0};
    std::vector<double> s0(1), s1(1);
    p.sigma(x, s0);
    x[0] = 1.0;
    p.sigma(x, s1);
    if (s0[0] == s1[0]) return json{{"constant", s0[0]}};
    return json("cos");
}

}  // namespace

Problem ou_example1(double alpha_mean, double alpha_sd) {
    if (alpha_sd < 0.0) throw config_error("ou-example1: alpha_sd must be >= 0");

    Problem p;
    p.name = "ou-example1";
    p.d = 1;
    p.dprime = 1;
    set_constant_sigma(p, 1.0);
    p.payoff = [](std::span<const double> x) { return x[0] * x[0]; };
    p.functional = [](std::span<const double> y) { return std::exp(-y[0] * y[0]); };
    p.functional_grad = [](std::span<const double> y, std::span<double> g) {
        g[0] = -2.0 * y[0] * std::exp(-y[0] * y[0]);
    };
    p.points = {{0.0}};

    FieldSpec f;
    f.dim = 1;
    f.q = 5.0;
    f.max_terms = 1;  // drift is exactly -alpha x at every truncation level
    f.lambda = [](std::size_t) { return 1.0; };
    f.mean = [alpha_mean](std::size_t, std::span<double> m) { m[0] = alpha_mean; };
    f.cov = [alpha_sd](std::size_t, std::span<double> c) { c[0] = alpha_sd * alpha_sd; };
    f.psi = [](std::size_t, std::span<const double> x) { return -x[0]; };
    f.assumption_notes = {
        "drift -alpha x is unbounded (basis bound |psi| < L fails)",
        "coefficient mean is nonzero (coefficients are modeled as centered)"};
    p.field = f;
    p.assumption_notes = p.field.assumption_notes;

    p.default_params = derive_parameters(default_epsilon(f.q), f.q, 5, 5);

    json cfg{{"builtin", "ou-example1"}, {"alpha_mean", alpha_mean}, {"alpha_sd", alpha_sd}};
    p.config_json = cfg.dump();
    return p;
}

double ou_conditional_mean(double alpha) {
    if (alpha == 0.0) return 1.0;
    return -std::expm1(-2.0 * alpha) / (2.0 * alpha);
}

double ou_nu_quadrature(double abs_tol, double alpha_mean, double alpha_sd) {
    if (!(abs_tol > 0.0)) throw config_error("ou_nu_quadrature: abs_tol must be positive");
    const double norm = 1.0 / (alpha_sd * std::sqrt(2.0 * M_PI));
    const auto integrand = [=](double a) {
        const double z = (a - alpha_mean) / alpha_sd;
        const double m = ou_conditional_mean(a);
        return norm * std::exp(-0.5 * z * z) * std::exp(-m * m);
    };
    return integrate_adaptive(integrand, alpha_mean - 8.0 * alpha_sd, alpha_mean + 8.0 * alpha_sd,
                              abs_tol);
}

Problem example2_problem() {
    Problem p;
    p.name = "example2";
    p.d = 1;
    p.dprime = 1;
    set_cos_sigma(p);
    p.payoff = [](std::span<const double> x) { return x[0] * x[0]; };
    // convex functional: the debiasing-free baseline then carries a strictly
    // positive nested bias for the compare command to detect
    p.functional = [](std::span<const double> y) { return y[0] * y[0]; };
    p.functional_grad = [](std::span<const double> y, std::span<double> g) { g[0] = 2.0 * y[0]; };
    p.points = {{0.0}};

    FieldSpec f;
    f.dim = 1;
    f.q = 4.0;
    f.lambda = [](std::size_t) { return -1.0; };  // drift enters the SDE as -mu
    f.cov = [](std::size_t, std::span<double> c) { c[0] = 0.25 * 0.25; };
    f.psi = [](std::size_t i, std::span<const double> x) {
        return std::sin(static_cast<double>(i) * x[0]);
    };
    f.assumption_notes = {"decay exponent q = 4 is at the boundary (q > 4 required)"};
    p.field = f;
    p.assumption_notes = f.assumption_notes;
    p.assumption_notes.push_back("functional G(y) = y^2 has unbounded first derivative");

    p.default_params = override_parameters(1.0 / 3.0, 4.0 / 3.0, f.q, 5, 5);

    p.config_json = json{{"builtin", "example2"}}.dump();
    return p;
}

Problem trivial_linear() {
    Problem p;
    p.name = "trivial-linear";
    p.d = 1;
    p.dprime = 1;
    set_constant_sigma(p, 1.0);
    p.payoff = [](std::span<const double> x) { return x[0]; };
    p.functional = [](std::span<const double> y) { return y[0]; };
    p.functional_grad = [](std::span<const double>, std::span<double> g) { g[0] = 1.0; };
    p.points = {{0.0}};
    p.field = zero_field();
    p.default_params = derive_parameters(default_epsilon(5.0), 5.0, 5, 5);
    p.config_json = json{{"builtin", "trivial-linear"}}.dump();
    return p;
}

namespace {

Problem inline_problem(const json& cfg) {
    Problem p;
    p.name = cfg.value("name", "custom");
    p.d = cfg.value("d", 1);
    p.dprime = cfg.value("dprime", 1);
    if (p.d != 1 || p.dprime != 1)
        throw config_error("inline problem specs support d = d' = 1 (builtins cover the rest)");

    const json sig = cfg.value("sigma", json("cos"));
    if (sig.is_object() && sig.contains("constant"))
        set_constant_sigma(p, sig["constant"].get<double>());
    else if (sig == json("cos"))
        set_cos_sigma(p);
    else
        throw config_error("inline problem: sigma must be \"cos\" or {\"constant\": c}");

    const std::string payoff = cfg.value("payoff", "square");
    if (payoff == "square")
        p.payoff = [](std::span<const double> x) { return x[0] * x[0]; };
    else if (payoff == "identity")
        p.payoff = [](std::span<const double> x) { return x[0]; };
    else
        throw config_error("inline problem: payoff must be \"square\" or \"identity\"");

    const std::string functional = cfg.value("functional", "identity");
    if (functional == "identity") {
        p.functional = [](std::span<const double> y) { return y[0]; };
        p.functional_grad = [](std::span<const double>, std::span<double> g) { g[0] = 1.0; };
    } else if (functional == "exp-neg-square") {
        p.functional = [](std::span<const double> y) { return std::exp(-y[0] * y[0]); };
        p.functional_grad = [](std::span<const double> y, std::span<double> g) {
            g[0] = -2.0 * y[0] * std::exp(-y[0] * y[0]);
        };
    } else if (functional == "square") {
        p.functional = [](std::span<const double> y) { return y[0] * y[0]; };
        p.functional_grad = [](std::span<const double> y, std::span<double> g) {
            g[0] = 2.0 * y[0];
        };
    } else {
        throw config_error(
            "inline problem: functional must be \"identity\", \"square\" or \"exp-neg-square\"");
    }

    p.points = {{cfg.value("x0", 0.0)}};
    p.horizon = cfg.value("horizon", 1.0);  // != 1 is experimental
    if (!(p.horizon > 0.0)) throw config_error("inline problem: horizon must be positive");

    const json fc = cfg.value("field", json::object());
    FieldSpec f;
    f.dim = 1;
    f.q = fc.value("q", 5.0);
    const std::string basis = fc.value("basis", "sine");
    const double lambda = fc.value("lambda", 1.0);
    const double coeff_mean = fc.value("coeff_mean", 0.0);
    const double coeff_sd = fc.value("coeff_sd", 1.0);
    f.lambda = [lambda](std::size_t) { return lambda; };
    f.mean = [coeff_mean](std::size_t, std::span<double> m) { m[0] = coeff_mean; };
    f.cov = [coeff_sd](std::size_t, std::span<double> c) { c[0] = coeff_sd * coeff_sd; };
    if (basis == "sine")
        f.psi = [](std::size_t i, std::span<const double> x) {
            return std::sin(static_cast<double>(i) * x[0]);
        };
    else if (basis == "cosine")
        f.psi = [](std::size_t i, std::span<const double> x) {
            return std::cos(static_cast<double>(i) * x[0]);
        };
    else if (basis == "zero")
        f = zero_field();
    else
        throw config_error("inline problem: basis must be \"sine\", \"cosine\" or \"zero\"");
    if (fc.contains("max_terms") && !fc["max_terms"].is_null())
        f.max_terms = fc["max_terms"].get<std::size_t>();
    if (f.q <= 4.0)
        f.assumption_notes.push_back("decay exponent q <= 4 (q > 4 required)");
    p.field = f;
    p.assumption_notes = f.assumption_notes;

    const int n0 = cfg.value("n0", 5);
    const int n1 = cfg.value("n1", 5);
    if (cfg.contains("gamma") && !cfg["gamma"].is_null()) {
        if (!cfg.contains("theta") || cfg["theta"].is_null())
            throw config_error("inline problem: gamma override requires theta");
        p.default_params =
            override_parameters(cfg["gamma"].get<double>(), cfg["theta"].get<double>(), f.q, n0, n1);
    } else if (cfg.contains("epsilon") && !cfg["epsilon"].is_null()) {
        p.default_params = derive_parameters(cfg["epsilon"].get<double>(), f.q, n0, n1);
    } else {
        p.default_params = derive_parameters(default_epsilon(f.q), f.q, n0, n1);
    }

    p.config_json = cfg.dump();
    return p;
}

}  // namespace

Problem problem_from_json(const std::string& json_text) {
    json cfg;
    try {
        cfg = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("problem config is not valid JSON: ") + e.what());
    }
    if (cfg.contains("builtin")) {
        const std::string b = cfg["builtin"].get<std::string>();
        if (b == "ou-example1")
            return ou_example1(cfg.value("alpha_mean", 1.0), cfg.value("alpha_sd", 0.05));
        if (b == "example2") return example2_problem();
        if (b == "trivial-linear") return trivial_linear();
        throw config_error("unknown builtin problem: " + b);
    }
    return inline_problem(cfg);
}

Problem load_problem(const std::string& name_or_path) {
    if (name_or_path == "ou-example1") return ou_example1();
    if (name_or_path == "example2") return example2_problem();
    if (name_or_path == "trivial-linear") return trivial_linear();

    std::ifstream in(name_or_path);
    if (!in) throw config_error("cannot open problem file: " + name_or_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return problem_from_json(buf.str());
}

std::string problem_config(const Problem& p) {
    if (!p.config_json.empty()) return p.config_json;
    json cfg{{"name", p.name}, {"sigma", sigma_tag(p)}};
    return cfg.dump();
}

}  // namespace rpde
