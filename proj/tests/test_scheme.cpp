#include <doctest.h>

#include <cmath>

#include "rpde/engine.hpp"
#include "rpde/errors.hpp"
#include "rpde/problems.hpp"
#include "rpde/scheme.hpp"
#include "rpde/stats.hpp"

using namespace rpde;

namespace {

// d = d' = 1 geometric-style problem: sigma(x) = x, zero drift
Problem multiplicative_noise_problem() {
    Problem p = trivial_linear();
    p.name = "mult-noise";
    p.sigma = [](std::span<const double> x, std::span<double> s) { s[0] = x[0]; };
    p.sigma_jac = [](std::span<const double>, std::span<double> j) { j[0] = 1.0; };
    return p;
}

}  // namespace

TEST_CASE("zero drift and constant sigma reduce the recursion to a running sum") {
    const Problem p = trivial_linear();
    const ParamSet params = p.default_params;
    for (int level = 0; level <= 6; ++level) {
        RngStream s(42 + level, 0);
        const DyadicPath path = sample_path(level, 1, s);
        FieldRealization r = realize(p.field, RngStream(1, 0));
        const double x0[1] = {0.25};
        const SchemeResult res = num_sol({x0, 1}, level, path, r, params, p);
        double expect = 0.25;
        for (std::uint64_t k = 0; k < path.steps(); ++k) expect += path.increment(k)[0];
        CHECK(res.terminal[0] == expect);
    }
}

TEST_CASE("one hand-evaluated step with sigma(x) = x") {
    const Problem p = multiplicative_noise_problem();
    const ParamSet params = p.default_params;
    DyadicPath path;
    path.level = 0;
    path.dim = 1;
    path.incr = {0.7};
    FieldRealization r = realize(p.field, RngStream(1, 0));
    const double x0[1] = {1.5};
    const SchemeResult res = num_sol({x0, 1}, 0, path, r, params, p);
    const double b = 0.7;
    // x + x b + x (b^2 - 1)/2
    CHECK(res.terminal[0] == doctest::Approx(1.5 + 1.5 * b + 1.5 * (b * b - 1.0) / 2.0)
                                 .epsilon(1e-15));
}

TEST_CASE("dimension mismatches are rejected") {
    const Problem p = trivial_linear();
    RngStream s(1, 0);
    const DyadicPath path = sample_path(3, 2, s);  // wrong dim
    FieldRealization r = realize(p.field, RngStream(1, 0));
    const double x0[1] = {0.0};
    CHECK_THROWS_AS(num_sol({x0, 1}, 3, path, r, p.default_params, p), config_error);
}

TEST_CASE("pinned-alpha terminal moment matches the closed form at level 8") {
    const Problem p = ou_example1(1.0, 0.0);
    const ParamSet params = p.default_params;
    FieldRealization r = realize(p.field, RngStream(99, 0));
    Welford w;
    RngStream paths(99, 1);
    for (int i = 0; i < 100000; ++i) {
        const DyadicPath path = sample_path(8, 1, paths);
        const SchemeResult res = num_sol(p.points[0], 8, path, r, params, p);
        w.add(p.payoff(res.terminal));
    }
    // (1 - e^-2)/2 = 0.43233...; level-8 weak error sits well inside the band
    CHECK(std::abs(w.mean - 0.43233235838169365) <= 3.0 * w.std_error());
}

TEST_CASE("level differences vanish identically for the degenerate problem") {
    // all three recursions compute x + sum(increments); the only residue is
    // the non-associativity of the three summation orders
    const Problem p = trivial_linear();
    const ParamSet params = p.default_params;
    for (const std::uint64_t seed : {1ull, 2ull, 3ull}) {
        FieldRealization r = realize(p.field, RngStream(seed, 0));
        RngStream s(seed, 1);
        for (int n = 0; n <= 5; ++n) {
            const DeltaResult d = delta_gen(p.points[0], n, s, r, params, p);
            CHECK(std::abs(d.delta) <= 1e-13);
        }
    }
}

TEST_CASE("delta mean agrees with the marginal-mean difference at level 3") {
    const Problem p = ou_example1(1.0, 0.0);
    const ParamSet params = p.default_params;
    FieldRealization r = realize(p.field, RngStream(7, 0));
    const int n = 3;
    const int samples = 1000000;

    Welford wd;
    RngStream sd(7, 1);
    for (int i = 0; i < samples; ++i) wd.add(delta_gen(p.points[0], n, sd, r, params, p).delta);

    // independent plain-MC estimates of both marginal means with fresh paths
    Welford m4, m3;
    RngStream s4(8, 1), s3(9, 1);
    for (int i = 0; i < samples; ++i) {
        const DyadicPath p4 = sample_path(n + 1, 1, s4);
        m4.add(p.payoff(num_sol(p.points[0], n + 1, p4, r, params, p).terminal));
        const DyadicPath p3 = sample_path(n, 1, s3);
        m3.add(p.payoff(num_sol(p.points[0], n, p3, r, params, p).terminal));
    }
    const double gap = wd.mean - (m4.mean - m3.mean);
    const double joint_se = std::sqrt(wd.std_error() * wd.std_error() +
                                      m4.std_error() * m4.std_error() +
                                      m3.std_error() * m3.std_error());
    CHECK(std::abs(gap) <= 4.0 * joint_se);
}

TEST_CASE("fine and antithetic terminals share a marginal distribution") {
    const Problem p = ou_example1(1.0, 0.0);
    const ParamSet params = p.default_params;
    FieldRealization r = realize(p.field, RngStream(13, 0));
    Welford wf, wa;
    RngStream s(13, 1);
    for (int i = 0; i < 100000; ++i) {
        const DyadicPath fine = sample_path(4, 1, s);
        const DyadicPath anti = antithetic_swap(fine);
        wf.add(p.payoff(num_sol(p.points[0], 4, fine, r, params, p).terminal));
        wa.add(p.payoff(num_sol(p.points[0], 4, anti, r, params, p).terminal));
    }
    const double joint_se =
        std::sqrt(wf.std_error() * wf.std_error() + wa.std_error() * wa.std_error());
    CHECK(std::abs(wf.mean - wa.mean) <= 4.0 * joint_se);
}

TEST_CASE("the returned fine path reproduces the difference bit-for-bit") {
    const Problem p = example2_problem();
    const ParamSet params = p.default_params;
    for (int n = 0; n <= 4; ++n) {
        FieldRealization r = realize(p.field, RngStream(50 + n, 0));
        RngStream s(50 + n, 1);
        const DeltaResult d = delta_gen(p.points[0], n, s, r, params, p);
        REQUIRE(d.fine.level == n + 1);

        const SchemeResult xf = num_sol(p.points[0], n + 1, d.fine, r, params, p);
        const SchemeResult xa =
            num_sol(p.points[0], n + 1, antithetic_swap(d.fine), r, params, p);
        const SchemeResult xc = num_sol(p.points[0], n, coarsen(d.fine), r, params, p);
        const double again =
            0.5 * (p.payoff(xf.terminal) + p.payoff(xa.terminal)) - p.payoff(xc.terminal);
        CHECK(d.delta == again);
        CHECK(d.cost_units == xc.cost_units + 2 * xf.cost_units);
    }
}

TEST_CASE("cost units follow 2^n (1 + terms)") {
    const Problem ex2 = example2_problem();
    // gamma = 1/3: levels 5 and 9 truncate to 3 and 8 terms
    CHECK(level_cost_units(5, 1.0 / 3.0, ex2.field) == 32 * (1 + 3));
    CHECK(level_cost_units(9, 1.0 / 3.0, ex2.field) == 512 * (1 + 8));

    const Problem ou = ou_example1();
    // single-term field: truncation pinned to one term at every level
    CHECK(level_cost_units(5, ou.default_params.gamma, ou.field) == 32 * 2);
    CHECK(level_cost_units(12, ou.default_params.gamma, ou.field) == 4096 * 2);

    const Problem p = trivial_linear();
    const ParamSet params = p.default_params;
    FieldRealization r = realize(p.field, RngStream(1, 0));
    RngStream s(1, 1);
    const DyadicPath path = sample_path(4, 1, s);
    CHECK(num_sol(p.points[0], 4, path, r, params, p).cost_units ==
          level_cost_units(4, params.gamma, p.field));
}

TEST_CASE("antithetic second moment decays at least quadratically in dt") {
    const Problem p = ou_example1();  // random alpha
    const std::vector<int> levels{2, 3, 4, 5, 6, 7};
    const ConvergenceReport rep =
        run_delta_convergence(p, p.default_params, levels, 30000, 77, 2);
    REQUIRE_FALSE(rep.degenerate);
    CHECK(rep.slope <= -1.5);
}
