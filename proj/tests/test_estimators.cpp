#include <doctest.h>

#include <cmath>
#include <vector>

#include "rpde/engine.hpp"
#include "rpde/errors.hpp"
#include "rpde/problems.hpp"
#include "test_util.hpp"

using namespace rpde;

TEST_CASE("geometric pmf at rate 1.5") {
    const GeometricLaw law{1.5};
    CHECK(law.pmf(0) == doctest::Approx(1.0 - std::exp2(-1.5)).epsilon(1e-15));
    double total = 0.0;
    double prev = 1.0;
    for (int n = 0; n < 200; ++n) {
        const double p = law.pmf(n);
        CHECK(p < prev);
        prev = p;
        total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("inverse-CDF map: uniforms below p0 give level 0") {
    const GeometricLaw law{1.5};
    const double p0 = law.pmf(0);
    CHECK(geometric_from_uniform(p0 * 0.5, law) == 0);
    CHECK(geometric_from_uniform(p0 * 0.999, law) == 0);
    CHECK(geometric_from_uniform(p0 + 1e-9, law) == 1);
    CHECK(geometric_from_uniform(1e-12, law) == 0);
}

TEST_CASE("geometric frequencies pass a chi-squared test at 1e6 draws") {
    const GeometricLaw law{1.5};
    RngStream s(2718, 0);
    const int n_draws = 1000000;
    const int max_bin = 14;  // group the tail so expected counts stay above 5
    std::vector<double> counts(max_bin + 1, 0.0);
    for (int i = 0; i < n_draws; ++i) {
        const int n = sample_geometric(law, s);
        counts[static_cast<std::size_t>(std::min(n, max_bin))] += 1.0;
    }
    double chi2 = 0.0;
    double tail_p = 1.0;
    for (int b = 0; b < max_bin; ++b) {
        const double p = law.pmf(b);
        tail_p -= p;
        const double expect = p * n_draws;
        chi2 += (counts[b] - expect) * (counts[b] - expect) / expect;
    }
    const double expect_tail = tail_p * n_draws;
    chi2 += (counts[max_bin] - expect_tail) * (counts[max_bin] - expect_tail) / expect_tail;
    CHECK(test_util::chi2_sf(chi2, max_bin) > 0.001);
}

TEST_CASE("degenerate problem: the inner correction is exactly zero") {
    const Problem p = trivial_linear();
    const ParamSet params = p.default_params;
    Welford w;
    for (std::uint32_t copy = 0; copy < 2000; ++copy) {
        const CopyStreams cs{5, copy};
        FieldRealization r = realize(p.field, cs.field_stream());
        RngStream zs = cs.z_stream(0, 0, 1);
        const ZSample z = unbiased_z(p.points[0], r, params, p, zs);
        // the difference is summation roundoff amplified by at most 1/p_N
        CHECK(std::abs(z.correction) <= 1e-9);
        CHECK(std::abs(z.value - z.base) <= 1e-9);
        w.add(z.value);
    }
    // E[Z] = x + E[B(1)] = 0
    CHECK(std::abs(w.mean) <= 4.0 * w.std_error());
}

TEST_CASE("inner estimator is unbiased for the pinned-alpha conditional mean") {
    const Problem p = ou_example1(1.0, 0.0);
    const ParamSet params = p.default_params;
    Welford w;
    for (std::uint32_t copy = 0; copy < 2000; ++copy) {
        const CopyStreams cs{6, copy};
        FieldRealization r = realize(p.field, cs.field_stream());
        RngStream zs = cs.z_stream(0, 0, 1);
        w.add(unbiased_z(p.points[0], r, params, p, zs).value);
    }
    CHECK(std::abs(w.mean - ou_conditional_mean(1.0)) <= 4.0 * w.std_error());
}

TEST_CASE("the base term rides the coarsened fine path, bit for bit") {
    const Problem p = ou_example1();
    const ParamSet params = p.default_params;
    const GeometricLaw law{params.theta};
    for (std::uint32_t copy = 0; copy < 50; ++copy) {
        const CopyStreams cs{871, copy};
        FieldRealization r = realize(p.field, cs.field_stream());
        RngStream zs = cs.z_stream(0, 0, 1);
        const ZSample z = unbiased_z(p.points[0], r, params, p, zs);

        // replay the stream: same level draw, same fine path
        FieldRealization r2 = realize(p.field, cs.field_stream());
        RngStream replay = cs.z_stream(0, 0, 1);
        const int n = sample_geometric(law, replay);
        REQUIRE(n == z.level_drawn);
        const DeltaResult dg = delta_gen(p.points[0], n + params.n0, replay, r2, params, p);
        DyadicPath base = dg.fine;
        for (int lev = n + params.n0 + 1; lev > params.n0; --lev) base = coarsen(base);
        const SchemeResult xb = num_sol(p.points[0], params.n0, base, r2, params, p);
        CHECK(z.base == p.payoff(xb.terminal));
        CHECK(z.correction == dg.delta / law.pmf(n));
    }
}

TEST_CASE("realized inner cost matches the level formula per draw") {
    const Problem p = ou_example1();
    const ParamSet params = p.default_params;
    for (std::uint32_t copy = 0; copy < 500; ++copy) {
        const CopyStreams cs{8, copy};
        FieldRealization r = realize(p.field, cs.field_stream());
        RngStream zs = cs.z_stream(0, 0, 1);
        const ZSample z = unbiased_z(p.points[0], r, params, p, zs);
        const int n = z.level_drawn;
        const std::uint64_t expect =
            level_cost_units(params.n0, params.gamma, p.field) +
            level_cost_units(n + params.n0, params.gamma, p.field) +
            2 * level_cost_units(n + params.n0 + 1, params.gamma, p.field);
        CHECK(z.cost_units == expect);
    }
}

TEST_CASE("analytic expected cost matches an independent geometric-sum formula") {
    const Problem p = ou_example1();
    const ParamSet params = p.default_params;
    // single-term field: cost_n = 2^(n+1); closed form via sum p_n 2^n
    const double r = std::exp2(-params.theta);
    const double sum_pn_2n = (1.0 - r) / (1.0 - 2.0 * r);
    const double n0 = std::exp2(params.n0 + 1);
    const double closed = n0 + (n0 + 4.0 * n0) * sum_pn_2n;
    CHECK(expected_z_cost(params, p.field) == doctest::Approx(closed).epsilon(1e-9));
}

TEST_CASE("empirical mean cost tracks the analytic expectation") {
    const Problem p = ou_example1();
    const ParamSet params = p.default_params;
    Welford costs;
    std::uint64_t max_cost = 0;
    for (std::uint32_t copy = 0; copy < 5000; ++copy) {
        const CopyStreams cs{905, copy};
        FieldRealization r = realize(p.field, cs.field_stream());
        RngStream zs = cs.z_stream(0, 0, 1);
        const ZSample z = unbiased_z(p.points[0], r, params, p, zs);
        costs.add(static_cast<double>(z.cost_units));
        max_cost = std::max(max_cost, z.cost_units);
    }
    const double analytic = expected_z_cost(params, p.field);
    CHECK(std::abs(costs.mean - analytic) / analytic < 0.30);
    CHECK(static_cast<double>(max_cost) < 1e4 * costs.mean);
}

TEST_CASE("expected cost is infinite at the boundary pair") {
    const Problem p = example2_problem();
    CHECK(std::isinf(expected_z_cost(p.default_params, p.field)));
}

TEST_CASE("rho applies the functional to block means") {
    Problem p = trivial_linear();  // G = identity, k = 1
    const std::vector<std::vector<double>> z{{2.0, 4.0}};
    CHECK(rho(z, 1, 2, p) == 3.0);

    p.functional = [](std::span<const double>) { return 7.5; };
    CHECK(rho(z, 1, 1, p) == 7.5);
    CHECK(rho(z, 2, 2, p) == 7.5);

    Problem p2 = trivial_linear();
    p2.functional = [](std::span<const double> y) { return y[0] * y[1]; };
    p2.points = {{0.0}, {0.0}};
    const std::vector<std::vector<double>> z2{{1.0, 3.0}, {2.0, 2.0}};
    CHECK(rho(z2, 1, 2, p2) == 4.0);

    CHECK_THROWS_AS(rho(z, 0, 2, p2), config_error);
    CHECK_THROWS_AS(rho(z, 1, 3, p2), config_error);
    CHECK_THROWS_AS(rho(z, 2, 1, p2), config_error);
}

TEST_CASE("linear functional collapses the outer estimator to its plugin term") {
    const Problem p = trivial_linear();
    const ParamSet params = p.default_params;
    for (std::uint32_t copy = 0; copy < 100; ++copy) {
        const WSample w = unbiased_w(p, params, CopyStreams{31, copy});
        CHECK(w.correction == 0.0);
        CHECK(w.value == w.plugin_term);
        // the baseline extraction differs only by the roundoff-sized inner corrections
        CHECK(std::abs(w.biased_value - w.value) <= 1e-10);
    }
    for (int outer = 1; outer <= 4; ++outer)
        CHECK(nested_delta(p, params, CopyStreams{32, 9}, outer) == 0.0);
}

TEST_CASE("production outer estimator matches the literal transcription") {
    const Problem ou = ou_example1();
    for (std::uint32_t copy = 0; copy < 5; ++copy) {
        const CopyStreams cs{64, copy};
        const WSample a = unbiased_w(ou, ou.default_params, cs);
        const WSample b = test_util::reference_w(ou, ou.default_params, cs);
        CHECK(a.outer_level == b.outer_level);
        CHECK(a.z_count == b.z_count);
        CHECK(a.plugin_term == b.plugin_term);  // same summation order: bitwise
        CHECK(a.value == doctest::Approx(b.value).epsilon(1e-13));
    }
    const Problem ex2 = example2_problem();
    for (std::uint32_t copy = 0; copy < 3; ++copy) {
        const CopyStreams cs{65, copy};
        const WSample a = unbiased_w(ex2, ex2.default_params, cs);
        const WSample b = test_util::reference_w(ex2, ex2.default_params, cs);
        CHECK(a.plugin_term == b.plugin_term);
        CHECK(a.value == doctest::Approx(b.value).epsilon(1e-13));
    }
}

TEST_CASE("outer estimator is unbiased on the OU benchmark") {
    const Problem p = ou_example1();
    const EstimateReport rep =
        run_estimate(p, p.default_params, EstimatorKind::unbiased_w, 1000, 404, 2);
    const double truth = ou_nu_quadrature(1e-6);
    CHECK(std::abs(rep.estimate - truth) <= 4.0 * rep.std_error);
}

TEST_CASE("baseline does strictly less work than the full estimator") {
    const Problem p = ou_example1();
    const ParamSet params = p.default_params;
    for (std::uint32_t copy = 0; copy < 20; ++copy) {
        const CopyStreams cs{77, copy};
        const WSample full = unbiased_w(p, params, cs);
        const WSample base = biased_baseline_w(p, params, cs);
        CHECK(base.cost_units < full.cost_units);
        CHECK(base.correction == 0.0);
        CHECK(base.outer_level == -1);
        // the paired extraction accounts the baseline at standalone cost
        CHECK(full.biased_cost_units == base.cost_units);
    }
}

TEST_CASE("running mean of the inner cost settles") {
    const Problem p = ou_example1();
    const ParamSet params = p.default_params;
    Welford first_half, all;
    for (std::uint32_t copy = 0; copy < 4000; ++copy) {
        const CopyStreams cs{906, copy};
        FieldRealization r = realize(p.field, cs.field_stream());
        RngStream zs = cs.z_stream(0, 0, 1);
        const double c = static_cast<double>(unbiased_z(p.points[0], r, params, p, zs).cost_units);
        if (copy < 2000) first_half.add(c);
        all.add(c);
    }
    CHECK(std::abs(first_half.mean - all.mean) / all.mean < 0.25);
}

TEST_CASE("outer rate is a knob with a warning attached off the analyzed value") {
    const Problem p = trivial_linear();
    const ParamSet fast = with_outer_rate(p.default_params, 2.0);
    CHECK(fast.outer_rate == 2.0);
    CHECK_FALSE(fast.warnings.empty());
    CHECK(with_outer_rate(p.default_params, 1.5).warnings.empty());
    CHECK_THROWS_AS(with_outer_rate(p.default_params, 0.0), config_error);

    // the collapse identity holds at any rate, and the draw distribution moves
    for (std::uint32_t copy = 0; copy < 50; ++copy) {
        const WSample w = unbiased_w(p, fast, CopyStreams{41, copy});
        CHECK(w.correction == 0.0);
        CHECK(w.value == w.plugin_term);
    }
    Welford outer_default, outer_fast;
    for (std::uint32_t copy = 0; copy < 400; ++copy) {
        outer_default.add(unbiased_w(p, p.default_params, CopyStreams{43, copy}).outer_level);
        outer_fast.add(unbiased_w(p, fast, CopyStreams{43, copy}).outer_level);
    }
    CHECK(outer_fast.mean < outer_default.mean);  // faster decay, smaller draws
}
