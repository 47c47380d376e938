#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rpde/errors.hpp"
#include "rpde/quadrature.hpp"
#include "rpde/stats.hpp"
#include "test_util.hpp"

using namespace rpde;

TEST_CASE("welford on a small known set") {
    Welford w;
    for (const double v : {1.0, 2.0, 3.0, 4.0}) w.add(v);
    CHECK(w.mean == 2.5);
    CHECK(w.variance() == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK(w.std_error() == doctest::Approx(std::sqrt(5.0 / 12.0)).epsilon(1e-15));
}

TEST_CASE("chunked merges agree with a sequential pass to near-ulp") {
    std::mt19937_64 gen(99);
    std::normal_distribution<double> dist(3.0, 2.0);
    std::vector<double> values(1000);
    for (auto& v : values) v = dist(gen);

    Welford seq;
    for (const double v : values) seq.add(v);

    for (const std::size_t chunk : {std::size_t{1}, std::size_t{7}, std::size_t{64}, std::size_t{333}}) {
        std::vector<Welford> parts;
        for (std::size_t lo = 0; lo < values.size(); lo += chunk) {
            Welford w;
            for (std::size_t i = lo; i < std::min(values.size(), lo + chunk); ++i) w.add(values[i]);
            parts.push_back(w);
        }
        // merge in a scrambled order as well as in order
        std::shuffle(parts.begin(), parts.end(), gen);
        Welford merged;
        for (const auto& p : parts) merged.merge(p);
        CHECK(merged.n == seq.n);
        CHECK(merged.mean == doctest::Approx(seq.mean).epsilon(1e-14));
        CHECK(merged.m2 == doctest::Approx(seq.m2).epsilon(1e-12));
    }
}

TEST_CASE("ols recovers an exact line") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> y;
    for (const double v : x) y.push_back(3.0 * v - 2.0);
    const OlsFit fit = fit_line(x, y);
    CHECK(fit.slope == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(fit.intercept == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(fit.slope_se == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("histogram edge cases") {
    const std::vector<double> constant(100, 2.5);
    const HistogramBins h = make_histogram(constant, 7);
    std::uint64_t total = 0;
    int nonzero = 0;
    for (const auto c : h.counts) {
        total += c;
        nonzero += c > 0 ? 1 : 0;
    }
    CHECK(total == 100);
    CHECK(nonzero == 1);

    std::vector<double> spread;
    for (int i = 0; i < 1000; ++i) spread.push_back(std::sin(i * 0.7));
    const HistogramBins h2 = make_histogram(spread, 13);
    std::uint64_t total2 = 0;
    for (const auto c : h2.counts) total2 += c;
    CHECK(total2 == 1000);
    CHECK(h2.lo == *std::min_element(spread.begin(), spread.end()));
    CHECK(h2.hi == *std::max_element(spread.begin(), spread.end()));

    CHECK_THROWS_AS(make_histogram(std::vector<double>{}, 5), config_error);
    CHECK_THROWS_AS(make_histogram(spread, 1), config_error);
}

TEST_CASE("quadrature on known integrals") {
    CHECK(integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0, 1e-12) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(integrate_adaptive([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12) ==
          doctest::Approx(2.0).epsilon(1e-12));
    const double gauss = integrate_adaptive(
        [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }, -8.0, 8.0, 1e-10);
    CHECK(gauss == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("quadrature reports non-convergence instead of a wrong answer") {
    CHECK_THROWS_AS(
        integrate_adaptive([](double x) { return 1.0 / x; }, 1e-12, 1.0, 1e-10, 8),
        numeric_error);
}

TEST_CASE("chi-squared survival function sanity") {
    CHECK(test_util::chi2_sf(0.0, 3) == doctest::Approx(1.0));
    CHECK(test_util::chi2_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(test_util::chi2_sf(18.307038053275146, 10) == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(test_util::chi2_sf(100.0, 3) < 1e-20);
}
