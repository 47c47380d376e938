#include <doctest.h>

#include <cmath>

#include "rpde/brownian.hpp"
#include "rpde/errors.hpp"
#include "rpde/stats.hpp"

using namespace rpde;

TEST_CASE("level-0 increments are standard normal") {
    RngStream s(77, 0);
    Welford w;
    for (int i = 0; i < 100000; ++i) {
        const DyadicPath p = sample_path(0, 1, s);
        REQUIRE(p.steps() == 1);
        w.add(p.incr[0]);
    }
    CHECK(w.mean > -0.01);
    CHECK(w.mean < 0.01);
    CHECK(w.variance() > 0.98);
    CHECK(w.variance() < 1.02);
}

TEST_CASE("level-3 two-dimensional increments have variance dt = 1/8") {
    RngStream s(78, 0);
    Welford w0, w1;
    for (int i = 0; i < 10000; ++i) {
        const DyadicPath p = sample_path(3, 2, s);
        REQUIRE(p.steps() == 8);
        CHECK(p.dt() == 0.125);
        for (std::uint64_t k = 0; k < 8; ++k) {
            w0.add(p.increment(k)[0]);
            w1.add(p.increment(k)[1]);
        }
    }
    CHECK(w0.variance() == doctest::Approx(0.125).epsilon(0.02));
    CHECK(w1.variance() == doctest::Approx(0.125).epsilon(0.02));
}

TEST_CASE("sampling is deterministic given the stream") {
    RngStream s1(5, 11), s2(5, 11);
    const DyadicPath a = sample_path(6, 3, s1);
    const DyadicPath b = sample_path(6, 3, s2);
    CHECK(a.incr == b.incr);
}

TEST_CASE("coarsening sums increment pairs exactly, levels 1..12") {
    for (int level = 1; level <= 12; ++level) {
        RngStream s(100 + level, 0);
        const DyadicPath p = sample_path(level, 2, s);
        const DyadicPath c = coarsen(p);
        REQUIRE(c.level == level - 1);
        REQUIRE(c.steps() == p.steps() / 2);
        for (std::uint64_t k = 0; k < c.steps(); ++k)
            for (int j = 0; j < 2; ++j) {
                // bit-for-bit, not approximately
                CHECK(c.increment(k)[j] == p.increment(2 * k)[j] + p.increment(2 * k + 1)[j]);
            }
    }
}

TEST_CASE("level-1 pair (a,b) coarsens to a+b and swaps to (b,a)") {
    DyadicPath p;
    p.level = 1;
    p.dim = 1;
    p.incr = {0.25, -1.5};
    const DyadicPath c = coarsen(p);
    CHECK(c.incr[0] == 0.25 + -1.5);
    const DyadicPath a = antithetic_swap(p);
    CHECK(a.incr[0] == -1.5);
    CHECK(a.incr[1] == 0.25);
}

TEST_CASE("swap is an involution and preserves pair sums") {
    for (int level = 1; level <= 12; ++level) {
        RngStream s(200 + level, 0);
        const DyadicPath p = sample_path(level, 1, s);
        const DyadicPath a = antithetic_swap(p);
        const DyadicPath aa = antithetic_swap(a);
        CHECK(aa.incr == p.incr);
        for (std::uint64_t m = 0; m < p.steps() / 2; ++m)
            CHECK(a.increment(2 * m)[0] + a.increment(2 * m + 1)[0] ==
                  p.increment(2 * m)[0] + p.increment(2 * m + 1)[0]);
        // swapped pairs produce the same coarse path bit-for-bit
        CHECK(coarsen(a).incr == coarsen(p).incr);
    }
}

TEST_CASE("repeated coarsening telescopes to the total displacement") {
    RngStream s(300, 0);
    DyadicPath p = sample_path(10, 1, s);
    double total = 0.0;
    for (const double v : p.incr) total += v;
    while (p.level > 0) p = coarsen(p);
    CHECK(p.incr[0] == doctest::Approx(total).epsilon(1e-13));
}

TEST_CASE("level-0 paths reject coarsen and swap") {
    RngStream s(1, 0);
    const DyadicPath p = sample_path(0, 1, s);
    CHECK_THROWS_AS(coarsen(p), config_error);
    CHECK_THROWS_AS(antithetic_swap(p), config_error);
}

TEST_CASE("levy proxy on a zero increment is -dt/2 on the diagonal") {
    const double incr[2] = {0.0, 0.0};
    const LevyProxy a = levy_proxy({incr, 2}, 0.5);
    CHECK(a.at(0, 0) == -0.25);
    CHECK(a.at(1, 1) == -0.25);
    CHECK(a.at(0, 1) == 0.0);
    CHECK(a.at(1, 0) == 0.0);
}

TEST_CASE("levy proxy on increment (1,2) at dt = 1") {
    const double incr[2] = {1.0, 2.0};
    const LevyProxy a = levy_proxy({incr, 2}, 1.0);
    CHECK(a.at(0, 0) == 0.0);
    CHECK(a.at(1, 1) == 1.5);
    CHECK(a.at(0, 1) == 1.0);
    CHECK(a.at(1, 0) == 1.0);
}

TEST_CASE("levy proxy is symmetric for random inputs") {
    RngStream s(400, 0);
    for (int rep = 0; rep < 200; ++rep) {
        double incr[3];
        for (double& v : incr) v = s.normal();
        const LevyProxy a = levy_proxy({incr, 3}, 0.25);
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) CHECK(a.at(i, j) == a.at(j, i));
    }
}

TEST_CASE("diagonal proxy entries are centered at dt = 2^-4") {
    RngStream s(500, 0);
    const double dt = std::ldexp(1.0, -4);
    const double sd = std::sqrt(dt);
    Welford w;
    for (int i = 0; i < 100000; ++i) {
        const double db = sd * s.normal();
        w.add(0.5 * (db * db - dt));
    }
    CHECK(w.mean > -3e-4);
    CHECK(w.mean < 3e-4);
}
