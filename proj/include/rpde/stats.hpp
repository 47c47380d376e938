#ifndef RPDE_STATS_HPP
#define RPDE_STATS_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace rpde {

// Streaming mean/variance accumulator with pairwise merge (Welford /
// Chan-Golub-LeVeque), so copies can be reduced in parallel chunks without
// storing every sample.
struct Welford {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const Welford& o) {
        if (o.n == 0) return;
        if (n == 0) { *this = o; return; }
        const double d = o.mean - mean;
        const std::uint64_t tot = n + o.n;
        mean += d * static_cast<double>(o.n) / static_cast<double>(tot);
        m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) /
                         static_cast<double>(tot);
        n = tot;
    }

    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double std_error() const;
};

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
};

OlsFit fit_line(std::span<const double> x, std::span<const double> y);

struct HistogramBins {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::uint64_t> counts;
};

// equal-width bins spanning [min, max] of the samples; a constant sample set
// collapses into the single middle bin
HistogramBins make_histogram(std::span<const double> values, int bins);

}  // namespace rpde

#endif
