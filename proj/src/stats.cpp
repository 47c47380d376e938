#include "rpde/stats.hpp"

#include <algorithm>
#include <cmath>

#include "rpde/errors.hpp"

namespace rpde {

double Welford::std_error() const {
    return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
}

OlsFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw config_error("fit_line: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw config_error("fit_line: degenerate abscissae");

    OlsFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        ssr += r * r;
    }
    fit.slope_se = x.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
    return fit;
}

HistogramBins make_histogram(std::span<const double> values, int bins) {
    if (values.empty()) throw config_error("EmptyInput: no samples to bin");
    if (bins < 2) throw config_error("histogram: need at least 2 bins");

    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    HistogramBins h;
    h.lo = *mn;
    h.hi = *mx;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    if (h.lo == h.hi) {
        h.counts[static_cast<std::size_t>(bins / 2)] = values.size();
        return h;
    }
    const double w = (h.hi - h.lo) / bins;
    for (const double v : values) {
        auto idx = static_cast<std::int64_t>((v - h.lo) / w);
        idx = std::clamp<std::int64_t>(idx, 0, bins - 1);
        h.counts[static_cast<std::size_t>(idx)] += 1;
    }
    return h;
}

}  // namespace rpde
