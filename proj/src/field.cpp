#include "rpde/field.hpp"

#include <cmath>

#include "rpde/errors.hpp"

namespace rpde {

namespace {

// Cholesky factor of a symmetric PSD matrix, tolerant of zero/singular
// directions (rank-deficient columns are zeroed, as for pinned coefficients).
void cholesky_psd(std::span<const double> m, int d, std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = m[static_cast<std::size_t>(i) * d + j];
            for (int k = 0; k < j; ++k)
                s -= out[static_cast<std::size_t>(i) * d + k] * out[static_cast<std::size_t>(j) * d + k];
            if (i == j) {
                if (s < -1e-12) throw config_error("field covariance is not positive semidefinite");
                out[static_cast<std::size_t>(i) * d + j] = s > 0.0 ? std::sqrt(s) : 0.0;
            } else {
                const double piv = out[static_cast<std::size_t>(j) * d + j];
                out[static_cast<std::size_t>(i) * d + j] = piv > 0.0 ? s / piv : 0.0;
            }
        }
    }
}

}  // namespace

std::size_t truncation_size(int level, double gamma) {
    if (level < 0) throw config_error("truncation_size: level must be >= 0");
    if (!(gamma > 0.0)) throw config_error("truncation_size: gamma must be positive");
    double v = std::exp2(static_cast<double>(level) * gamma);
    // snap values that are integral up to double rounding of level*gamma
    const double r = std::round(v);
    if (std::abs(v - r) < 1e-9 * std::max(1.0, r)) v = r;
    if (v > 1e15) throw numeric_error("truncation_size: level * gamma out of supported range");
    const double f = std::floor(v);
    return f < 1.0 ? 1 : static_cast<std::size_t>(f);
}

std::size_t effective_terms(const FieldSpec& spec, int level, double gamma) {
    const std::size_t m = truncation_size(level, gamma);
    return spec.max_terms ? std::min(m, *spec.max_terms) : m;
}

FieldRealization::FieldRealization(const FieldSpec& spec, RngStream stream)
    : spec_(&spec), stream_(stream) {}

void FieldRealization::ensure(std::size_t m) {
    std::lock_guard<std::mutex> lock(grow_mutex_);
    const int d = spec_->dim;
    std::vector<double> cov(static_cast<std::size_t>(d) * d);
    std::vector<double> chol;
    std::vector<double> z(static_cast<std::size_t>(d));
    while (coeffs_.size() < m) {
        const std::size_t i = coeffs_.size() + 1;
        std::vector<double> v(static_cast<std::size_t>(d), 0.0);
        if (spec_->mean) spec_->mean(i, v);
        spec_->cov(i, cov);
        cholesky_psd(cov, d, chol);
        // exactly d normals per coefficient, so the stream position is a
        // pure function of the index
        for (int a = 0; a < d; ++a) z[static_cast<std::size_t>(a)] = stream_.normal();
        for (int a = 0; a < d; ++a)
            for (int b = 0; b <= a; ++b)
                v[static_cast<std::size_t>(a)] +=
                    chol[static_cast<std::size_t>(a) * d + b] * z[static_cast<std::size_t>(b)];
        coeffs_.push_back(std::move(v));
    }
}

std::size_t FieldRealization::count() const {
    std::lock_guard<std::mutex> lock(grow_mutex_);
    return coeffs_.size();
}

std::span<const double> FieldRealization::coefficient(std::size_t i) const {
    return {coeffs_[i - 1].data(), coeffs_[i - 1].size()};
}

void FieldRealization::drift(int level, double gamma, std::span<const double> x,
                             std::span<double> out) {
    const std::size_t m = effective_terms(*spec_, level, gamma);
    ensure(m);
    for (auto& o : out) o = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
        const double w =
            spec_->lambda(i) * std::pow(static_cast<double>(i), -spec_->q) * spec_->psi(i, x);
        if (w == 0.0) continue;
        const auto v = coefficient(i);
        for (std::size_t a = 0; a < out.size(); ++a) out[a] += w * v[a];
    }
}

FieldRealization realize(const FieldSpec& spec, RngStream stream) {
    if (spec.dim < 1) throw config_error("field dim must be >= 1");
    if (!spec.cov || !spec.psi || !spec.lambda)
        throw config_error("field spec must supply lambda, cov and psi rules");
    return FieldRealization(spec, stream);
}

}  // namespace rpde
