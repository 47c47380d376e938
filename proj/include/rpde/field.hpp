#ifndef RPDE_FIELD_HPP
#define RPDE_FIELD_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpde/rng.hpp"

namespace rpde {

// Random drift field mu(x) = sum_i (lambda_i / i^q) V_i psi_i(x) with
// independent Gaussian coefficient vectors V_i.  Rules are 1-indexed.
//
// The analytic bounds the theory needs from the basis (|psi_i| < L,
// |d psi_i| < i L, |d2 psi_i| < i^2 L, |lambda_i| bounded, |Sigma_i|_F < L)
// are documented contracts on the supplied closures; they cannot be verified
// mechanically for arbitrary user code.  Known violations of built-in
// problems are listed in assumption_notes.
struct FieldSpec {
    int dim = 1;                                              // d
    double q = 5.0;                                           // decay exponent
    std::function<double(std::size_t)> lambda;                // i -> lambda_i
    std::function<void(std::size_t, std::span<double>)> mean; // i -> mean of V_i (optional, default 0)
    std::function<void(std::size_t, std::span<double>)> cov;  // i -> row-major d x d covariance
    std::function<double(std::size_t, std::span<const double>)> psi;  // i, x -> psi_i(x)
    // number of nonzero terms; nullopt = infinite series, 0 = zero drift
    std::optional<std::size_t> max_terms;
    std::vector<std::string> assumption_notes;
};

// floor(2^(level*gamma)) truncation size, evaluated so that mathematically
// integral powers (e.g. level 9, gamma = 1/3) do not lose a term to rounding.
std::size_t truncation_size(int level, double gamma);

// number of terms the scheme actually evaluates at this level
std::size_t effective_terms(const FieldSpec& spec, int level, double gamma);

// One sampled realization of the field.  Coefficients grow lazily from a
// dedicated stream; a prefix, once sampled, never changes, so evaluations at
// different truncation levels share the same V_1..V_M.  Growth is serialized;
// reads of already-sampled coefficients are concurrent-safe.
class FieldRealization {
  public:
    FieldRealization(const FieldSpec& spec, RngStream stream);

    const FieldSpec& spec() const { return *spec_; }

    // extend the coefficient list to at least m entries
    void ensure(std::size_t m);

    std::size_t count() const;

    // V_i, 1-indexed; the reference stays valid across later growth
    std::span<const double> coefficient(std::size_t i) const;

    // sum_{i<=M} (lambda_i / i^q) V_i psi_i(x) with M = effective_terms(level)
    void drift(int level, double gamma, std::span<const double> x, std::span<double> out);

  private:
    const FieldSpec* spec_;
    RngStream stream_;
    std::deque<std::vector<double>> coeffs_;
    mutable std::mutex grow_mutex_;
};

FieldRealization realize(const FieldSpec& spec, RngStream stream);

}  // namespace rpde

#endif
