#ifndef RPDE_ERRORS_HPP
#define RPDE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rpde {

// Bad configuration or inputs (CLI maps these to exit code 2).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure during a run: non-finite samples, quadrature that does
// not converge, randomized level outside the supported range (exit code 3).
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rpde

#endif
