#ifndef RPDE_QUADRATURE_HPP
#define RPDE_QUADRATURE_HPP

#include <functional>

namespace rpde {

// Adaptive Gauss-Kronrod (7-15) integration of f over [a, b] to the requested
// absolute tolerance, by interval bisection on the embedded error estimate.
// Throws numeric_error when the tolerance is unreachable at max_depth.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth = 40);

}  // namespace rpde

#endif
