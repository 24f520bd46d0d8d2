#ifndef BSHQ_ROOTS_HPP
#define BSHQ_ROOTS_HPP

#include <functional>

namespace bshq {

/// Root of f on [a, b] where f(a) and f(b) have opposite signs (or one is
/// zero). Bisection safeguarded inverse quadratic interpolation (Brent).
/// Throws NumericalError when the bracket is invalid or iterations run out.
double find_root(const std::function<double(double)> &f, double a, double b,
                 double xtol = 0.0, int max_iterations = 200);

/// Golden-section refinement of a minimum bracketed by [a, b]. Returns the best
/// abscissa seen, preferring `start` on ties.
double refine_minimum(const std::function<double(double)> &f, double a,
                      double b, double start, int iterations = 100);

} // namespace bshq

#endif
