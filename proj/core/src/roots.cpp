#include "bshq/roots.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "bshq/error.hpp"

namespace bshq {

double find_root(const std::function<double(double)> &f, double a, double b,
                 double xtol, int max_iterations) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0)
    return a;
  if (fb == 0.0)
    return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw NumericalError("root is not bracketed");

  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < max_iterations; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    double tol1 = 2.0 * eps * std::abs(b) + 0.5 * xtol;
    double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0)
      return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        double r = fb / fc;
        q = fa / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0)
        q = -q;
      p = std::abs(p);
      double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
    fb = f(b);
  }
  throw NumericalError("root finder exceeded its iteration limit");
}

double refine_minimum(const std::function<double(double)> &f, double a,
                      double b, double start, int iterations) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double best = start, fbest = f(start);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iterations && b - a > 0.0; ++i) {
    if (f1 < fbest) {
      best = x1;
      fbest = f1;
    }
    if (f2 < fbest) {
      best = x2;
      fbest = f2;
    }
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  return best;
}

} // namespace bshq
