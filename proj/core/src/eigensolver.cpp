#include "bshq/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "bshq/error.hpp"

namespace bshq {

std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n,
                                          double tol) {
  if (a.size() != n * n)
    throw NumericalError("matrix storage does not match dimension");
  if (n > 2 * kMaxDenseDimension)
    throw NumericalError("matrix too large for the dense eigensolver");

  auto at = [&](std::size_t r, std::size_t c) -> double & { return a[r * n + c]; };

  double norm2 = 0.0;
  for (double x : a)
    norm2 += x * x;
  const double floor2 = norm2 * 1e-32;

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    double off2 = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q)
        off2 += 2.0 * at(p, q) * at(p, q);
    if (off2 <= floor2)
      break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = at(p, q);
        if (apq == 0.0)
          continue;
        double app = at(p, p);
        double aqq = at(q, q);
        double theta = (aqq - app) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          double akp = at(k, p);
          double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = at(p, k);
          double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        at(p, q) = 0.0;
        at(q, p) = 0.0;
      }
    }
  }
  if (sweep == kMaxSweeps) {
    double off2 = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q)
        off2 += 2.0 * at(p, q) * at(p, q);
    if (std::sqrt(off2) > tol)
      throw NumericalError("Jacobi iteration did not converge");
  }

  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i)
    ev[i] = at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::vector<double> hermitian_eigenvalues(std::span<const complex> m,
                                          std::size_t n, double tol) {
  if (m.size() != n * n)
    throw NumericalError("matrix storage does not match dimension");
  if (n > kMaxDenseDimension)
    throw NumericalError("dimension " + std::to_string(n) +
                         " exceeds the dense eigensolver cap of " +
                         std::to_string(kMaxDenseDimension));
  bool real = std::all_of(m.begin(), m.end(),
                          [](const complex &z) { return z.imag() == 0.0; });
  if (real) {
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n * n; ++i)
      a[i] = m[i].real();
    return symmetric_eigenvalues(std::move(a), n, tol);
  }

  // H = X + iY  ->  [[X, -Y], [Y, X]]: same spectrum, every eigenvalue twice.
  const std::size_t N = 2 * n;
  std::vector<double> a(N * N);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      double x = m[r * n + c].real();
      double y = m[r * n + c].imag();
      a[r * N + c] = x;
      a[(r + n) * N + (c + n)] = x;
      a[r * N + (c + n)] = -y;
      a[(r + n) * N + c] = y;
    }
  }
  auto doubled = symmetric_eigenvalues(std::move(a), N, tol);
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i)
    ev[i] = 0.5 * (doubled[2 * i] + doubled[2 * i + 1]);
  return ev;
}

std::vector<double> eigenvalues_hermitian(const LatticeOperator &op,
                                          double tol) {
  const std::size_t n = op.dimension();
  if (n > kMaxDenseDimension)
    throw NumericalError("dimension " + std::to_string(n) +
                         " exceeds the dense eigensolver cap of " +
                         std::to_string(kMaxDenseDimension));
  auto m = op.dense();
  double worst = 0.0;
  std::size_t wr = 0, wc = 0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = r; c < n; ++c) {
      double dev = std::abs(m[r * n + c] - std::conj(m[c * n + r]));
      if (dev > worst) {
        worst = dev;
        wr = r;
        wc = c;
      }
    }
  }
  if (worst > tol) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", worst);
    const auto &space = *op.space();
    throw NumericalError("operator is not Hermitian: max asymmetry " +
                         std::string(buf) + " between states " +
                         space.point_of(wr).to_string() + " and " +
                         space.point_of(wc).to_string());
  }
  // Symmetrize so round-off in the input cannot leak into the spectrum.
  for (std::size_t r = 0; r < n; ++r) {
    m[r * n + r] = m[r * n + r].real();
    for (std::size_t c = r + 1; c < n; ++c) {
      complex h = 0.5 * (m[r * n + c] + std::conj(m[c * n + r]));
      m[r * n + c] = h;
      m[c * n + r] = std::conj(h);
    }
  }
  return hermitian_eigenvalues(m, n, tol);
}

} // namespace bshq
