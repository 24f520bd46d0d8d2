#include "bshq/action.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "bshq/error.hpp"
#include "bshq/roots.hpp"

namespace bshq {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Index of the extreme sample of V on n+1 equispaced points of [a, b].
template <class Better>
std::size_t extreme_sample(const OneDofSystem &sys, double a, double b,
                           std::size_t n, Better better) {
  std::size_t best = 0;
  double vbest = sys.V(a);
  for (std::size_t j = 1; j <= n; ++j) {
    double x = a + (b - a) * static_cast<double>(j) / static_cast<double>(n);
    double v = sys.V(x);
    if (better(v, vbest)) {
      best = j;
      vbest = v;
    }
  }
  return best;
}

} // namespace

std::string_view to_string(Domain d) {
  return d == Domain::Circle ? "circle" : "line";
}

Domain parse_domain(std::string_view text) {
  if (text == "circle")
    return Domain::Circle;
  if (text == "line")
    return Domain::Line;
  throw ModelError("unknown domain '" + std::string(text) +
                   "', expected circle or line");
}

OneDofSystem::OneDofSystem(Expression potential, Domain domain,
                           std::pair<double, double> window)
    : potential_(std::move(potential)), domain_(domain) {
  for (const auto &s : symbols_of(potential_))
    if (s != "alpha")
      throw ModelError("potential '" + render(potential_) +
                       "' may reference only alpha, found " + s);

  double lo = -kPi, hi = kPi;
  std::size_t n = 4096;
  if (domain_ == Domain::Line) {
    lo = window.first;
    hi = window.second;
    n = 8192;
    if (!(lo < hi))
      throw ModelError("potential window must satisfy lo < hi");
  }
  auto at = [&](double a, double b, std::size_t j, std::size_t count) {
    return a + (b - a) * static_cast<double>(j) / static_cast<double>(count);
  };
  auto lower = [](double x, double y) { return x < y; };
  auto higher = [](double x, double y) { return x > y; };
  auto v = [this](double x) { return V(x); };
  auto negv = [this](double x) { return -V(x); };

  std::size_t jmin = extreme_sample(*this, lo, hi, n, lower);
  double x0 = at(lo, hi, jmin, n);
  well_ = refine_minimum(v, at(lo, hi, jmin == 0 ? 0 : jmin - 1, n),
                         at(lo, hi, std::min(jmin + 1, n), n), x0);
  e_min_ = V(well_);

  double rlo = well_, rhi = domain_ == Domain::Circle ? well_ + 2.0 * kPi : hi;
  double llo = domain_ == Domain::Circle ? well_ - 2.0 * kPi : lo, lhi = well_;
  if (!(rhi > rlo) || !(lhi > llo))
    throw ModelError("potential well lies on the edge of its window");

  std::size_t jr = extreme_sample(*this, rlo, rhi, n, higher);
  right_ = refine_minimum(negv, at(rlo, rhi, jr == 0 ? 0 : jr - 1, n),
                          at(rlo, rhi, std::min(jr + 1, n), n),
                          at(rlo, rhi, jr, n));
  std::size_t jl = extreme_sample(*this, llo, lhi, n, higher);
  left_ = refine_minimum(negv, at(llo, lhi, jl == 0 ? 0 : jl - 1, n),
                         at(llo, lhi, std::min(jl + 1, n), n),
                         at(llo, lhi, jl, n));
  e_max_ = std::min(V(left_), V(right_));
  if (!(e_max_ > e_min_))
    throw ModelError("potential '" + render(potential_) +
                     "' has no oscillation region");
}

double OneDofSystem::V(double alpha) const {
  RealBindings b{{"alpha", alpha}};
  return eval_real(potential_, b);
}

QuadratureResult tanh_sinh(const std::function<double(double)> &f, double a,
                           double b, const QuadratureSpec &spec) {
  if (!(spec.tolerance > 0.0))
    throw NumericalError("quadrature tolerance must be positive");
  constexpr double kTMax = 4.0;
  const double c = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  auto term = [&](double t) {
    double u = 0.5 * kPi * std::sinh(t);
    double cu = std::cosh(u);
    double w = 0.5 * kPi * std::cosh(t) / (cu * cu);
    if (w == 0.0 || !std::isfinite(w))
      return 0.0;
    if (t == 0.0)
      return w * f(c);
    double delta = half * 2.0 / (std::exp(2.0 * std::abs(u)) + 1.0);
    if (delta == 0.0)
      return 0.0;
    double x = t > 0.0 ? b - delta : a + delta;
    if (x <= a || x >= b)
      return 0.0;
    return w * f(x);
  };

  double h = 1.0;
  double sum = 0.0;
  for (int k = -4; k <= 4; ++k)
    sum += term(k * h);
  QuadratureResult r;
  r.value = h * half * sum;
  r.error_estimate = std::numeric_limits<double>::infinity();

  for (int level = 1; level <= spec.max_levels; ++level) {
    h *= 0.5;
    long kmax = static_cast<long>(std::ceil(kTMax / h));
    for (long k = 1; k <= kmax; k += 2)
      sum += term(k * h) + term(-k * h);
    double next = h * half * sum;
    r.error_estimate = std::abs(next - r.value);
    r.value = next;
    r.levels = level;
    double floor = 256.0 * std::numeric_limits<double>::epsilon() *
                   std::abs(r.value);
    if (level >= 3 && r.error_estimate <= std::max(spec.tolerance, floor))
      return r;
  }
  throw NumericalError("tanh-sinh quadrature did not converge: error estimate " +
                       fmt(r.error_estimate) + " after " +
                       std::to_string(spec.max_levels) + " levels");
}

std::pair<double, double> turning_points(const OneDofSystem &sys, double E,
                                         double tol) {
  if (!(E > sys.energy_min() && E < sys.energy_max()))
    throw NumericalError("energy " + fmt(E) + " lies outside the oscillation "
                         "range (" + fmt(sys.energy_min()) + ", " +
                         fmt(sys.energy_max()) + ")");
  auto g = [&](double x) { return sys.V(x) - E; };
  auto side = [&](double from, double to) {
    constexpr int kSteps = 1024;
    double prev = from;
    for (int j = 1; j <= kSteps; ++j) {
      double x = from + (to - from) * j / kSteps;
      if (g(x) >= 0.0)
        return find_root(g, prev, x, tol);
      prev = x;
    }
    throw NumericalError("could not bracket a turning point at energy " +
                         fmt(E));
  };
  double minus = side(sys.well_position(), sys.barrier_left());
  double plus = side(sys.well_position(), sys.barrier_right());
  return {minus, plus};
}

namespace {

double orbit_integral(const OneDofSystem &sys, double E, double a, double b,
                      const QuadratureSpec &spec) {
  auto p = [&](double x) {
    double k = E - sys.V(x);
    return k > 0.0 ? std::sqrt(2.0 * k) : 0.0;
  };
  return tanh_sinh(p, a, b, spec).value / kPi;
}

} // namespace

double action_integral(const OneDofSystem &sys, double E,
                       const QuadratureSpec &spec) {
  auto [a, b] = turning_points(sys, E);
  return orbit_integral(sys, E, a, b, spec);
}

double action_at_barrier(const OneDofSystem &sys, const QuadratureSpec &spec) {
  return orbit_integral(sys, sys.energy_max(), sys.barrier_left(),
                        sys.barrier_right(), spec);
}

std::pair<double, double> elliptic_K_E(double k) {
  if (!(k >= 0.0 && k < 1.0))
    throw NumericalError("elliptic K(k) requires 0 <= k < 1, got " + fmt(k));
  double a = 1.0;
  double b = std::sqrt((1.0 - k) * (1.0 + k));
  double c = k;
  double sum = 0.5 * c * c;
  double pow2 = 0.5;
  for (int n = 0; n < 64; ++n) {
    double an = 0.5 * (a + b);
    double bn = std::sqrt(a * b);
    c = 0.5 * (a - b);
    a = an;
    b = bn;
    pow2 *= 2.0;
    sum += pow2 * c * c;
    if (std::abs(c) <= std::numeric_limits<double>::epsilon() * a)
      break;
  }
  double K = kPi / (2.0 * a);
  return {K, K * (1.0 - sum)};
}

double elliptic_K(double k) { return elliptic_K_E(k).first; }

double elliptic_E(double k) {
  if (k == 1.0)
    return 1.0;
  if (!(k >= 0.0 && k < 1.0))
    throw NumericalError("elliptic E(k) requires 0 <= k <= 1, got " + fmt(k));
  return elliptic_K_E(k).second;
}

double pendulum_action_closed_form(double E) {
  if (!(E > 0.0 && E < 2.0))
    throw NumericalError("closed-form pendulum action requires 0 < E < 2, got " +
                         fmt(E));
  double k2 = 0.5 * E;
  auto [K, Ek] = elliptic_K_E(std::sqrt(k2));
  return 8.0 / kPi * (Ek - (1.0 - k2) * K);
}

OneDofSystem pendulum_system() {
  return OneDofSystem(parse_expression("1 - cos(alpha)"), Domain::Circle);
}

LevelTable bs_energy_levels(const OneDofSystem &sys, double hbar,
                            std::optional<long> m_max, double tol,
                            const QuadratureSpec &spec) {
  if (!(hbar > 0.0))
    throw NumericalError("hbar must be positive");
  const double e0 = sys.energy_min();
  const double e1 = sys.energy_max();

  // Monotonicity of A(E) on an interior grid; the grid doubles as brackets.
  constexpr int kGrid = 100;
  std::vector<double> grid_e{e0};
  std::vector<double> grid_a{0.0};
  for (int i = 1; i <= kGrid; ++i) {
    double E = e0 + (e1 - e0) * i / (kGrid + 1);
    double A = action_integral(sys, E, spec);
    if (!(A > grid_a.back()))
      throw NumericalError("action is not increasing between E = " +
                           fmt(grid_e.back()) + " and E = " + fmt(E));
    grid_e.push_back(E);
    grid_a.push_back(A);
  }
  LevelTable table;
  table.action_max = action_at_barrier(sys, spec);
  if (!(table.action_max > grid_a.back()))
    throw NumericalError("action is not increasing towards the barrier");
  grid_e.push_back(e1);
  grid_a.push_back(table.action_max);

  const char *beyond = sys.domain() == Domain::Circle
                           ? "beyond separatrix"
                           : "beyond oscillation range";
  constexpr long kMaxLevels = 1000000;
  for (long m = 0;; ++m) {
    if (m_max && m > *m_max)
      break;
    if (!m_max && m > kMaxLevels)
      throw NumericalError("more than " + std::to_string(kMaxLevels) +
                           " levels; pass an explicit maximum");
    double target = static_cast<double>(m) * hbar;
    if (m == 0) {
      table.levels.push_back({0, e0, 0.0});
      continue;
    }
    if (std::abs(target - table.action_max) <= tol) {
      table.excluded.push_back({m, "near-separatrix, low confidence"});
      continue;
    }
    if (target > table.action_max) {
      table.excluded.push_back({m, beyond});
      if (!m_max)
        break;
      continue;
    }
    auto hi = std::upper_bound(grid_a.begin(), grid_a.end(), target);
    std::size_t j = static_cast<std::size_t>(hi - grid_a.begin());
    double ea = grid_e[j - 1], eb = grid_e[j];
    auto f = [&](double E) {
      if (E <= e0)
        return -target;
      if (E >= e1)
        return table.action_max - target;
      return action_integral(sys, E, spec) - target;
    };
    double E = find_root(f, ea, eb, 0.0);
    double residual = std::abs(f(E));
    if (residual > tol)
      throw NumericalError("level m = " + std::to_string(m) + " has residual " +
                           fmt(residual));
    table.levels.push_back({m, E, residual});
  }
  return table;
}

} // namespace bshq
