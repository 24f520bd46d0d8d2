#ifndef BSHQ_ACTION_HPP
#define BSHQ_ACTION_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bshq/expression.hpp"

namespace bshq {

enum class Domain { Circle, Line };

std::string_view to_string(Domain d);
Domain parse_domain(std::string_view text);

/// H = p^2/2 + V(alpha) with one potential well. Construction locates the well
/// minimum and the barrier on either side; the oscillation region is
/// E_min < E < E_max with E_max the lower barrier top.
class OneDofSystem {
public:
  /// `potential` may reference only `alpha`. For the line domain the well is
  /// searched in `window`; the circle domain always uses one full period.
  OneDofSystem(Expression potential, Domain domain,
               std::pair<double, double> window = {-50.0, 50.0});

  const Expression &potential() const { return potential_; }
  Domain domain() const { return domain_; }

  double V(double alpha) const;

  double well_position() const { return well_; }
  double energy_min() const { return e_min_; }
  double energy_max() const { return e_max_; }
  double barrier_left() const { return left_; }
  double barrier_right() const { return right_; }

private:
  Expression potential_;
  Domain domain_;
  double well_ = 0.0;
  double e_min_ = 0.0;
  double e_max_ = 0.0;
  double left_ = 0.0;
  double right_ = 0.0;
};

struct QuadratureSpec {
  double tolerance = 1e-13;
  int max_levels = 14;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int levels = 0;
};

/// Double-exponential (tanh-sinh) quadrature on [a, b] with level doubling.
/// f receives the abscissa; points are placed strictly inside (a, b) and their
/// distance to the nearer endpoint is computed without cancellation.
QuadratureResult tanh_sinh(const std::function<double(double)> &f, double a,
                           double b, const QuadratureSpec &spec = {});

/// Turning points alpha_- < alpha_+ with V = E on each side of the well.
std::pair<double, double> turning_points(const OneDofSystem &sys, double E,
                                         double tol = 0.0);

/// A(E) = (1/pi) * integral over [alpha_-, alpha_+] of sqrt(2 (E - V)).
double action_integral(const OneDofSystem &sys, double E,
                       const QuadratureSpec &spec = {});

/// A at the top of the oscillation range, integrated between the barriers.
double action_at_barrier(const OneDofSystem &sys,
                         const QuadratureSpec &spec = {});

/// Complete elliptic integrals K(k), E(k) by the arithmetic-geometric mean.
std::pair<double, double> elliptic_K_E(double k);
double elliptic_K(double k);
/// Defined on 0 <= k <= 1; E(1) = 1.
double elliptic_E(double k);

/// Pendulum V = 1 - cos(alpha): A(E) = (8/pi) [E(k) - (1 - k^2) K(k)],
/// k^2 = E/2, for 0 < E < 2.
double pendulum_action_closed_form(double E);

OneDofSystem pendulum_system();

struct Level {
  long m = 0;
  double energy = 0.0;
  double residual = 0.0; // |A(E_m) - m hbar|
};

struct ExcludedLevel {
  long m = 0;
  std::string reason;
};

struct LevelTable {
  std::vector<Level> levels;
  std::vector<ExcludedLevel> excluded;
  double action_max = 0.0; // A at the barrier
};

/// Solve A(E_m) = m hbar for m = 0, 1, ... inside the oscillation range.
/// m = 0 is the well minimum. Levels whose action lies within `tol` of the
/// barrier action are excluded as near-separatrix; the first m beyond the
/// barrier (or every excluded m up to m_max when given) is listed too.
LevelTable bs_energy_levels(const OneDofSystem &sys, double hbar,
                            std::optional<long> m_max = std::nullopt,
                            double tol = 1e-9, const QuadratureSpec &spec = {});

} // namespace bshq

#endif
