#ifndef BSHQ_LADDER_HPP
#define BSHQ_LADDER_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "bshq/expression.hpp"
#include "bshq/lattice.hpp"
#include "bshq/operator.hpp"

namespace bshq {

inline constexpr double kDefaultLadderTolerance = 1e-10;

/// rho_k = r_k^2, the squared radial factor of the Heisenberg function
/// chi_k = r_k exp(-i phi_k), as a function of the single action A_k.
class RadialProfile {
public:
  /// `rho` may reference only A_{axis+1} and `hbar`; named constants must be
  /// bound beforehand. axis is 0-based.
  RadialProfile(std::size_t axis, Expression rho, std::size_t dof);

  std::size_t axis() const { return axis_; }
  const Expression &rho() const { return rho_; }
  const Expression &drho() const { return drho_; }

  double rho_at(double action, double hbar) const;
  double drho_at(double action, double hbar) const;

  /// Throws ModelError naming the first state where rho < 0.
  void check_nonnegative(const StateSpace &space) const;

private:
  std::size_t axis_;
  Expression rho_;
  Expression drho_;
};

enum class LadderConvention { Dirac, SemiclassicalSource, SemiclassicalMidpoint };

std::string_view to_string(LadderConvention c);
LadderConvention parse_convention(std::string_view text);

/// Lowering coefficients Q_{chi_k} sigma_m = b[m] sigma_{m - e_k}, with
/// beta = b^2. Raising coefficients follow from adjointness: c_m = b_{m+e_k}.
struct LadderCoefficients {
  std::size_t axis = 0;
  LadderConvention convention = LadderConvention::Dirac;
  std::vector<double> beta;
  std::vector<double> b;
  /// Doubly bounded axes only: the larger of the off-top raising value and the
  /// profile value at the boundary states. Zero for semiclassical rules.
  double residual = 0.0;
  /// Semiclassical midpoint evaluations where rho < 0 was clamped to 0.
  std::size_t clamped = 0;
};

/// G_k = d rho_k / dA_k. Under {chi, A} = -i chi, {chi, conj chi} = -i G_k,
/// so Dirac's condition reads [Q_chi, Q_chibar] = hbar Q_{G_k}.
Expression bracket_profile(const RadialProfile &p);

/// Solve beta_{m+e_k} - beta_m = hbar G_k(A(m)) along every line of the axis,
/// anchored at beta = 0 where the lowered torus is empty. Where the region
/// continues below the box the anchor is the semiclassical value rho(A(m)).
///
/// Throws ModelError if some beta is negative (profile not quantizable on
/// this lattice) and InconsistentQuantization if the residual exceeds
/// tol * hbar^2.
LadderCoefficients solve_dirac_recursion(const RadialProfile &p,
                                         const StateSpace &space,
                                         double tol = kDefaultLadderTolerance);

/// Naive rule b_m = sqrt(rho) at A(m) (source) or at A(m) - hbar/2 e_k
/// (midpoint), forced to zero where the lowered torus is empty.
LadderCoefficients semiclassical_coefficients(const RadialProfile &p,
                                              const StateSpace &space,
                                              LadderConvention convention);

LadderCoefficients ladder_coefficients(const RadialProfile &p,
                                       const StateSpace &space,
                                       LadderConvention convention,
                                       double tol = kDefaultLadderTolerance);

/// Q_{chi_k} built from the coefficients.
LatticeOperator lowering_operator(const LadderCoefficients &c,
                                  StateSpacePtr space);

/// Q_{conj chi_k} built directly from c_m = b_{m+e_k}, independently of the
/// adjoint routine.
LatticeOperator raising_operator(const LadderCoefficients &c,
                                 StateSpacePtr space);

struct ConsistencyReport {
  std::size_t axis = 0;
  LadderConvention convention = LadderConvention::Dirac;
  bool boundary_zeros = true;
  bool positivity = true;
  double defect = 0.0;
  double residual = 0.0;
  bool pass = true;
  std::vector<std::string> failures;
};

/// Boundary zeros, positivity and the max-norm Dirac defect
///   D = max_m |(beta_{m+e_k} - beta_m) - hbar G_k(A(m))|
/// over states whose upper neighbour is a state. For the Dirac convention
/// pass also requires D <= tol * hbar^2 and residual <= tol * hbar^2.
ConsistencyReport verify_consistency(const LadderCoefficients &c,
                                     const StateSpace &space,
                                     const RadialProfile &p,
                                     double tol = kDefaultLadderTolerance);

} // namespace bshq

#endif
