#ifndef BSHQ_MODELS_HPP
#define BSHQ_MODELS_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bshq/action.hpp"
#include "bshq/expression.hpp"
#include "bshq/ladder.hpp"
#include "bshq/lattice.hpp"
#include "bshq/operator.hpp"

namespace bshq {

enum class ModelKind { Lattice, Potential };

std::string_view to_string(ModelKind k);

/// Complete description of an integrable system, either through lattice data
/// (region, radial profiles, observables as functions of the actions) or, for
/// one degree of freedom, through a potential.
///
/// Expressions may use the model's named constants and the reserved symbol
/// `hbar`; everything is bound when the model is quantized.
struct ModelDefinition {
  std::string name;
  ModelKind kind = ModelKind::Lattice;
  std::size_t dof = 1;
  RealBindings constants;

  // Lattice kind.
  std::vector<double> offsets;
  std::vector<std::string> constraints;
  std::map<std::size_t, Expression> profiles; // 0-based axis -> rho
  Expression hamiltonian;
  std::map<std::string, Expression> observables;

  // Potential kind.
  Expression potential;
  Domain domain = Domain::Circle;
  std::pair<double, double> window{-50.0, 50.0};

  Box default_box;
  double default_hbar = 1.0;
  std::vector<std::string> notes;
};

/// Throws ModelError describing the first violated invariant.
void validate(const ModelDefinition &model);

/// 1-D oscillator H = (p^2 + q^2)/2, chi = p - i q, rho = 2 A1.
ModelDefinition model_ho1d(double hbar = 1.0);

/// Coadjoint orbit of SO(3) with radius r = (n/2) hbar: J3 = A1 on
/// -r <= A1 <= r, rho = r^2 - A1^2. Odd n needs the experimental half-integer
/// lattice (offset 1/2).
ModelDefinition model_so3(int n, double hbar = 1.0,
                          bool experimental_offsets = false);

/// 2-D oscillator in action-angle form: A1, A2 >= 0, rho_k = 2 A_k,
/// H = A1 + A2, L = A1 - A2.
ModelDefinition model_ho2d(double hbar = 1.0);

/// Pendulum H = p^2/2 + 1 - cos(alpha) on the circle. Only the oscillation
/// region 0 < E < 2 is quantized; above the separatrix level sets have two
/// components.
ModelDefinition model_pendulum(double hbar = 1.0);

/// Builtin by name: ho1d, ho2d, so3 (uses n), pendulum.
std::optional<ModelDefinition> builtin_model(std::string_view name, int n,
                                             double hbar,
                                             bool experimental_offsets);

OneDofSystem one_dof_system(const ModelDefinition &model);

/// A lattice model bound to an action unit, a truncation box and a ladder
/// convention: state space, radial profiles, ladder coefficients and the
/// quantized Heisenberg functions.
class QuantizedModel {
public:
  QuantizedModel(const ModelDefinition &model, LatticeConfig config, Box box,
                 LadderConvention convention = LadderConvention::Dirac,
                 double tol = kDefaultLadderTolerance);

  const ModelDefinition &definition() const { return model_; }
  const StateSpacePtr &space() const { return space_; }
  LadderConvention convention() const { return convention_; }
  double hbar() const { return space_->hbar(); }

  /// Axes that carry a radial profile, ascending.
  std::vector<std::size_t> profile_axes() const;
  const RadialProfile &profile(std::size_t axis) const;
  const LadderCoefficients &coefficients(std::size_t axis) const;
  const std::map<std::size_t, LatticeOperator> &lowering() const {
    return lowering_;
  }
  const LatticeOperator &chi(std::size_t axis) const;

  /// Q_{A_k}, diagonal with entries A_k(m).
  LatticeOperator action(std::size_t axis) const;

  /// Quantize an expression: constants are bound, the first-degree form is
  /// checked, and chi_k uses this model's ladder coefficients.
  LatticeOperator quantize(const Expression &e) const;

  /// Named observable, or `hamiltonian`.
  LatticeOperator observable(const std::string &name) const;

  /// Bind the model constants and `hbar` into e.
  Expression bind(const Expression &e) const;

private:
  ModelDefinition model_;
  StateSpacePtr space_;
  LadderConvention convention_;
  RealBindings bindings_;
  std::map<std::size_t, RadialProfile> profiles_;
  std::map<std::size_t, LadderCoefficients> coefficients_;
  std::map<std::size_t, LatticeOperator> lowering_;
};

} // namespace bshq

#endif
