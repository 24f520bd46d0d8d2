#ifndef BSHQ_OPERATOR_HPP
#define BSHQ_OPERATOR_HPP

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "bshq/expression.hpp"
#include "bshq/lattice.hpp"

namespace bshq {

/// Amplitudes over the basis {sigma_m} of a StateSpace. Basis states are
/// orthonormal.
class StateVector {
public:
  explicit StateVector(StateSpacePtr space);
  StateVector(StateSpacePtr space, std::vector<complex> amplitudes);

  static StateVector basis(StateSpacePtr space, std::size_t index);

  const StateSpacePtr &space() const { return space_; }
  std::size_t size() const { return amplitudes_.size(); }
  const std::vector<complex> &amplitudes() const { return amplitudes_; }
  complex operator[](std::size_t i) const { return amplitudes_[i]; }

  double max_abs() const;

private:
  StateSpacePtr space_;
  std::vector<complex> amplitudes_;
};

/// <u|v>, antilinear in u.
complex inner(const StateVector &u, const StateVector &v);

/// Linear operator in shift-band form:
///
///   O sigma_m = sum_d c_d[m] sigma_{m+d}
///
/// with c_d indexed by source state. Coefficients whose target m+d is not a
/// state of the space are held at zero, and all-zero bands are dropped, so
/// two operators are equal iff their band maps are equal.
class LatticeOperator {
public:
  using Bands = std::map<Offset, std::vector<complex>>;

  explicit LatticeOperator(StateSpacePtr space);
  LatticeOperator(StateSpacePtr space, Bands bands);

  const StateSpacePtr &space() const { return space_; }
  const Bands &bands() const { return bands_; }
  std::size_t dimension() const { return space_->dimension(); }

  /// <sigma_row | O sigma_col>.
  complex element(std::size_t row, std::size_t col) const;

  bool is_diagonal() const;

  /// Dense row-major matrix, element (row, col) at row * dim + col.
  std::vector<complex> dense() const;

  double max_abs() const;

private:
  StateSpacePtr space_;
  Bands bands_;
};

/// Q_F sigma_m = F(A(m)) sigma_m. F may reference the action symbols, `hbar`
/// and `i`; anything else must be bound beforehand.
LatticeOperator diagonal_op(const Expression &f, StateSpacePtr space);

/// Diagonal operator from precomputed values.
LatticeOperator diagonal_op(std::vector<complex> values, StateSpacePtr space);

/// One-band shift operator sigma_m -> coeffs[m] sigma_{m + direction e_axis}.
/// Targets outside the state space are annihilated.
LatticeOperator shift_op(StateSpacePtr space, std::size_t axis, int direction,
                         std::span<const complex> coeffs);
LatticeOperator shift_op(StateSpacePtr space, std::size_t axis, int direction,
                         std::span<const double> coeffs);

/// Unit-coefficient shifting operator a_axis (direction -1) or its adjoint
/// (direction +1).
LatticeOperator unit_shift(StateSpacePtr space, std::size_t axis,
                           int direction);

LatticeOperator identity(StateSpacePtr space);
LatticeOperator zero(StateSpacePtr space);

LatticeOperator adjoint(const LatticeOperator &op);

/// sum_i scalar_i * op_i.
LatticeOperator
combine(std::span<const std::pair<complex, LatticeOperator>> terms);

LatticeOperator operator+(const LatticeOperator &a, const LatticeOperator &b);
LatticeOperator operator-(const LatticeOperator &a, const LatticeOperator &b);
LatticeOperator operator*(complex s, const LatticeOperator &a);

/// Composition: (a * b) v = a(b v).
LatticeOperator compose(const LatticeOperator &a, const LatticeOperator &b);
LatticeOperator operator*(const LatticeOperator &a, const LatticeOperator &b);

LatticeOperator commutator(const LatticeOperator &a, const LatticeOperator &b);

StateVector apply(const LatticeOperator &op, const StateVector &v);

/// Quantize a first-degree observable
///
///   Q = Q_{F0} + sum_k Q_{F_k} Q_{chi_k} + Q_{G_k} Q_{conj chi_k},
///
/// where Q_{conj chi_k} is the adjoint of Q_{chi_k}. `lowering` maps each
/// 0-based axis to its quantized Heisenberg function Q_{chi_k}.
LatticeOperator
quantize_observable(const ObservableExpr &e, StateSpacePtr space,
                    const std::map<std::size_t, LatticeOperator> &lowering);

/// Largest |<sigma_row| O sigma_col>| over columns `col` for which
/// include(col) is true.
template <class Pred>
double max_abs_on_columns(const LatticeOperator &op, Pred include) {
  double worst = 0.0;
  for (const auto &[offset, coeffs] : op.bands())
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      if (include(i))
        worst = std::max(worst, std::abs(coeffs[i]));
  return worst;
}

/// Largest entry of |a - b| restricted to source states away from the
/// truncation edge.
double interior_deviation(const LatticeOperator &a, const LatticeOperator &b);

} // namespace bshq

#endif
