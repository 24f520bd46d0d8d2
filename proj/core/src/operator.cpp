#include "bshq/operator.hpp"

#include <algorithm>
#include <cmath>

#include "bshq/error.hpp"

namespace bshq {

namespace {

void require_same_space(const StateSpacePtr &a, const StateSpacePtr &b) {
  if (a == b)
    return;
  if (a->states() == b->states() && a->hbar() == b->hbar() &&
      a->config().offsets() == b->config().offsets())
    return;
  throw ModelError("operands act on different state spaces");
}

// Index of m_i + d for every source state i, or -1 when m_i + d is not a
// state.
std::vector<std::int64_t> targets(const StateSpace &space, const Offset &d) {
  const std::size_t dim = space.dimension();
  std::vector<std::int64_t> out(dim, -1);
  for (std::size_t i = 0; i < dim; ++i) {
    QuantumNumberVector t = space.point_of(i);
    for (std::size_t k = 0; k < d.size(); ++k)
      t[k] += d[k];
    if (auto j = space.index_of(t))
      out[i] = static_cast<std::int64_t>(*j);
  }
  return out;
}

Offset zero_offset(std::size_t n) {
  return Offset(std::vector<std::int64_t>(n, 0));
}

Offset add_offsets(const Offset &a, const Offset &b) {
  Offset out = a;
  for (std::size_t k = 0; k < a.size(); ++k)
    out[k] += b[k];
  return out;
}

Offset negate(const Offset &a) {
  Offset out = a;
  for (std::size_t k = 0; k < a.size(); ++k)
    out[k] = -out[k];
  return out;
}

} // namespace

// ---------------------------------------------------------------------------

StateVector::StateVector(StateSpacePtr space)
    : space_(std::move(space)), amplitudes_(space_->dimension()) {}

StateVector::StateVector(StateSpacePtr space, std::vector<complex> amplitudes)
    : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != space_->dimension())
    throw ModelError("state vector length " +
                     std::to_string(amplitudes_.size()) +
                     " does not match dimension " +
                     std::to_string(space_->dimension()));
}

StateVector StateVector::basis(StateSpacePtr space, std::size_t index) {
  std::vector<complex> a(space->dimension());
  a.at(index) = 1.0;
  return StateVector(std::move(space), std::move(a));
}

double StateVector::max_abs() const {
  double m = 0.0;
  for (const auto &z : amplitudes_)
    m = std::max(m, std::abs(z));
  return m;
}

complex inner(const StateVector &u, const StateVector &v) {
  require_same_space(u.space(), v.space());
  complex s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    s += std::conj(u[i]) * v[i];
  return s;
}

// ---------------------------------------------------------------------------

LatticeOperator::LatticeOperator(StateSpacePtr space)
    : space_(std::move(space)) {}

LatticeOperator::LatticeOperator(StateSpacePtr space, Bands bands)
    : space_(std::move(space)) {
  const std::size_t dim = space_->dimension();
  for (auto &[d, coeffs] : bands) {
    if (d.size() != space_->dof())
      throw ModelError("band offset " + d.to_string() + " has wrong length");
    if (coeffs.size() != dim)
      throw ModelError("band " + d.to_string() + " has " +
                       std::to_string(coeffs.size()) +
                       " coefficients, expected " + std::to_string(dim));
    auto t = targets(*space_, d);
    bool any = false;
    for (std::size_t i = 0; i < dim; ++i) {
      if (t[i] < 0)
        coeffs[i] = 0.0;
      if (!std::isfinite(coeffs[i].real()) || !std::isfinite(coeffs[i].imag()))
        throw NumericalError("non-finite coefficient in band " + d.to_string() +
                             " at state " + space_->point_of(i).to_string());
      any = any || coeffs[i] != complex(0.0);
    }
    if (any)
      bands_.emplace(d, std::move(coeffs));
  }
}

complex LatticeOperator::element(std::size_t row, std::size_t col) const {
  const auto &from = space_->point_of(col);
  const auto &to = space_->point_of(row);
  Offset d = to;
  for (std::size_t k = 0; k < d.size(); ++k)
    d[k] -= from[k];
  auto it = bands_.find(d);
  return it == bands_.end() ? complex(0.0) : it->second[col];
}

bool LatticeOperator::is_diagonal() const {
  return bands_.empty() ||
         (bands_.size() == 1 && bands_.begin()->first ==
                                    zero_offset(space_->dof()));
}

std::vector<complex> LatticeOperator::dense() const {
  const std::size_t dim = dimension();
  std::vector<complex> m(dim * dim);
  for (const auto &[d, coeffs] : bands_) {
    auto t = targets(*space_, d);
    for (std::size_t i = 0; i < dim; ++i)
      if (t[i] >= 0)
        m[static_cast<std::size_t>(t[i]) * dim + i] += coeffs[i];
  }
  return m;
}

double LatticeOperator::max_abs() const {
  return max_abs_on_columns(*this, [](std::size_t) { return true; });
}

// ---------------------------------------------------------------------------

LatticeOperator diagonal_op(std::vector<complex> values, StateSpacePtr space) {
  LatticeOperator::Bands bands;
  bands.emplace(zero_offset(space->dof()), std::move(values));
  return LatticeOperator(std::move(space), std::move(bands));
}

LatticeOperator diagonal_op(const Expression &f, StateSpacePtr space) {
  const std::size_t n = space->dof();
  std::vector<complex> values(space->dimension());
  Bindings b;
  b["hbar"] = space->hbar();
  for (std::size_t i = 0; i < space->dimension(); ++i) {
    auto a = space->actions(i);
    for (std::size_t k = 0; k < n; ++k)
      b[action_symbol(k + 1)] = a[k];
    try {
      values[i] = eval_complex(f, b);
    } catch (const EvaluationError &e) {
      throw EvaluationError(std::string(e.what()) + " at state " +
                            space->point_of(i).to_string());
    }
    if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag()))
      throw EvaluationError("'" + render(f) + "' is not finite at state " +
                            space->point_of(i).to_string());
  }
  return diagonal_op(std::move(values), std::move(space));
}

LatticeOperator shift_op(StateSpacePtr space, std::size_t axis, int direction,
                         std::span<const complex> coeffs) {
  if (axis >= space->dof())
    throw ModelError("shift axis out of range");
  if (direction != 1 && direction != -1)
    throw ModelError("shift direction must be +1 or -1");
  if (coeffs.size() != space->dimension())
    throw ModelError("coefficient array has length " +
                     std::to_string(coeffs.size()) + ", expected " +
                     std::to_string(space->dimension()));
  Offset d = zero_offset(space->dof());
  d[axis] = direction;
  LatticeOperator::Bands bands;
  bands.emplace(d, std::vector<complex>(coeffs.begin(), coeffs.end()));
  return LatticeOperator(std::move(space), std::move(bands));
}

LatticeOperator shift_op(StateSpacePtr space, std::size_t axis, int direction,
                         std::span<const double> coeffs) {
  std::vector<complex> c(coeffs.begin(), coeffs.end());
  return shift_op(std::move(space), axis, direction, c);
}

LatticeOperator unit_shift(StateSpacePtr space, std::size_t axis,
                           int direction) {
  std::vector<complex> ones(space->dimension(), 1.0);
  return shift_op(std::move(space), axis, direction, ones);
}

LatticeOperator identity(StateSpacePtr space) {
  std::vector<complex> ones(space->dimension(), 1.0);
  return diagonal_op(std::move(ones), std::move(space));
}

LatticeOperator zero(StateSpacePtr space) {
  return LatticeOperator(std::move(space));
}

LatticeOperator adjoint(const LatticeOperator &op) {
  const auto &space = op.space();
  LatticeOperator::Bands out;
  for (const auto &[d, coeffs] : op.bands()) {
    // <sigma_{m+d}| O sigma_m> = c_d[m] becomes the (-d) coefficient at
    // source m+d.
    auto t = targets(*space, d);
    std::vector<complex> c(space->dimension());
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] >= 0)
        c[static_cast<std::size_t>(t[i])] = std::conj(coeffs[i]);
    out.emplace(negate(d), std::move(c));
  }
  return LatticeOperator(space, std::move(out));
}

LatticeOperator
combine(std::span<const std::pair<complex, LatticeOperator>> terms) {
  if (terms.empty())
    throw ModelError("combine needs at least one term");
  const auto &space = terms.front().second.space();
  LatticeOperator::Bands out;
  for (const auto &[scale, op] : terms) {
    require_same_space(space, op.space());
    for (const auto &[d, coeffs] : op.bands()) {
      auto [it, inserted] =
          out.try_emplace(d, std::vector<complex>(space->dimension()));
      for (std::size_t i = 0; i < coeffs.size(); ++i)
        it->second[i] += scale * coeffs[i];
    }
  }
  return LatticeOperator(space, std::move(out));
}

LatticeOperator operator+(const LatticeOperator &a, const LatticeOperator &b) {
  std::pair<complex, LatticeOperator> t[] = {{1.0, a}, {1.0, b}};
  return combine(t);
}

LatticeOperator operator-(const LatticeOperator &a, const LatticeOperator &b) {
  std::pair<complex, LatticeOperator> t[] = {{1.0, a}, {-1.0, b}};
  return combine(t);
}

LatticeOperator operator*(complex s, const LatticeOperator &a) {
  std::pair<complex, LatticeOperator> t[] = {{s, a}};
  return combine(t);
}

LatticeOperator compose(const LatticeOperator &a, const LatticeOperator &b) {
  require_same_space(a.space(), b.space());
  const auto &space = b.space();
  const std::size_t dim = space->dimension();
  LatticeOperator::Bands out;
  for (const auto &[db, cb] : b.bands()) {
    auto tb = targets(*space, db);
    for (const auto &[da, ca] : a.bands()) {
      std::vector<complex> c(dim);
      bool any = false;
      for (std::size_t i = 0; i < dim; ++i) {
        if (tb[i] < 0 || cb[i] == complex(0.0))
          continue;
        c[i] = ca[static_cast<std::size_t>(tb[i])] * cb[i];
        any = any || c[i] != complex(0.0);
      }
      if (!any)
        continue;
      auto [it, inserted] = out.try_emplace(add_offsets(da, db), dim);
      for (std::size_t i = 0; i < dim; ++i)
        it->second[i] += c[i];
    }
  }
  return LatticeOperator(space, std::move(out));
}

LatticeOperator operator*(const LatticeOperator &a, const LatticeOperator &b) {
  return compose(a, b);
}

LatticeOperator commutator(const LatticeOperator &a, const LatticeOperator &b) {
  return compose(a, b) - compose(b, a);
}

StateVector apply(const LatticeOperator &op, const StateVector &v) {
  require_same_space(op.space(), v.space());
  const auto &space = op.space();
  std::vector<complex> out(space->dimension());
  for (const auto &[d, coeffs] : op.bands()) {
    auto t = targets(*space, d);
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] >= 0)
        out[static_cast<std::size_t>(t[i])] += coeffs[i] * v[i];
  }
  return StateVector(space, std::move(out));
}

LatticeOperator
quantize_observable(const ObservableExpr &e, StateSpacePtr space,
                    const std::map<std::size_t, LatticeOperator> &lowering) {
  std::vector<std::pair<complex, LatticeOperator>> terms;
  terms.emplace_back(1.0, diagonal_op(e.diagonal, space));
  auto chi = [&](std::size_t axis) -> const LatticeOperator & {
    auto it = lowering.find(axis);
    if (it == lowering.end())
      throw ModelError("no ladder coefficients for axis " +
                       std::to_string(axis + 1));
    return it->second;
  };
  for (const auto &[axis, coef] : e.lowering)
    terms.emplace_back(1.0, compose(diagonal_op(coef, space), chi(axis)));
  for (const auto &[axis, coef] : e.raising)
    terms.emplace_back(1.0,
                       compose(diagonal_op(coef, space), adjoint(chi(axis))));
  return combine(terms);
}

double interior_deviation(const LatticeOperator &a, const LatticeOperator &b) {
  LatticeOperator diff = a - b;
  const auto &space = diff.space();
  return max_abs_on_columns(
      diff, [&](std::size_t i) { return !space->is_edge(i); });
}

} // namespace bshq
