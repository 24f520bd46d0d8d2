#include "bshq/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "bshq/error.hpp"

namespace bshq {

std::string QuantumNumberVector::to_string() const {
  std::string s = "(";
  for (std::size_t k = 0; k < m_.size(); ++k) {
    if (k)
      s += ",";
    s += std::to_string(m_[k]);
  }
  return s + ")";
}

LatticeConfig::LatticeConfig(double hbar, std::size_t dof)
    : LatticeConfig(hbar, std::vector<double>(dof, 0.0)) {}

LatticeConfig::LatticeConfig(double hbar, std::vector<double> offsets)
    : hbar_(hbar), offsets_(std::move(offsets)) {
  if (!(hbar_ > 0.0) || !std::isfinite(hbar_))
    throw ModelError("hbar must be a positive finite number");
  for (double d : offsets_)
    if (!(d >= 0.0 && d < 1.0))
      throw ModelError("lattice offsets must lie in [0, 1)");
}

bool LatticeConfig::experimental() const {
  for (double d : offsets_)
    if (d != 0.0)
      return true;
  return false;
}

std::vector<double> LatticeConfig::actions(const QuantumNumberVector &m) const {
  std::vector<double> a(m.size());
  for (std::size_t k = 0; k < m.size(); ++k)
    a[k] = action(k, m[k]);
  return a;
}

double AffineConstraint::evaluate(std::span<const double> actions) const {
  double v = constant;
  for (std::size_t k = 0; k < coefficients.size(); ++k)
    v += coefficients[k] * actions[k];
  return v;
}

LatticeRegion::LatticeRegion(std::size_t dof,
                             std::vector<AffineConstraint> constraints)
    : dof_(dof), constraints_(std::move(constraints)) {
  if (dof_ == 0)
    throw ModelError("a lattice region needs at least one degree of freedom");
  for (const auto &c : constraints_)
    if (c.coefficients.size() != dof_)
      throw ModelError("constraint '" + c.source + "' has wrong arity");
}

bool LatticeRegion::contains(std::span<const double> actions) const {
  for (const auto &c : constraints_) {
    // Relative slack absorbs rounding in (m + offset) * hbar versus bounds
    // that are themselves multiples of hbar.
    double scale = std::abs(c.constant);
    for (std::size_t k = 0; k < dof_; ++k)
      scale += std::abs(c.coefficients[k] * actions[k]);
    if (c.evaluate(actions) < -1e-12 * scale)
      return false;
  }
  return true;
}

std::vector<AffineConstraint> parse_constraint(std::string_view text,
                                               std::size_t dof,
                                               const RealBindings &constants) {
  struct Cmp {
    std::string_view token;
    int sign; // +1: lhs - rhs >= 0, -1: rhs - lhs >= 0, 0: equality
  };
  static constexpr Cmp kComparisons[] = {{">=", 1}, {"<=", -1}, {"=", 0}};
  for (const auto &cmp : kComparisons) {
    auto pos = text.find(cmp.token);
    if (pos == std::string_view::npos)
      continue;
    std::string_view lhs_text = text.substr(0, pos);
    std::string_view rhs_text = text.substr(pos + cmp.token.size());
    Expression lhs, rhs;
    try {
      lhs = parse_expression(lhs_text);
    } catch (const ParseError &e) {
      throw ParseError(e.position(), std::string(e.what()) + " in constraint '" +
                                         std::string(text) + "'");
    }
    try {
      rhs = parse_expression(rhs_text);
    } catch (const ParseError &e) {
      throw ParseError(pos + cmp.token.size() + e.position(),
                       std::string(e.what()) + " in constraint '" +
                           std::string(text) + "'");
    }
    Expression diff = Expression::sub(lhs, rhs);
    AffineForm f;
    try {
      f = affine_form(diff, dof, constants);
    } catch (const ModelError &e) {
      throw ModelError("constraint '" + std::string(text) + "': " + e.what());
    } catch (const EvaluationError &e) {
      throw ModelError("constraint '" + std::string(text) + "': " + e.what());
    }
    AffineConstraint c{f.coefficients, f.constant, std::string(text)};
    if (cmp.sign == 1)
      return {c};
    AffineConstraint flipped = c;
    for (double &a : flipped.coefficients)
      a = -a;
    flipped.constant = -flipped.constant;
    if (cmp.sign == -1)
      return {flipped};
    return {c, flipped};
  }
  throw ModelError("constraint '" + std::string(text) +
                   "' needs one of >=, <=, =");
}

LatticeRegion LatticeRegion::parse(std::size_t dof,
                                   const std::vector<std::string> &constraints,
                                   const RealBindings &constants) {
  std::vector<AffineConstraint> all;
  for (const auto &text : constraints)
    for (auto &c : parse_constraint(text, dof, constants))
      all.push_back(std::move(c));
  return LatticeRegion(dof, std::move(all));
}

Box parse_box(std::string_view text) {
  Box box;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    std::string_view item =
        text.substr(start, end == std::string_view::npos ? end : end - start);
    auto colon = item.find(':');
    if (colon == std::string_view::npos)
      throw ModelError("box axis '" + std::string(item) + "' must be a:b");
    auto to_int = [&](std::string_view s) {
      std::string str(s);
      char *endp = nullptr;
      long long v = std::strtoll(str.c_str(), &endp, 10);
      if (str.empty() || *endp != '\0')
        throw ModelError("box bound '" + str + "' is not an integer");
      return static_cast<std::int64_t>(v);
    };
    AxisInterval iv{to_int(item.substr(0, colon)),
                    to_int(item.substr(colon + 1))};
    if (iv.lo > iv.hi)
      throw ModelError("box axis '" + std::string(item) + "' is empty");
    box.push_back(iv);
    if (end == std::string_view::npos)
      break;
    start = end + 1;
  }
  return box;
}

bool torus_nonempty(const LatticeRegion &region, const LatticeConfig &config,
                    const QuantumNumberVector &m) {
  return region.contains(config.actions(m));
}

QuantumNumberVector shift_target(const QuantumNumberVector &m,
                                 std::size_t axis, int direction) {
  QuantumNumberVector out = m;
  out[axis] += direction;
  return out;
}

StateSpace::StateSpace(LatticeRegion region, Box box, LatticeConfig config)
    : region_(std::move(region)), box_(std::move(box)),
      config_(std::move(config)) {
  const std::size_t n = region_.dof();
  if (box_.size() != n)
    throw ModelError("box has " + std::to_string(box_.size()) +
                     " axes but the model has " + std::to_string(n));
  if (config_.dof() != n)
    throw ModelError("lattice offsets have wrong length");

  std::size_t total = 1;
  for (const auto &iv : box_) {
    if (iv.lo > iv.hi)
      throw ModelError("box axis is empty");
    auto width = static_cast<std::size_t>(iv.hi - iv.lo + 1);
    if (total > (std::size_t{1} << 26) / width)
      throw ModelError("truncation box is too large");
    total *= width;
  }

  // Odometer over the box; the last axis varies fastest, which yields
  // lexicographic order.
  box_to_state_.assign(total, -1);
  QuantumNumberVector m{std::vector<std::int64_t>(n)};
  for (std::size_t k = 0; k < n; ++k)
    m[k] = box_[k].lo;
  for (std::size_t flat = 0; flat < total; ++flat) {
    if (torus_nonempty(region_, config_, m)) {
      box_to_state_[flat] = static_cast<std::int64_t>(states_.size());
      states_.push_back(m);
    }
    for (std::size_t k = n; k-- > 0;) {
      if (m[k] < box_[k].hi) {
        ++m[k];
        break;
      }
      m[k] = box_[k].lo;
    }
  }

  edge_.assign(states_.size(), false);
  for (std::size_t i = 0; i < states_.size(); ++i) {
    for (std::size_t k = 0; k < n && !edge_[i]; ++k) {
      for (int dir : {-1, 1}) {
        auto t = shift_target(states_[i], k, dir);
        if (!in_box(t) && nonempty(t))
          edge_[i] = true;
      }
    }
  }
}

bool StateSpace::in_box(const QuantumNumberVector &m) const {
  if (m.size() != box_.size())
    return false;
  for (std::size_t k = 0; k < m.size(); ++k)
    if (m[k] < box_[k].lo || m[k] > box_[k].hi)
      return false;
  return true;
}

std::optional<std::size_t>
StateSpace::box_position(const QuantumNumberVector &m) const {
  if (!in_box(m))
    return std::nullopt;
  std::size_t flat = 0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    auto width = static_cast<std::size_t>(box_[k].hi - box_[k].lo + 1);
    flat = flat * width + static_cast<std::size_t>(m[k] - box_[k].lo);
  }
  return flat;
}

std::optional<std::size_t>
StateSpace::index_of(const QuantumNumberVector &m) const {
  auto flat = box_position(m);
  if (!flat || box_to_state_[*flat] < 0)
    return std::nullopt;
  return static_cast<std::size_t>(box_to_state_[*flat]);
}

StateSpacePtr enumerate_states(const LatticeRegion &region, const Box &box,
                               const LatticeConfig &config) {
  return std::make_shared<const StateSpace>(region, box, config);
}

} // namespace bshq
