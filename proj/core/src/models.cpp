#include "bshq/models.hpp"

#include <cmath>

#include "bshq/error.hpp"

namespace bshq {

namespace {

bool reserved(std::string_view name) {
  return name == "hbar" || name == "i" || name == "alpha" ||
         action_axis(name) || chi_axis(name);
}

// Every symbol of e is an action of axis <= dof, a constant, or `hbar`/`i`;
// chi symbols are accepted only when allow_chi is set.
void check_symbols(const Expression &e, const ModelDefinition &m,
                   bool allow_chi, const std::string &what) {
  for (const auto &s : symbols_of(e)) {
    if (auto k = action_axis(s)) {
      if (*k > m.dof)
        throw ModelError(what + " references " + s + " but the model has " +
                         std::to_string(m.dof) + " degrees of freedom");
      continue;
    }
    if (auto k = chi_axis(s)) {
      if (!allow_chi)
        throw ModelError(what + " may not reference " + s);
      if (*k > m.dof)
        throw ModelError(what + " references " + s + " but the model has " +
                         std::to_string(m.dof) + " degrees of freedom");
      continue;
    }
    if (s == "hbar" || s == "i" || m.constants.count(s))
      continue;
    throw ModelError(what + " references unknown symbol '" + s + "'");
  }
}

RealBindings with_hbar(const RealBindings &constants, double hbar) {
  RealBindings b = constants;
  b["hbar"] = hbar;
  return b;
}

} // namespace

std::string_view to_string(ModelKind k) {
  return k == ModelKind::Lattice ? "lattice" : "potential";
}

void validate(const ModelDefinition &m) {
  if (m.name.empty())
    throw ModelError("model name is empty");
  if (m.dof == 0)
    throw ModelError("dof must be positive");
  for (const auto &[name, value] : m.constants) {
    if (reserved(name))
      throw ModelError("constant name '" + name + "' is reserved");
    if (!std::isfinite(value))
      throw ModelError("constant '" + name + "' is not finite");
  }
  if (!(m.default_hbar > 0.0))
    throw ModelError("default hbar must be positive");

  if (m.kind == ModelKind::Potential) {
    if (m.dof != 1)
      throw ModelError("potential models have exactly one degree of freedom");
    for (const auto &s : symbols_of(m.potential))
      if (s != "alpha" && !m.constants.count(s))
        throw ModelError("potential references unknown symbol '" + s + "'");
    one_dof_system(m);
    return;
  }

  if (!m.offsets.empty() && m.offsets.size() != m.dof)
    throw ModelError("lattice offsets must have one entry per degree of freedom");
  for (double d : m.offsets)
    if (!(d >= 0.0 && d < 1.0))
      throw ModelError("lattice offsets must lie in [0, 1)");
  if (!m.default_box.empty() && m.default_box.size() != m.dof)
    throw ModelError("default box must have one interval per degree of freedom");

  RealBindings probe = with_hbar(m.constants, 1.0);
  for (const auto &c : m.constraints)
    parse_constraint(c, m.dof, probe);

  for (const auto &[axis, rho] : m.profiles) {
    check_symbols(rho, m, false, "profile " + std::to_string(axis + 1));
    RadialProfile(axis, bind_constants(rho, m.constants), m.dof);
  }

  check_symbols(m.hamiltonian, m, false, "hamiltonian");
  for (const auto &[name, e] : m.observables) {
    check_symbols(e, m, true, "observable '" + name + "'");
    ObservableExpr split = split_observable(e, m.dof);
    auto need = [&](std::size_t axis) {
      if (!m.profiles.count(axis))
        throw ModelError("observable '" + name + "' uses " +
                         chi_symbol(axis + 1) + " but axis " +
                         std::to_string(axis + 1) + " has no radial profile");
    };
    for (const auto &[axis, coef] : split.lowering)
      need(axis);
    for (const auto &[axis, coef] : split.raising)
      need(axis);
  }
}

ModelDefinition model_ho1d(double hbar) {
  ModelDefinition m;
  m.name = "ho1d";
  m.kind = ModelKind::Lattice;
  m.dof = 1;
  m.offsets = {0.0};
  m.constraints = {"A1 >= 0"};
  // chi = p - i q = r exp(-i phi) with r^2 = 2H; the profile is stored as
  // r^2, which is smooth in the action.
  m.profiles.emplace(0, parse_expression("2*A1"));
  m.hamiltonian = parse_expression("A1");
  m.observables.emplace("H", parse_expression("A1"));
  m.observables.emplace("chi", parse_expression("chi1"));
  m.default_box = {{0, 10}};
  m.default_hbar = hbar;
  validate(m);
  return m;
}

ModelDefinition model_so3(int n, double hbar, bool experimental_offsets) {
  if (n < 1)
    throw ModelError("so3 needs n >= 1");
  if (n % 2 != 0 && !experimental_offsets)
    throw ModelError("half-integer spin lattice requires offset mode");
  ModelDefinition m;
  m.name = "so3";
  m.kind = ModelKind::Lattice;
  m.dof = 1;
  m.constants = {{"r", 0.5 * n * hbar}};
  m.offsets = {n % 2 != 0 ? 0.5 : 0.0};
  m.constraints = {"A1 >= -r", "A1 <= r"};
  m.profiles.emplace(0, parse_expression("r^2 - A1^2"));
  m.hamiltonian = parse_expression("A1");
  // With {chi, A} = -i chi the quantized chi lowers the J3 quantum number.
  m.observables.emplace("J1", parse_expression("(chi1 + conj(chi1))/2"));
  m.observables.emplace("J2", parse_expression("(chi1 - conj(chi1))/(2*i)"));
  m.observables.emplace("J3", parse_expression("A1"));
  m.observables.emplace("chi", parse_expression("chi1"));
  m.default_box = {{-n, n}};
  m.default_hbar = hbar;
  if (n % 2 != 0)
    m.notes.push_back("experimental half-integer lattice (offset 1/2)");
  validate(m);
  return m;
}

ModelDefinition model_ho2d(double hbar) {
  ModelDefinition m;
  m.name = "ho2d";
  m.kind = ModelKind::Lattice;
  m.dof = 2;
  m.offsets = {0.0, 0.0};
  m.constraints = {"A1 >= 0", "A2 >= 0"};
  m.profiles.emplace(0, parse_expression("2*A1"));
  m.profiles.emplace(1, parse_expression("2*A2"));
  m.hamiltonian = parse_expression("A1 + A2");
  m.observables.emplace("H", parse_expression("A1 + A2"));
  m.observables.emplace("L", parse_expression("A1 - A2"));
  m.observables.emplace("chi1", parse_expression("chi1"));
  m.observables.emplace("chi2", parse_expression("chi2"));
  m.default_box = {{0, 10}, {0, 10}};
  m.default_hbar = hbar;
  validate(m);
  return m;
}

ModelDefinition model_pendulum(double hbar) {
  ModelDefinition m;
  m.name = "pendulum";
  m.kind = ModelKind::Potential;
  m.dof = 1;
  m.potential = parse_expression("1 - cos(alpha)");
  m.domain = Domain::Circle;
  m.default_hbar = hbar;
  m.notes = {"oscillation range 0 < E < 2",
             "H > 2: level sets have two connected components; not quantized"};
  validate(m);
  return m;
}

std::optional<ModelDefinition> builtin_model(std::string_view name, int n,
                                             double hbar,
                                             bool experimental_offsets) {
  if (name == "ho1d")
    return model_ho1d(hbar);
  if (name == "ho2d")
    return model_ho2d(hbar);
  if (name == "so3")
    return model_so3(n, hbar, experimental_offsets);
  if (name == "pendulum")
    return model_pendulum(hbar);
  return std::nullopt;
}

OneDofSystem one_dof_system(const ModelDefinition &m) {
  if (m.kind != ModelKind::Potential)
    throw ModelError("model '" + m.name + "' is not a potential model");
  return OneDofSystem(bind_constants(m.potential, m.constants), m.domain,
                      m.window);
}

// ---------------------------------------------------------------------------

QuantizedModel::QuantizedModel(const ModelDefinition &model,
                               LatticeConfig config, Box box,
                               LadderConvention convention, double tol)
    : model_(model), convention_(convention) {
  if (model_.kind != ModelKind::Lattice)
    throw ModelError("model '" + model_.name + "' is not a lattice model");
  validate(model_);
  if (config.dof() != model_.dof)
    throw ModelError("lattice configuration has wrong number of axes");
  if (box.empty())
    box = model_.default_box;
  if (box.size() != model_.dof)
    throw ModelError("box has " + std::to_string(box.size()) +
                     " axes, model '" + model_.name + "' has " +
                     std::to_string(model_.dof));
  bindings_ = with_hbar(model_.constants, config.hbar());
  LatticeRegion region =
      LatticeRegion::parse(model_.dof, model_.constraints, bindings_);
  space_ = enumerate_states(region, box, config);

  for (const auto &[axis, rho] : model_.profiles) {
    RadialProfile p(axis, bind_constants(rho, model_.constants), model_.dof);
    p.check_nonnegative(*space_);
    auto c = ladder_coefficients(p, *space_, convention_, tol);
    lowering_.emplace(axis, lowering_operator(c, space_));
    coefficients_.emplace(axis, std::move(c));
    profiles_.emplace(axis, std::move(p));
  }
}

std::vector<std::size_t> QuantizedModel::profile_axes() const {
  std::vector<std::size_t> out;
  for (const auto &[axis, p] : profiles_)
    out.push_back(axis);
  return out;
}

const RadialProfile &QuantizedModel::profile(std::size_t axis) const {
  auto it = profiles_.find(axis);
  if (it == profiles_.end())
    throw ModelError("axis " + std::to_string(axis + 1) +
                     " has no radial profile");
  return it->second;
}

const LadderCoefficients &
QuantizedModel::coefficients(std::size_t axis) const {
  auto it = coefficients_.find(axis);
  if (it == coefficients_.end())
    throw ModelError("axis " + std::to_string(axis + 1) +
                     " has no radial profile");
  return it->second;
}

const LatticeOperator &QuantizedModel::chi(std::size_t axis) const {
  auto it = lowering_.find(axis);
  if (it == lowering_.end())
    throw ModelError("axis " + std::to_string(axis + 1) +
                     " has no radial profile");
  return it->second;
}

LatticeOperator QuantizedModel::action(std::size_t axis) const {
  return diagonal_op(Expression::symbol(action_symbol(axis + 1)), space_);
}

Expression QuantizedModel::bind(const Expression &e) const {
  return bind_constants(e, bindings_);
}

LatticeOperator QuantizedModel::quantize(const Expression &e) const {
  check_symbols(e, model_, true, "observable '" + render(e) + "'");
  ObservableExpr split = split_observable(bind(e), model_.dof);
  return quantize_observable(split, space_, lowering_);
}

LatticeOperator QuantizedModel::observable(const std::string &name) const {
  if (name == "hamiltonian")
    return quantize(model_.hamiltonian);
  auto it = model_.observables.find(name);
  if (it == model_.observables.end())
    throw ModelError("model '" + model_.name + "' has no observable '" + name +
                     "'");
  return quantize(it->second);
}

} // namespace bshq
