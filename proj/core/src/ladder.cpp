#include "bshq/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "bshq/error.hpp"

namespace bshq {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// States along one axis line, bottom to top.
struct Line {
  std::vector<std::size_t> states;
  bool bounded_below = false; // lowered torus of the bottom state is empty
  bool bounded_above = false; // raised torus of the top state is empty
};

std::vector<Line> axis_lines(const StateSpace &space, std::size_t axis) {
  std::vector<Line> lines;
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    const auto &m = space.point_of(i);
    auto below = shift_target(m, axis, -1);
    if (space.index_of(below))
      continue;
    Line line;
    line.bounded_below = !space.nonempty(below);
    std::size_t cur = i;
    for (;;) {
      line.states.push_back(cur);
      auto above = shift_target(space.point_of(cur), axis, +1);
      auto next = space.index_of(above);
      if (!next) {
        line.bounded_above = !space.nonempty(above);
        break;
      }
      cur = *next;
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

} // namespace

RadialProfile::RadialProfile(std::size_t axis, Expression rho, std::size_t dof)
    : axis_(axis), rho_(std::move(rho)) {
  if (axis_ >= dof)
    throw ModelError("profile axis " + std::to_string(axis_ + 1) +
                     " exceeds the model's " + std::to_string(dof) +
                     " degrees of freedom");
  const std::string own = action_symbol(axis_ + 1);
  for (const auto &s : symbols_of(rho_)) {
    if (s == own || s == "hbar")
      continue;
    if (action_axis(s) || chi_axis(s) || s == "alpha")
      throw ModelError("profile must depend only on " + own + " (found " + s +
                       " in '" + render(rho_) + "')");
    throw ModelError("profile '" + render(rho_) + "' references unbound symbol '" +
                     s + "'");
  }
  drho_ = differentiate(rho_, own);
}

double RadialProfile::rho_at(double action, double hbar) const {
  RealBindings b{{action_symbol(axis_ + 1), action}, {"hbar", hbar}};
  return eval_real(rho_, b);
}

double RadialProfile::drho_at(double action, double hbar) const {
  RealBindings b{{action_symbol(axis_ + 1), action}, {"hbar", hbar}};
  return eval_real(drho_, b);
}

void RadialProfile::check_nonnegative(const StateSpace &space) const {
  const double h = space.hbar();
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    double a = space.config().action(axis_, space.point_of(i)[axis_]);
    double r = rho_at(a, h);
    if (r < -1e-12 * std::max(1.0, h * h))
      throw ModelError("profile '" + render(rho_) + "' is negative (" + fmt(r) +
                       ") at state " + space.point_of(i).to_string());
  }
}

std::string_view to_string(LadderConvention c) {
  switch (c) {
  case LadderConvention::Dirac:
    return "dirac";
  case LadderConvention::SemiclassicalSource:
    return "semiclassical-source";
  case LadderConvention::SemiclassicalMidpoint:
    return "semiclassical-midpoint";
  }
  return "?";
}

LadderConvention parse_convention(std::string_view text) {
  if (text == "dirac")
    return LadderConvention::Dirac;
  if (text == "semiclassical-source")
    return LadderConvention::SemiclassicalSource;
  if (text == "semiclassical-midpoint")
    return LadderConvention::SemiclassicalMidpoint;
  throw ModelError("unknown ladder convention '" + std::string(text) + "'");
}

Expression bracket_profile(const RadialProfile &p) { return p.drho(); }

LadderCoefficients solve_dirac_recursion(const RadialProfile &p,
                                         const StateSpace &space, double tol) {
  const std::size_t axis = p.axis();
  const double h = space.hbar();
  const auto &cfg = space.config();
  const double threshold = tol * h * h;

  LadderCoefficients out;
  out.axis = axis;
  out.convention = LadderConvention::Dirac;
  out.beta.assign(space.dimension(), 0.0);
  out.b.assign(space.dimension(), 0.0);

  auto action_of = [&](std::size_t i) {
    return cfg.action(axis, space.point_of(i)[axis]);
  };

  for (const Line &line : axis_lines(space, axis)) {
    std::size_t bottom = line.states.front();
    double beta = line.bounded_below ? 0.0 : p.rho_at(action_of(bottom), h);
    for (std::size_t s : line.states) {
      out.beta[s] = beta;
      beta += h * p.drho_at(action_of(s), h);
    }
    if (line.bounded_below && line.bounded_above) {
      // beta now holds |c_top|^2, which the empty raised torus forces to
      // zero. The profile must also vanish on the boundary tori, which is
      // where the lattice boundary meets the degenerate orbits.
      std::size_t top = line.states.back();
      double r = std::abs(beta);
      r = std::max(r, std::abs(p.rho_at(action_of(bottom), h)));
      r = std::max(r, std::abs(p.rho_at(action_of(top), h)));
      out.residual = std::max(out.residual, r);
    }
  }

  for (std::size_t i = 0; i < space.dimension(); ++i) {
    double beta = out.beta[i];
    if (beta < -threshold)
      throw ModelError("profile '" + render(p.rho()) +
                       "' is not quantizable on this lattice: beta = " +
                       fmt(beta) + " < 0 at state " +
                       space.point_of(i).to_string());
    if (beta < 0.0)
      out.beta[i] = beta = 0.0;
    out.b[i] = std::sqrt(beta);
  }

  if (out.residual > threshold)
    throw InconsistentQuantization(
        out.residual, "inconsistent quantization on axis " +
                          std::to_string(axis + 1) + ": residual " +
                          fmt(out.residual) + " exceeds tolerance " +
                          fmt(threshold));
  return out;
}

LadderCoefficients semiclassical_coefficients(const RadialProfile &p,
                                              const StateSpace &space,
                                              LadderConvention convention) {
  if (convention == LadderConvention::Dirac)
    throw ModelError("semiclassical_coefficients needs a semiclassical rule");
  const std::size_t axis = p.axis();
  const double h = space.hbar();
  const auto &cfg = space.config();
  const double shift =
      convention == LadderConvention::SemiclassicalMidpoint ? 0.5 * h : 0.0;

  LadderCoefficients out;
  out.axis = axis;
  out.convention = convention;
  out.beta.assign(space.dimension(), 0.0);
  out.b.assign(space.dimension(), 0.0);
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    const auto &m = space.point_of(i);
    if (!space.nonempty(shift_target(m, axis, -1)))
      continue;
    double rho = p.rho_at(cfg.action(axis, m[axis]) - shift, h);
    if (rho < 0.0) {
      ++out.clamped;
      rho = 0.0;
    }
    out.beta[i] = rho;
    out.b[i] = std::sqrt(rho);
  }
  return out;
}

LadderCoefficients ladder_coefficients(const RadialProfile &p,
                                       const StateSpace &space,
                                       LadderConvention convention,
                                       double tol) {
  if (convention == LadderConvention::Dirac)
    return solve_dirac_recursion(p, space, tol);
  return semiclassical_coefficients(p, space, convention);
}

LatticeOperator lowering_operator(const LadderCoefficients &c,
                                  StateSpacePtr space) {
  return shift_op(std::move(space), c.axis, -1, std::span<const double>(c.b));
}

LatticeOperator raising_operator(const LadderCoefficients &c,
                                 StateSpacePtr space) {
  std::vector<double> up(space->dimension(), 0.0);
  for (std::size_t i = 0; i < space->dimension(); ++i) {
    auto above = space->index_of(shift_target(space->point_of(i), c.axis, +1));
    if (above)
      up[i] = c.b[*above];
  }
  return shift_op(std::move(space), c.axis, +1, std::span<const double>(up));
}

ConsistencyReport verify_consistency(const LadderCoefficients &c,
                                     const StateSpace &space,
                                     const RadialProfile &p, double tol) {
  const std::size_t axis = c.axis;
  const double h = space.hbar();
  const auto &cfg = space.config();
  const double threshold = tol * h * h;

  ConsistencyReport r;
  r.axis = axis;
  r.convention = c.convention;
  r.residual = c.residual;

  if (c.beta.size() != space.dimension() || c.b.size() != space.dimension())
    throw ModelError("ladder coefficients do not match the state space");

  for (std::size_t i = 0; i < space.dimension(); ++i) {
    const auto &m = space.point_of(i);
    if (!space.nonempty(shift_target(m, axis, -1)) && c.b[i] != 0.0) {
      r.boundary_zeros = false;
      r.failures.push_back("nonzero lowering coefficient " + fmt(c.b[i]) +
                           " at boundary state " + m.to_string());
    }
    if (c.beta[i] < 0.0 || c.b[i] < 0.0 || !std::isfinite(c.b[i])) {
      r.positivity = false;
      r.failures.push_back("negative coefficient at state " + m.to_string());
    }
    auto above = space.index_of(shift_target(m, axis, +1));
    if (!above)
      continue;
    double g = p.drho_at(cfg.action(axis, m[axis]), h);
    double d = std::abs((c.beta[*above] - c.beta[i]) - h * g);
    r.defect = std::max(r.defect, d);
  }

  r.pass = r.boundary_zeros && r.positivity;
  if (c.convention == LadderConvention::Dirac) {
    if (r.defect > threshold) {
      r.pass = false;
      r.failures.push_back("Dirac defect " + fmt(r.defect) + " exceeds " +
                           fmt(threshold));
    }
    if (r.residual > threshold) {
      r.pass = false;
      r.failures.push_back("residual " + fmt(r.residual) + " exceeds " +
                           fmt(threshold));
    }
  }
  return r;
}

} // namespace bshq
