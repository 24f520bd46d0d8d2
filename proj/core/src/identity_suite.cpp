#include "bshq/identity_suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace bshq {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

class Suite {
public:
  Suite(const QuantizedModel &m, const IdentitySuiteOptions &o)
      : model_(m), opts_(o), space_(m.space()) {}

  void record(std::string name, double dev, double scale,
              std::string detail = {}) {
    IdentityCheck c;
    c.name = std::move(name);
    c.max_deviation = dev;
    c.tolerance = opts_.tol * std::max(1.0, scale);
    c.pass = std::isfinite(dev) && dev <= c.tolerance;
    c.detail = std::move(detail);
    out_.checks.push_back(std::move(c));
  }

  // Deviation of a - b over interior columns, scaled by the larger operand.
  void compare(std::string name, const LatticeOperator &a,
               const LatticeOperator &b, double scale) {
    record(std::move(name), interior_deviation(a, b), scale);
  }

  void gram() {
    const std::size_t d = space_->dimension();
    double worst = 0.0;
    auto pair = [&](std::size_t i, std::size_t j) {
      complex g = inner(StateVector::basis(space_, i),
                        StateVector::basis(space_, j));
      worst = std::max(worst, std::abs(g - complex(i == j ? 1.0 : 0.0)));
    };
    bool full = d <= opts_.full_gram_limit;
    for (std::size_t i = 0; i < d; ++i) {
      if (full) {
        for (std::size_t j = 0; j < d; ++j)
          pair(i, j);
      } else {
        pair(i, i);
        if (i + 1 < d)
          pair(i, i + 1);
      }
    }
    record("orthonormality", worst, 1.0,
           full ? "" : "neighbouring pairs only");
  }

  void unit_shifts() {
    const double hbar = model_.hbar();
    for (std::size_t k = 0; k < space_->dof(); ++k) {
      LatticeOperator a = unit_shift(space_, k, -1);
      LatticeOperator ad = unit_shift(space_, k, +1);
      for (std::size_t j = 0; j < space_->dof(); ++j) {
        LatticeOperator A = model_.action(j);
        double delta = j == k ? hbar : 0.0;
        double scale = A.max_abs();
        std::string tag = std::to_string(k + 1) + "][" + std::to_string(j + 1);
        compare("shift_commutator[" + tag + "]", commutator(a, A),
                complex(delta) * a, scale);
        compare("shift_adjoint_commutator[" + tag + "]", commutator(ad, A),
                complex(-delta) * ad, scale);
      }
    }
  }

  void chi_relations() {
    const double hbar = model_.hbar();
    const auto axes = model_.profile_axes();
    for (std::size_t k : axes) {
      const LatticeOperator &chi = model_.chi(k);
      LatticeOperator chibar = raising_operator(model_.coefficients(k), space_);
      std::string kk = std::to_string(k + 1);
      double cscale = chi.max_abs();

      for (std::size_t j = 0; j < space_->dof(); ++j) {
        LatticeOperator A = model_.action(j);
        double delta = j == k ? hbar : 0.0;
        double scale = cscale * std::max(1.0, A.max_abs());
        std::string tag = kk + "][" + std::to_string(j + 1);
        compare("chi_commutator[" + tag + "]", commutator(chi, A),
                complex(delta) * chi, scale);
        compare("chibar_commutator[" + tag + "]", commutator(chibar, A),
                complex(-delta) * chibar, scale);
      }

      // Q_A(Q_chi sigma_m) = (A_k(m) - hbar) Q_chi sigma_m.
      {
        LatticeOperator A = model_.action(k);
        double worst = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < space_->dimension(); ++i) {
          if (space_->is_edge(i))
            continue;
          StateVector v = apply(chi, StateVector::basis(space_, i));
          StateVector w = apply(A, v);
          double lowered = space_->actions(i)[k] - hbar;
          for (std::size_t r = 0; r < v.size(); ++r) {
            worst = std::max(worst, std::abs(w[r] - lowered * v[r]));
            scale = std::max(scale, std::abs(w[r]));
          }
        }
        record("shift_property[" + kk + "]", worst, scale);
      }

      // Entry-exact: no tolerance.
      {
        LatticeOperator diff = chibar - adjoint(chi);
        IdentityCheck c;
        c.name = "adjoint[" + kk + "]";
        c.max_deviation = diff.max_abs();
        c.tolerance = 0.0;
        c.pass = c.max_deviation == 0.0;
        out_.checks.push_back(std::move(c));
      }

      // Lower boundary: the lowered torus is empty.
      {
        double worst = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < space_->dimension(); ++i) {
          QuantumNumberVector target = shift_target(space_->states()[i], k, -1);
          if (torus_nonempty(space_->region(), space_->config(), target))
            continue;
          ++count;
          worst = std::max(
              worst, apply(chi, StateVector::basis(space_, i)).max_abs());
        }
        IdentityCheck c;
        c.name = "boundary_annihilation[" + kk + "]";
        c.max_deviation = worst;
        c.tolerance = 0.0;
        c.pass = worst == 0.0;
        c.detail = std::to_string(count) + " boundary states";
        out_.checks.push_back(std::move(c));
      }

      // Dirac: [Q_chi, Q_chibar] = hbar Q_G on interior states.
      {
        Expression g = bracket_profile(model_.profile(k));
        g = bind_constants(g, {{"hbar", hbar}});
        LatticeOperator rhs = complex(hbar) * diagonal_op(g, space_);
        double scale = cscale * cscale;
        compare("dirac_commutator[" + kk + "]", commutator(chi, chibar), rhs,
                scale);
      }

      for (std::size_t j : axes) {
        if (j <= k)
          continue;
        const LatticeOperator &chj = model_.chi(j);
        LatticeOperator chjbar =
            raising_operator(model_.coefficients(j), space_);
        LatticeOperator zero_op = zero(space_);
        std::string tag = kk + "][" + std::to_string(j + 1);
        double scale = cscale * chj.max_abs();
        compare("cross_commutator[" + tag + "]", commutator(chi, chj),
                zero_op, scale);
        compare("cross_conjugate_commutator[" + tag + "]",
                commutator(chi, chjbar), zero_op, scale);
      }
    }
  }

  void ladders() {
    for (std::size_t k : model_.profile_axes()) {
      ConsistencyReport r =
          verify_consistency(model_.coefficients(k), *space_,
                             model_.profile(k), opts_.ladder_tol);
      const double bound = opts_.ladder_tol * model_.hbar() * model_.hbar();
      if (r.defect > bound && r.pass) {
        r.pass = false;
        r.failures.push_back("Dirac defect " + fmt(r.defect) +
                             " exceeds " + fmt(bound));
      }
      out_.ladders.push_back(std::move(r));
    }
  }

  IdentitySuiteResult take() { return std::move(out_); }

private:
  const QuantizedModel &model_;
  const IdentitySuiteOptions &opts_;
  StateSpacePtr space_;
  IdentitySuiteResult out_;
};

} // namespace

bool IdentitySuiteResult::pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const IdentityCheck &c) { return c.pass; }) &&
         std::all_of(ladders.begin(), ladders.end(),
                     [](const ConsistencyReport &r) { return r.pass; });
}

IdentitySuiteResult run_identity_suite(const QuantizedModel &model,
                                       const IdentitySuiteOptions &opts) {
  Suite s(model, opts);
  s.gram();
  s.unit_shifts();
  s.chi_relations();
  s.ladders();
  return s.take();
}

} // namespace bshq
