#ifndef BSHQ_IDENTITY_SUITE_HPP
#define BSHQ_IDENTITY_SUITE_HPP

#include <string>
#include <vector>

#include "bshq/ladder.hpp"
#include "bshq/models.hpp"

namespace bshq {

struct IdentityCheck {
  std::string name;
  bool pass = true;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct IdentitySuiteOptions {
  /// Relative tolerance for the algebraic identities; the absolute bound is
  /// tol * max(1, scale) with scale the size of the terms being compared.
  double tol = 1e-12;
  /// Tolerance (in units of hbar^2) for the ladder defect and residual.
  double ladder_tol = kDefaultLadderTolerance;
  /// The Gram check is O(d^3); above this dimension only neighbouring pairs
  /// are compared.
  std::size_t full_gram_limit = 512;
};

struct IdentitySuiteResult {
  std::vector<IdentityCheck> checks;
  std::vector<ConsistencyReport> ladders;
  bool pass() const;
};

/// Operator identities on non-edge states: orthonormality of the basis,
/// [a_k, Q_A_j] = delta hbar a_k and [a_k^+, Q_A_j] = -delta hbar a_k^+,
/// [Q_chi_k, Q_A_j] = delta hbar Q_chi_k and the conjugate relation, the
/// shift property Q_A_j Q_chi_j sigma_m = (A_j(m) - hbar) Q_chi_j sigma_m,
/// Q_chibar = Q_chi^+, boundary annihilation, [Q_chi_k, Q_chibar_k] =
/// hbar Q_{G_k}, vanishing cross-axis commutators, and the ladder
/// consistency report for every axis.
///
/// The ladder report always checks the Dirac defect, whatever convention the
/// model was quantized with.
IdentitySuiteResult run_identity_suite(const QuantizedModel &model,
                                       const IdentitySuiteOptions &opts = {});

} // namespace bshq

#endif
