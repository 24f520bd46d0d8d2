#ifndef BSHQ_LATTICE_HPP
#define BSHQ_LATTICE_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bshq/expression.hpp"

namespace bshq {

/// Integer label m = (m_1, ..., m_n) of a Bohr-Sommerfeld torus and of the
/// basis state sitting on it.
class QuantumNumberVector {
public:
  QuantumNumberVector() = default;
  explicit QuantumNumberVector(std::vector<std::int64_t> m) : m_(std::move(m)) {}
  QuantumNumberVector(std::initializer_list<std::int64_t> m) : m_(m) {}

  std::size_t size() const { return m_.size(); }
  std::int64_t operator[](std::size_t k) const { return m_[k]; }
  std::int64_t &operator[](std::size_t k) { return m_[k]; }
  const std::vector<std::int64_t> &values() const { return m_; }

  auto begin() const { return m_.begin(); }
  auto end() const { return m_.end(); }

  friend auto operator<=>(const QuantumNumberVector &,
                          const QuantumNumberVector &) = default;
  friend bool operator==(const QuantumNumberVector &,
                         const QuantumNumberVector &) = default;

  std::string to_string() const;

private:
  std::vector<std::int64_t> m_;
};

/// Lattice step offset d, used for operator bands (sigma_m -> sigma_{m+d}).
using Offset = QuantumNumberVector;

/// Action unit and lattice offsets. A_k(m) = (m_k + offset_k) * hbar.
///
/// Offsets other than zero are an experimental mode and are never switched
/// on unless passed explicitly.
class LatticeConfig {
public:
  LatticeConfig(double hbar, std::size_t dof);
  LatticeConfig(double hbar, std::vector<double> offsets);

  double hbar() const { return hbar_; }
  std::size_t dof() const { return offsets_.size(); }
  const std::vector<double> &offsets() const { return offsets_; }
  bool experimental() const;

  double action(std::size_t axis, std::int64_t m) const {
    return (static_cast<double>(m) + offsets_[axis]) * hbar_;
  }
  std::vector<double> actions(const QuantumNumberVector &m) const;

private:
  double hbar_;
  std::vector<double> offsets_;
};

/// One affine inequality  sum_k coefficients[k] * A_k + constant >= 0.
struct AffineConstraint {
  std::vector<double> coefficients;
  double constant = 0.0;
  std::string source;

  double evaluate(std::span<const double> actions) const;
};

/// Convex region of admissible actions: a conjunction of affine inequalities.
class LatticeRegion {
public:
  LatticeRegion(std::size_t dof, std::vector<AffineConstraint> constraints);

  /// Build from constraint strings of the form `lhs >= rhs`, `lhs <= rhs` or
  /// `lhs = rhs`. Named constants (including `hbar`) come from `constants`.
  static LatticeRegion parse(std::size_t dof,
                             const std::vector<std::string> &constraints,
                             const RealBindings &constants);

  std::size_t dof() const { return dof_; }
  const std::vector<AffineConstraint> &constraints() const {
    return constraints_;
  }

  bool contains(std::span<const double> actions) const;

private:
  std::size_t dof_;
  std::vector<AffineConstraint> constraints_;
};

/// Parse one constraint string into one or two affine inequalities.
std::vector<AffineConstraint> parse_constraint(std::string_view text,
                                               std::size_t dof,
                                               const RealBindings &constants);

struct AxisInterval {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

/// Finite integer truncation window, one closed interval per axis.
using Box = std::vector<AxisInterval>;

/// Parse "a:b[,a:b...]".
Box parse_box(std::string_view text);

/// True iff the Bohr-Sommerfeld torus labelled m is nonempty, i.e. A(m) lies
/// in the region.
bool torus_nonempty(const LatticeRegion &region, const LatticeConfig &config,
                    const QuantumNumberVector &m);

/// m with m_axis moved by direction (+1 or -1). axis is 0-based.
QuantumNumberVector shift_target(const QuantumNumberVector &m,
                                 std::size_t axis, int direction);

/// Enumerated basis of the truncated Hilbert space. Immutable.
class StateSpace {
public:
  StateSpace(LatticeRegion region, Box box, LatticeConfig config);

  const LatticeRegion &region() const { return region_; }
  const LatticeConfig &config() const { return config_; }
  const Box &box() const { return box_; }
  std::size_t dof() const { return region_.dof(); }
  std::size_t dimension() const { return states_.size(); }
  double hbar() const { return config_.hbar(); }

  const std::vector<QuantumNumberVector> &states() const { return states_; }
  const QuantumNumberVector &point_of(std::size_t index) const {
    return states_[index];
  }
  std::optional<std::size_t> index_of(const QuantumNumberVector &m) const;

  bool in_box(const QuantumNumberVector &m) const;
  bool nonempty(const QuantumNumberVector &m) const {
    return torus_nonempty(region_, config_, m);
  }
  std::vector<double> actions(std::size_t index) const {
    return config_.actions(states_[index]);
  }

  /// A state is on the truncation edge if some neighbour m +- e_k lies in the
  /// region but outside the box. Algebraic identities are exact only away from
  /// the edge.
  bool is_edge(std::size_t index) const { return edge_[index]; }

private:
  LatticeRegion region_;
  Box box_;
  LatticeConfig config_;
  std::vector<QuantumNumberVector> states_;
  std::vector<std::int64_t> box_to_state_;
  std::vector<bool> edge_;

  std::optional<std::size_t> box_position(const QuantumNumberVector &m) const;
};

using StateSpacePtr = std::shared_ptr<const StateSpace>;

StateSpacePtr enumerate_states(const LatticeRegion &region, const Box &box,
                               const LatticeConfig &config);

inline std::optional<std::size_t> state_index(const StateSpace &space,
                                              const QuantumNumberVector &m) {
  return space.index_of(m);
}

} // namespace bshq

#endif
