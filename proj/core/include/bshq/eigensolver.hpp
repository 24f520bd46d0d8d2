#ifndef BSHQ_EIGENSOLVER_HPP
#define BSHQ_EIGENSOLVER_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "bshq/expression.hpp"
#include "bshq/operator.hpp"

namespace bshq {

inline constexpr std::size_t kMaxDenseDimension = 4096;

/// Eigenvalues of a dense real symmetric matrix (row-major, n x n) by cyclic
/// Jacobi rotations. Sweep order is fixed, so results are reproducible bit for
/// bit. Returned ascending.
std::vector<double> symmetric_eigenvalues(std::vector<double> matrix,
                                          std::size_t n, double tol = 1e-12);

/// Eigenvalues of a dense Hermitian matrix (row-major), ascending.
std::vector<double> hermitian_eigenvalues(std::span<const complex> matrix,
                                          std::size_t n, double tol = 1e-12);

/// Spectrum of a Hermitian lattice operator. Throws NumericalError if the
/// operator deviates from its adjoint by more than tol, naming the worst
/// entry.
std::vector<double> eigenvalues_hermitian(const LatticeOperator &op,
                                          double tol = 1e-12);

} // namespace bshq

#endif
