#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace flocksim::linalg {

/// Pivots at or below this fraction of the largest diagonal entry are treated
/// as zero, i.e. the matrix is reported singular.
inline constexpr double kPivotTolerance = 1e-10;

double dot(std::span<const double> a, std::span<const double> b) noexcept;

/// Solves A w = b for a symmetric positive-definite n x n matrix stored
/// row-major, via an in-place Cholesky factorization of a copy.
/// Throws DivergenceError when A is singular or numerically indefinite.
std::vector<double> cholesky_solve(std::vector<double> matrix, std::vector<double> rhs,
                                   std::size_t n);

}  // namespace flocksim::linalg
