#include "flocksim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flocksim/error.hpp"

namespace flocksim::linalg {

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

std::vector<double> cholesky_solve(std::vector<double> a, std::vector<double> b, std::size_t n) {
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a[i * n + i]));
  if (!(max_diag > 0.0) || !std::isfinite(max_diag)) {
    throw DivergenceError("normal equations are singular (zero Gram matrix)");
  }
  const double threshold = kPivotTolerance * max_diag;

  // Lower triangle of `a` is overwritten with L, A = L L^T.
  for (std::size_t j = 0; j < n; ++j) {
    double* row_j = &a[j * n];
    double d = row_j[j];
    for (std::size_t k = 0; k < j; ++k) d -= row_j[k] * row_j[k];
    if (!(d > threshold)) {
      throw DivergenceError("normal equations are singular or ill-conditioned (pivot " +
                            std::to_string(j) + ")");
    }
    const double ljj = std::sqrt(d);
    row_j[j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double* row_i = &a[i * n];
      double s = row_i[j];
      for (std::size_t k = 0; k < j; ++k) s -= row_i[k] * row_j[k];
      row_i[j] = s / ljj;
    }
  }
  // Forward then back substitution.
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= a[k * n + ii] * b[k];
    b[ii] = s / a[ii * n + ii];
  }
  for (double v : b) {
    if (!std::isfinite(v)) throw DivergenceError("least-squares solution is not finite");
  }
  return b;
}

}  // namespace flocksim::linalg
