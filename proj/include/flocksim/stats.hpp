#pragma once

#include <span>
#include <vector>

namespace flocksim {

double mean(std::span<const double> values);
/// Unbiased (n - 1) variance.
double sample_variance(std::span<const double> values);
/// Population (n) standard deviation.
double population_stddev(std::span<const double> values);
/// Average of the two middle values for even sizes. Throws on empty input.
double median(std::span<const double> values);

/// I_x(a, b) by the modified Lentz continued fraction, using the symmetry
/// I_x(a, b) = 1 - I_{1-x}(b, a) to stay in the fast-converging region.
double regularized_incomplete_beta(double a, double b, double x);

/// P(T <= t) for Student's t with `df` (real, > 0) degrees of freedom.
double student_t_cdf(double t, double df);

struct TTestResult {
  double t = 0.0;
  double p = 0.5;
  double df = 0.0;
};

/// Welch's unequal-variance t-test of H1: mean(b) > mean(a).
/// t = (mean_b - mean_a) / sqrt(var_a / n_a + var_b / n_b), Welch-Satterthwaite
/// degrees of freedom, p = 1 - F(t). Throws std::invalid_argument when a group
/// has fewer than two values or both groups are constant with equal means.
TTestResult one_sided_t_test(std::span<const double> group_a, std::span<const double> group_b);

/// Spearman rank correlation with average ranks for ties. Returns 0 when
/// either side is constant.
double spearman_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace flocksim
