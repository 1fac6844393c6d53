#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "flocksim/domain.hpp"

namespace flocksim {

/// Weights of a linear reward model f(x) = w . x.
struct Hypothesis {
  std::vector<double> weights;

  static Hypothesis zeros(std::size_t dimension) { return {std::vector<double>(dimension, 0.0)}; }
  std::size_t dimension() const noexcept { return weights.size(); }

  bool operator==(const Hypothesis&) const = default;
};

/// Insertion-ordered (x, y) rows of uniform dimension.
class Dataset {
 public:
  explicit Dataset(std::size_t dimension) : dimension_(dimension) {}

  /// Throws DimensionError on a width mismatch, std::invalid_argument on
  /// non-finite values.
  void add(std::span<const double> x, double y);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return targets_.size(); }
  bool empty() const noexcept { return targets_.empty(); }

  std::span<const double> x(std::size_t row) const noexcept {
    return {features_.data() + row * dimension_, dimension_};
  }
  double y(std::size_t row) const noexcept { return targets_[row]; }
  std::span<const double> targets() const noexcept { return targets_; }

  /// Rows [begin, end) as a new dataset.
  Dataset slice(std::size_t begin, std::size_t end) const;

 private:
  std::size_t dimension_;
  std::vector<double> features_;
  std::vector<double> targets_;
};

/// Running sufficient statistics X^T X and X^T y. Lets policies refit on
/// their full history without keeping every row.
class NormalEquations {
 public:
  explicit NormalEquations(std::size_t dimension);

  void add(std::span<const double> x, double y);
  void add(const Dataset& data);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t count() const noexcept { return count_; }
  /// Row-major dimension x dimension, fully populated.
  std::vector<double> gram() const;
  const std::vector<double>& xty() const noexcept { return xty_; }

 private:
  std::size_t dimension_;
  std::size_t count_ = 0;
  std::vector<double> upper_;  // upper triangle, row-major packed into a full square
  std::vector<double> xty_;
};

double predict(const Hypothesis& h, std::span<const double> x);

/// One gradient step on 1/2 (y - w.x)^2: w' = w + eta (y - w.x) x.
Hypothesis sgd_step(const Hypothesis& h, std::span<const double> x, double y, double eta);

/// Ordinary least squares through the normal equations. Throws
/// DivergenceError when X^T X is singular or ill-conditioned.
Hypothesis fit_ols(const Dataset& data);
Hypothesis fit_ols(const NormalEquations& stats);

/// Solves (X^T X + lambda I) w = X^T y. The bias coefficient is penalized like
/// every other one.
Hypothesis fit_ridge(const Dataset& data, double lambda);
Hypothesis fit_ridge(const NormalEquations& stats, double lambda);

double soft_threshold(double z, double gamma) noexcept;

struct LassoOptions {
  double tol = 1e-6;
  int max_iter = 1000;
};

struct LassoFit {
  Hypothesis hypothesis;
  bool converged = false;
  int iterations = 0;
};

/// Cyclic coordinate descent on (1 / 2n) |y - X w|^2 + lambda |w|_1.
/// Stops when the largest coefficient change in a sweep is below `tol`.
LassoFit fit_lasso(const Dataset& data, double lambda, LassoOptions options = {});

/// Elementwise mean. Throws std::invalid_argument on an empty list.
Hypothesis average_hypotheses(std::span<const Hypothesis> hypotheses);

/// (1 - adviser_weight) agent + adviser_weight adviser.
Hypothesis blend(const Hypothesis& agent, const Hypothesis& adviser, double adviser_weight);

/// Dataset -> hypothesis, the knob offline analyses are parameterized by.
using Fitter = std::function<Hypothesis(const Dataset&)>;

enum class FitterKind { Ols, Ridge, Lasso };

struct FitterSpec {
  FitterKind kind = FitterKind::Ridge;
  double lambda = 1e-3;

  /// Parses "ols", "ridge" or "lasso".
  static FitterKind parse_kind(const std::string& name);
};

Fitter make_fitter(FitterSpec spec);

}  // namespace flocksim
