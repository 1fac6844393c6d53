#include "flocksim/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flocksim/error.hpp"
#include "flocksim/linalg.hpp"

namespace flocksim {

namespace {

void require_dims(std::size_t expected, std::size_t actual, const char* what) {
  if (expected != actual) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(expected) +
                         ", got " + std::to_string(actual));
  }
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
}

}  // namespace

// ---------------------------------------------------------------------------

void Dataset::add(std::span<const double> x, double y) {
  require_dims(dimension_, x.size(), "Dataset::add");
  if (!all_finite(x) || !std::isfinite(y)) {
    throw std::invalid_argument("Dataset::add: non-finite value");
  }
  features_.insert(features_.end(), x.begin(), x.end());
  targets_.push_back(y);
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  end = std::min(end, size());
  Dataset out(dimension_);
  for (std::size_t r = begin; r < end; ++r) out.add(x(r), y(r));
  return out;
}

NormalEquations::NormalEquations(std::size_t dimension)
    : dimension_(dimension), upper_(dimension * dimension, 0.0), xty_(dimension, 0.0) {}

void NormalEquations::add(std::span<const double> x, double y) {
  require_dims(dimension_, x.size(), "NormalEquations::add");
  const std::size_t n = dimension_;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;  // hash buckets are mostly empty
    double* row = &upper_[i * n];
    for (std::size_t j = i; j < n; ++j) row[j] += xi * x[j];
    xty_[i] += xi * y;
  }
  ++count_;
}

void NormalEquations::add(const Dataset& data) {
  for (std::size_t r = 0; r < data.size(); ++r) add(data.x(r), data.y(r));
}

std::vector<double> NormalEquations::gram() const {
  const std::size_t n = dimension_;
  std::vector<double> full(upper_);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) full[i * n + j] = full[j * n + i];
  return full;
}

// ---------------------------------------------------------------------------

double predict(const Hypothesis& h, std::span<const double> x) {
  require_dims(h.dimension(), x.size(), "predict");
  return linalg::dot(h.weights, x);
}

Hypothesis sgd_step(const Hypothesis& h, std::span<const double> x, double y, double eta) {
  require_dims(h.dimension(), x.size(), "sgd_step");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("sgd_step: eta must be positive");
  if (!all_finite(x) || !std::isfinite(y) || !all_finite(h.weights)) {
    throw std::invalid_argument("sgd_step: non-finite input");
  }
  const double step = eta * (y - linalg::dot(h.weights, x));
  Hypothesis out = h;
  for (std::size_t i = 0; i < x.size(); ++i) out.weights[i] += step * x[i];
  return out;
}

Hypothesis fit_ols(const NormalEquations& stats) {
  if (stats.count() == 0) throw std::invalid_argument("fit_ols: empty dataset");
  return {linalg::cholesky_solve(stats.gram(), stats.xty(), stats.dimension())};
}

Hypothesis fit_ols(const Dataset& data) {
  NormalEquations stats(data.dimension());
  stats.add(data);
  return fit_ols(stats);
}

Hypothesis fit_ridge(const NormalEquations& stats, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("fit_ridge: lambda must be non-negative");
  }
  const std::size_t n = stats.dimension();
  std::vector<double> a = stats.gram();
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] += lambda;
  return {linalg::cholesky_solve(std::move(a), stats.xty(), n)};
}

Hypothesis fit_ridge(const Dataset& data, double lambda) {
  NormalEquations stats(data.dimension());
  stats.add(data);
  return fit_ridge(stats, lambda);
}

double soft_threshold(double z, double gamma) noexcept {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

LassoFit fit_lasso(const Dataset& data, double lambda, LassoOptions options) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("fit_lasso: lambda must be non-negative");
  }
  if (data.empty()) throw std::invalid_argument("fit_lasso: empty dataset");
  const std::size_t d = data.dimension();
  const std::size_t rows = data.size();
  const double n = static_cast<double>(rows);

  // Column-major copy so each coordinate update walks contiguous memory.
  std::vector<double> columns(d * rows);
  for (std::size_t r = 0; r < rows; ++r) {
    auto x = data.x(r);
    for (std::size_t j = 0; j < d; ++j) columns[j * rows + r] = x[j];
  }
  std::vector<double> col_sq(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t r = 0; r < rows; ++r) col_sq[j] += columns[j * rows + r] * columns[j * rows + r];
    col_sq[j] /= n;
  }

  LassoFit fit{Hypothesis::zeros(d), false, 0};
  auto& w = fit.hypothesis.weights;
  std::vector<double> residual(data.targets().begin(), data.targets().end());

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    double max_change = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (col_sq[j] == 0.0) continue;  // all-zero column stays at 0
      const double* col = &columns[j * rows];
      double rho = 0.0;
      for (std::size_t r = 0; r < rows; ++r) rho += col[r] * residual[r];
      rho = rho / n + col_sq[j] * w[j];
      const double updated = soft_threshold(rho, lambda) / col_sq[j];
      const double change = updated - w[j];
      if (change != 0.0) {
        for (std::size_t r = 0; r < rows; ++r) residual[r] -= change * col[r];
        w[j] = updated;
      }
      max_change = std::max(max_change, std::abs(change));
    }
    fit.iterations = iter;
    if (!std::isfinite(max_change)) throw std::invalid_argument("fit_lasso: non-finite data");
    if (max_change < options.tol) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

Hypothesis average_hypotheses(std::span<const Hypothesis> hypotheses) {
  if (hypotheses.empty()) throw std::invalid_argument("average_hypotheses: empty list");
  const std::size_t d = hypotheses.front().dimension();
  Hypothesis mean = Hypothesis::zeros(d);
  for (const auto& h : hypotheses) {
    require_dims(d, h.dimension(), "average_hypotheses");
    for (std::size_t i = 0; i < d; ++i) mean.weights[i] += h.weights[i];
  }
  const double inv = 1.0 / static_cast<double>(hypotheses.size());
  for (double& v : mean.weights) v *= inv;
  return mean;
}

Hypothesis blend(const Hypothesis& agent, const Hypothesis& adviser, double adviser_weight) {
  require_dims(agent.dimension(), adviser.dimension(), "blend");
  if (!(adviser_weight >= 0.0 && adviser_weight <= 1.0)) {
    throw std::invalid_argument("blend: adviser weight must lie in [0, 1]");
  }
  Hypothesis out = agent;
  for (std::size_t i = 0; i < out.dimension(); ++i) {
    out.weights[i] = (1.0 - adviser_weight) * agent.weights[i] + adviser_weight * adviser.weights[i];
  }
  return out;
}

FitterKind FitterSpec::parse_kind(const std::string& name) {
  if (name == "ols") return FitterKind::Ols;
  if (name == "ridge") return FitterKind::Ridge;
  if (name == "lasso") return FitterKind::Lasso;
  throw std::invalid_argument("unknown fitter '" + name + "' (expected ols, ridge or lasso)");
}

Fitter make_fitter(FitterSpec spec) {
  switch (spec.kind) {
    case FitterKind::Ols:
      return [](const Dataset& d) { return fit_ols(d); };
    case FitterKind::Ridge:
      return [lambda = spec.lambda](const Dataset& d) { return fit_ridge(d, lambda); };
    case FitterKind::Lasso:
      return [lambda = spec.lambda](const Dataset& d) { return fit_lasso(d, lambda).hypothesis; };
  }
  throw std::invalid_argument("unknown fitter kind");
}

}  // namespace flocksim
